#include "ro/ast.hpp"

namespace ro::ast {

std::shared_ptr<Expr> make_expr(ExprKind kind) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    return e;
}

std::shared_ptr<Stmt> make_stmt(StmtKind kind) {
    auto s = std::make_shared<Stmt>();
    s->kind = kind;
    return s;
}

std::shared_ptr<Command> make_command(CmdKind kind) {
    auto c = std::make_shared<Command>();
    c->kind = kind;
    return c;
}

} // namespace ro::ast
