#pragma once

#include <string>
#include <vector>

#include "ro/ast.hpp"

namespace ro::lang {

/// Canonical textual form: fully parenthesized, uppercase keywords. Parsing
/// the output reproduces the AST (round-trip), and the form is stable, so it
/// doubles as the serialization of realization ASTs.
std::string print_expr(const ast::Expr& e);
std::string print_stmt(const ast::Stmt& s);
std::string print_stmts(const std::vector<ast::StmtPtr>& body);
std::string print_command(const ast::Command& c);
std::string print_commands(const std::vector<ast::CommandPtr>& cmds);

std::string print_typeref(const ast::TypeRef& t);
std::string print_signature(const ast::SignatureDef& sig);

} // namespace ro::lang
