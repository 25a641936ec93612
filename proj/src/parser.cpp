#include "ro/parser.hpp"

#include <algorithm>
#include <cctype>

#include "ro/error.hpp"
#include "ro/lexer.hpp"

namespace ro::lang {

using namespace ro::ast;

namespace {

std::string upper(const std::string& s) {
    std::string r = s;
    std::transform(r.begin(), r.end(), r.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return r;
}

// Keywords that terminate or continue an enclosing construct; an identifier
// with one of these spellings cannot start a primary expression.
bool is_structural_kw(const std::string& up) {
    static const char* kws[] = {
        "WHERE",  "UNION",     "MINUS",   "INTERSECT", "INTERSEPT", "TIMES",  "JOIN",
        "EXPAND", "SUMMARIZE", "BY",      "ADD",       "AS",        "AND",    "OR",
        "NOT",    "IS",        "OF",      "NULL",      "EXIST",     "SELECT", "FROM",
        "IF",     "THEN",      "ELSE",    "DO",        "WHILE",     "RETURN", "BEGIN",
        "END",    "INSERT",    "UPDATE",  "DELETE",    "SET",       "INTO",   "VALUE",
        "NEW",    "DESTROY",   "EXECUTE", "CONSTRAIN", "REALIZE",   "DROP",   "ALTER",
        "CREATE", "DESCRIBE",  "TUPLE",   "CLASS",     "EXTENDED",  "STORED", "ON",
        "COMMIT", "ROLLBACK",  "TRANSACTION",
    };
    for (const char* k : kws)
        if (up == k) return true;
    return false;
}

struct Parser {
    std::vector<Token> toks;
    std::size_t pos = 0;
    int ov_depth = 0; // > 0 while parsing retrieval-by-value conditions

    explicit Parser(const std::string& text) : toks(lex(text)) {}

    const Token& cur() const { return toks[pos]; }
    const Token& peek(std::size_t n = 1) const {
        return toks[std::min(pos + n, toks.size() - 1)];
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = cur();
        std::string got = t.kind == Tok::Ident ? "'" + t.text + "'" : token_name(t.kind);
        throw Error(ErrorCode::SyntaxError, "line " + std::to_string(t.line) + ":" +
                                                std::to_string(t.col) + ": expected " + expected +
                                                ", got " + got);
    }

    SourceSpan span() const { return {cur().line, cur().col}; }

    bool at(Tok k) const { return cur().kind == k; }
    bool at_kw(const char* kw) const { return at(Tok::Ident) && upper(cur().text) == kw; }

    Token take(Tok k, const char* what) {
        if (!at(k)) fail(what);
        return toks[pos++];
    }
    void take_kw(const char* kw) {
        if (!at_kw(kw)) fail(std::string("'") + kw + "'");
        ++pos;
    }
    bool eat(Tok k) {
        if (!at(k)) return false;
        ++pos;
        return true;
    }
    bool eat_kw(const char* kw) {
        if (!at_kw(kw)) return false;
        ++pos;
        return true;
    }

    std::string ident(const char* what = "identifier") {
        if (!at(Tok::Ident)) fail(what);
        if (is_structural_kw(upper(cur().text))) fail(what);
        return toks[pos++].text;
    }

    std::vector<std::string> dotted_name() {
        std::vector<std::string> segs{ident("attribute name")};
        while (at(Tok::Dot) && peek().kind == Tok::Ident &&
               !is_structural_kw(upper(peek().text))) {
            ++pos;
            segs.push_back(toks[pos++].text);
        }
        return segs;
    }

    // --- Expressions ------------------------------------------------------

    ExprPtr parse_set_expr() {
        ExprPtr e = parse_or();
        for (;;) {
            BinOp op;
            if (eat_kw("UNION")) op = BinOp::Union;
            else if (eat_kw("MINUS")) op = BinOp::Minus;
            else if (eat_kw("INTERSECT") || eat_kw("INTERSEPT")) op = BinOp::Intersect;
            else if (eat_kw("TIMES")) op = BinOp::Times;
            else if (eat_kw("JOIN")) op = BinOp::Join;
            else if (at_kw("WHERE")) {
                auto sp = span();
                ++pos;
                auto n = make_expr(ExprKind::Where);
                n->span = sp;
                n->a = e;
                n->b = parse_or();
                e = n;
                continue;
            } else if (at_kw("EXPAND")) {
                auto sp = span();
                ++pos;
                auto n = make_expr(ExprKind::Expand);
                n->span = sp;
                n->a = e;
                n->path = dotted_name();
                e = n;
                continue;
            } else {
                return e;
            }
            auto sp = span();
            auto n = make_expr(ExprKind::Binary);
            n->span = sp;
            n->op = op;
            n->a = e;
            n->b = parse_or();
            e = n;
        }
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (at_kw("OR")) {
            auto sp = span();
            ++pos;
            auto n = make_expr(ExprKind::Binary);
            n->span = sp;
            n->op = BinOp::Or;
            n->a = e;
            n->b = parse_and();
            e = n;
        }
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_not();
        while (at_kw("AND")) {
            auto sp = span();
            ++pos;
            auto n = make_expr(ExprKind::Binary);
            n->span = sp;
            n->op = BinOp::And;
            n->a = e;
            n->b = parse_not();
            e = n;
        }
        return e;
    }

    ExprPtr parse_not() {
        if (at_kw("NOT")) {
            auto sp = span();
            ++pos;
            // NOT IS NULL prefix spelling: `x NOT IS NULL` is handled in
            // parse_cmp; a leading NOT is plain negation.
            auto n = make_expr(ExprKind::Not);
            n->span = sp;
            n->a = parse_not();
            return n;
        }
        return parse_cmp();
    }

    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        auto sp = span();
        if (at_kw("NOT") && upper(peek().text) == "IS") {
            ++pos;
            ++pos;
            return parse_is_tail(e, sp, true);
        }
        if (eat_kw("IS")) return parse_is_tail(e, sp, false);
        if (eat_kw("OF")) {
            auto n = make_expr(ExprKind::OfType);
            n->span = sp;
            n->a = e;
            n->name = take(Tok::Ident, "type name").text;
            return n;
        }
        BinOp op;
        if (eat(Tok::Eq)) op = BinOp::Eq;
        else if (eat(Tok::Ne)) op = BinOp::Ne;
        else if (eat(Tok::Lt)) op = BinOp::Lt;
        else if (eat(Tok::Le)) op = BinOp::Le;
        else if (at(Tok::Gt)) {
            // Inside retrieval-by-value conditions a '>' with no right operand
            // is the closing bracket, not a comparison.
            if (ov_depth > 0) {
                std::size_t save = pos;
                ++pos;
                try {
                    auto rhs = parse_add();
                    auto n = make_expr(ExprKind::Binary);
                    n->span = sp;
                    n->op = BinOp::Gt;
                    n->a = e;
                    n->b = rhs;
                    return n;
                } catch (const Error&) {
                    pos = save;
                    return e;
                }
            }
            ++pos;
            op = BinOp::Gt;
        }
        else if (eat(Tok::Ge)) op = BinOp::Ge;
        else return e;
        auto n = make_expr(ExprKind::Binary);
        n->span = sp;
        n->op = op;
        n->a = e;
        n->b = parse_add();
        return n;
    }

    ExprPtr parse_is_tail(ExprPtr e, SourceSpan sp, bool negated) {
        bool inner_not = eat_kw("NOT"); // `x IS NOT NULL`
        if (eat_kw("NULL")) {
            auto n = make_expr(ExprKind::IsNull);
            n->span = sp;
            n->a = e;
            n->negated = negated || inner_not;
            return n;
        }
        auto n = make_expr(ExprKind::IsType);
        n->span = sp;
        n->a = e;
        n->name = take(Tok::Ident, "type name or NULL").text;
        if (negated || inner_not) {
            auto m = make_expr(ExprKind::Not);
            m->span = sp;
            m->a = n;
            return m;
        }
        return n;
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        for (;;) {
            BinOp op;
            if (eat(Tok::Plus)) op = BinOp::Add;
            else if (eat(Tok::Minus)) op = BinOp::Sub;
            else return e;
            auto n = make_expr(ExprKind::Binary);
            n->op = op;
            n->a = e;
            n->b = parse_mul();
            e = n;
        }
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        for (;;) {
            BinOp op;
            if (eat(Tok::Star)) op = BinOp::Mul;
            else if (eat(Tok::Slash)) op = BinOp::Div;
            else return e;
            auto n = make_expr(ExprKind::Binary);
            n->op = op;
            n->a = e;
            n->b = parse_unary();
            e = n;
        }
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            auto sp = span();
            ++pos;
            auto n = make_expr(ExprKind::Binary);
            n->span = sp;
            n->op = BinOp::Sub;
            auto zero = make_expr(ExprKind::Lit);
            zero->lit = ScalarValue::of_int(0);
            n->a = zero;
            n->b = parse_unary();
            return n;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (at(Tok::Dot) && peek().kind == Tok::Ident &&
                !is_structural_kw(upper(peek().text))) {
                auto sp = span();
                ++pos;
                std::string name = toks[pos++].text;
                if (at(Tok::LParen)) {
                    auto n = make_expr(ExprKind::Call);
                    n->span = sp;
                    n->a = e;
                    n->name = name;
                    n->args = parse_args();
                    e = n;
                } else if (e->kind == ExprKind::Path) {
                    auto n = make_expr(ExprKind::Path);
                    *n = *e;
                    n->path.push_back(name);
                    e = n;
                } else {
                    auto n = make_expr(ExprKind::Member);
                    n->span = sp;
                    n->a = e;
                    n->name = name;
                    e = n;
                }
                continue;
            }
            if (at(Tok::LBracket)) {
                auto sp = span();
                ++pos;
                auto n = make_expr(ExprKind::Project);
                n->span = sp;
                n->a = e;
                if (eat(Tok::Bang)) {
                    n->proj_drop = true;
                    do {
                        ProjItem it;
                        it.path = dotted_name();
                        n->proj.push_back(std::move(it));
                    } while (eat(Tok::Comma));
                } else {
                    do {
                        ProjItem it;
                        it.path = dotted_name();
                        if (eat_kw("AS")) it.rename = ident("attribute name");
                        n->proj.push_back(std::move(it));
                    } while (eat(Tok::Comma));
                }
                take(Tok::RBracket, "']'");
                e = n;
                continue;
            }
            if (at(Tok::Lt) && path_like(*e)) {
                std::size_t save = pos;
                if (auto ov = try_parse_ov(e)) {
                    e = *ov;
                    continue;
                }
                pos = save;
            }
            return e;
        }
    }

    static bool path_like(const Expr& e) {
        return e.kind == ExprKind::Path || e.kind == ExprKind::Member;
    }

    // Retrieval-by-value `base<cond, ...>` vs comparison `base < x`: attempted
    // only after a path, confirmed only when a matching '>' closes the
    // condition list and the token after it cannot start a new primary
    // (otherwise `a < 3 AND b > 2` would misparse).
    std::optional<ExprPtr> try_parse_ov(ExprPtr base) {
        auto sp = span();
        ++pos; // '<'
        std::vector<ExprPtr> conds;
        ++ov_depth;
        try {
            if (!at(Tok::Gt)) {
                do conds.push_back(parse_or());
                while (eat(Tok::Comma));
            }
            if (!eat(Tok::Gt)) {
                --ov_depth;
                return std::nullopt;
            }
        } catch (const Error&) {
            --ov_depth;
            return std::nullopt;
        }
        --ov_depth;
        // A condition that is a bare literal can never be a retrieval
        // condition; `t<Quantity` was a comparison after all.
        for (const auto& c : conds)
            if (c->kind == ExprKind::Lit) return std::nullopt;
        switch (cur().kind) {
        case Tok::IntLit:
        case Tok::FloatLit:
        case Tok::StringLit:
        case Tok::DateLit:
        case Tok::LParen:
            return std::nullopt;
        case Tok::Ident:
            if (!is_structural_kw(upper(cur().text))) return std::nullopt;
            break;
        default:
            break;
        }
        auto n = make_expr(ExprKind::OvRetrieve);
        n->span = sp;
        n->a = base;
        n->conds = std::move(conds);
        return ExprPtr(n);
    }

    std::vector<ExprPtr> parse_args() {
        take(Tok::LParen, "'('");
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
            do args.push_back(parse_set_expr());
            while (eat(Tok::Comma));
        }
        take(Tok::RParen, "')'");
        return args;
    }

    ExprPtr parse_primary() {
        auto sp = span();
        if (at(Tok::LParen)) {
            ++pos;
            ExprPtr e = parse_set_expr();
            take(Tok::RParen, "')'");
            return e;
        }
        if (at(Tok::IntLit)) {
            auto n = make_expr(ExprKind::Lit);
            n->span = sp;
            n->lit = ScalarValue::of_int(toks[pos++].ival);
            return n;
        }
        if (at(Tok::FloatLit)) {
            auto n = make_expr(ExprKind::Lit);
            n->span = sp;
            n->lit = ScalarValue::of_float(toks[pos++].fval);
            return n;
        }
        if (at(Tok::StringLit)) {
            auto n = make_expr(ExprKind::Lit);
            n->span = sp;
            n->lit = ScalarValue::of_string(toks[pos++].text);
            return n;
        }
        if (at(Tok::DateLit)) {
            auto n = make_expr(ExprKind::Lit);
            n->span = sp;
            n->lit = ScalarValue::of_date(toks[pos++].dval);
            return n;
        }
        if (at(Tok::Ident)) {
            std::string up = upper(cur().text);
            if (up == "NULL" || up == "TRUE" || up == "FALSE") {
                auto n = make_expr(ExprKind::Lit);
                n->span = sp;
                n->lit = up == "NULL" ? ScalarValue::undefined()
                                      : ScalarValue::of_bool(up == "TRUE");
                ++pos;
                return n;
            }
            if (up == "THIS") {
                ++pos;
                auto n = make_expr(ExprKind::Path);
                n->span = sp;
                n->path = {"this"};
                return n;
            }
            if (up == "OBJECT" && peek().kind == Tok::LParen) {
                ++pos;
                ++pos;
                auto n = make_expr(ExprKind::ObjectOf);
                n->span = sp;
                n->a = parse_set_expr();
                take(Tok::RParen, "')'");
                return n;
            }
            if (up == "EXIST") {
                ++pos;
                auto n = make_expr(ExprKind::Exist);
                n->span = sp;
                if (at(Tok::LParen)) {
                    ++pos;
                    n->a = parse_set_expr();
                    take(Tok::RParen, "')'");
                } else {
                    n->a = parse_set_expr();
                }
                return n;
            }
            if (up == "SUMMARIZE") {
                ++pos;
                return parse_summarize(sp);
            }
            if (up == "SELECT") {
                ++pos;
                return parse_select_sugar(sp);
            }
            if (is_structural_kw(up)) fail("expression");
            std::string name = toks[pos++].text;
            if (at(Tok::LParen)) {
                auto n = make_expr(ExprKind::Call);
                n->span = sp;
                n->name = name;
                n->args = parse_args();
                return n;
            }
            auto n = make_expr(ExprKind::Path);
            n->span = sp;
            n->path = {name};
            return n;
        }
        fail("expression");
    }

    relalg::Aggregate parse_agg_name() {
        if (eat_kw("SUM")) return relalg::Aggregate::Sum;
        if (eat_kw("COUNT")) return relalg::Aggregate::Count;
        fail("SUM or COUNT");
    }

    ExprPtr parse_summarize(SourceSpan sp) {
        auto n = make_expr(ExprKind::Summarize);
        n->span = sp;
        n->a = parse_postfix();
        if (eat_kw("BY")) {
            do {
                if (at_kw("ADD")) break; // tolerate `BY a, ADD ...`
                n->by.push_back(dotted_name());
            } while (eat(Tok::Comma));
        }
        take_kw("ADD");
        do {
            AggAdd add;
            add.agg = parse_agg_name();
            take(Tok::LParen, "'('");
            add.source = parse_add();
            take(Tok::RParen, "')'");
            take_kw("AS");
            add.result = ident("result attribute name");
            n->adds.push_back(std::move(add));
        } while (eat(Tok::Comma));
        return n;
    }

    // SELECT agg(attr) [AS name] FROM expr: shim over single-group SUMMARIZE.
    ExprPtr parse_select_sugar(SourceSpan sp) {
        auto n = make_expr(ExprKind::Summarize);
        n->span = sp;
        AggAdd add;
        add.agg = parse_agg_name();
        take(Tok::LParen, "'('");
        auto path = dotted_name();
        take(Tok::RParen, "')'");
        add.result = eat_kw("AS") ? ident("result attribute name") : path.back();
        auto src = make_expr(ExprKind::Path);
        src->path = path;
        add.source = src;
        n->adds.push_back(std::move(add));
        take_kw("FROM");
        n->a = parse_set_expr();
        return n;
    }

    // --- Statements -------------------------------------------------------

    std::vector<StmtPtr> parse_stmt_block() {
        // Either one statement or BEGIN ... END.
        if (eat_kw("BEGIN")) {
            std::vector<StmtPtr> body;
            while (!eat_kw("END")) {
                if (eat(Tok::Semi)) continue;
                if (at(Tok::End)) fail("'END'");
                body.push_back(parse_stmt());
            }
            return body;
        }
        return {parse_stmt()};
    }

    StmtPtr parse_stmt() {
        auto sp = span();
        if (eat_kw("IF")) {
            auto s = make_stmt(StmtKind::If);
            s->span = sp;
            s->cond = parse_or();
            take_kw("THEN");
            s->then_block = parse_stmt_block();
            if (eat_kw("ELSE")) s->else_block = parse_stmt_block();
            return s;
        }
        if (eat_kw("DO")) {
            auto s = make_stmt(StmtKind::DoWhile);
            s->span = sp;
            while (!at_kw("WHILE")) {
                if (eat(Tok::Semi)) continue;
                if (at(Tok::End)) fail("'WHILE'");
                s->body.push_back(parse_stmt());
            }
            take_kw("WHILE");
            s->cond = parse_or();
            take(Tok::Semi, "';'");
            return s;
        }
        if (eat_kw("RETURN")) {
            auto s = make_stmt(StmtKind::Return);
            s->span = sp;
            if (!at(Tok::Semi)) s->expr = parse_set_expr();
            take(Tok::Semi, "';'");
            return s;
        }
        if (eat_kw("INSERT")) {
            auto s = make_stmt(StmtKind::Insert);
            s->span = sp;
            eat_kw("INTO");
            s->target = parse_postfix();
            take_kw("VALUE");
            s->expr = parse_set_expr();
            take(Tok::Semi, "';'");
            return s;
        }
        if (eat_kw("UPDATE")) {
            auto s = make_stmt(StmtKind::Update);
            s->span = sp;
            s->target = parse_postfix();
            take_kw("SET");
            do {
                std::string attr = ident("attribute name");
                take(Tok::Eq, "'='");
                s->sets.emplace_back(std::move(attr), parse_or());
            } while (eat(Tok::Comma));
            if (eat_kw("WHERE")) s->cond = parse_or();
            take(Tok::Semi, "';'");
            return s;
        }
        if (eat_kw("DELETE")) {
            auto s = make_stmt(StmtKind::Delete);
            s->span = sp;
            take_kw("FROM");
            s->target = parse_postfix();
            if (eat_kw("WHERE")) s->cond = parse_or();
            take(Tok::Semi, "';'");
            return s;
        }
        if (at_kw("BEGIN")) {
            // A bare block is an If with a TRUE condition; keeps Stmt lean.
            auto s = make_stmt(StmtKind::If);
            s->span = sp;
            auto t = make_expr(ExprKind::Lit);
            t->lit = ScalarValue::of_bool(true);
            s->cond = t;
            s->then_block = parse_stmt_block();
            return s;
        }
        ExprPtr target = parse_postfix();
        if (eat(Tok::Assign)) {
            auto s = make_stmt(StmtKind::Assign);
            s->span = sp;
            s->target = target;
            s->expr = parse_set_expr();
            take(Tok::Semi, "';'");
            return s;
        }
        if (target->kind == ExprKind::Call) {
            auto s = make_stmt(StmtKind::Exec);
            s->span = sp;
            s->expr = target;
            take(Tok::Semi, "';'");
            return s;
        }
        fail("':=' or method call");
    }

    // --- DDL pieces -------------------------------------------------------

    TypeRef parse_typeref() {
        TypeRef t;
        if (eat_kw("SET")) {
            take_kw("OF");
            t.is_set = true;
        }
        t.name = take(Tok::Ident, "type name").text;
        return t;
    }

    std::vector<std::string> parse_fieldlist() {
        std::vector<std::string> fields;
        if (eat(Tok::LParen)) {
            do fields.push_back(ident("field name"));
            while (eat(Tok::Comma));
            take(Tok::RParen, "')'");
        } else {
            do fields.push_back(ident("field name"));
            while (at(Tok::Comma) && peek().kind == Tok::Ident &&
                   !is_structural_kw(upper(peek().text)) && (++pos, true));
        }
        return fields;
    }

    bool at_key_kw() const {
        return at_kw("GLOBALKEY") || at_kw("LOCALKEY") || at_kw("FOREIGNKEY") ||
               at_kw("GLOBAL") || at_kw("LOCAL") || at_kw("FOREIGN");
    }

    KeyDef parse_keydef() {
        KeyDef k;
        if (eat_kw("GLOBALKEY") || (eat_kw("GLOBAL") && (take_kw("KEY"), true))) {
            k.kind = relalg::KeyKind::Global;
            k.fields = parse_fieldlist();
            return k;
        }
        if (eat_kw("LOCALKEY") || (eat_kw("LOCAL") && (take_kw("KEY"), true))) {
            k.kind = relalg::KeyKind::Local;
            k.fields = parse_fieldlist();
            return k;
        }
        if (eat_kw("FOREIGNKEY") || (eat_kw("FOREIGN") && (take_kw("KEY"), true))) {
            k.kind = relalg::KeyKind::Foreign;
            k.fields = parse_fieldlist();
            take_kw("ON");
            k.fk_type = take(Tok::Ident, "type name").text;
            take(Tok::Dot, "'.'");
            if (eat(Tok::LParen)) {
                do k.fk_fields.push_back(ident("field name"));
                while (eat(Tok::Comma));
                take(Tok::RParen, "')'");
            } else {
                k.fk_fields.push_back(ident("field name"));
            }
            return k;
        }
        fail("key definition");
    }

    std::vector<KeyDef> parse_constrain() {
        std::vector<KeyDef> keys;
        if (!eat_kw("CONSTRAIN")) return keys;
        if (!at_key_kw()) {
            // Reversed word order: CONSTRAIN fields AS GLOBAL|LOCAL [KEY]
            KeyDef k;
            k.fields = parse_fieldlist();
            take_kw("AS");
            if (eat_kw("GLOBAL")) k.kind = relalg::KeyKind::Global;
            else if (eat_kw("LOCAL")) k.kind = relalg::KeyKind::Local;
            else fail("GLOBAL or LOCAL");
            eat_kw("KEY");
            keys.push_back(std::move(k));
            return keys;
        }
        while (at_key_kw()) keys.push_back(parse_keydef());
        return keys;
    }

    SignatureDef parse_signature() {
        SignatureDef sig;
        sig.name = take(Tok::Ident, "component name").text;
        if (at(Tok::LParen)) {
            sig.is_method = true;
            ++pos;
            if (!at(Tok::RParen)) {
                do {
                    ParamDef p;
                    p.name = ident("parameter name");
                    if (eat_kw("AS")) p.type = parse_typeref();
                    else if (at(Tok::Ident) && !is_structural_kw(upper(cur().text)))
                        p.type = parse_typeref();
                    else if (at_kw("SET"))
                        p.type = parse_typeref();
                    sig.params.push_back(std::move(p));
                } while (eat(Tok::Comma));
            }
            take(Tok::RParen, "')'");
        }
        if (at_kw("SET") || (at(Tok::Ident) && !is_structural_kw(upper(cur().text))))
            sig.value_type = parse_typeref();
        sig.keys = parse_constrain();
        return sig;
    }

    // --- Commands ---------------------------------------------------------

    std::vector<CommandPtr> parse_script() {
        std::vector<CommandPtr> out;
        for (;;) {
            while (eat(Tok::Semi)) {}
            if (at(Tok::End)) return out;
            parse_one_command(out);
        }
    }

    void parse_one_command(std::vector<CommandPtr>& out) {
        auto sp = span();
        if (eat_kw("DESCRIBE")) {
            take_kw("TUPLE");
            auto c = make_command(CmdKind::DescribeTuple);
            c->span = sp;
            c->name = take(Tok::Ident, "tuple type name").text;
            parse_body_sigs(*c);
            eat(Tok::Semi);
            out.push_back(c);
            return;
        }
        if (eat_kw("CREATE")) {
            if (eat_kw("CLASS")) {
                auto c = make_command(CmdKind::CreateClass);
                c->span = sp;
                c->name = take(Tok::Ident, "class name").text;
                if (eat_kw("EXTENDED")) {
                    do c->parents.push_back(take(Tok::Ident, "parent class name").text);
                    while (eat(Tok::Comma));
                }
                parse_body_sigs(*c);
                eat(Tok::Semi);
                out.push_back(c);
                return;
            }
            auto c = make_command(CmdKind::CreateGlobal);
            c->span = sp;
            c->name = take(Tok::Ident, "variable name").text;
            take_kw("AS");
            c->global_type = parse_typeref();
            c->global_keys = parse_constrain();
            if (eat_kw("REALIZE")) {
                take_kw("AS");
                take_kw("STORED");
            }
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("ALTER")) {
            take_kw("CLASS");
            std::string cls = take(Tok::Ident, "class name").text;
            bool any = false;
            while (!eat(Tok::Semi)) {
                auto csp = span();
                if (eat_kw("ADD")) {
                    auto c = make_command(CmdKind::AlterAdd);
                    c->span = csp;
                    c->name = cls;
                    c->sigs.push_back(parse_signature());
                    out.push_back(c);
                } else if (eat_kw("DROP")) {
                    auto c = make_command(CmdKind::AlterDrop);
                    c->span = csp;
                    c->name = cls;
                    c->realize_names.push_back(take(Tok::Ident, "component name").text);
                    out.push_back(c);
                } else if (eat_kw("ALTER")) {
                    auto c = make_command(CmdKind::AlterAlter);
                    c->span = csp;
                    c->name = cls;
                    c->sigs.push_back(parse_signature());
                    out.push_back(c);
                } else if (eat_kw("REALIZE")) {
                    out.push_back(parse_realize_clause(cls, csp));
                } else {
                    fail("ADD, DROP, ALTER, REALIZE or ';'");
                }
                any = true;
            }
            if (!any) fail("ALTER CLASS clause");
            return;
        }
        if (eat_kw("DROP")) {
            auto c = make_command(eat_kw("CLASS") ? CmdKind::DropClass : CmdKind::DropGlobal);
            c->span = sp;
            c->name = take(Tok::Ident, "name").text;
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("NEW")) {
            auto c = make_command(CmdKind::New);
            c->span = sp;
            c->name = take(Tok::Ident, "class name").text;
            if (at(Tok::LParen)) c->args = parse_args();
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("DESTROY")) {
            auto c = make_command(CmdKind::Destroy);
            c->span = sp;
            c->expr = parse_set_expr();
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("EXECUTE")) {
            auto c = make_command(CmdKind::Execute);
            c->span = sp;
            c->expr = parse_postfix();
            if (c->expr->kind != ExprKind::Call) fail("method call");
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("INSERT")) {
            auto c = make_command(CmdKind::Insert);
            c->span = sp;
            eat_kw("INTO");
            c->target = parse_postfix();
            take_kw("VALUE");
            c->expr = parse_set_expr();
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("UPDATE")) {
            auto c = make_command(CmdKind::Update);
            c->span = sp;
            c->target = parse_postfix();
            take_kw("SET");
            do {
                std::string attr = ident("attribute name");
                take(Tok::Eq, "'='");
                c->sets.emplace_back(std::move(attr), parse_or());
            } while (eat(Tok::Comma));
            if (eat_kw("WHERE")) c->cond = parse_or();
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("DELETE")) {
            auto c = make_command(CmdKind::Delete);
            c->span = sp;
            take_kw("FROM");
            c->target = parse_postfix();
            if (eat_kw("WHERE")) c->cond = parse_or();
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("BEGIN")) {
            take_kw("TRANSACTION");
            auto c = make_command(CmdKind::Begin);
            c->span = sp;
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("COMMIT")) {
            auto c = make_command(CmdKind::Commit);
            c->span = sp;
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("ROLLBACK")) {
            auto c = make_command(CmdKind::Rollback);
            c->span = sp;
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        if (eat_kw("IF")) {
            auto c = make_command(CmdKind::IfCmd);
            c->span = sp;
            c->cond = parse_or();
            take_kw("THEN");
            c->then_cmd = parse_txn_verdict();
            if (eat_kw("ELSE")) c->else_cmd = parse_txn_verdict();
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        // Assignment or bare query.
        ExprPtr e = parse_set_expr();
        if (eat(Tok::Assign)) {
            auto c = make_command(CmdKind::Assign);
            c->span = sp;
            c->target = e;
            c->expr = parse_set_expr();
            take(Tok::Semi, "';'");
            out.push_back(c);
            return;
        }
        auto c = make_command(CmdKind::Query);
        c->span = sp;
        c->expr = e;
        take(Tok::Semi, "';'");
        out.push_back(c);
    }

    CommandPtr parse_txn_verdict() {
        auto sp = span();
        if (eat_kw("COMMIT")) {
            auto c = make_command(CmdKind::Commit);
            c->span = sp;
            return c;
        }
        if (eat_kw("ROLLBACK")) {
            auto c = make_command(CmdKind::Rollback);
            c->span = sp;
            return c;
        }
        fail("COMMIT or ROLLBACK");
    }

    CommandPtr parse_realize_clause(const std::string& cls, SourceSpan sp) {
        auto c = make_command(CmdKind::Realize);
        c->span = sp;
        c->name = cls;
        if (eat(Tok::Star)) {
            c->realize_all = true;
        } else {
            do c->realize_names.push_back(take(Tok::Ident, "component name").text);
            while (eat(Tok::Comma));
        }
        take_kw("AS");
        if (eat_kw("STORED")) {
            c->impl_kind = ImplKind::Stored;
        } else if (eat_kw("BEGIN")) {
            c->impl_kind = ImplKind::Body;
            std::vector<StmtPtr> body;
            while (!eat_kw("END")) {
                if (eat(Tok::Semi)) continue;
                if (at(Tok::End)) fail("'END'");
                body.push_back(parse_stmt());
            }
            c->impl_body = std::move(body);
        } else {
            c->impl_kind = ImplKind::Expr;
            c->impl_expr = parse_set_expr();
        }
        return c;
    }

    void parse_body_sigs(Command& c) {
        take(Tok::LBrace, "'{'");
        while (!eat(Tok::RBrace)) {
            if (eat(Tok::Semi)) continue;
            if (at(Tok::End)) fail("'}'");
            c.sigs.push_back(parse_signature());
            if (!at(Tok::RBrace)) take(Tok::Semi, "';'");
        }
        // Class-level keys are written on components; collect none here.
    }
};

} // namespace

std::vector<CommandPtr> parse_commands(const std::string& text) {
    Parser p(text);
    return p.parse_script();
}

CommandPtr parse_command(const std::string& text) {
    auto cmds = parse_commands(text);
    if (cmds.size() != 1)
        throw Error(ErrorCode::SyntaxError,
                    "expected exactly one command, got " + std::to_string(cmds.size()));
    return cmds.front();
}

ExprPtr parse_expr(const std::string& text) {
    Parser p(text);
    ExprPtr e = p.parse_set_expr();
    if (!p.at(Tok::End)) p.fail("end of input");
    return e;
}

std::vector<StmtPtr> parse_statements(const std::string& text) {
    Parser p(text);
    std::vector<StmtPtr> out;
    while (!p.at(Tok::End)) {
        if (p.eat(Tok::Semi)) continue;
        out.push_back(p.parse_stmt());
    }
    return out;
}

} // namespace ro::lang
