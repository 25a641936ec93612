#include "ro/printer.hpp"

#include <sstream>

#include "ro/error.hpp"

namespace ro::lang {

using namespace ro::ast;

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string r;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) r += sep;
        r += parts[i];
    }
    return r;
}

std::string print_path(const std::vector<std::string>& segs) { return join(segs, "."); }

std::string print_lit(const ScalarValue& v) {
    if (v.is_undefined()) return "NULL";
    switch (v.storage().index()) {
    case 1: return std::to_string(v.as_int());
    case 2: {
        std::ostringstream os;
        os.precision(17);
        os << v.as_float();
        std::string s = os.str();
        if (s.find_first_of("eEin") != std::string::npos) return s; // loudly unparseable
        if (s.find('.') == std::string::npos) s += ".0";
        return s;
    }
    case 3: {
        std::string r = "\"";
        for (char c : v.as_string()) {
            if (c == '"' || c == '\\') r += '\\';
            if (c == '\n') {
                r += "\\n";
                continue;
            }
            r += c;
        }
        return r + "\"";
    }
    case 4: return v.as_bool() ? "TRUE" : "FALSE";
    case 5: {
        char buf[16];
        Date d = v.as_date();
        std::snprintf(buf, sizeof buf, "#%02d.%02d.%04d#", d.day, d.month, d.year);
        return buf;
    }
    case 6: return "OIDLIT"; // never appears in source syntax
    }
    return "?";
}

const char* binop_text(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "<>";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "AND";
    case BinOp::Or: return "OR";
    case BinOp::Union: return "UNION";
    case BinOp::Minus: return "MINUS";
    case BinOp::Intersect: return "INTERSECT";
    case BinOp::Times: return "TIMES";
    case BinOp::Join: return "JOIN";
    }
    return "?";
}

std::string expr_str(const Expr& e);

// Every compound form self-parenthesizes, so postfix/operand positions can
// embed any printed expression directly.
std::string paren_unless_tight(const Expr& e) { return expr_str(e); }

std::string expr_str(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Path: return print_path(e.path);
    case ExprKind::Lit: return print_lit(e.lit);
    case ExprKind::Binary:
        return "(" + expr_str(*e.a) + " " + binop_text(e.op) + " " + expr_str(*e.b) + ")";
    case ExprKind::Not: return "(NOT " + expr_str(*e.a) + ")";
    case ExprKind::IsNull:
        return "(" + expr_str(*e.a) + (e.negated ? " NOT IS NULL)" : " IS NULL)");
    case ExprKind::Exist: return "EXIST(" + expr_str(*e.a) + ")";
    case ExprKind::ObjectOf: return "Object(" + expr_str(*e.a) + ")";
    case ExprKind::Where:
        return "(" + expr_str(*e.a) + " WHERE " + expr_str(*e.b) + ")";
    case ExprKind::Project: {
        std::vector<std::string> items;
        for (const auto& it : e.proj) {
            std::string s = print_path(it.path);
            if (it.rename) s += " AS " + *it.rename;
            items.push_back(std::move(s));
        }
        return paren_unless_tight(*e.a) + "[" + (e.proj_drop ? "!" : "") + join(items, ", ") +
               "]";
    }
    case ExprKind::Summarize: {
        std::string s = "SUMMARIZE " + paren_unless_tight(*e.a);
        if (!e.by.empty()) {
            std::vector<std::string> bys;
            for (const auto& p : e.by) bys.push_back(print_path(p));
            s += " BY " + join(bys, ", ");
        }
        std::vector<std::string> adds;
        for (const auto& a : e.adds)
            adds.push_back(std::string(a.agg == relalg::Aggregate::Sum ? "SUM" : "COUNT") +
                           "(" + expr_str(*a.source) + ") AS " + a.result);
        return "(" + s + " ADD " + join(adds, ", ") + ")";
    }
    case ExprKind::Expand:
        return "(" + expr_str(*e.a) + " EXPAND " + print_path(e.path) + ")";
    case ExprKind::OvRetrieve: {
        if (e.conds.empty()) return paren_unless_tight(*e.a) + "< >"; // '<>' would lex as not-equal
        std::vector<std::string> conds;
        for (const auto& c : e.conds) conds.push_back(expr_str(*c));
        return paren_unless_tight(*e.a) + "<" + join(conds, ", ") + ">";
    }
    case ExprKind::Call: {
        std::vector<std::string> args;
        for (const auto& a : e.args) args.push_back(expr_str(*a));
        std::string recv = e.a ? paren_unless_tight(*e.a) + "." : "";
        return recv + e.name + "(" + join(args, ", ") + ")";
    }
    case ExprKind::Member: return paren_unless_tight(*e.a) + "." + e.name;
    case ExprKind::IsType: return "(" + expr_str(*e.a) + " IS " + e.name + ")";
    case ExprKind::OfType: return "(" + expr_str(*e.a) + " OF " + e.name + ")";
    case ExprKind::UpdateMap: {
        std::vector<std::string> sets;
        for (const auto& [p, v] : e.sets) sets.push_back(print_path(p) + " = " + expr_str(*v));
        return "UPDATEMAP(" + expr_str(*e.a) + " SET " + join(sets, ", ") + ")";
    }
    }
    return "?";
}

std::string block_str(const std::vector<StmtPtr>& block) {
    if (block.size() == 1) return print_stmt(*block.front());
    std::string s = "BEGIN ";
    for (const auto& st : block) s += print_stmt(*st) + " ";
    return s + "END";
}

std::string keydef_str(const KeyDef& k) {
    std::string s;
    switch (k.kind) {
    case relalg::KeyKind::Global: s = "GLOBALKEY "; break;
    case relalg::KeyKind::Local: s = "LOCALKEY "; break;
    case relalg::KeyKind::Foreign: s = "FOREIGNKEY "; break;
    }
    if (k.fields.size() == 1) s += k.fields[0];
    else s += "(" + join(k.fields, ", ") + ")";
    if (k.kind == relalg::KeyKind::Foreign) {
        s += " ON " + k.fk_type + ".";
        if (k.fk_fields.size() == 1) s += k.fk_fields[0];
        else s += "(" + join(k.fk_fields, ", ") + ")";
    }
    return s;
}

std::string keys_str(const std::vector<KeyDef>& keys) {
    if (keys.empty()) return "";
    std::string s = " CONSTRAIN";
    for (const auto& k : keys) s += " " + keydef_str(k);
    return s;
}

std::string sets_str(const std::vector<std::pair<std::string, ExprPtr>>& sets) {
    std::vector<std::string> parts;
    for (const auto& [a, v] : sets) parts.push_back(a + " = " + expr_str(*v));
    return join(parts, ", ");
}

} // namespace

std::string print_expr(const Expr& e) { return expr_str(e); }

std::string print_stmt(const Stmt& s) {
    switch (s.kind) {
    case StmtKind::Assign:
        return expr_str(*s.target) + " := " + expr_str(*s.expr) + ";";
    case StmtKind::Insert:
        return "INSERT INTO " + expr_str(*s.target) + " VALUE " + expr_str(*s.expr) + ";";
    case StmtKind::Delete:
        return "DELETE FROM " + expr_str(*s.target) +
               (s.cond ? " WHERE " + expr_str(*s.cond) : "") + ";";
    case StmtKind::Update:
        return "UPDATE " + expr_str(*s.target) + " SET " + sets_str(s.sets) +
               (s.cond ? " WHERE " + expr_str(*s.cond) : "") + ";";
    case StmtKind::If: {
        std::string r = "IF " + expr_str(*s.cond) + " THEN " + block_str(s.then_block);
        if (!s.else_block.empty()) r += " ELSE " + block_str(s.else_block);
        return r;
    }
    case StmtKind::DoWhile: {
        std::string r = "DO ";
        for (const auto& st : s.body) r += print_stmt(*st) + " ";
        return r + "WHILE " + expr_str(*s.cond) + ";";
    }
    case StmtKind::Return:
        return s.expr ? "RETURN " + expr_str(*s.expr) + ";" : "RETURN;";
    case StmtKind::Exec:
        return expr_str(*s.expr) + ";";
    }
    return "?";
}

std::string print_stmts(const std::vector<StmtPtr>& body) {
    std::vector<std::string> parts;
    for (const auto& s : body) parts.push_back(print_stmt(*s));
    return join(parts, " ");
}

std::string print_typeref(const TypeRef& t) {
    return t.is_set ? "SET OF " + t.name : t.name;
}

std::string print_signature(const SignatureDef& sig) {
    std::string s = sig.name;
    if (sig.is_method) {
        std::vector<std::string> ps;
        for (const auto& p : sig.params)
            ps.push_back(p.type.name.empty() ? p.name : p.name + " AS " + print_typeref(p.type));
        s += "(" + join(ps, ", ") + ")";
    }
    if (!sig.value_type.name.empty()) s += " " + print_typeref(sig.value_type);
    s += keys_str(sig.keys);
    return s;
}

std::string print_command(const Command& c) {
    switch (c.kind) {
    case CmdKind::DescribeTuple: {
        std::string s = "DESCRIBE TUPLE " + c.name + " { ";
        for (const auto& sig : c.sigs) s += print_signature(sig) + "; ";
        return s + "}";
    }
    case CmdKind::CreateClass: {
        std::string s = "CREATE CLASS " + c.name;
        if (!c.parents.empty()) s += " EXTENDED " + join(c.parents, ", ");
        s += " { ";
        for (const auto& sig : c.sigs) s += print_signature(sig) + "; ";
        return s + "}";
    }
    case CmdKind::AlterAdd:
        return "ALTER CLASS " + c.name + " ADD " + print_signature(c.sigs.at(0)) + ";";
    case CmdKind::AlterDrop:
        return "ALTER CLASS " + c.name + " DROP " + c.realize_names.at(0) + ";";
    case CmdKind::AlterAlter:
        return "ALTER CLASS " + c.name + " ALTER " + print_signature(c.sigs.at(0)) + ";";
    case CmdKind::Realize: {
        std::string s = "ALTER CLASS " + c.name + " REALIZE " +
                        (c.realize_all ? "*" : join(c.realize_names, ", ")) + " AS ";
        switch (c.impl_kind) {
        case ImplKind::Stored: s += "STORED"; break;
        case ImplKind::Expr: s += expr_str(*c.impl_expr); break;
        case ImplKind::Body: s += "BEGIN " + print_stmts(c.impl_body) + " END"; break;
        }
        return s + ";";
    }
    case CmdKind::DropClass: return "DROP CLASS " + c.name + ";";
    case CmdKind::CreateGlobal:
        return "CREATE " + c.name + " AS " + print_typeref(c.global_type) +
               keys_str(c.global_keys) + ";";
    case CmdKind::DropGlobal: return "DROP " + c.name + ";";
    case CmdKind::New: {
        std::vector<std::string> args;
        for (const auto& a : c.args) args.push_back(expr_str(*a));
        return "NEW " + c.name + "(" + join(args, ", ") + ");";
    }
    case CmdKind::Destroy: return "DESTROY " + expr_str(*c.expr) + ";";
    case CmdKind::Execute: return "EXECUTE " + expr_str(*c.expr) + ";";
    case CmdKind::Insert:
        return "INSERT INTO " + expr_str(*c.target) + " VALUE " + expr_str(*c.expr) + ";";
    case CmdKind::Update:
        return "UPDATE " + expr_str(*c.target) + " SET " + sets_str(c.sets) +
               (c.cond ? " WHERE " + expr_str(*c.cond) : "") + ";";
    case CmdKind::Delete:
        return "DELETE FROM " + expr_str(*c.target) +
               (c.cond ? " WHERE " + expr_str(*c.cond) : "") + ";";
    case CmdKind::Assign:
        return expr_str(*c.target) + " := " + expr_str(*c.expr) + ";";
    case CmdKind::Query: return expr_str(*c.expr) + ";";
    case CmdKind::Begin: return "BEGIN TRANSACTION;";
    case CmdKind::Commit: return "COMMIT;";
    case CmdKind::Rollback: return "ROLLBACK;";
    case CmdKind::IfCmd: {
        std::string s = "IF " + expr_str(*c.cond) + " THEN ";
        s += c.then_cmd->kind == CmdKind::Commit ? "COMMIT" : "ROLLBACK";
        if (c.else_cmd)
            s += std::string(" ELSE ") +
                 (c.else_cmd->kind == CmdKind::Commit ? "COMMIT" : "ROLLBACK");
        return s + ";";
    }
    }
    return "?";
}

std::string print_commands(const std::vector<CommandPtr>& cmds) {
    std::vector<std::string> parts;
    for (const auto& c : cmds) parts.push_back(print_command(*c));
    return join(parts, "\n");
}

} // namespace ro::lang
