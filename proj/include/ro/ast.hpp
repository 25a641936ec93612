#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ro/relalg.hpp"
#include "ro/scalar.hpp"

namespace ro::ast {

struct SourceSpan {
    int line = 0;
    int col = 0;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
    Path,      // dotted name; meaning resolved during compilation
    Lit,       // scalar literal (incl. NULL/TRUE/FALSE)
    Binary,    // arithmetic / comparison / boolean / set operator
    Not,
    IsNull,    // a IS NULL / a NOT IS NULL
    Exist,     // EXIST(rel)
    ObjectOf,  // Object(rel)
    Where,     // rel WHERE cond
    Project,   // rel[items] or rel[!paths]
    Summarize, // SUMMARIZE rel BY paths ADD agg(expr) AS name, ...
    Expand,    // rel EXPAND path
    OvRetrieve,// rel<cond, ...>; in predicate position: membership in the group
    Call,      // receiver.name(args); receiver null => implicit-this / builtin
    Member,    // postfix .name on a non-path expression, e.g. Object(...).comp
    IsType,    // o IS t (reachability through inheritance)
    OfType,    // o OF t (exact creation type)
    UpdateMap, // internal rewrite target of UPDATE: rel with columns remapped
};

enum class BinOp {
    Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,
    Union, Minus, Intersect, Times, Join,
};

struct ProjItem {
    std::vector<std::string> path;
    std::optional<std::string> rename;
};

struct AggAdd {
    relalg::Aggregate agg = relalg::Aggregate::Sum;
    ExprPtr source; // scalar expression over the relation's rows
    std::string result;
};

struct Expr {
    ExprKind kind{};
    SourceSpan span;

    std::vector<std::string> path; // Path, Expand attribute
    ScalarValue lit;               // Lit
    BinOp op{};                    // Binary
    ExprPtr a, b;                  // operands / rel+cond
    bool negated = false;          // IsNull
    std::vector<ProjItem> proj;    // Project keep items
    bool proj_drop = false;        // Project is the [!...] form
    std::vector<std::vector<std::string>> by; // Summarize
    std::vector<AggAdd> adds;                 // Summarize
    std::vector<ExprPtr> conds;               // OvRetrieve
    std::string name;                         // Call / Member / IsType / OfType
    std::vector<ExprPtr> args;                // Call
    std::vector<std::pair<std::vector<std::string>, ExprPtr>> sets; // UpdateMap
};

std::shared_ptr<Expr> make_expr(ExprKind kind);

// --- Statements (method bodies) ------------------------------------------

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

enum class StmtKind { Assign, Insert, Delete, Update, If, DoWhile, Return, Exec };

/// Syntactic reference to a value type: a basic scalar keyword, a declared
/// tuple/object type name, or SET OF either.
struct TypeRef {
    bool is_set = false;
    std::string name;

    friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

struct Stmt {
    StmtKind kind{};
    SourceSpan span;

    ExprPtr target;  // Assign/Insert/Delete/Update target (path-like expr)
    ExprPtr expr;    // Assign rhs / Insert value / Return value / Exec call
    ExprPtr cond;    // If/DoWhile condition, Delete/Update WHERE
    std::vector<std::pair<std::string, ExprPtr>> sets; // Update SET
    std::vector<StmtPtr> then_block, else_block, body; // If / DoWhile
};

std::shared_ptr<Stmt> make_stmt(StmtKind kind);

// --- DDL signatures -------------------------------------------------------

struct KeyDef {
    relalg::KeyKind kind = relalg::KeyKind::Local;
    std::vector<std::string> fields;
    std::string fk_type;                // Foreign: target type
    std::vector<std::string> fk_fields; // Foreign: target global-key fields
};

struct ParamDef {
    std::string name;
    TypeRef type;
};

struct SignatureDef {
    std::string name;
    bool is_method = false; // declared with a parameter list
    std::vector<ParamDef> params;
    TypeRef value_type;
    std::vector<KeyDef> keys;
};

// --- Commands -------------------------------------------------------------

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

enum class CmdKind {
    DescribeTuple,
    CreateClass,
    AlterAdd,
    AlterDrop,
    AlterAlter,
    Realize,
    DropClass,
    CreateGlobal,
    DropGlobal,
    New,
    Destroy,
    Execute,
    Insert,
    Update,
    Delete,
    Assign,
    Query,
    Begin,
    Commit,
    Rollback,
    IfCmd,
};

enum class ImplKind { Stored, Expr, Body };

struct Command {
    CmdKind kind{};
    SourceSpan span;

    std::string name; // class/tuple/global/dropped name; AlterDrop component
    std::vector<std::string> parents;
    std::vector<SignatureDef> sigs; // class components / tuple attributes
    std::vector<KeyDef> class_keys;

    // Realize
    std::vector<std::string> realize_names;
    bool realize_all = false;
    ImplKind impl_kind = ImplKind::Stored;
    ExprPtr impl_expr;
    std::vector<StmtPtr> impl_body;

    // CreateGlobal
    TypeRef global_type;
    std::vector<KeyDef> global_keys;

    // New/Destroy/Execute/DML/Assign/Query
    ExprPtr expr;                     // Query / Destroy group / Assign rhs / Insert value
    std::vector<ExprPtr> args;        // New ctor args
    ExprPtr target;                   // DML & Assign target
    ExprPtr cond;                     // Update/Delete WHERE; IfCmd condition
    std::vector<std::pair<std::string, ExprPtr>> sets; // Update SET

    CommandPtr then_cmd, else_cmd; // IfCmd
};

std::shared_ptr<Command> make_command(CmdKind kind);

} // namespace ro::ast
