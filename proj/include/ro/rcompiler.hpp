#pragma once

#include <string>
#include <vector>

#include "ro/ast.hpp"
#include "ro/relalg.hpp"
#include "ro/rvars.hpp"
#include "ro/storage.hpp"

namespace ro::rcompiler {

/// Result of a group method invocation: one relation holding the OID column
/// plus the return-value scheme (scalar returns use the #val column), and the
/// warnings raised along the way (e.g. writes to computed components).
struct ExecResult {
    relalg::RelationValue results;
    std::vector<std::string> warnings;
};

/// Evaluates a per-object query expression for the whole group in one
/// set-at-a-time pass: the result carries the reserved #this column beside
/// the payload, and restricting it to one member then dropping #this equals
/// the per-object value of the expression.
relalg::RelationValue eval_set(storage::Database& db, const std::string& type,
                               const std::vector<Oid>& group, const ast::Expr& e);

/// Evaluates a query with no object context (top-level command).
relalg::RelationValue eval_query(storage::Database& db, const ast::Expr& e);

/// Computed-component evaluator backed by this evaluator, for wiring into
/// the R-variable layer.
rvars::ComputedEvaluator make_evaluator(storage::Database& db);

/// Executes a method over a group in one set-at-a-time pass. The group is
/// partitioned by the OF-type's realizing implementation and each partition
/// runs its own body (group invocation of overridden methods).
ExecResult execute_method(storage::Database& db, const std::string& type,
                          const std::string& method, const std::vector<Oid>& group,
                          const std::vector<ScalarValue>& args);

/// Executes a bare statement sequence over a group (constructor and
/// destructor bodies; no return value).
void execute_body(storage::Database& db, const std::string& type,
                  const std::vector<ast::StmtPtr>& body, const std::vector<Oid>& group,
                  const std::vector<std::pair<std::string, ScalarValue>>& params,
                  std::vector<std::string>& warnings);

/// Lowers a DML statement to the equivalent assignment:
/// INSERT -> a := a UNION v; DELETE -> a := a WHERE NOT cond;
/// UPDATE -> a := (a WHERE NOT cond) UNION remap(a WHERE cond).
ast::StmtPtr rewrite_dml_as_assignment(const ast::Stmt& s);

/// Display form of the set-level rewrite of a per-object expression:
/// component reads become R-variables, TIMES becomes the OID-threaded join.
std::string set_level_form(const ast::Expr& e);

/// Differential oracle: interprets the method naively, one object at a time
/// in ascending OID order, against the live database. Shares only the
/// relational kernel with the set-at-a-time path.
ExecResult oracle_execute(storage::Database& db, const std::string& type,
                          const std::string& method, const std::vector<Oid>& group,
                          const std::vector<ScalarValue>& args);

/// Per-object oracle evaluation of a query expression: the value the object
/// sees, without any OID column (scalars come back as a one-row #val
/// relation).
relalg::RelationValue oracle_eval(storage::Database& db, const std::string& type, Oid o,
                                  const ast::Expr& e);

} // namespace ro::rcompiler
