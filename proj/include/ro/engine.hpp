#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ro/ast.hpp"
#include "ro/relalg.hpp"
#include "ro/storage.hpp"

namespace ro::engine {

/// Outcome of one command: queries (and NEW / EXECUTE) carry a relation to
/// display, everything else just acknowledges; warnings ride along.
struct CommandResult {
    bool has_relation = false;
    relalg::RelationValue relation;
    std::vector<std::string> messages;
};

/// Command interpreter over one database. Every command is atomic: on error
/// or integrity violation the pre-command state is restored and the error
/// rethrown. BEGIN TRANSACTION groups commands under one snapshot; COMMIT
/// drops it, ROLLBACK restores it; nesting is rejected.
class Engine {
  public:
    Engine() = default;

    storage::Database& db() { return db_; }
    const storage::Database& db() const { return db_; }
    bool in_transaction() const { return tx_.has_value(); }

    CommandResult execute(const ast::Command& cmd);

    /// Parses and runs a whole script, stopping at the first error.
    std::vector<CommandResult> execute_script(const std::string& text);

  private:
    storage::Database db_;
    std::optional<storage::Database> tx_;

    CommandResult dispatch(const ast::Command& cmd);
    bool eval_condition(const ast::Expr& cond, CommandResult& out);
    ScalarValue const_scalar(const ast::Expr& e);
    std::vector<Oid> group_of(const ast::Expr& e);
    std::string common_type_with(const std::vector<Oid>& group, const std::string& component);
    void assign_global(const std::string& name, const ast::Expr& rhs,
                       CommandResult& out);
};

/// AST-to-registry conversions shared with dump/load.
typesys::ComponentSpec component_spec_from(const typesys::TypeRegistry& reg,
                                           const ast::SignatureDef& sig);
relalg::KeySpec key_spec_from(const ast::KeyDef& k);

} // namespace ro::engine
