#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ro/relalg.hpp"
#include "ro/storage.hpp"

namespace ro::rvars {

/// Evaluates a Computed realization set-at-a-time: `realizer` is the type
/// whose realization applies, `group` the objects it covers. The result must
/// carry the OID column plus the component scheme, with rows only for OIDs
/// in the group.
using ComputedEvaluator = std::function<relalg::RelationValue(
    const std::string& realizer, const std::string& component, const std::vector<Oid>& group)>;

/// Evaluator for databases without computed realizations; raises
/// EvaluationError when one is encountered.
const ComputedEvaluator& stored_only_evaluator();

/// Key of the R-variable of a component: a Global key keeps its fields, a
/// Local key gains the OID field, no key leaves the OID alone.
relalg::KeySpec derive_rvar_key(const typesys::TypeRegistry& reg, const std::string& type,
                                const std::string& component);

/// Live objects o with is_a(o, type), ascending.
std::vector<Oid> objects_of_type(const storage::Database& db, const std::string& type);

/// The R-variable t.a: OID column plus the component scheme, one row per
/// object for scalar/tuple components, the member rows for sets. Stored and
/// computed realizations of different OF-types union transparently.
relalg::RelationValue component_rvar(const storage::Database& db,
                                     const ComputedEvaluator& eval, const std::string& type,
                                     const std::string& component);

/// The R-variable of the type: per object, the product of its component
/// values with set/tuple field names refined by the component name; empty
/// set components pad their fields with Undefined so the object survives.
relalg::RelationValue type_rvar(const storage::Database& db, const ComputedEvaluator& eval,
                                const std::string& type);

/// R-variable seen through a group reference: the target type's R-variable
/// (or one component's), restricted to the OIDs in the group.
relalg::RelationValue ref_rvar(const storage::Database& db, const ComputedEvaluator& eval,
                               const std::string& target_type,
                               const relalg::RelationValue& group,
                               const std::optional<std::string>& component);

/// Projection onto the OID attribute: the group reference Object(rel).
relalg::RelationValue object_of(const relalg::RelationValue& rel);

/// OIDs held in a unary group reference relation, ascending.
std::vector<Oid> group_oids(const relalg::RelationValue& group);

/// Builds a group reference relation from OIDs.
relalg::RelationValue make_group(const std::vector<Oid>& oids,
                                 const std::string& target_type);

/// OV-retrieval Rvar<c1,...,cn>: the R-variable restricted to objects having,
/// for every condition, at least one satisfying row. No conditions means no
/// restriction.
relalg::RelationValue ov_retrieval(const relalg::RelationValue& rvar,
                                   const std::vector<relalg::PredicatePtr>& conds);

/// Reference expansion: joins rel with the target type's R-variable through
/// `ref_attr`, refining every target attribute name with the reference
/// attribute's name. Undefined references drop out (inner join).
relalg::RelationValue expand_ref(const storage::Database& db, const ComputedEvaluator& eval,
                                 const relalg::RelationValue& rel,
                                 const AttrName& ref_attr);

/// Resolves a dotted path to an R-variable: the leading segment names a type
/// or global variable, one following segment may select a component, and
/// each further reference hop applies an implicit expansion.
relalg::RelationValue resolve_path(const storage::Database& db, const ComputedEvaluator& eval,
                                   const std::vector<std::string>& path);

} // namespace ro::rvars
