#pragma once

#include <map>
#include <string>
#include <vector>

#include "ro/catalog.hpp"
#include "ro/relalg.hpp"
#include "ro/typesys.hpp"

namespace ro::storage {

/// A named value-typed variable outside any object (global scope). Scalar
/// variables are one-row relations; the value relation's scheme comes from
/// value_scheme().
struct GlobalVar {
    ast::TypeRef declared;
    typesys::ValueType type;
    std::vector<relalg::KeySpec> keys;
    relalg::RelationValue value;
};

struct Violation {
    std::string where;
    std::string message;
};

/// The storage level: one base variable per declaring type holding the own
/// scalar components (the own tuple), plus one per set/tuple component, all
/// keyed by OID. Copying a Database yields an independent snapshot.
class Database {
  public:
    Database() : cat(types) {}
    Database(const Database& o) : types(o.types), cat(o.cat), globals(o.globals), vars_(o.vars_) {
        cat.set_registry(types);
    }
    Database& operator=(const Database& o) {
        types = o.types;
        cat = o.cat;
        globals = o.globals;
        vars_ = o.vars_;
        cat.set_registry(types);
        return *this;
    }

    typesys::TypeRegistry types;
    catalog::Catalog cat;
    std::map<std::string, GlobalVar> globals;

    /// Base variable for (declaring type, component); component "" is the
    /// own-tuple variable.
    relalg::RelationValue& base_var(const std::string& type, const std::string& comp);
    const relalg::RelationValue& base_var(const std::string& type,
                                          const std::string& comp) const;
    bool has_base_var(const std::string& type, const std::string& comp) const;
    const std::map<std::pair<std::string, std::string>, relalg::RelationValue>&
    base_vars() const {
        return vars_;
    }

    /// Scheme the own-tuple variable of `type` must have.
    relalg::Scheme own_tuple_scheme(const std::string& type) const;

    /// Reconciles the base-variable set with the type registry: creates
    /// missing variables, migrates schemes after ALTER (shared columns kept,
    /// new scalar columns Undefined), drops variables of vanished types and
    /// components.
    void sync_base_vars();

    /// Restore support.
    void set_base_var(const std::string& type, const std::string& comp,
                      relalg::RelationValue v);

  private:
    std::map<std::pair<std::string, std::string>, relalg::RelationValue> vars_;
};

/// Scheme of a value of the given type: tuple fields for tuple values, a
/// single reserved column for scalars (the OID column for references).
relalg::Scheme value_scheme(const typesys::TypeRegistry& reg, const typesys::ValueType& v);

/// Registers a fresh object of `type` and inserts its storage rows: one
/// own-tuple row per type along the inheritance chain (scalars Undefined),
/// one all-Undefined row per stored non-set tuple component, set components
/// empty. Constructor execution is the caller's business.
Oid create_object(Database& db, const std::string& type);

/// Replaces the rows of one component owned by the objects in `group`.
/// Scalar components update their own-tuple column; set/tuple components
/// replace their base-variable rows. `new_rows` must carry the OID column
/// and only OIDs from the group.
void apply_assignment(Database& db, const std::string& type, const std::string& component,
                      const std::vector<Oid>& group, const relalg::RelationValue& new_rows);

/// Destroys every object in the group: vetoes when a reference from outside
/// the group survives, otherwise removes all rows and the OID entries.
/// Destructor hooks are the caller's business.
void destroy_objects(Database& db, const std::vector<Oid>& group);

/// Key check over stored data: Global keys unique (and totally defined)
/// across all stored rows of the component including subtype objects; Local
/// keys unique per (OID, fields); no key means one row per OID for own-tuple
/// and tuple components.
std::vector<Violation> check_keys(const Database& db);

/// Every defined reference resolves to a live object of the declared target
/// type (subtypes allowed).
std::vector<Violation> check_ref_integrity(const Database& db);

/// check_keys + check_ref_integrity + no-orphan-row check.
std::vector<Violation> check_database(const Database& db);

} // namespace ro::storage
