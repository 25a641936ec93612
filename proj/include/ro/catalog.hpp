#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ro/relalg.hpp"
#include "ro/scalar.hpp"
#include "ro/typesys.hpp"

namespace ro::catalog {

/// The identifier table: every live object's OID with its creation type.
/// Ordinals are monotone and never reused, including across dump/load.
class OidTable {
  public:
    Oid allocate(const std::string& type);
    bool contains(Oid o) const { return rows_.count(o.value) != 0; }
    const std::string& type_of(Oid o) const; // throws UnknownOid
    void remove(Oid o);

    /// OIDs created exactly as `type`, ascending.
    std::vector<Oid> oids_of_exact(const std::string& type) const;

    const std::map<std::uint64_t, std::string>& rows() const { return rows_; }
    std::uint64_t next_ordinal() const { return next_; }

    /// Restore support: re-insert a persisted row / pin the next ordinal.
    void restore_row(Oid o, const std::string& type);
    void set_next_ordinal(std::uint64_t n);

  private:
    std::map<std::uint64_t, std::string> rows_;
    std::uint64_t next_ = 1;
};

/// Metadata views over the type registry plus the identifier table, and the
/// type-test operators built on them. The relations are derived on demand;
/// the only state of its own is the OidTable.
class Catalog {
  public:
    explicit Catalog(const typesys::TypeRegistry& reg) : reg_(&reg) {}

    /// Rebinds the registry after the owning aggregate was copied.
    void set_registry(const typesys::TypeRegistry& reg) { reg_ = &reg; }

    OidTable& oids() { return oids_; }
    const OidTable& oids() const { return oids_; }

    /// Fresh OID for an object of `type`; the type must exist and be fully
    /// realized.
    Oid new_oid(const std::string& type);

    /// Exact creation-type test (o OF t). Always false for the root type.
    bool is_of(Oid o, const std::string& type) const;

    /// Reachability test (o IS t): true when t is the creation type or any
    /// of its ancestors. Always true for the root type.
    bool is_a(Oid o, const std::string& type) const;

    // Derived catalog relations, queryable like any other relation.
    relalg::RelationValue val_types() const;     // vT
    relalg::RelationValue obj_types() const;     // oT
    relalg::RelationValue is_t() const;          // oT, IS_oT
    relalg::RelationValue spec() const;          // A, oT, vT, signature
    relalg::RelationValue real() const;          // A, OF_oT, isSTORED, RealExpr
    relalg::RelationValue oids_relation() const; // OID, OF_oT

  private:
    const typesys::TypeRegistry* reg_;
    OidTable oids_;
};

/// Display form of a component value type, e.g. "SET OF ArtQty".
std::string value_type_display(const typesys::ValueType& v);

} // namespace ro::catalog
