#include "ro/catalog.hpp"

#include "ro/error.hpp"
#include "ro/printer.hpp"

namespace ro::catalog {

using relalg::RelationValue;
using relalg::Scheme;

Oid OidTable::allocate(const std::string& type) {
    Oid o{next_++};
    rows_.emplace(o.value, type);
    return o;
}

const std::string& OidTable::type_of(Oid o) const {
    auto it = rows_.find(o.value);
    if (it == rows_.end())
        throw Error(ErrorCode::UnknownOid, "no object with OID " + std::to_string(o.value));
    return it->second;
}

void OidTable::remove(Oid o) {
    if (!rows_.erase(o.value))
        throw Error(ErrorCode::UnknownOid, "no object with OID " + std::to_string(o.value));
}

std::vector<Oid> OidTable::oids_of_exact(const std::string& type) const {
    std::vector<Oid> out;
    for (const auto& [v, t] : rows_)
        if (t == type) out.push_back(Oid{v});
    return out;
}

void OidTable::restore_row(Oid o, const std::string& type) {
    if (!rows_.emplace(o.value, type).second)
        throw Error(ErrorCode::DuplicateName,
                    "OID " + std::to_string(o.value) + " restored twice");
    if (o.value >= next_) next_ = o.value + 1;
}

void OidTable::set_next_ordinal(std::uint64_t n) {
    if (n > next_) next_ = n;
}

std::string value_type_display(const typesys::ValueType& v) {
    std::string base = v.is_tuple ? v.tuple_name : type_display(v.scalar);
    return v.is_set ? "SET OF " + base : base;
}

namespace {

std::string signature_display(const typesys::ComponentSpec& s) {
    std::string out = s.name;
    if (s.is_method) {
        out += "(";
        bool first = true;
        for (const auto& [n, t] : s.params) {
            if (!first) out += ", ";
            first = false;
            out += n + " " + value_type_display(t);
        }
        out += ")";
    }
    if (s.has_value) out += " " + value_type_display(s.value);
    return out;
}

} // namespace

Oid Catalog::new_oid(const std::string& type) {
    reg_->require_class(type);
    reg_->check_fully_realized(type);
    return oids_.allocate(type);
}

bool Catalog::is_of(Oid o, const std::string& type) const {
    reg_->require_class(type);
    return oids_.type_of(o) == type;
}

bool Catalog::is_a(Oid o, const std::string& type) const {
    reg_->require_class(type);
    return reg_->is_subtype(oids_.type_of(o), type);
}

RelationValue Catalog::val_types() const {
    Scheme s;
    s.add(AttrName{"vT"}, ScalarType::string());
    std::vector<relalg::Tuple> rows;
    for (const char* b : {"INTEGER", "FLOAT", "STRING", "BOOLEAN", "DATE"})
        rows.push_back({ScalarValue::of_string(b)});
    for (const auto& name : reg_->tuple_order()) rows.push_back({ScalarValue::of_string(name)});
    return RelationValue(std::move(s), std::move(rows));
}

RelationValue Catalog::obj_types() const {
    Scheme s;
    s.add(AttrName{"oT"}, ScalarType::string());
    std::vector<relalg::Tuple> rows;
    rows.push_back({ScalarValue::of_string(typesys::object_root())});
    for (const auto& name : reg_->class_order()) rows.push_back({ScalarValue::of_string(name)});
    return RelationValue(std::move(s), std::move(rows));
}

RelationValue Catalog::is_t() const {
    Scheme s;
    s.add(AttrName{"oT"}, ScalarType::string());
    s.add(AttrName{"IS_oT"}, ScalarType::string());
    std::vector<relalg::Tuple> rows;
    const auto& root = typesys::object_root();
    rows.push_back({ScalarValue::of_string(root), ScalarValue::of_string(root)});
    for (const auto& name : reg_->class_order())
        for (const auto& a : reg_->ancestors(name))
            rows.push_back({ScalarValue::of_string(name), ScalarValue::of_string(a)});
    return RelationValue(std::move(s), std::move(rows));
}

RelationValue Catalog::spec() const {
    Scheme s;
    s.add(AttrName{"A"}, ScalarType::string());
    s.add(AttrName{"oT"}, ScalarType::string());
    s.add(AttrName{"vT"}, ScalarType::string());
    s.add(AttrName{"signature"}, ScalarType::string());
    std::vector<relalg::Tuple> rows;
    for (const auto& name : reg_->class_order()) {
        for (const auto& c : reg_->require_class(name).own) {
            std::string vt = c.has_value ? value_type_display(c.value) : "";
            rows.push_back({ScalarValue::of_string(c.name), ScalarValue::of_string(name),
                            ScalarValue::of_string(vt),
                            ScalarValue::of_string(signature_display(c))});
        }
    }
    return RelationValue(std::move(s), std::move(rows));
}

RelationValue Catalog::real() const {
    Scheme s;
    s.add(AttrName{"A"}, ScalarType::string());
    s.add(AttrName{"OF_oT"}, ScalarType::string());
    s.add(AttrName{"isSTORED"}, ScalarType::boolean());
    s.add(AttrName{"RealExpr"}, ScalarType::string());
    std::vector<relalg::Tuple> rows;
    for (const auto& name : reg_->class_order()) {
        for (const auto& [comp, impl] : reg_->require_class(name).impls) {
            std::string text;
            switch (impl.kind) {
            case typesys::ComponentImpl::Kind::Stored: break;
            case typesys::ComponentImpl::Kind::Computed:
                text = lang::print_expr(*impl.expr);
                break;
            case typesys::ComponentImpl::Kind::Method:
                text = lang::print_stmts(impl.body);
                break;
            }
            rows.push_back({ScalarValue::of_string(comp), ScalarValue::of_string(name),
                            ScalarValue::of_bool(impl.kind ==
                                                 typesys::ComponentImpl::Kind::Stored),
                            ScalarValue::of_string(text)});
        }
    }
    return RelationValue(std::move(s), std::move(rows));
}

RelationValue Catalog::oids_relation() const {
    Scheme s;
    s.add(AttrName{"OID"}, ScalarType::doid());
    s.add(AttrName{"OF_oT"}, ScalarType::string());
    std::vector<relalg::Tuple> rows;
    for (const auto& [v, t] : oids_.rows())
        rows.push_back({ScalarValue::of_oid(Oid{v}), ScalarValue::of_string(t)});
    return RelationValue(std::move(s), std::move(rows));
}

} // namespace ro::catalog
