#include "ro/storage.hpp"

#include <algorithm>
#include <set>

#include "ro/error.hpp"

namespace ro::storage {

using relalg::RelationValue;
using relalg::Scheme;
using relalg::Tuple;

namespace {

std::string var_name(const std::string& type, const std::string& comp) {
    return comp.empty() ? type + " (own tuple)" : type + "." + comp;
}

bool is_scalar_comp(const typesys::ComponentSpec& s) {
    return s.has_value && !s.value.is_set && !s.value.is_tuple;
}

bool stored_here(const Database& db, Oid o, const std::string& comp) {
    try {
        const auto& of_type = db.cat.oids().type_of(o);
        auto r = db.types.lookup_realization(of_type, comp);
        return r && r->first.kind == typesys::ComponentImpl::Kind::Stored;
    } catch (const Error&) {
        return false;
    }
}

std::set<std::uint64_t> as_set(const std::vector<Oid>& group) {
    std::set<std::uint64_t> s;
    for (auto o : group) s.insert(o.value);
    return s;
}

Oid row_oid(const Tuple& t, std::size_t oid_idx) {
    return t[oid_idx].as_oid();
}

} // namespace

relalg::RelationValue& Database::base_var(const std::string& type, const std::string& comp) {
    auto it = vars_.find({type, comp});
    if (it == vars_.end())
        throw Error(ErrorCode::UnknownName, "no base variable " + var_name(type, comp));
    return it->second;
}

const relalg::RelationValue& Database::base_var(const std::string& type,
                                                const std::string& comp) const {
    return const_cast<Database*>(this)->base_var(type, comp);
}

bool Database::has_base_var(const std::string& type, const std::string& comp) const {
    return vars_.count({type, comp}) != 0;
}

void Database::set_base_var(const std::string& type, const std::string& comp,
                            relalg::RelationValue v) {
    vars_.insert_or_assign({type, comp}, std::move(v));
}

relalg::Scheme Database::own_tuple_scheme(const std::string& type) const {
    Scheme s;
    s.add(oid_attr(), ScalarType::doid());
    for (const auto& c : types.require_class(type).own)
        if (!c.is_method && is_scalar_comp(c)) s.add(AttrName{c.name}, c.value.scalar);
    return s;
}

void Database::sync_base_vars() {
    std::map<std::pair<std::string, std::string>, Scheme> desired;
    for (const auto& t : types.class_order()) {
        desired[{t, ""}] = own_tuple_scheme(t);
        for (const auto& c : types.require_class(t).own) {
            if (c.is_method || !c.has_value || is_scalar_comp(c)) continue;
            Scheme s;
            s.add(oid_attr(), ScalarType::doid());
            for (const auto& [a, ty] : types.component_scheme(t, c.name).attrs) s.add(a, ty);
            desired[{t, c.name}] = std::move(s);
        }
    }
    for (auto it = vars_.begin(); it != vars_.end();) {
        if (!desired.count(it->first))
            it = vars_.erase(it);
        else
            ++it;
    }
    for (auto& [key, scheme] : desired) {
        auto it = vars_.find(key);
        if (it == vars_.end()) {
            RelationValue v{scheme};
            // A fresh non-set tuple component variable carries one
            // all-Undefined row per live object of the type.
            if (!key.second.empty()) {
                const auto& spec = types.require_component(key.first, key.second).spec;
                if (!spec.value.is_set) {
                    std::vector<Tuple> rows;
                    for (const auto& [ov, of] : cat.oids().rows()) {
                        if (!types.is_subtype(of, key.first)) continue;
                        Tuple row(scheme.attrs.size());
                        row[0] = ScalarValue::of_oid(Oid{ov});
                        rows.push_back(std::move(row));
                    }
                    v = RelationValue(scheme, std::move(rows));
                }
            }
            vars_.emplace(key, std::move(v));
        } else if (!(it->second.scheme() == scheme)) {
            std::vector<Tuple> rows;
            const auto& old = it->second;
            for (const auto& t : old.tuples()) {
                Tuple row(scheme.attrs.size());
                for (std::size_t i = 0; i < scheme.attrs.size(); ++i) {
                    auto j = old.scheme().find(scheme.attrs[i].first);
                    if (j && t[*j].fits(scheme.attrs[i].second)) row[i] = t[*j];
                }
                rows.push_back(std::move(row));
            }
            it->second = RelationValue(scheme, std::move(rows));
        }
    }
}

relalg::Scheme value_scheme(const typesys::TypeRegistry& reg, const typesys::ValueType& v) {
    Scheme s;
    if (v.is_tuple) {
        for (const auto& [n, t] : reg.require_tuple(v.tuple_name).attrs) s.add(AttrName{n}, t);
    } else if (v.scalar.kind == TypeKind::Ref) {
        s.add(oid_attr(), v.scalar);
    } else {
        s.add(val_attr(), v.scalar);
    }
    return s;
}

Oid create_object(Database& db, const std::string& type) {
    Oid o = db.cat.new_oid(type);
    for (const auto& t : db.types.ancestors(type)) {
        if (t == typesys::object_root()) continue;
        {
            auto& v = db.base_var(t, "");
            auto rows = v.tuples();
            Tuple row(v.scheme().attrs.size());
            row[0] = ScalarValue::of_oid(o);
            rows.push_back(std::move(row));
            v = RelationValue(v.scheme(), std::move(rows));
        }
        for (const auto& c : db.types.require_class(t).own) {
            if (c.is_method || !c.has_value || is_scalar_comp(c) || c.value.is_set) continue;
            if (!stored_here(db, o, c.name)) continue;
            auto& v = db.base_var(t, c.name);
            auto rows = v.tuples();
            Tuple row(v.scheme().attrs.size());
            row[0] = ScalarValue::of_oid(o);
            rows.push_back(std::move(row));
            v = RelationValue(v.scheme(), std::move(rows));
        }
    }
    return o;
}

void apply_assignment(Database& db, const std::string& type, const std::string& component,
                      const std::vector<Oid>& group, const relalg::RelationValue& new_rows) {
    auto ec = db.types.require_component(type, component);
    if (ec.spec.is_method || !ec.spec.has_value)
        throw Error(ErrorCode::NotWritable, "'" + component + "' holds no assignable value");
    const std::string& owner = ec.owner;

    Scheme expected;
    expected.add(oid_attr(), ScalarType::doid());
    for (const auto& [a, t] : db.types.component_scheme(owner, component).attrs)
        expected.add(a, t);
    if (!new_rows.scheme().consistent_with(expected))
        throw Error(ErrorCode::SchemeMismatch,
                    "assignment to " + var_name(owner, component) + " expects scheme " +
                        expected.display() + ", got " + new_rows.scheme().display());

    auto g = as_set(group);
    std::size_t src_oid = new_rows.scheme().require(oid_attr());
    for (const auto& t : new_rows.tuples()) {
        if (t[src_oid].is_undefined() || !g.count(row_oid(t, src_oid).value))
            throw Error(ErrorCode::EvaluationError,
                        "assignment to " + var_name(owner, component) +
                            " produced a row outside the target group");
    }

    if (is_scalar_comp(ec.spec)) {
        // One value per object, written into the own-tuple column.
        std::map<std::uint64_t, ScalarValue> vals;
        std::size_t src_val = new_rows.scheme().require(AttrName{component});
        for (const auto& t : new_rows.tuples()) {
            auto [it, fresh] = vals.emplace(row_oid(t, src_oid).value, t[src_val]);
            if (!fresh && !(it->second == t[src_val]))
                throw Error(ErrorCode::EvaluationError,
                            "scalar component '" + component +
                                "' received several values for one object");
        }
        auto& v = db.base_var(owner, "");
        std::size_t col = v.scheme().require(AttrName{component});
        std::size_t oid_col = v.scheme().require(oid_attr());
        auto rows = v.tuples();
        for (auto& row : rows) {
            auto ov = row_oid(row, oid_col).value;
            if (!g.count(ov)) continue;
            auto it = vals.find(ov);
            row[col] = it == vals.end() ? ScalarValue() : it->second;
        }
        v = RelationValue(v.scheme(), std::move(rows));
        return;
    }

    auto& v = db.base_var(owner, component);
    std::size_t oid_col = v.scheme().require(oid_attr());
    std::vector<Tuple> rows;
    for (const auto& t : v.tuples())
        if (!g.count(row_oid(t, oid_col).value)) rows.push_back(t);
    std::map<std::uint64_t, int> per_oid;
    for (const auto& t : new_rows.tuples()) {
        Tuple row(v.scheme().attrs.size());
        for (std::size_t i = 0; i < v.scheme().attrs.size(); ++i)
            row[i] = t[new_rows.scheme().require(v.scheme().attrs[i].first)];
        ++per_oid[row_oid(t, src_oid).value];
        rows.push_back(std::move(row));
    }
    if (!ec.spec.value.is_set) {
        for (const auto& [ov, n] : per_oid)
            if (n > 1)
                throw Error(ErrorCode::EvaluationError,
                            "tuple component '" + component +
                                "' received several rows for one object");
        // Objects assigned nothing keep their one-row invariant, Undefined.
        for (auto o : g) {
            if (per_oid.count(o)) continue;
            Tuple row(v.scheme().attrs.size());
            row[0] = ScalarValue::of_oid(Oid{o});
            rows.push_back(std::move(row));
        }
    }
    v = RelationValue(v.scheme(), std::move(rows));
}

void destroy_objects(Database& db, const std::vector<Oid>& group) {
    auto g = as_set(group);
    for (auto o : g) db.cat.oids().type_of(Oid{o}); // UnknownOid early

    std::vector<std::string> blockers;
    for (const auto& [key, v] : db.base_vars()) {
        auto oid_col = v.scheme().find(oid_attr());
        for (std::size_t i = 0; i < v.scheme().attrs.size(); ++i) {
            if (v.scheme().attrs[i].second.kind != TypeKind::Ref || i == *oid_col) continue;
            for (const auto& t : v.tuples()) {
                if (g.count(row_oid(t, *oid_col).value)) continue;
                if (!t[i].is_undefined() && g.count(t[i].as_oid().value))
                    blockers.push_back(var_name(key.first, key.second) + "." +
                                       v.scheme().attrs[i].first.display());
            }
        }
    }
    for (const auto& [name, gv] : db.globals) {
        for (std::size_t i = 0; i < gv.value.scheme().attrs.size(); ++i) {
            if (gv.value.scheme().attrs[i].second.kind != TypeKind::Ref) continue;
            for (const auto& t : gv.value.tuples())
                if (!t[i].is_undefined() && g.count(t[i].as_oid().value))
                    blockers.push_back("global " + name);
        }
    }
    if (!blockers.empty()) {
        std::sort(blockers.begin(), blockers.end());
        blockers.erase(std::unique(blockers.begin(), blockers.end()), blockers.end());
        std::string msg = "object still referenced from: ";
        for (std::size_t i = 0; i < blockers.size(); ++i)
            msg += (i ? ", " : "") + blockers[i];
        throw Error(ErrorCode::ReferentialVeto, msg);
    }

    for (const auto& [key, v] : db.base_vars()) {
        auto oid_col = v.scheme().require(oid_attr());
        std::vector<Tuple> rows;
        for (const auto& t : v.tuples())
            if (!g.count(row_oid(t, oid_col).value)) rows.push_back(t);
        if (rows.size() != v.size())
            db.set_base_var(key.first, key.second, RelationValue(v.scheme(), std::move(rows)));
    }
    for (auto o : g) db.cat.oids().remove(Oid{o});
}

namespace {

std::string tuple_display(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + t[i].display();
    return out + ")";
}

void check_component_keys(const Database& db, const std::string& type,
                          const typesys::ComponentSpec& spec, std::vector<Violation>& out) {
    bool scalar = is_scalar_comp(spec);
    const auto& v = db.base_var(type, scalar ? "" : spec.name);
    std::size_t oid_col = v.scheme().require(oid_attr());

    // Only rows of objects that actually store this component here count.
    std::vector<const Tuple*> rows;
    for (const auto& t : v.tuples())
        if (stored_here(db, row_oid(t, oid_col), spec.name)) rows.push_back(&t);

    for (const auto& key : spec.keys) {
        std::vector<std::size_t> cols;
        for (const auto& f : key.fields) cols.push_back(v.scheme().require(f));

        if (key.kind == relalg::KeyKind::Global) {
            std::set<std::vector<ScalarValue>> seen;
            for (const auto* t : rows) {
                std::vector<ScalarValue> k;
                bool undef = false;
                for (auto c : cols) {
                    if ((*t)[c].is_undefined()) undef = true;
                    k.push_back((*t)[c]);
                }
                if (undef) {
                    out.push_back({var_name(type, spec.name),
                                   "global key field undefined in " + tuple_display(*t)});
                } else if (!seen.insert(std::move(k)).second) {
                    out.push_back({var_name(type, spec.name),
                                   "global key duplicated by " + tuple_display(*t)});
                }
            }
        } else if (key.kind == relalg::KeyKind::Local) {
            std::set<std::vector<ScalarValue>> seen;
            for (const auto* t : rows) {
                std::vector<ScalarValue> k{(*t)[oid_col]};
                for (auto c : cols) k.push_back((*t)[c]);
                if (!seen.insert(std::move(k)).second)
                    out.push_back({var_name(type, spec.name),
                                   "local key duplicated by " + tuple_display(*t)});
            }
        } else if (key.kind == relalg::KeyKind::Foreign && key.target) {
            // Defined foreign values must appear among the target's stored
            // global-key values.
            const auto* target_cls = db.types.find_class(key.target->type_name);
            if (!target_cls) continue;
            std::set<std::vector<ScalarValue>> target_vals;
            bool resolvable = true;
            std::vector<std::size_t> tcols;
            const relalg::RelationValue* tv = nullptr;
            try {
                std::vector<std::string> owners, names;
                // Global keys of scalar components live in the owner's own
                // tuple; set components in their own variable.
                for (const auto& ec : db.types.effective_components(key.target->type_name)) {
                    for (const auto& tk : ec.spec.keys) {
                        if (tk.kind != relalg::KeyKind::Global ||
                            !(tk.fields == key.target->fields))
                            continue;
                        bool tscalar = is_scalar_comp(ec.spec);
                        tv = &db.base_var(ec.owner, tscalar ? "" : ec.spec.name);
                        for (const auto& f : tk.fields) tcols.push_back(tv->scheme().require(f));
                    }
                }
            } catch (const Error&) {
                resolvable = false;
            }
            if (!resolvable || !tv) continue;
            std::size_t toid = tv->scheme().require(oid_attr());
            for (const auto& t : tv->tuples()) {
                (void)toid;
                std::vector<ScalarValue> k;
                for (auto c : tcols) k.push_back(t[c]);
                target_vals.insert(std::move(k));
            }
            for (const auto* t : rows) {
                std::vector<ScalarValue> k;
                bool undef = false;
                for (auto c : cols) {
                    if ((*t)[c].is_undefined()) undef = true;
                    k.push_back((*t)[c]);
                }
                if (!undef && !target_vals.count(k))
                    out.push_back({var_name(type, spec.name),
                                   "foreign key " + tuple_display(*t) + " has no match in " +
                                       key.target->type_name});
            }
        }
    }

    // Without any key, tuple-valued (non-set) components and scalars keep one
    // row per object; sets are distinguished by their complete values, which
    // relation semantics already guarantees.
    if (!spec.value.is_set) {
        std::set<std::uint64_t> seen;
        for (const auto* t : rows)
            if (!seen.insert(row_oid(*t, oid_col).value).second)
                out.push_back({var_name(type, spec.name),
                               "several rows for one object " + tuple_display(*t)});
    }
}

} // namespace

std::vector<Violation> check_keys(const Database& db) {
    std::vector<Violation> out;
    for (const auto& t : db.types.class_order()) {
        // Own-tuple variable: one row per object, regardless of keys.
        const auto& own = db.base_var(t, "");
        std::size_t oid_col = own.scheme().require(oid_attr());
        std::set<std::uint64_t> seen;
        for (const auto& row : own.tuples())
            if (!seen.insert(row_oid(row, oid_col).value).second)
                out.push_back({var_name(t, ""), "several own-tuple rows for one object"});

        for (const auto& c : db.types.require_class(t).own) {
            if (c.is_method || !c.has_value) continue;
            check_component_keys(db, t, c, out);
        }
    }
    // Global variables carry their declared keys directly.
    for (const auto& [name, gv] : db.globals) {
        for (const auto& key : gv.keys) {
            std::vector<std::size_t> cols;
            try {
                for (const auto& f : key.fields) cols.push_back(gv.value.scheme().require(f));
            } catch (const Error&) {
                continue;
            }
            std::set<std::vector<ScalarValue>> seen;
            for (const auto& t : gv.value.tuples()) {
                std::vector<ScalarValue> k;
                for (auto c : cols) k.push_back(t[c]);
                if (!seen.insert(std::move(k)).second)
                    out.push_back({"global " + name, "key duplicated by " + tuple_display(t)});
            }
        }
        if (!gv.type.is_set && gv.value.size() > 1)
            out.push_back({"global " + name, "scalar variable holds several values"});
    }
    return out;
}

namespace {

void check_ref_value(const Database& db, const std::string& where, const ScalarValue& val,
                     const std::string& target, std::vector<Violation>& out) {
    if (val.is_undefined()) return;
    Oid o = val.as_oid();
    if (!db.cat.oids().contains(o)) {
        out.push_back({where, "reference to nonexistent object @" + std::to_string(o.value)});
        return;
    }
    if (target == typesys::object_root()) return;
    if (!db.types.find_class(target)) {
        out.push_back({where, "reference target type '" + target + "' is not declared"});
        return;
    }
    if (!db.types.is_subtype(db.cat.oids().type_of(o), target))
        out.push_back({where, "reference @" + std::to_string(o.value) + " is not a " + target});
}

} // namespace

std::vector<Violation> check_ref_integrity(const Database& db) {
    std::vector<Violation> out;
    for (const auto& [key, v] : db.base_vars()) {
        auto oid_col = v.scheme().require(oid_attr());
        for (std::size_t i = 0; i < v.scheme().attrs.size(); ++i) {
            if (i == oid_col || v.scheme().attrs[i].second.kind != TypeKind::Ref) continue;
            for (const auto& t : v.tuples())
                check_ref_value(db, var_name(key.first, key.second), t[i],
                                v.scheme().attrs[i].second.ref_target, out);
        }
    }
    for (const auto& [name, gv] : db.globals) {
        for (std::size_t i = 0; i < gv.value.scheme().attrs.size(); ++i) {
            if (gv.value.scheme().attrs[i].second.kind != TypeKind::Ref) continue;
            for (const auto& t : gv.value.tuples())
                check_ref_value(db, "global " + name, t[i],
                                gv.value.scheme().attrs[i].second.ref_target, out);
        }
    }
    return out;
}

std::vector<Violation> check_database(const Database& db) {
    auto out = check_keys(db);
    auto refs = check_ref_integrity(db);
    out.insert(out.end(), refs.begin(), refs.end());
    for (const auto& [key, v] : db.base_vars()) {
        auto oid_col = v.scheme().require(oid_attr());
        for (const auto& t : v.tuples()) {
            if (t[oid_col].is_undefined() || !db.cat.oids().contains(row_oid(t, oid_col)))
                out.push_back({var_name(key.first, key.second),
                               "orphan row " + tuple_display(t)});
        }
    }
    return out;
}

} // namespace ro::storage
