#include "ro/rvars.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ro/error.hpp"

namespace ro::rvars {

using relalg::RelationValue;
using relalg::Scheme;
using relalg::Tuple;

const ComputedEvaluator& stored_only_evaluator() {
    static const ComputedEvaluator e = [](const std::string& realizer,
                                          const std::string& component,
                                          const std::vector<Oid>&) -> RelationValue {
        throw Error(ErrorCode::EvaluationError,
                    "component '" + component + "' of " + realizer +
                        " is computed and no evaluator is installed");
    };
    return e;
}

relalg::KeySpec derive_rvar_key(const typesys::TypeRegistry& reg, const std::string& type,
                                const std::string& component) {
    auto ec = reg.require_component(type, component);
    if (ec.spec.is_method)
        throw Error(ErrorCode::UnknownComponent,
                    "method '" + component + "' has no R-variable key");
    for (const auto& k : ec.spec.keys) {
        if (k.kind == relalg::KeyKind::Global) return k;
        if (k.kind == relalg::KeyKind::Local) {
            relalg::KeySpec out;
            out.kind = relalg::KeyKind::Local;
            out.fields.push_back(oid_attr());
            for (const auto& f : k.fields) out.fields.push_back(f);
            return out;
        }
    }
    relalg::KeySpec out;
    out.kind = relalg::KeyKind::Local;
    out.fields.push_back(oid_attr());
    return out;
}

std::vector<Oid> objects_of_type(const storage::Database& db, const std::string& type) {
    std::vector<Oid> out;
    for (const auto& [v, of] : db.cat.oids().rows())
        if (db.types.is_subtype(of, type)) out.push_back(Oid{v});
    return out;
}

relalg::RelationValue component_rvar(const storage::Database& db,
                                     const ComputedEvaluator& eval, const std::string& type,
                                     const std::string& component) {
    auto ec = db.types.require_component(type, component);
    if (ec.spec.is_method || !ec.spec.has_value)
        throw Error(ErrorCode::UnknownComponent,
                    "'" + component + "' carries no value and has no R-variable");

    Scheme scheme;
    scheme.add(oid_attr(), ScalarType::doid());
    for (const auto& [a, t] : db.types.component_scheme(type, component).attrs)
        scheme.add(a, t);
    scheme.keys.push_back(derive_rvar_key(db.types, type, component));

    bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;
    std::vector<Oid> stored_oids;
    std::map<std::string, std::vector<Oid>> computed_groups;
    for (Oid o : objects_of_type(db, type)) {
        auto r = db.types.lookup_realization(db.cat.oids().type_of(o), component);
        if (!r) continue;
        if (r->first.kind == typesys::ComponentImpl::Kind::Stored)
            stored_oids.push_back(o);
        else
            computed_groups[r->second].push_back(o);
    }

    std::vector<Tuple> rows;
    if (!stored_oids.empty()) {
        const auto& var = db.base_var(ec.owner, scalar ? "" : component);
        std::size_t oid_col = var.scheme().require(oid_attr());
        std::set<std::uint64_t> wanted;
        for (Oid o : stored_oids) wanted.insert(o.value);
        std::vector<std::size_t> cols;
        for (std::size_t i = 1; i < scheme.attrs.size(); ++i)
            cols.push_back(var.scheme().require(scheme.attrs[i].first));
        for (const auto& t : var.tuples()) {
            if (t[oid_col].is_undefined() || !wanted.count(t[oid_col].as_oid().value)) continue;
            Tuple row{t[oid_col]};
            for (auto c : cols) row.push_back(t[c]);
            rows.push_back(std::move(row));
        }
    }
    for (const auto& [realizer, group] : computed_groups) {
        auto part = eval(realizer, component, group);
        if (!part.scheme().consistent_with(
                Scheme{scheme.attrs, {}}))
            throw Error(ErrorCode::SchemeMismatch,
                        "computed realization of '" + component + "' in " + realizer +
                            " produced scheme " + part.scheme().display() + ", expected " +
                            Scheme{scheme.attrs, {}}.display());
        std::vector<std::size_t> cols;
        for (const auto& [a, t] : scheme.attrs) cols.push_back(part.scheme().require(a));
        for (const auto& t : part.tuples()) {
            Tuple row;
            for (auto c : cols) row.push_back(t[c]);
            rows.push_back(std::move(row));
        }
    }
    return RelationValue(std::move(scheme), std::move(rows));
}

relalg::RelationValue type_rvar(const storage::Database& db, const ComputedEvaluator& eval,
                                const std::string& type) {
    auto eff = db.types.effective_components(type);
    Scheme scheme;
    scheme.add(oid_attr(), ScalarType::doid());
    struct Part {
        std::string comp;
        std::size_t nfields;
    };
    std::vector<Part> parts;
    for (const auto& ec : eff) {
        if (ec.spec.is_method || !ec.spec.has_value) continue;
        auto cs = db.types.component_scheme(type, ec.spec.name);
        bool refine = ec.spec.value.is_set || ec.spec.value.is_tuple;
        for (const auto& [a, t] : cs.attrs) {
            if (refine) {
                AttrName full{{ec.spec.name}};
                for (const auto& seg : a.segments) full.segments.push_back(seg);
                scheme.add(std::move(full), t);
            } else {
                scheme.add(a, t);
            }
        }
        parts.push_back({ec.spec.name, cs.attrs.size()});
    }

    std::vector<Tuple> rows;
    for (Oid o : objects_of_type(db, type)) rows.push_back({ScalarValue::of_oid(o)});
    for (const auto& part : parts) {
        auto crel = component_rvar(db, eval, type, part.comp);
        std::size_t oc = crel.scheme().require(oid_attr());
        std::map<std::uint64_t, std::vector<const Tuple*>> by_oid;
        for (const auto& t : crel.tuples()) by_oid[t[oc].as_oid().value].push_back(&t);
        std::vector<Tuple> next;
        for (const auto& row : rows) {
            auto it = by_oid.find(row[0].as_oid().value);
            if (it == by_oid.end()) {
                Tuple padded = row;
                padded.resize(row.size() + part.nfields);
                next.push_back(std::move(padded));
                continue;
            }
            for (const Tuple* m : it->second) {
                Tuple ext = row;
                for (std::size_t i = 0; i < m->size(); ++i)
                    if (i != oc) ext.push_back((*m)[i]);
                next.push_back(std::move(ext));
            }
        }
        rows = std::move(next);
    }
    return RelationValue(std::move(scheme), std::move(rows));
}

relalg::RelationValue object_of(const relalg::RelationValue& rel) {
    if (!rel.scheme().has(oid_attr()))
        throw Error(ErrorCode::NoOidAttribute,
                    "Object() needs a relation carrying the OID attribute");
    relalg::ProjectSpec spec;
    spec.keep = {oid_attr()};
    return relalg::project(rel, spec);
}

std::vector<Oid> group_oids(const relalg::RelationValue& group) {
    std::size_t c = group.scheme().require(oid_attr());
    std::vector<Oid> out;
    for (const auto& t : group.tuples())
        if (!t[c].is_undefined()) out.push_back(t[c].as_oid());
    std::sort(out.begin(), out.end());
    return out;
}

relalg::RelationValue make_group(const std::vector<Oid>& oids,
                                 const std::string& target_type) {
    Scheme s;
    s.add(oid_attr(), ScalarType::ref(target_type));
    std::vector<Tuple> rows;
    for (Oid o : oids) rows.push_back({ScalarValue::of_oid(o)});
    return RelationValue(std::move(s), std::move(rows));
}

relalg::RelationValue ref_rvar(const storage::Database& db, const ComputedEvaluator& eval,
                               const std::string& target_type,
                               const relalg::RelationValue& group,
                               const std::optional<std::string>& component) {
    auto base = component ? component_rvar(db, eval, target_type, *component)
                          : type_rvar(db, eval, target_type);
    std::set<std::uint64_t> wanted;
    for (Oid o : group_oids(group)) wanted.insert(o.value);
    std::size_t oc = base.scheme().require(oid_attr());
    return relalg::select_rows(base, [&](const Tuple& t) {
        return !t[oc].is_undefined() && wanted.count(t[oc].as_oid().value) != 0;
    });
}

relalg::RelationValue ov_retrieval(const relalg::RelationValue& rvar,
                                   const std::vector<relalg::PredicatePtr>& conds) {
    if (conds.empty()) return rvar;
    std::size_t oc = rvar.scheme().require(oid_attr());
    bool first = true;
    std::set<std::uint64_t> keep;
    for (const auto& c : conds) {
        auto hits = relalg::select_where(rvar, *c);
        std::set<std::uint64_t> g;
        for (const auto& t : hits.tuples())
            if (!t[oc].is_undefined()) g.insert(t[oc].as_oid().value);
        if (first) {
            keep = std::move(g);
            first = false;
        } else {
            std::set<std::uint64_t> both;
            std::set_intersection(keep.begin(), keep.end(), g.begin(), g.end(),
                                  std::inserter(both, both.begin()));
            keep = std::move(both);
        }
    }
    return relalg::select_rows(rvar, [&](const Tuple& t) {
        return !t[oc].is_undefined() && keep.count(t[oc].as_oid().value) != 0;
    });
}

relalg::RelationValue expand_ref(const storage::Database& db, const ComputedEvaluator& eval,
                                 const relalg::RelationValue& rel,
                                 const AttrName& ref_attr) {
    auto idx = rel.scheme().find(ref_attr);
    if (!idx || rel.scheme().attrs[*idx].second.kind != TypeKind::Ref)
        throw Error(ErrorCode::NotARefAttribute,
                    "'" + ref_attr.display() + "' is not a reference attribute");
    const std::string& target = rel.scheme().attrs[*idx].second.ref_target;
    if (target == typesys::object_root())
        throw Error(ErrorCode::NotARefAttribute,
                    "'" + ref_attr.display() + "' is an untyped reference; expansion needs a "
                    "declared target type");
    auto trel = type_rvar(db, eval, target);
    std::vector<std::pair<AttrName, AttrName>> renames;
    for (const auto& [a, t] : trel.scheme().attrs) {
        if (a == oid_attr()) continue;
        AttrName full = ref_attr;
        for (const auto& seg : a.segments) full.segments.push_back(seg);
        renames.push_back({a, std::move(full)});
    }
    return relalg::join_on(rel, relalg::rename(trel, renames), {{ref_attr, oid_attr()}});
}

relalg::RelationValue resolve_path(const storage::Database& db, const ComputedEvaluator& eval,
                                   const std::vector<std::string>& path) {
    if (path.empty())
        throw Error(ErrorCode::UnresolvablePath, "empty path");
    RelationValue rel;
    std::size_t i = 1;

    auto is_component = [&](const std::string& type, const std::string& name) {
        for (const auto& ec : db.types.effective_components(type))
            if (ec.spec.name == name && !ec.spec.is_method && ec.spec.has_value) return true;
        return false;
    };

    if (db.types.find_class(path[0])) {
        if (path.size() > 1 && is_component(path[0], path[1])) {
            rel = component_rvar(db, eval, path[0], path[1]);
            i = 2;
        } else {
            rel = type_rvar(db, eval, path[0]);
        }
    } else if (auto git = db.globals.find(path[0]); git != db.globals.end()) {
        const auto& gv = git->second;
        bool is_ref = !gv.type.is_tuple && gv.type.scalar.kind == TypeKind::Ref &&
                      gv.type.scalar.ref_target != typesys::object_root();
        if (is_ref && path.size() > 1 && is_component(gv.type.scalar.ref_target, path[1])) {
            rel = ref_rvar(db, eval, gv.type.scalar.ref_target, gv.value, path[1]);
            i = 2;
        } else {
            rel = gv.value;
        }
    } else {
        throw Error(ErrorCode::UnresolvablePath,
                    "'" + path[0] + "' names neither a type nor a variable");
    }

    std::vector<std::string> prefix;
    for (; i < path.size(); ++i) {
        AttrName cand{prefix};
        cand.segments.push_back(path[i]);
        auto idx = rel.scheme().find(cand);
        if (idx && rel.scheme().attrs[*idx].second.kind == TypeKind::Ref &&
            rel.scheme().attrs[*idx].second.ref_target != typesys::object_root()) {
            rel = expand_ref(db, eval, rel, cand);
            prefix = cand.segments;
            continue;
        }
        bool descends = false;
        for (const auto& [a, t] : rel.scheme().attrs) {
            if (a.segments.size() < cand.segments.size()) continue;
            if (std::equal(cand.segments.begin(), cand.segments.end(), a.segments.begin()))
                descends = true;
        }
        if (!descends)
            throw Error(ErrorCode::UnresolvablePath,
                        "cannot follow '" + path[i] + "' in path; no such attribute");
        prefix = cand.segments;
    }
    return rel;
}

} // namespace ro::rvars
