#include "ro/typesys.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "ro/error.hpp"

namespace ro::typesys {

namespace {

std::string upper(const std::string& s) {
    std::string r = s;
    std::transform(r.begin(), r.end(), r.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return r;
}

} // namespace

const std::string& object_root() {
    static const std::string n = "Object";
    return n;
}

std::optional<ScalarType> basic_scalar_type(const std::string& name) {
    std::string u = upper(name);
    if (u == "INTEGER") return ScalarType::integer();
    if (u == "FLOAT") return ScalarType::floating();
    if (u == "STRING") return ScalarType::string();
    if (u == "BOOLEAN") return ScalarType::boolean();
    if (u == "DATE") return ScalarType::date();
    return std::nullopt;
}

bool is_basic_type_name(const std::string& name) {
    return basic_scalar_type(name).has_value();
}

const TupleTypeDef* TypeRegistry::find_tuple(const std::string& name) const {
    auto it = tuples_.find(name);
    return it == tuples_.end() ? nullptr : &it->second;
}

const ObjectTypeDef* TypeRegistry::find_class(const std::string& name) const {
    if (name == object_root()) {
        static const ObjectTypeDef root{object_root(), {}, {}, {}};
        return &root;
    }
    auto it = classes_.find(name);
    return it == classes_.end() ? nullptr : &it->second;
}

const TupleTypeDef& TypeRegistry::require_tuple(const std::string& name) const {
    if (const auto* t = find_tuple(name)) return *t;
    throw Error(ErrorCode::UnknownType, "tuple type '" + name + "' is not declared");
}

const ObjectTypeDef& TypeRegistry::require_class(const std::string& name) const {
    if (const auto* c = find_class(name)) return *c;
    throw Error(ErrorCode::UnknownType, "object type '" + name + "' is not declared");
}

bool TypeRegistry::has_type(const std::string& name) const {
    return is_basic_type_name(name) || name == object_root() || tuples_.count(name) ||
           classes_.count(name);
}

ObjectTypeDef& TypeRegistry::mutable_class(const std::string& name) {
    auto it = classes_.find(name);
    if (it == classes_.end())
        throw Error(ErrorCode::UnknownType, "object type '" + name + "' is not declared");
    return it->second;
}

ScalarType TypeRegistry::scalar_type_for(const std::string& name) const {
    if (auto b = basic_scalar_type(name)) return *b;
    if (tuples_.count(name))
        throw Error(ErrorCode::UnknownScalarType,
                    "tuple type '" + name + "' cannot be used as a scalar type");
    // Declared class or forward reference: the reference scalar type.
    return ScalarType::ref(name);
}

ValueType TypeRegistry::value_type_for(const ast::TypeRef& t) const {
    ValueType v;
    if (auto b = basic_scalar_type(t.name)) {
        v = ValueType::of_scalar(*b);
    } else if (tuples_.count(t.name)) {
        v = ValueType::of_tuple(t.name);
    } else {
        v = ValueType::of_scalar(ScalarType::ref(t.name));
    }
    v.is_set = t.is_set;
    return v;
}

void TypeRegistry::define_tuple(TupleTypeDef def) {
    if (has_type(def.name))
        throw Error(ErrorCode::DuplicateName, "type name '" + def.name + "' already in use");
    if (def.attrs.empty())
        throw Error(ErrorCode::UnknownScalarType,
                    "tuple type '" + def.name + "' must declare at least one attribute");
    std::set<std::string> seen;
    for (const auto& [n, t] : def.attrs) {
        (void)t;
        if (!seen.insert(n).second)
            throw Error(ErrorCode::DuplicateName,
                        "duplicate attribute '" + n + "' in tuple type " + def.name);
    }
    tuple_order_.push_back(def.name);
    tuples_.emplace(def.name, std::move(def));
}

std::vector<std::string> TypeRegistry::ancestors(const std::string& type) const {
    require_class(type);
    std::vector<std::string> out;
    std::set<std::string> visited;
    std::function<void(const std::string&)> visit = [&](const std::string& t) {
        if (t == object_root() || !visited.insert(t).second) return;
        out.push_back(t);
        for (const auto& p : require_class(t).parents) visit(p);
    };
    visit(type);
    out.push_back(object_root());
    return out;
}

bool TypeRegistry::is_subtype(const std::string& derived, const std::string& base) const {
    if (base == object_root()) {
        require_class(derived);
        return true;
    }
    auto as = ancestors(derived);
    return std::find(as.begin(), as.end(), base) != as.end();
}

std::vector<std::string> TypeRegistry::direct_children(const std::string& type) const {
    std::vector<std::string> out;
    for (const auto& name : class_order_) {
        const auto& def = classes_.at(name);
        if (std::find(def.parents.begin(), def.parents.end(), type) != def.parents.end())
            out.push_back(name);
    }
    return out;
}

std::vector<EffectiveComponent>
TypeRegistry::effective_components(const std::string& type) const {
    require_class(type);
    std::vector<EffectiveComponent> out;
    std::set<std::string> emitted_types;
    // Inherited components first: depth-first, left-to-right, each declaring
    // type contributing once (virtual inheritance), then own components.
    std::function<void(const std::string&)> collect = [&](const std::string& t) {
        if (t == object_root() || !emitted_types.insert(t).second) return;
        const auto& def = require_class(t);
        for (const auto& p : def.parents) collect(p);
        for (const auto& spec : def.own) out.push_back({spec, t, ""});
    };
    collect(type);
    for (auto& ec : out) {
        try {
            auto r = lookup_realization(type, ec.spec.name);
            if (r) ec.realizer = r->second;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::AmbiguousRealization) throw;
        }
    }
    return out;
}

std::optional<std::pair<ComponentImpl, std::string>>
TypeRegistry::lookup_realization(const std::string& type, const std::string& component) const {
    auto as = ancestors(type);
    std::vector<std::string> candidates;
    for (const auto& t : as) {
        const auto& def = require_class(t);
        if (def.impls.count(component)) candidates.push_back(t);
    }
    if (candidates.empty()) return std::nullopt;
    // Keep only non-dominated candidates: drop any that is a strict ancestor
    // of another candidate (the nearer realization wins).
    std::vector<std::string> nearest;
    for (const auto& c : candidates) {
        bool dominated = false;
        for (const auto& other : candidates)
            if (other != c && is_subtype(other, c)) dominated = true;
        if (!dominated) nearest.push_back(c);
    }
    if (nearest.size() > 1) {
        std::string who;
        for (const auto& n : nearest) who += (who.empty() ? "" : ", ") + n;
        throw Error(ErrorCode::AmbiguousRealization,
                    "component '" + component + "' of " + type +
                        " has competing realizations in " + who +
                        "; the type must override it explicitly");
    }
    return std::make_pair(require_class(nearest[0]).impls.at(component), nearest[0]);
}

EffectiveComponent TypeRegistry::require_component(const std::string& type,
                                                   const std::string& component) const {
    for (auto& ec : effective_components(type))
        if (ec.spec.name == component) return ec;
    throw Error(ErrorCode::UnknownComponent,
                "type " + type + " has no component '" + component + "'");
}

relalg::Scheme TypeRegistry::component_scheme(const std::string& type,
                                              const std::string& component) const {
    auto ec = require_component(type, component);
    const auto& spec = ec.spec;
    relalg::Scheme s;
    if (spec.value.is_tuple) {
        const auto& tt = require_tuple(spec.value.tuple_name);
        for (const auto& [n, t] : tt.attrs) s.add(AttrName{n}, t);
    } else {
        s.add(AttrName{spec.name}, spec.value.scalar);
    }
    for (const auto& k : spec.keys) s.keys.push_back(k);
    return s;
}

void TypeRegistry::check_component_spec(const ObjectTypeDef& def,
                                        const ComponentSpec& spec) const {
    if (spec.is_method) {
        if (!spec.keys.empty())
            throw Error(ErrorCode::KeyFieldUnknown,
                        "method '" + spec.name + "' cannot carry keys");
        return;
    }
    // Fields a key may legally name.
    std::vector<std::string> fields;
    if (spec.value.is_tuple) {
        const auto& tt = require_tuple(spec.value.tuple_name);
        for (const auto& [n, t] : tt.attrs) {
            (void)t;
            fields.push_back(n);
        }
    } else {
        fields.push_back(spec.name);
    }
    for (const auto& k : spec.keys) {
        if (k.kind == relalg::KeyKind::Local && !spec.value.is_set)
            throw Error(ErrorCode::KeyFieldUnknown,
                        "local key on non-set component '" + spec.name + "' of " + def.name);
        if (k.fields.empty())
            throw Error(ErrorCode::KeyFieldUnknown, "empty key on '" + spec.name + "'");
        for (const auto& f : k.fields) {
            if (std::find(fields.begin(), fields.end(), f.display()) == fields.end())
                throw Error(ErrorCode::KeyFieldUnknown,
                            "key field '" + f.display() + "' is not a field of component '" +
                                spec.name + "'");
        }
        if (k.kind == relalg::KeyKind::Foreign) {
            if (!k.target)
                throw Error(ErrorCode::KeyFieldUnknown,
                            "foreign key on '" + spec.name + "' lacks a target");
            // Forward targets are validated when the target class appears.
            if (const auto* target = find_class(k.target->type_name)) {
                bool ok = false;
                for (const auto& ec : effective_components(k.target->type_name)) {
                    for (const auto& tk : ec.spec.keys) {
                        if (tk.kind == relalg::KeyKind::Global && tk.fields == k.target->fields)
                            ok = true;
                    }
                }
                (void)target;
                if (!ok)
                    throw Error(ErrorCode::ForeignKeyTargetNotGlobal,
                                "foreign key on '" + spec.name + "' must target a global key of " +
                                    k.target->type_name);
            }
        }
    }
}

void TypeRegistry::create_class(ObjectTypeDef def) {
    if (has_type(def.name))
        throw Error(ErrorCode::DuplicateName, "type name '" + def.name + "' already in use");
    for (const auto& p : def.parents)
        if (!classes_.count(p))
            throw Error(ErrorCode::UnknownParent, "parent type '" + p + "' is not declared");
    for (const auto& spec : def.own) check_component_spec(def, spec);

    // Duplicate detection across the virtual-inheritance merge.
    classes_.emplace(def.name, def);
    class_order_.push_back(def.name);
    try {
        std::set<std::string> names;
        for (const auto& ec : effective_components(def.name))
            if (!names.insert(ec.spec.name).second)
                throw Error(ErrorCode::DuplicateName,
                            "component '" + ec.spec.name + "' appears more than once in " +
                                def.name);
    } catch (...) {
        classes_.erase(def.name);
        class_order_.pop_back();
        throw;
    }
}

void TypeRegistry::alter_add(const std::string& type, ComponentSpec spec) {
    auto& def = mutable_class(type);
    for (const auto& ec : effective_components(type))
        if (ec.spec.name == spec.name)
            throw Error(ErrorCode::DuplicateName,
                        "component '" + spec.name + "' already exists in " + type);
    check_component_spec(def, spec);
    def.own.push_back(std::move(spec));
}

void TypeRegistry::alter_drop(const std::string& type, const std::string& component) {
    auto& def = mutable_class(type);
    auto it = std::find_if(def.own.begin(), def.own.end(),
                           [&](const ComponentSpec& s) { return s.name == component; });
    if (it == def.own.end()) {
        require_component(type, component); // throws UnknownComponent if absent entirely
        throw Error(ErrorCode::CannotAlterInherited,
                    "component '" + component + "' is inherited and cannot be dropped from " +
                        type);
    }
    def.own.erase(it);
    def.impls.erase(component);
}

void TypeRegistry::alter_alter(const std::string& type, ComponentSpec spec) {
    auto& def = mutable_class(type);
    auto it = std::find_if(def.own.begin(), def.own.end(),
                           [&](const ComponentSpec& s) { return s.name == spec.name; });
    if (it == def.own.end()) {
        require_component(type, spec.name);
        throw Error(ErrorCode::CannotAlterInherited,
                    "component '" + spec.name + "' is inherited and cannot be altered in " +
                        type);
    }
    check_component_spec(def, spec);
    *it = std::move(spec);
}

void TypeRegistry::check_computed_cycle(const std::string& type, const std::string& component,
                                        const ast::Expr& expr) const {
    // Conservative reachability over (type, component) pairs through Computed
    // realizations. A path head naming a class pulls in all components of
    // that class and of every subtype (the type R-variable unions subtype
    // computations).
    using Node = std::pair<std::string, std::string>;
    std::set<Node> on_stack, done;
    std::function<void(const std::string&, const ast::Expr&)> walk_expr;
    std::function<void(const Node&)> visit;

    auto edge_targets = [&](const std::string& ctx, const std::vector<std::string>& path,
                            std::vector<Node>& targets) {
        if (path.empty()) return;
        std::string head = path[0];
        auto comp_of = [&](const std::string& t, const std::string& c) -> bool {
            if (!find_class(t)) return false;
            for (const auto& ec : effective_components(t))
                if (ec.spec.name == c) return true;
            return false;
        };
        if (head == "this") {
            if (path.size() > 1 && comp_of(ctx, path[1])) targets.push_back({ctx, path[1]});
            return;
        }
        if (find_class(head) || head == type) {
            if (path.size() > 1 && comp_of(head, path[1])) {
                targets.push_back({head, path[1]});
            } else {
                // Whole type R-variable: all param-free components.
                if (find_class(head))
                    for (const auto& ec : effective_components(head))
                        if (!ec.spec.is_method) targets.push_back({head, ec.spec.name});
            }
            return;
        }
        if (comp_of(ctx, head)) targets.push_back({ctx, head});
    };

    walk_expr = [&](const std::string& ctx, const ast::Expr& e) {
        if (e.kind == ast::ExprKind::Path) {
            std::vector<Node> targets;
            edge_targets(ctx, e.path, targets);
            for (const auto& t : targets) visit(t);
        }
        for (const ast::ExprPtr& sub : {e.a, e.b})
            if (sub) walk_expr(ctx, *sub);
        for (const auto& c : e.conds) walk_expr(ctx, *c);
        for (const auto& a : e.args) walk_expr(ctx, *a);
        for (const auto& add : e.adds)
            if (add.source) walk_expr(ctx, *add.source);
        for (const auto& [p, v] : e.sets)
            if (v) walk_expr(ctx, *v);
    };

    visit = [&](const Node& n) {
        if (n.first == type && n.second == component)
            throw Error(ErrorCode::CycleDetected,
                        "computed component '" + component + "' of " + type +
                            " reads itself (directly or transitively)");
        if (done.count(n) || !on_stack.insert(n).second) return;
        // Follow Computed realizations of this component for the type and
        // every subtype (polymorphic union).
        std::vector<std::string> types{n.first};
        for (const auto& cname : class_order_)
            if (cname != n.first && is_subtype(cname, n.first)) types.push_back(cname);
        for (const auto& t : types) {
            bool present = false;
            if (find_class(t))
                for (const auto& ec : effective_components(t))
                    if (ec.spec.name == n.second) present = true;
            if (!present) continue;
            std::optional<std::pair<ComponentImpl, std::string>> r;
            try {
                r = lookup_realization(t, n.second);
            } catch (const Error&) {
                continue; // ambiguity is reported elsewhere
            }
            if (r && r->first.kind == ComponentImpl::Kind::Computed && r->first.expr)
                walk_expr(t, *r->first.expr);
        }
        on_stack.erase(n);
        done.insert(n);
    };

    // Seed: the proposed expression in the context of `type`.
    walk_expr(type, expr);
}

void TypeRegistry::realize(const std::string& type, const std::string& component,
                           ComponentImpl impl) {
    auto& def = mutable_class(type);
    auto ec = require_component(type, component);
    if (ec.spec.is_method) {
        if (impl.kind != ComponentImpl::Kind::Method)
            throw Error(ErrorCode::ImplKindMismatch,
                        "component '" + component + "' is a method; realize it with a body");
    } else {
        if (impl.kind == ComponentImpl::Kind::Method)
            throw Error(ErrorCode::ImplKindMismatch,
                        "component '" + component + "' is an attribute; a body is not a legal "
                        "realization");
    }
    if (impl.kind == ComponentImpl::Kind::Computed && impl.expr) {
        // Temporarily install so self-reference through subtypes is seen.
        auto saved = def.impls;
        def.impls[component] = impl;
        try {
            check_computed_cycle(type, component, *impl.expr);
        } catch (...) {
            def.impls = std::move(saved);
            throw;
        }
        return;
    }
    def.impls[component] = std::move(impl);
}

void TypeRegistry::drop_class(const std::string& type) {
    mutable_class(type);
    auto children = direct_children(type);
    if (!children.empty())
        throw Error(ErrorCode::TypeInUse,
                    "type " + type + " is extended by " + children.front());
    classes_.erase(type);
    class_order_.erase(std::remove(class_order_.begin(), class_order_.end(), type),
                       class_order_.end());
}

const ComponentSpec* TypeRegistry::constructor_of(const std::string& type) const {
    const auto& def = require_class(type);
    for (const auto& s : def.own)
        if (s.name == type && s.is_method) return &s;
    return nullptr;
}

const ComponentSpec* TypeRegistry::destructor_of(const std::string& type) const {
    const auto& def = require_class(type);
    for (const auto& s : def.own)
        if (s.name == "~" + type && s.is_method) return &s;
    return nullptr;
}

void TypeRegistry::check_fully_realized(const std::string& type) const {
    for (const auto& ec : effective_components(type)) {
        if (ec.spec.is_method) continue;
        if (!lookup_realization(type, ec.spec.name))
            throw Error(ErrorCode::UnrealizedComponent,
                        "component '" + ec.spec.name + "' of " + type +
                            " has no realization; objects cannot be created");
    }
}

} // namespace ro::typesys
