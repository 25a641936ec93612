#include "ro/rcompiler.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ro/error.hpp"
#include "ro/printer.hpp"

namespace ro::rcompiler {
namespace {

using relalg::Predicate;
using relalg::PredicatePtr;
using relalg::RelationValue;
using relalg::Scheme;
using relalg::Term;
using relalg::TermPtr;
using relalg::Tuple;

[[noreturn]] void fail(ErrorCode c, const std::string& m) { throw Error(c, m); }

constexpr int kLoopCap = 10000;
constexpr int kDepthCap = 64;

ScalarType group_member_type(const std::string& type) {
    return type.empty() ? ScalarType::doid() : ScalarType::ref(type);
}

RelationValue group_rel(const std::vector<Oid>& oids, const std::string& type) {
    Scheme s;
    s.add(this_attr(), group_member_type(type));
    std::vector<Tuple> rows;
    rows.reserve(oids.size());
    for (Oid o : oids) rows.push_back({ScalarValue::of_oid(o)});
    return RelationValue(std::move(s), std::move(rows));
}

// Members of a group relation (#this values), canonical order. The top-level
// frame uses a single Undefined member.
std::vector<ScalarValue> members_of(const RelationValue& g) {
    std::vector<ScalarValue> out;
    std::size_t i = g.scheme().require(this_attr());
    for (const auto& t : g.tuples()) out.push_back(t[i]);
    return out;
}

/// An evaluated expression: a relation threaded by the reserved #this column.
/// `scalar` marks a per-member scalar (payload is the single #val column, one
/// row per member). `obj_type` names the object type when rows carry the OID
/// column or the scalar is a reference.
struct Value {
    RelationValue rel;
    bool scalar = false;
    std::string obj_type;
};

struct Frame {
    std::string type; // context object type; empty at top level
    RelationValue group;
    const std::map<std::string, std::pair<ScalarValue, ScalarType>>* params = nullptr;
    std::map<std::string, Value>* locals = nullptr;
};

RelationValue keep_attrs(const RelationValue& r, std::vector<AttrName> keep) {
    relalg::ProjectSpec spec;
    spec.keep = std::move(keep);
    return relalg::project(r, spec);
}

RelationValue drop_attrs(const RelationValue& r, std::vector<AttrName> drop) {
    if (drop.empty()) return r;
    relalg::ProjectSpec spec;
    spec.drop = std::move(drop);
    return relalg::project(r, spec);
}

// Type of the #this column of the current frame's group.
ScalarType this_type(const Frame& f) {
    const Scheme& s = f.group.scheme();
    return s.attrs[s.require(this_attr())].second;
}

struct ExecState;

class Evaluator {
  public:
    explicit Evaluator(storage::Database& db) : db_(db) {}

    Value eval(Frame& f, const ast::Expr& e);
    RelationValue run_method(const std::string& type, const std::string& method,
                             const std::vector<Oid>& group,
                             const std::vector<ScalarValue>& args);
    void run_statements(ExecState& st, const std::vector<ast::StmtPtr>& stmts,
                        const RelationValue& gate);
    rvars::ComputedEvaluator hook();

    storage::Database& db() { return db_; }
    std::vector<std::string> warnings;

  private:
    friend struct RowEnv;
    storage::Database& db_;
    int depth_ = 0;

    Value eval_path(Frame& f, const std::vector<std::string>& path);
    Value head_value(Frame& f, const std::string& name);
    Value step(Frame& f, Value v, std::vector<std::string>& prefix, const std::string& seg);
    Value component_read(Frame& f, const std::string& comp);
    Value this_read(Frame& f);
    Value type_read(Frame& f, const std::string& type);
    Value global_read(Frame& f, const std::string& name);
    Value call(Frame& f, const ast::Expr& e);
    Value ov_retrieve(Frame& f, const ast::Expr& e);
    Value scalar_binary(Frame& f, ast::BinOp op, Value a, Value b);
    Value to_scalar(Frame& f, Value v);
    Value pad_scalar(Frame& f, Value v);
    RelationValue to_group_pairs(Frame& f, const Value& v);
    std::vector<bool> bool_per_member(Frame& f, const Value& v, const char* what);

    RelationValue component_rows(Frame& f, const std::string& ctx_type,
                                 const std::string& comp, Value v);
    void assign(ExecState& st, const RelationValue& act, const ast::Expr& target,
                const ast::Expr& rhs);
    void exec_return(ExecState& st, const RelationValue& act, const ast::ExprPtr& expr);

    struct DepthGuard {
        Evaluator& ev;
        explicit DepthGuard(Evaluator& e) : ev(e) {
            if (++ev.depth_ > kDepthCap)
                fail(ErrorCode::EvaluationError, "call depth limit exceeded");
        }
        ~DepthGuard() { --ev.depth_; }
    };
};

/// Execution state of one method body over one group.
struct ExecState {
    Frame f;           // f.group = the full invocation group
    RelationValue alive; // members that have not returned yet
    std::map<std::string, Value> locals;
    std::map<std::string, std::pair<ScalarValue, ScalarType>> params;
    const typesys::ComponentSpec* spec = nullptr; // null for bare bodies
    Scheme result_payload;                        // without the OID column
    std::vector<Tuple> result_rows;               // OID + payload
};

// --- Row-level compilation of conditions ----------------------------------

/// Translates a scalar condition/expression into a relalg predicate over the
/// rows of one operand relation. Context reads (params, `this`, component
/// scalars) are materialized as auxiliary columns joined per member.
struct RowEnv {
    Evaluator& ev;
    Frame& f;
    RelationValue rel; // operand, extended with aux columns as needed
    std::vector<AttrName> aux;
    int next_aux = 0;

    RowEnv(Evaluator& e, Frame& fr, RelationValue r) : ev(e), f(fr), rel(std::move(r)) {}

    AttrName add_aux(Value scalar) {
        AttrName name(std::string("#c") + std::to_string(next_aux++));
        ScalarType t = scalar.rel.scheme().attrs[scalar.rel.scheme().require(val_attr())].second;
        RelationValue col = relalg::rename(scalar.rel, {{val_attr(), name}});
        rel = relalg::join_on(rel, col, {{this_attr(), this_attr()}});
        aux.push_back(name);
        (void)t;
        return name;
    }

    TermPtr term(const ast::Expr& e) {
        switch (e.kind) {
        case ast::ExprKind::Lit: return Term::make_lit(e.lit);
        case ast::ExprKind::Path: {
            AttrName full(e.path);
            if (rel.scheme().has(full)) return Term::make_attr(full);
            if (e.path.size() == 1 && e.path[0] == "this" && rel.scheme().has(this_attr()))
                return Term::make_attr(this_attr());
            break;
        }
        case ast::ExprKind::Binary:
            switch (e.op) {
            case ast::BinOp::Add:
                return Term::make_arith(relalg::ArithOp::Add, term(*e.a), term(*e.b));
            case ast::BinOp::Sub:
                return Term::make_arith(relalg::ArithOp::Sub, term(*e.a), term(*e.b));
            case ast::BinOp::Mul:
                return Term::make_arith(relalg::ArithOp::Mul, term(*e.a), term(*e.b));
            case ast::BinOp::Div:
                return Term::make_arith(relalg::ArithOp::Div, term(*e.a), term(*e.b));
            default: break;
            }
            break;
        default: break;
        }
        // Context-level scalar: evaluate per member and join as a column.
        Value v = ev.eval(f, e);
        v = ev.to_scalar(f, std::move(v));
        return Term::make_attr(add_aux(std::move(v)));
    }

    PredicatePtr pred(const ast::Expr& e) {
        switch (e.kind) {
        case ast::ExprKind::Lit:
            if (std::holds_alternative<bool>(e.lit.storage()))
                return Predicate::make_bool(e.lit.as_bool());
            break;
        case ast::ExprKind::Not: return Predicate::make_not(pred(*e.a));
        case ast::ExprKind::IsNull: return Predicate::make_is_null(term(*e.a), e.negated);
        case ast::ExprKind::Binary:
            switch (e.op) {
            case ast::BinOp::And: return Predicate::make_and(pred(*e.a), pred(*e.b));
            case ast::BinOp::Or: return Predicate::make_or(pred(*e.a), pred(*e.b));
            case ast::BinOp::Eq: return cmp(relalg::CmpOp::Eq, e);
            case ast::BinOp::Ne: return cmp(relalg::CmpOp::Ne, e);
            case ast::BinOp::Lt: return cmp(relalg::CmpOp::Lt, e);
            case ast::BinOp::Le: return cmp(relalg::CmpOp::Le, e);
            case ast::BinOp::Gt: return cmp(relalg::CmpOp::Gt, e);
            case ast::BinOp::Ge: return cmp(relalg::CmpOp::Ge, e);
            default: break;
            }
            break;
        case ast::ExprKind::OvRetrieve: return ov_pred(e);
        default: break;
        }
        // Anything else must evaluate to a per-member or row-level boolean.
        return Predicate::make_cmp(relalg::CmpOp::Eq, term(e),
                                   Term::make_lit(ScalarValue::of_bool(true)));
    }

    PredicatePtr cmp(relalg::CmpOp op, const ast::Expr& e) {
        return Predicate::make_cmp(op, term(*e.a), term(*e.b));
    }

    /// Retrieval in predicate position: `refattr<c1,...>` holds for a row
    /// when the referenced object is in the value-retrieved set.
    PredicatePtr ov_pred(const ast::Expr& e);
};

// --- Expression evaluation ------------------------------------------------

Value Evaluator::this_read(Frame& f) {
    if (f.type.empty()) fail(ErrorCode::UnknownName, "'this' outside an object context");
    Scheme s;
    s.add(this_attr(), this_type(f));
    s.add(val_attr(), ScalarType::ref(f.type));
    std::vector<Tuple> rows;
    for (const auto& m : members_of(f.group)) rows.push_back({m, m});
    Value v;
    v.rel = RelationValue(std::move(s), std::move(rows));
    v.scalar = true;
    v.obj_type = f.type;
    return v;
}

Value Evaluator::component_read(Frame& f, const std::string& comp) {
    auto ec = db_.types.require_component(f.type, comp);
    if (ec.spec.is_method)
        fail(ErrorCode::ExprTypeError, "method '" + comp + "' must be called");
    RelationValue crel = rvars::component_rvar(db_, hook(), f.type, comp);
    RelationValue joined = relalg::join_on(f.group, crel, {{this_attr(), oid_attr()}});
    Value v;
    bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;
    if (scalar) {
        v.rel = relalg::rename(joined, {{AttrName(comp), val_attr()}});
        v.scalar = true;
        if (ec.spec.value.scalar.is_ref()) v.obj_type = ec.spec.value.scalar.ref_target;
        v = pad_scalar(f, std::move(v));
    } else {
        v.rel = std::move(joined);
    }
    return v;
}

Value Evaluator::type_read(Frame& f, const std::string& type) {
    RelationValue trel = rvars::type_rvar(db_, hook(), type);
    Value v;
    v.rel = relalg::product(f.group, trel);
    v.obj_type = type;
    return v;
}

Value Evaluator::global_read(Frame& f, const std::string& name) {
    const auto& gv = db_.globals.at(name);
    Value v;
    v.rel = relalg::product(f.group, gv.value);
    if (!gv.type.is_set && !gv.type.is_tuple) {
        if (gv.type.scalar.is_ref()) {
            v.rel = relalg::rename(v.rel, {{oid_attr(), val_attr()}});
            v.obj_type = gv.type.scalar.ref_target;
        }
        v.scalar = true;
        v = pad_scalar(f, std::move(v));
    } else if (!gv.type.is_tuple && gv.type.scalar.is_ref()) {
        v.obj_type = gv.type.scalar.ref_target;
    }
    return v;
}

Value Evaluator::head_value(Frame& f, const std::string& name) {
    if (name == "this") return this_read(f);
    if (f.params) {
        auto it = f.params->find(name);
        if (it != f.params->end()) {
            Scheme s;
            s.add(this_attr(), this_type(f));
            s.add(val_attr(), it->second.second);
            std::vector<Tuple> rows;
            for (const auto& m : members_of(f.group)) rows.push_back({m, it->second.first});
            Value v;
            v.rel = RelationValue(std::move(s), std::move(rows));
            v.scalar = true;
            if (it->second.second.is_ref()) v.obj_type = it->second.second.ref_target;
            return v;
        }
    }
    if (f.locals) {
        auto it = f.locals->find(name);
        if (it != f.locals->end()) {
            // Restrict the stored value to the current (gated) group.
            Value v = it->second;
            std::size_t i = v.rel.scheme().require(this_attr());
            std::set<ScalarValue> here;
            for (const auto& m : members_of(f.group)) here.insert(m);
            v.rel = relalg::select_rows(
                v.rel, [&](const Tuple& t) { return here.count(t[i]) != 0; });
            if (v.scalar) v = pad_scalar(f, std::move(v));
            return v;
        }
    }
    if (!f.type.empty()) {
        bool is_comp = false;
        try {
            // A constructor shares its class's name; the bare name keeps
            // meaning the type.
            auto ec = db_.types.require_component(f.type, name);
            is_comp = !(ec.spec.is_method && db_.types.find_class(name));
        } catch (const Error&) {
        }
        if (is_comp) return component_read(f, name);
    }
    if (db_.types.find_class(name) || name == typesys::object_root()) return type_read(f, name);
    if (db_.globals.count(name)) return global_read(f, name);
    fail(ErrorCode::UnknownName, "unknown name '" + name + "'");
}

Value Evaluator::pad_scalar(Frame& f, Value v) {
    std::size_t ti = v.rel.scheme().require(this_attr());
    std::map<ScalarValue, int> count;
    for (const auto& t : v.rel.tuples()) ++count[t[ti]];
    std::vector<Tuple> rows = v.rel.tuples();
    for (const auto& m : members_of(f.group)) {
        auto it = count.find(m);
        if (it != count.end() && it->second > 1)
            fail(ErrorCode::EvaluationError, "scalar expression yields several values");
        if (it == count.end() || it->second == 0) {
            Tuple row(v.rel.scheme().attrs.size(), ScalarValue::undefined());
            row[ti] = m;
            rows.push_back(std::move(row));
        }
    }
    v.rel = RelationValue(v.rel.scheme(), std::move(rows));
    return v;
}

Value Evaluator::to_scalar(Frame& f, Value v) {
    if (v.scalar) return v;
    // A relation with a single payload attribute and at most one row per
    // member reads as a scalar.
    std::vector<AttrName> payload;
    for (const auto& [name, type] : v.rel.scheme().attrs)
        if (name != this_attr()) payload.push_back(name);
    AttrName pick;
    if (payload.size() == 1) {
        pick = payload[0];
    } else if (payload.size() == 2 && (payload[0] == oid_attr() || payload[1] == oid_attr())) {
        // Group-shaped values with one scalar component column.
        pick = payload[0] == oid_attr() ? payload[1] : payload[0];
        v.rel = keep_attrs(v.rel, {this_attr(), pick});
    } else {
        fail(ErrorCode::ExprTypeError, "relation used where a scalar is needed");
    }
    ScalarType t = v.rel.scheme().attrs[v.rel.scheme().require(pick)].second;
    v.rel = relalg::rename(v.rel, {{pick, val_attr()}});
    v.scalar = true;
    if (t.is_ref() && v.obj_type.empty()) v.obj_type = t.ref_target;
    return pad_scalar(f, std::move(v));
}

RelationValue Evaluator::to_group_pairs(Frame& f, const Value& v) {
    if (v.scalar) {
        RelationValue r = relalg::rename(v.rel, {{val_attr(), oid_attr()}});
        std::size_t i = r.scheme().require(oid_attr());
        return relalg::select_rows(r, [&](const Tuple& t) { return !t[i].is_undefined(); });
    }
    if (!v.rel.scheme().has(oid_attr()))
        fail(ErrorCode::NoOidAttribute, "relation has no OID attribute");
    (void)f;
    return keep_attrs(v.rel, {this_attr(), oid_attr()});
}

std::vector<bool> Evaluator::bool_per_member(Frame& f, const Value& v, const char* what) {
    Value s = v;
    if (!s.scalar) s = to_scalar(f, std::move(s));
    std::size_t ti = s.rel.scheme().require(this_attr());
    std::size_t vi = s.rel.scheme().require(val_attr());
    std::map<ScalarValue, bool> per;
    for (const auto& t : s.rel.tuples()) {
        if (t[vi].is_undefined()) {
            per[t[ti]] = false; // two-valued logic: undefined counts as FALSE
        } else if (std::holds_alternative<bool>(t[vi].storage())) {
            per[t[ti]] = t[vi].as_bool();
        } else {
            fail(ErrorCode::NonBooleanCondition, std::string(what) + " is not boolean");
        }
    }
    std::vector<bool> out;
    for (const auto& m : members_of(f.group)) out.push_back(per.count(m) ? per[m] : false);
    return out;
}

ScalarValue scalar_arith(ast::BinOp op, const ScalarValue& a, const ScalarValue& b) {
    if (a.is_undefined() || b.is_undefined()) return ScalarValue::undefined();
    bool ai = std::holds_alternative<std::int64_t>(a.storage());
    bool bi = std::holds_alternative<std::int64_t>(b.storage());
    bool af = std::holds_alternative<double>(a.storage());
    bool bf = std::holds_alternative<double>(b.storage());
    if ((!ai && !af) || (!bi && !bf))
        fail(ErrorCode::TypeMismatch, "arithmetic requires numeric operands");
    if (ai && bi) {
        std::int64_t x = a.as_int(), y = b.as_int();
        switch (op) {
        case ast::BinOp::Add: return ScalarValue::of_int(x + y);
        case ast::BinOp::Sub: return ScalarValue::of_int(x - y);
        case ast::BinOp::Mul: return ScalarValue::of_int(x * y);
        case ast::BinOp::Div:
            if (y == 0) fail(ErrorCode::EvaluationError, "division by zero");
            return ScalarValue::of_int(x / y);
        default: break;
        }
    }
    double x = ai ? double(a.as_int()) : a.as_float();
    double y = bi ? double(b.as_int()) : b.as_float();
    switch (op) {
    case ast::BinOp::Add: return ScalarValue::of_float(x + y);
    case ast::BinOp::Sub: return ScalarValue::of_float(x - y);
    case ast::BinOp::Mul: return ScalarValue::of_float(x * y);
    case ast::BinOp::Div:
        if (y == 0) fail(ErrorCode::EvaluationError, "division by zero");
        return ScalarValue::of_float(x / y);
    default: break;
    }
    fail(ErrorCode::EvaluationError, "bad arithmetic operator");
}

bool scalar_compare(ast::BinOp op, const ScalarValue& a, const ScalarValue& b) {
    auto c = compare_for_predicate(a, b);
    if (!c) return false;
    switch (op) {
    case ast::BinOp::Eq: return *c == std::strong_ordering::equal;
    case ast::BinOp::Ne: return *c != std::strong_ordering::equal;
    case ast::BinOp::Lt: return *c == std::strong_ordering::less;
    case ast::BinOp::Le: return *c != std::strong_ordering::greater;
    case ast::BinOp::Gt: return *c == std::strong_ordering::greater;
    case ast::BinOp::Ge: return *c != std::strong_ordering::less;
    default: break;
    }
    return false;
}

Value Evaluator::scalar_binary(Frame& f, ast::BinOp op, Value a, Value b) {
    a = to_scalar(f, std::move(a));
    b = to_scalar(f, std::move(b));
    RelationValue rb = relalg::rename(b.rel, {{val_attr(), AttrName("#v2")}});
    RelationValue j = relalg::join_on(a.rel, rb, {{this_attr(), this_attr()}});
    std::size_t ti = j.scheme().require(this_attr());
    std::size_t xi = j.scheme().require(val_attr());
    std::size_t yi = j.scheme().require(AttrName("#v2"));

    bool arith = op == ast::BinOp::Add || op == ast::BinOp::Sub || op == ast::BinOp::Mul ||
                 op == ast::BinOp::Div;
    bool boolean = op == ast::BinOp::And || op == ast::BinOp::Or;

    ScalarType out_type = ScalarType::boolean();
    if (arith) {
        // Result type follows the operands; default integer when all rows
        // are undefined.
        out_type = ScalarType::integer();
        for (const auto& t : j.tuples())
            if (std::holds_alternative<double>(t[xi].storage()) ||
                std::holds_alternative<double>(t[yi].storage()))
                out_type = ScalarType::floating();
    }

    Scheme s;
    s.add(this_attr(), j.scheme().attrs[ti].second);
    s.add(val_attr(), out_type);
    std::vector<Tuple> rows;
    for (const auto& t : j.tuples()) {
        ScalarValue r;
        if (arith) {
            r = scalar_arith(op, t[xi], t[yi]);
        } else if (boolean) {
            auto as_b = [](const ScalarValue& v) {
                if (v.is_undefined()) return false;
                if (!std::holds_alternative<bool>(v.storage()))
                    fail(ErrorCode::NonBooleanCondition, "operand is not boolean");
                return v.as_bool();
            };
            bool x = as_b(t[xi]), y = as_b(t[yi]);
            r = ScalarValue::of_bool(op == ast::BinOp::And ? (x && y) : (x || y));
        } else {
            r = ScalarValue::of_bool(scalar_compare(op, t[xi], t[yi]));
        }
        rows.push_back({t[ti], r});
    }
    Value v;
    v.rel = RelationValue(std::move(s), std::move(rows));
    v.scalar = true;
    return pad_scalar(f, std::move(v));
}

Value Evaluator::step(Frame& f, Value v, std::vector<std::string>& prefix,
                      const std::string& seg) {
    if (v.scalar) {
        // A reference scalar: read a component of the referenced objects.
        if (v.obj_type.empty())
            fail(ErrorCode::UnresolvablePath, "'" + seg + "' after a non-reference value");
        const std::string target = v.obj_type;
        auto ec = db_.types.require_component(target, seg);
        if (ec.spec.is_method) fail(ErrorCode::ExprTypeError, "method '" + seg + "' must be called");
        RelationValue crel = rvars::component_rvar(db_, hook(), target, seg);
        RelationValue joined = relalg::join_on(v.rel, crel, {{val_attr(), oid_attr()}});
        joined = drop_attrs(joined, {val_attr()});
        Value out;
        bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;
        if (scalar) {
            out.rel = relalg::rename(joined, {{AttrName(seg), val_attr()}});
            out.scalar = true;
            if (ec.spec.value.scalar.is_ref()) out.obj_type = ec.spec.value.scalar.ref_target;
            out = pad_scalar(f, std::move(out));
        } else {
            out.rel = std::move(joined);
        }
        prefix.clear();
        return out;
    }

    // Group-shaped value: a component of the group's objects.
    if (v.rel.scheme().has(oid_attr()) && !v.obj_type.empty()) {
        bool is_comp = false;
        try {
            db_.types.require_component(v.obj_type, seg);
            is_comp = true;
        } catch (const Error&) {
        }
        if (is_comp && !v.rel.scheme().has(AttrName(seg))) {
            auto ec = db_.types.require_component(v.obj_type, seg);
            if (ec.spec.is_method)
                fail(ErrorCode::ExprTypeError, "method '" + seg + "' must be called");
            RelationValue pairs = keep_attrs(v.rel, {this_attr(), oid_attr()});
            RelationValue crel = rvars::component_rvar(db_, hook(), v.obj_type, seg);
            RelationValue joined = relalg::join_on(pairs, crel, {{oid_attr(), oid_attr()}});
            Value out;
            out.rel = std::move(joined);
            if (!ec.spec.value.is_set && !ec.spec.value.is_tuple &&
                ec.spec.value.scalar.is_ref())
                out.obj_type = ec.spec.value.scalar.ref_target;
            prefix.clear();
            return out;
        }
    }

    // Attribute descent: exact (possibly refined) name, reference hops expand.
    std::vector<std::string> cand = prefix;
    cand.push_back(seg);
    AttrName attr(cand);
    if (v.rel.scheme().has(attr)) {
        const ScalarType& t = v.rel.scheme().attrs[v.rel.scheme().require(attr)].second;
        if (t.is_ref() && t.ref_target != typesys::object_root() &&
            db_.types.find_class(t.ref_target)) {
            v.rel = rvars::expand_ref(db_, hook(), v.rel, attr);
            prefix = cand;
            v.obj_type.clear();
            return v;
        }
        prefix.clear();
        Value out;
        out.rel = keep_attrs(v.rel, {this_attr(), attr});
        out.rel = relalg::rename(out.rel, {{attr, AttrName(seg)}});
        if (t.is_ref()) out.obj_type = t.ref_target;
        return out;
    }
    // Descend into a refined component: keep accumulating the prefix.
    for (const auto& [name, type] : v.rel.scheme().attrs) {
        if (name.segments.size() > cand.size() &&
            std::equal(cand.begin(), cand.end(), name.segments.begin())) {
            prefix = cand;
            return v;
        }
    }
    fail(ErrorCode::UnresolvablePath, "cannot resolve '" + seg + "'");
}

Value Evaluator::eval_path(Frame& f, const std::vector<std::string>& path) {
    Value v = head_value(f, path[0]);
    std::vector<std::string> prefix;
    for (std::size_t i = 1; i < path.size(); ++i) v = step(f, std::move(v), prefix, path[i]);
    if (!prefix.empty()) {
        // Trailing refined prefix: keep only the attributes under it.
        std::vector<AttrName> keep{this_attr()};
        for (const auto& [name, type] : v.rel.scheme().attrs)
            if (name.segments.size() > prefix.size() &&
                std::equal(prefix.begin(), prefix.end(), name.segments.begin()))
                keep.push_back(name);
        v.rel = keep_attrs(v.rel, keep);
    }
    return v;
}

Value Evaluator::ov_retrieve(Frame& f, const ast::Expr& e) {
    Value base = eval(f, *e.a);
    bool was_scalar_ref = base.scalar;
    if (base.scalar) {
        if (base.obj_type.empty())
            fail(ErrorCode::NotARefAttribute, "value retrieval needs an object set");
        RelationValue pairs = to_group_pairs(f, base);
        RelationValue trel = rvars::type_rvar(db_, hook(), base.obj_type);
        base.rel = relalg::join_on(pairs, trel, {{oid_attr(), oid_attr()}});
        base.scalar = false;
    }
    if (!base.rel.scheme().has(oid_attr()))
        fail(ErrorCode::NoOidAttribute, "value retrieval needs an OID attribute");

    RelationValue g = keep_attrs(base.rel, {this_attr(), oid_attr()});
    for (const auto& c : e.conds) {
        RowEnv env(*this, f, base.rel);
        PredicatePtr p = env.pred(*c);
        relalg::check_predicate(*p, env.rel.scheme());
        RelationValue sel = relalg::select_where(env.rel, *p);
        RelationValue gi = keep_attrs(sel, {this_attr(), oid_attr()});
        g = relalg::intersect(g, gi);
    }
    std::size_t ti = base.rel.scheme().require(this_attr());
    std::size_t oi = base.rel.scheme().require(oid_attr());
    Value out;
    out.rel = relalg::select_rows(
        base.rel, [&](const Tuple& t) { return g.contains({t[ti], t[oi]}); });
    out.obj_type = base.obj_type;
    if (was_scalar_ref) {
        out.rel = keep_attrs(out.rel, {this_attr(), oid_attr()});
    }
    return out;
}

PredicatePtr RowEnv::ov_pred(const ast::Expr& e) {
    // The base must name a reference: a (possibly refined) attribute of the
    // operand or a context-level reference scalar.
    TermPtr refterm;
    std::string target;
    if (e.a->kind == ast::ExprKind::Path) {
        AttrName attr(e.a->path);
        if (rel.scheme().has(attr)) {
            const ScalarType& t = rel.scheme().attrs[rel.scheme().require(attr)].second;
            if (!t.is_ref())
                fail(ErrorCode::NotARefAttribute,
                     "'" + attr.display() + "' is not a reference");
            target = t.ref_target;
            refterm = Term::make_attr(attr);
        }
    }
    if (!refterm) {
        Value v = ev.eval(f, *e.a);
        v = ev.to_scalar(f, std::move(v));
        if (v.obj_type.empty())
            fail(ErrorCode::NotARefAttribute, "retrieval base is not a reference");
        target = v.obj_type;
        refterm = Term::make_attr(add_aux(std::move(v)));
    }
    if (target == typesys::object_root() || !ev.db().types.find_class(target))
        fail(ErrorCode::NotARefAttribute, "reference target type is unknown");

    // Per-member set of objects of the target type satisfying every
    // condition; membership keyed by (member, referenced OID).
    Value tv = ev.type_read(f, target);
    RelationValue g = keep_attrs(tv.rel, {this_attr(), oid_attr()});
    for (const auto& c : e.conds) {
        RowEnv env(ev, f, tv.rel);
        PredicatePtr p = env.pred(*c);
        relalg::check_predicate(*p, env.rel.scheme());
        RelationValue sel = relalg::select_where(env.rel, *p);
        g = relalg::intersect(g, keep_attrs(sel, {this_attr(), oid_attr()}));
    }
    return Predicate::make_in({Term::make_attr(this_attr()), refterm}, std::move(g));
}

Value Evaluator::call(Frame& f, const ast::Expr& e) {
    // Resolve the receiver to (member, OID) pairs and the method's type.
    RelationValue pairs;
    std::string rtype;
    if (e.a) {
        Value recv = eval(f, *e.a);
        if (recv.obj_type.empty())
            fail(ErrorCode::ExprTypeError, "cannot determine the receiver type of '" +
                                               e.name + "'");
        rtype = recv.obj_type;
        pairs = to_group_pairs(f, recv);
    } else {
        if (f.type.empty())
            fail(ErrorCode::UnknownName, "method call '" + e.name + "' outside an object context");
        rtype = f.type;
        Value self = this_read(f);
        pairs = to_group_pairs(f, self);
    }
    auto ec = db_.types.require_component(rtype, e.name);
    if (!ec.spec.is_method)
        fail(ErrorCode::ExprTypeError, "'" + e.name + "' is not a method");

    // Arguments are per-call constants: each must be single-valued across
    // the group.
    std::vector<ScalarValue> args;
    for (const auto& a : e.args) {
        Value av = to_scalar(f, eval(f, *a));
        std::size_t vi = av.rel.scheme().require(val_attr());
        std::set<ScalarValue> distinct;
        for (const auto& t : av.rel.tuples())
            if (!t[vi].is_undefined()) distinct.insert(t[vi]);
        if (distinct.size() > 1)
            fail(ErrorCode::EvaluationError, "method argument is not single-valued");
        args.push_back(distinct.empty() ? ScalarValue::undefined() : *distinct.begin());
    }

    std::size_t oi = pairs.scheme().require(oid_attr());
    std::set<Oid> oids;
    for (const auto& t : pairs.tuples())
        if (!t[oi].is_undefined()) oids.insert(t[oi].as_oid());
    RelationValue results =
        run_method(rtype, e.name, std::vector<Oid>(oids.begin(), oids.end()), args);
    RelationValue joined = relalg::join_on(pairs, results, {{oid_attr(), oid_attr()}});
    Value out;
    out.rel = drop_attrs(joined, {oid_attr()});
    if (ec.spec.has_value && !ec.spec.value.is_set && !ec.spec.value.is_tuple) {
        // Collapses to a per-member scalar when single-valued.
        std::size_t ti = out.rel.scheme().require(this_attr());
        std::map<ScalarValue, int> count;
        bool single = true;
        for (const auto& t : out.rel.tuples())
            if (++count[t[ti]] > 1) single = false;
        if (single) {
            out.scalar = true;
            if (ec.spec.value.scalar.is_ref()) out.obj_type = ec.spec.value.scalar.ref_target;
            out = pad_scalar(f, std::move(out));
        }
    }
    return out;
}

Value Evaluator::eval(Frame& f, const ast::Expr& e) {
    switch (e.kind) {
    case ast::ExprKind::Lit: {
        Scheme s;
        s.add(this_attr(), this_type(f));
        ScalarType t = ScalarType::integer();
        const auto& st = e.lit.storage();
        if (std::holds_alternative<double>(st)) t = ScalarType::floating();
        else if (std::holds_alternative<std::string>(st)) t = ScalarType::string();
        else if (std::holds_alternative<bool>(st)) t = ScalarType::boolean();
        else if (std::holds_alternative<Date>(st)) t = ScalarType::date();
        else if (std::holds_alternative<Oid>(st)) t = ScalarType::doid();
        s.add(val_attr(), t);
        std::vector<Tuple> rows;
        for (const auto& m : members_of(f.group)) rows.push_back({m, e.lit});
        Value v;
        v.rel = RelationValue(std::move(s), std::move(rows));
        v.scalar = true;
        return v;
    }
    case ast::ExprKind::Path: return eval_path(f, e.path);
    case ast::ExprKind::Binary: {
        switch (e.op) {
        case ast::BinOp::Union:
        case ast::BinOp::Minus:
        case ast::BinOp::Intersect: {
            Value a = eval(f, *e.a);
            Value b = eval(f, *e.b);
            if (a.scalar != b.scalar) {
                if (a.scalar) a.scalar = false;
                if (b.scalar) b.scalar = false;
            }
            Value out;
            if (e.op == ast::BinOp::Union) out.rel = relalg::set_union(a.rel, b.rel);
            else if (e.op == ast::BinOp::Minus) out.rel = relalg::minus(a.rel, b.rel);
            else out.rel = relalg::intersect(a.rel, b.rel);
            out.scalar = false;
            if (a.obj_type == b.obj_type) out.obj_type = a.obj_type;
            return out;
        }
        case ast::BinOp::Times: {
            // The per-object product: joined through the group member.
            Value a = eval(f, *e.a);
            Value b = eval(f, *e.b);
            Value out;
            out.rel = relalg::join_on(a.rel, b.rel, {{this_attr(), this_attr()}});
            return out;
        }
        case ast::BinOp::Join: {
            Value a = eval(f, *e.a);
            Value b = eval(f, *e.b);
            std::vector<std::pair<AttrName, AttrName>> on;
            for (const auto& [name, type] : a.rel.scheme().attrs)
                if (b.rel.scheme().has(name)) on.emplace_back(name, name);
            Value out;
            out.rel = relalg::join_on(a.rel, b.rel, on);
            if (a.obj_type == b.obj_type) out.obj_type = a.obj_type;
            return out;
        }
        default: return scalar_binary(f, e.op, eval(f, *e.a), eval(f, *e.b));
        }
    }
    case ast::ExprKind::Not: {
        Value a = eval(f, *e.a);
        std::vector<bool> b = bool_per_member(f, a, "NOT operand");
        Scheme s;
        s.add(this_attr(), this_type(f));
        s.add(val_attr(), ScalarType::boolean());
        std::vector<Tuple> rows;
        auto ms = members_of(f.group);
        for (std::size_t i = 0; i < ms.size(); ++i)
            rows.push_back({ms[i], ScalarValue::of_bool(!b[i])});
        Value v;
        v.rel = RelationValue(std::move(s), std::move(rows));
        v.scalar = true;
        return v;
    }
    case ast::ExprKind::IsNull: {
        Value a = to_scalar(f, eval(f, *e.a));
        std::size_t ti = a.rel.scheme().require(this_attr());
        std::size_t vi = a.rel.scheme().require(val_attr());
        Scheme s;
        s.add(this_attr(), this_type(f));
        s.add(val_attr(), ScalarType::boolean());
        std::vector<Tuple> rows;
        for (const auto& t : a.rel.tuples())
            rows.push_back({t[ti], ScalarValue::of_bool(t[vi].is_undefined() != e.negated)});
        Value v;
        v.rel = RelationValue(std::move(s), std::move(rows));
        v.scalar = true;
        return pad_scalar(f, std::move(v));
    }
    case ast::ExprKind::Exist: {
        Value a = eval(f, *e.a);
        std::size_t ti = a.rel.scheme().require(this_attr());
        std::set<ScalarValue> nonempty;
        if (a.scalar) {
            std::size_t vi = a.rel.scheme().require(val_attr());
            for (const auto& t : a.rel.tuples())
                if (!t[vi].is_undefined()) nonempty.insert(t[ti]);
        } else {
            for (const auto& t : a.rel.tuples()) nonempty.insert(t[ti]);
        }
        Scheme s;
        s.add(this_attr(), this_type(f));
        s.add(val_attr(), ScalarType::boolean());
        std::vector<Tuple> rows;
        for (const auto& m : members_of(f.group))
            rows.push_back({m, ScalarValue::of_bool(nonempty.count(m) != 0)});
        Value v;
        v.rel = RelationValue(std::move(s), std::move(rows));
        v.scalar = true;
        return v;
    }
    case ast::ExprKind::ObjectOf: {
        Value a = eval(f, *e.a);
        Value out;
        out.rel = to_group_pairs(f, a);
        out.obj_type = a.obj_type;
        return out;
    }
    case ast::ExprKind::Where: {
        Value a = eval(f, *e.a);
        if (a.scalar) a = pad_scalar(f, std::move(a));
        RowEnv env(*this, f, a.rel);
        PredicatePtr p = env.pred(*e.b);
        relalg::check_predicate(*p, env.rel.scheme());
        RelationValue sel = relalg::select_where(env.rel, *p);
        Value out;
        out.rel = drop_attrs(sel, env.aux);
        out.scalar = a.scalar;
        out.obj_type = a.obj_type;
        return out;
    }
    case ast::ExprKind::Project: {
        Value a = eval(f, *e.a);
        relalg::ProjectSpec spec;
        std::vector<std::pair<AttrName, AttrName>> renames;
        if (e.proj_drop) {
            for (const auto& it : e.proj) spec.drop.push_back(AttrName(it.path));
        } else {
            spec.keep.push_back(this_attr());
            for (const auto& it : e.proj) {
                AttrName name(it.path);
                if (!a.rel.scheme().has(name) && it.path.size() == 1) {
                    // Allow the tail segment of a refined name.
                    for (const auto& [attr, type] : a.rel.scheme().attrs)
                        if (!attr.is_reserved() && attr.segments.back() == it.path[0]) {
                            name = attr;
                            break;
                        }
                }
                spec.keep.push_back(name);
                if (it.rename) renames.emplace_back(name, AttrName(*it.rename));
            }
        }
        spec.renames = renames;
        Value out;
        out.rel = relalg::project(a.rel, spec);
        out.obj_type = out.rel.scheme().has(oid_attr()) ? a.obj_type : "";
        return out;
    }
    case ast::ExprKind::Summarize: {
        Value a = eval(f, *e.a);
        if (a.scalar) a = pad_scalar(f, std::move(a));
        RowEnv env(*this, f, a.rel);
        std::vector<AttrName> by{this_attr()};
        for (const auto& p : e.by) by.push_back(AttrName(p));
        std::vector<relalg::SummarizeAdd> adds;
        int n = 0;
        for (const auto& add : e.adds) {
            AttrName src;
            if (add.source->kind == ast::ExprKind::Path &&
                env.rel.scheme().has(AttrName(add.source->path))) {
                src = AttrName(add.source->path);
            } else {
                TermPtr t = env.term(*add.source);
                AttrName aux(std::string("#s") + std::to_string(n++));
                env.rel = relalg::extend(env.rel, aux, ScalarType::integer(),
                                         [t, sch = env.rel.scheme()](const Tuple& row) {
                                             return relalg::eval_term(*t, sch, row);
                                         });
                src = aux;
            }
            adds.push_back({add.agg, src, AttrName(add.result)});
        }
        Value out;
        out.rel = relalg::summarize(env.rel, by, adds);
        if (e.by.empty() && adds.size() == 1) {
            out.rel = relalg::rename(out.rel, {{adds[0].result, val_attr()}});
            out.scalar = true;
            out = pad_scalar(f, std::move(out));
        }
        return out;
    }
    case ast::ExprKind::Expand: {
        Value a = eval(f, *e.a);
        Value out;
        out.rel = rvars::expand_ref(db_, hook(), a.rel, AttrName(e.path));
        out.obj_type = a.obj_type;
        return out;
    }
    case ast::ExprKind::OvRetrieve: return ov_retrieve(f, e);
    case ast::ExprKind::Call: {
        DepthGuard g(*this);
        return call(f, e);
    }
    case ast::ExprKind::Member: {
        Value a = eval(f, *e.a);
        std::vector<std::string> prefix;
        return step(f, std::move(a), prefix, e.name);
    }
    case ast::ExprKind::IsType:
    case ast::ExprKind::OfType: {
        Value a = to_scalar(f, eval(f, *e.a));
        std::size_t ti = a.rel.scheme().require(this_attr());
        std::size_t vi = a.rel.scheme().require(val_attr());
        Scheme s;
        s.add(this_attr(), this_type(f));
        s.add(val_attr(), ScalarType::boolean());
        std::vector<Tuple> rows;
        for (const auto& t : a.rel.tuples()) {
            bool r = false;
            if (!t[vi].is_undefined() && std::holds_alternative<Oid>(t[vi].storage())) {
                Oid o = t[vi].as_oid();
                r = e.kind == ast::ExprKind::IsType ? db_.cat.is_a(o, e.name)
                                                    : db_.cat.is_of(o, e.name);
            }
            rows.push_back({t[ti], ScalarValue::of_bool(r)});
        }
        Value v;
        v.rel = RelationValue(std::move(s), std::move(rows));
        v.scalar = true;
        return pad_scalar(f, std::move(v));
    }
    case ast::ExprKind::UpdateMap: {
        Value a = eval(f, *e.a);
        RowEnv env(*this, f, a.rel);
        std::vector<std::pair<AttrName, std::function<ScalarValue(const Tuple&)>>> sets;
        for (const auto& [path, expr] : e.sets) {
            AttrName col(path);
            if (!a.rel.scheme().has(col))
                fail(ErrorCode::UnknownAttribute, "no attribute '" + col.display() + "'");
            TermPtr t = env.term(*expr);
            sets.emplace_back(col, [t, sch = env.rel.scheme()](const Tuple& row) {
                return relalg::eval_term(*t, sch, row);
            });
        }
        Value out;
        RelationValue mapped = relalg::map_rows(env.rel, sets, nullptr);
        out.rel = drop_attrs(mapped, env.aux);
        out.obj_type = a.obj_type;
        return out;
    }
    }
    fail(ErrorCode::EvaluationError, "unhandled expression form");
}

// --- Statement execution --------------------------------------------------

RelationValue Evaluator::component_rows(Frame& f, const std::string& ctx_type,
                                        const std::string& comp, Value v) {
    Scheme comp_scheme = db_.types.component_scheme(ctx_type, comp);
    auto ec = db_.types.require_component(ctx_type, comp);
    bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;
    RelationValue rows;
    if (scalar || (comp_scheme.attrs.size() == 1 && v.scalar)) {
        v = to_scalar(f, std::move(v));
        rows = relalg::rename(v.rel, {{this_attr(), oid_attr()},
                                      {val_attr(), comp_scheme.attrs[0].first}});
        // The value column keeps the type inferred from the expression; adopt
        // the declared component type once every value fits it.
        const ScalarType& want = comp_scheme.attrs[0].second;
        Scheme rs = rows.scheme();
        std::size_t vi = rs.require(comp_scheme.attrs[0].first);
        if (!(rs.attrs[vi].second == want)) {
            for (const auto& t : rows.tuples())
                if (!t[vi].fits(want))
                    fail(ErrorCode::TypeMismatch,
                         "value does not fit component '" + comp + "'");
            rs.attrs[vi].second = want;
            rows = RelationValue(std::move(rs), std::vector<Tuple>(rows.tuples()));
        }
    } else {
        if (v.scalar)
            fail(ErrorCode::SchemeMismatch, "scalar value assigned to '" + comp + "'");
        rows = relalg::rename(v.rel, {{this_attr(), oid_attr()}});
        Scheme expect;
        expect.add(oid_attr(), ScalarType::ref(ctx_type));
        for (const auto& [n, t] : comp_scheme.attrs) expect.add(n, t);
        if (!rows.scheme().consistent_with(expect))
            fail(ErrorCode::SchemeMismatch, "value does not fit component '" + comp +
                                                "': " + rows.scheme().display());
    }
    // Storage addresses objects by bare OID.
    Scheme s = rows.scheme();
    s.attrs[s.require(oid_attr())].second = ScalarType::doid();
    return RelationValue(std::move(s), std::vector<Tuple>(rows.tuples()));
}

void Evaluator::assign(ExecState& st, const RelationValue& act, const ast::Expr& target,
                       const ast::Expr& rhs) {
    if (target.kind != ast::ExprKind::Path)
        fail(ErrorCode::NotWritable, "assignment target must be a name");
    std::vector<std::string> path = target.path;
    if (path.size() == 2 && path[0] == "this") path.erase(path.begin());
    if (path.size() != 1)
        fail(ErrorCode::NotWritable, "cannot assign through '" +
                                         AttrName(target.path).display() + "'");
    const std::string& name = path[0];

    Frame g = st.f;
    g.group = act;
    Value v = eval(g, rhs);

    bool is_comp = false;
    if (!st.f.type.empty()) {
        try {
            db_.types.require_component(st.f.type, name);
            is_comp = true;
        } catch (const Error&) {
        }
    }
    if (is_comp) {
        auto ec = db_.types.require_component(st.f.type, name);
        if (ec.spec.is_method) fail(ErrorCode::NotWritable, "cannot assign to a method");
        // Partition the members by realization: writes reach stored storage;
        // computed components swallow the write with a warning.
        std::vector<Oid> stored;
        bool warned = false;
        for (const auto& m : members_of(act)) {
            Oid o = m.as_oid();
            auto impl = db_.types.lookup_realization(db_.cat.oids().type_of(o), name);
            if (impl && impl->first.kind == typesys::ComponentImpl::Kind::Computed) {
                if (!warned) {
                    warnings.push_back("assignment to computed component '" + name +
                                       "' ignored");
                    warned = true;
                }
            } else {
                stored.push_back(o);
            }
        }
        if (stored.empty()) return;
        RelationValue rows = component_rows(g, st.f.type, name, std::move(v));
        std::size_t oi = rows.scheme().require(oid_attr());
        std::set<Oid> keep(stored.begin(), stored.end());
        rows = relalg::select_rows(rows, [&](const Tuple& t) {
            return !t[oi].is_undefined() && keep.count(t[oi].as_oid()) != 0;
        });
        storage::apply_assignment(db_, st.f.type, name, stored, rows);
        return;
    }

    if (db_.globals.count(name)) {
        auto& gv = db_.globals[name];
        Scheme vs = storage::value_scheme(db_.types, gv.type);
        RelationValue payload;
        if (!gv.type.is_tuple && v.scalar) {
            AttrName col = vs.attrs[0].first;
            payload = drop_attrs(relalg::rename(v.rel, {{val_attr(), col}}), {this_attr()});
        } else {
            if (v.scalar) fail(ErrorCode::SchemeMismatch, "scalar assigned to set variable");
            payload = drop_attrs(v.rel, {this_attr()});
        }
        if (!payload.scheme().consistent_with(vs))
            fail(ErrorCode::SchemeMismatch, "value does not fit variable '" + name + "'");
        if (!gv.type.is_set && payload.size() > 1)
            fail(ErrorCode::EvaluationError, "several values assigned to scalar variable '" +
                                                 name + "'");
        gv.value = payload.with_keys(gv.keys);
        return;
    }

    // Local temporary: replace the rows of the active members, keep the rest.
    auto it = st.locals.find(name);
    if (it == st.locals.end()) {
        st.locals[name] = v;
        return;
    }
    Value& old = it->second;
    if (!old.rel.scheme().consistent_with(v.rel.scheme()))
        fail(ErrorCode::SchemeMismatch, "local '" + name + "' changed scheme");
    std::set<ScalarValue> here;
    for (const auto& m : members_of(act)) here.insert(m);
    std::size_t ti = old.rel.scheme().require(this_attr());
    RelationValue kept = relalg::select_rows(
        old.rel, [&](const Tuple& t) { return here.count(t[ti]) == 0; });
    old.rel = relalg::set_union(kept, v.rel);
    old.scalar = old.scalar && v.scalar;
}

void Evaluator::exec_return(ExecState& st, const RelationValue& act, const ast::ExprPtr& expr) {
    if (expr && st.spec && st.spec->has_value) {
        Frame g = st.f;
        g.group = act;
        Value v = eval(g, *expr);
        bool scalar_result =
            st.result_payload.attrs.size() == 1 && st.result_payload.attrs[0].first == val_attr();
        RelationValue rows;
        if (scalar_result) {
            v = to_scalar(g, std::move(v));
            rows = v.rel;
        } else {
            if (v.scalar) fail(ErrorCode::SchemeMismatch, "scalar returned for a tuple value");
            rows = v.rel;
            Scheme expect = st.result_payload;
            Scheme got;
            for (const auto& [n, t] : rows.scheme().attrs)
                if (n != this_attr()) got.add(n, t);
            if (!got.consistent_with(expect))
                fail(ErrorCode::SchemeMismatch, "return value does not fit the method type");
        }
        // (member, payload) -> (OID, payload) result rows.
        std::size_t ti = rows.scheme().require(this_attr());
        std::vector<std::size_t> idx;
        for (const auto& [n, t] : st.result_payload.attrs)
            idx.push_back(rows.scheme().require(n));
        std::set<ScalarValue> covered;
        for (const auto& t : rows.tuples()) {
            Tuple out{t[ti]};
            for (auto i : idx) out.push_back(t[i]);
            st.result_rows.push_back(std::move(out));
            covered.insert(t[ti]);
        }
        if (scalar_result) {
            for (const auto& m : members_of(act))
                if (!covered.count(m))
                    st.result_rows.push_back({m, ScalarValue::undefined()});
        }
    } else {
        for (const auto& m : members_of(act)) st.result_rows.push_back({m});
    }
    st.alive = relalg::minus(st.alive, act);
}

void Evaluator::run_statements(ExecState& st, const std::vector<ast::StmtPtr>& stmts,
                               const RelationValue& gate) {
    for (const auto& sp : stmts) {
        RelationValue act = relalg::intersect(gate, st.alive);
        if (act.empty()) continue;
        const ast::Stmt& s = *sp;
        switch (s.kind) {
        case ast::StmtKind::Assign: assign(st, act, *s.target, *s.expr); break;
        case ast::StmtKind::Insert:
        case ast::StmtKind::Delete:
        case ast::StmtKind::Update: {
            ast::StmtPtr rw = rewrite_dml_as_assignment(s);
            assign(st, act, *rw->target, *rw->expr);
            break;
        }
        case ast::StmtKind::If: {
            Frame g = st.f;
            g.group = act;
            std::vector<bool> b = bool_per_member(g, eval(g, *s.cond), "IF condition");
            auto ms = members_of(act);
            std::vector<Tuple> yes, no;
            for (std::size_t i = 0; i < ms.size(); ++i)
                (b[i] ? yes : no).push_back({ms[i]});
            RelationValue then_gate(act.scheme(), std::move(yes));
            RelationValue else_gate(act.scheme(), std::move(no));
            if (!then_gate.empty()) run_statements(st, s.then_block, then_gate);
            if (!else_gate.empty() && !s.else_block.empty())
                run_statements(st, s.else_block, else_gate);
            break;
        }
        case ast::StmtKind::DoWhile: {
            RelationValue current = act;
            int iter = 0;
            for (;;) {
                if (current.empty()) break;
                run_statements(st, s.body, current);
                RelationValue live = relalg::intersect(current, st.alive);
                if (live.empty()) break;
                Frame g = st.f;
                g.group = live;
                std::vector<bool> b =
                    bool_per_member(g, eval(g, *s.cond), "WHILE condition");
                auto ms = members_of(live);
                std::vector<Tuple> keep;
                for (std::size_t i = 0; i < ms.size(); ++i)
                    if (b[i]) keep.push_back({ms[i]});
                current = RelationValue(live.scheme(), std::move(keep));
                if (++iter >= kLoopCap && !current.empty())
                    fail(ErrorCode::LoopLimitExceeded,
                         "loop exceeded " + std::to_string(kLoopCap) + " iterations");
            }
            break;
        }
        case ast::StmtKind::Return: exec_return(st, act, s.expr); break;
        case ast::StmtKind::Exec: {
            Frame g = st.f;
            g.group = act;
            eval(g, *s.expr);
            break;
        }
        }
        if (st.alive.empty()) break;
    }
}

Scheme result_payload_scheme(const typesys::TypeRegistry& reg, const typesys::ComponentSpec* spec) {
    Scheme s;
    if (!spec || !spec->has_value) return s;
    if (spec->value.is_tuple) {
        for (const auto& [n, t] : reg.require_tuple(spec->value.tuple_name).attrs)
            s.add(AttrName(n), t);
    } else {
        s.add(val_attr(), spec->value.scalar);
    }
    return s;
}

RelationValue Evaluator::run_method(const std::string& type, const std::string& method,
                                    const std::vector<Oid>& group,
                                    const std::vector<ScalarValue>& args) {
    DepthGuard guard(*this);
    auto ec = db_.types.require_component(type, method);
    if (!ec.spec.is_method)
        fail(ErrorCode::ExprTypeError, "'" + method + "' is not a method");
    if (args.size() != ec.spec.params.size())
        fail(ErrorCode::ArityMismatch, method + " takes " +
                                           std::to_string(ec.spec.params.size()) +
                                           " argument(s), got " + std::to_string(args.size()));

    Scheme rs;
    rs.add(oid_attr(), ScalarType::ref(type));
    Scheme payload = result_payload_scheme(db_.types, &ec.spec);
    for (const auto& [n, t] : payload.attrs) rs.add(n, t);

    // Partition by the realizing implementation: overridden methods run
    // their own bodies over their own slice of the group.
    std::map<std::string, std::vector<Oid>> parts;
    for (Oid o : group) {
        const std::string& of = db_.cat.oids().type_of(o);
        if (!db_.types.is_subtype(of, type))
            fail(ErrorCode::TypeMismatch, "object is not of type " + type);
        auto impl = db_.types.lookup_realization(of, method);
        if (!impl)
            fail(ErrorCode::UnrealizedComponent, "method '" + method + "' is not realized");
        if (impl->first.kind != typesys::ComponentImpl::Kind::Method)
            fail(ErrorCode::ImplKindMismatch, "'" + method + "' is not realized as a method");
        parts[impl->second].push_back(o);
    }

    std::vector<Tuple> all_rows;
    for (auto& [realizer, oids] : parts) {
        auto impl = db_.types.lookup_realization(realizer, method);
        ExecState st;
        st.f.type = realizer;
        st.f.group = group_rel(oids, realizer);
        st.alive = st.f.group;
        st.spec = &ec.spec;
        st.result_payload = payload;
        for (std::size_t i = 0; i < args.size(); ++i) {
            ScalarType pt = ec.spec.params[i].second.is_tuple
                                ? ScalarType::integer()
                                : ec.spec.params[i].second.scalar;
            st.params[ec.spec.params[i].first] = {args[i], pt};
        }
        st.f.params = &st.params;
        st.f.locals = &st.locals;
        run_statements(st, impl->first.body, st.f.group);
        all_rows.insert(all_rows.end(), st.result_rows.begin(), st.result_rows.end());
    }
    return RelationValue(std::move(rs), std::move(all_rows));
}

rvars::ComputedEvaluator Evaluator::hook() {
    return [this](const std::string& realizer, const std::string& comp,
                  const std::vector<Oid>& group) -> RelationValue {
        DepthGuard guard(*this);
        auto impl = db_.types.lookup_realization(realizer, comp);
        if (!impl || impl->first.kind != typesys::ComponentImpl::Kind::Computed)
            fail(ErrorCode::UnrealizedComponent,
                 "no computed realization of '" + comp + "' at " + realizer);
        Frame f;
        f.type = realizer;
        f.group = group_rel(group, realizer);
        Value v = eval(f, *impl->first.expr);
        return component_rows(f, realizer, comp, std::move(v));
    };
}

} // namespace

// --- Public API -----------------------------------------------------------

RelationValue eval_set(storage::Database& db, const std::string& type,
                       const std::vector<Oid>& group, const ast::Expr& e) {
    Evaluator ev(db);
    Frame f;
    f.type = type;
    f.group = group_rel(group, type);
    return ev.eval(f, e).rel;
}

RelationValue eval_query(storage::Database& db, const ast::Expr& e) {
    Evaluator ev(db);
    Frame f;
    Scheme s;
    s.add(this_attr(), ScalarType::doid());
    f.group = RelationValue(std::move(s), {{ScalarValue::undefined()}});
    Value v = ev.eval(f, e);
    return drop_attrs(v.rel, {this_attr()});
}

rvars::ComputedEvaluator make_evaluator(storage::Database& db) {
    auto ev = std::make_shared<Evaluator>(db);
    return [ev](const std::string& realizer, const std::string& comp,
                const std::vector<Oid>& group) { return ev->hook()(realizer, comp, group); };
}

ExecResult execute_method(storage::Database& db, const std::string& type,
                          const std::string& method, const std::vector<Oid>& group,
                          const std::vector<ScalarValue>& args) {
    Evaluator ev(db);
    ExecResult r;
    r.results = ev.run_method(type, method, group, args);
    r.warnings = std::move(ev.warnings);
    return r;
}

void execute_body(storage::Database& db, const std::string& type,
                  const std::vector<ast::StmtPtr>& body, const std::vector<Oid>& group,
                  const std::vector<std::pair<std::string, ScalarValue>>& params,
                  std::vector<std::string>& warnings) {
    Evaluator ev(db);
    ExecState st;
    st.f.type = type;
    st.f.group = group_rel(group, type);
    st.alive = st.f.group;
    for (const auto& [n, v] : params) {
        ScalarType t = ScalarType::integer();
        const auto& s = v.storage();
        if (std::holds_alternative<double>(s)) t = ScalarType::floating();
        else if (std::holds_alternative<std::string>(s)) t = ScalarType::string();
        else if (std::holds_alternative<bool>(s)) t = ScalarType::boolean();
        else if (std::holds_alternative<Date>(s)) t = ScalarType::date();
        else if (std::holds_alternative<Oid>(s)) t = ScalarType::doid();
        st.params[n] = {v, t};
    }
    st.f.params = &st.params;
    st.f.locals = &st.locals;
    ev.run_statements(st, body, st.f.group);
    for (auto& w : ev.warnings) warnings.push_back(std::move(w));
}

ast::StmtPtr rewrite_dml_as_assignment(const ast::Stmt& s) {
    auto out = ast::make_stmt(ast::StmtKind::Assign);
    out->span = s.span;
    out->target = s.target;
    auto target_read = [&]() -> ast::ExprPtr { return s.target; };
    switch (s.kind) {
    case ast::StmtKind::Insert: {
        auto u = ast::make_expr(ast::ExprKind::Binary);
        u->op = ast::BinOp::Union;
        u->a = target_read();
        u->b = s.expr;
        out->expr = u;
        break;
    }
    case ast::StmtKind::Delete: {
        if (!s.cond) {
            // DELETE without WHERE empties the target.
            auto w = ast::make_expr(ast::ExprKind::Where);
            w->a = target_read();
            auto fl = ast::make_expr(ast::ExprKind::Lit);
            fl->lit = ScalarValue::of_bool(false);
            w->b = fl;
            out->expr = w;
            break;
        }
        auto w = ast::make_expr(ast::ExprKind::Where);
        w->a = target_read();
        auto n = ast::make_expr(ast::ExprKind::Not);
        n->a = s.cond;
        w->b = n;
        out->expr = w;
        break;
    }
    case ast::StmtKind::Update: {
        ast::ExprPtr cond = s.cond;
        if (!cond) {
            auto t = ast::make_expr(ast::ExprKind::Lit);
            t->lit = ScalarValue::of_bool(true);
            cond = t;
        }
        auto keep = ast::make_expr(ast::ExprKind::Where);
        keep->a = target_read();
        auto n = ast::make_expr(ast::ExprKind::Not);
        n->a = cond;
        keep->b = n;
        auto hit = ast::make_expr(ast::ExprKind::Where);
        hit->a = target_read();
        hit->b = cond;
        auto map = ast::make_expr(ast::ExprKind::UpdateMap);
        map->a = hit;
        for (const auto& [attr, expr] : s.sets)
            map->sets.emplace_back(std::vector<std::string>{attr}, expr);
        auto u = ast::make_expr(ast::ExprKind::Binary);
        u->op = ast::BinOp::Union;
        u->a = keep;
        u->b = map;
        out->expr = u;
        break;
    }
    default: fail(ErrorCode::EvaluationError, "not a DML statement");
    }
    return out;
}

namespace {

std::string set_form(const ast::Expr& e, bool rvar_pos);

std::string set_form_path(const std::vector<std::string>& path, bool rvar_pos) {
    std::vector<std::string> p = path;
    if (!p.empty() && p[0] == "this") p.erase(p.begin());
    std::string s = rvar_pos ? "t" : "";
    for (const auto& seg : p) {
        if (!s.empty()) s += ".";
        s += seg;
    }
    return s.empty() ? "t" : s;
}

std::string set_form(const ast::Expr& e, bool rvar_pos) {
    switch (e.kind) {
    case ast::ExprKind::Path: return set_form_path(e.path, rvar_pos);
    case ast::ExprKind::Lit: return e.lit.display();
    case ast::ExprKind::Binary: {
        const char* op = nullptr;
        switch (e.op) {
        case ast::BinOp::Union: op = " UNION "; break;
        case ast::BinOp::Minus: op = " MINUS "; break;
        case ast::BinOp::Intersect: op = " INTERSECT "; break;
        case ast::BinOp::Times: op = " JOIN_OID "; break;
        case ast::BinOp::Join: op = " JOIN "; break;
        case ast::BinOp::Add: op = " + "; break;
        case ast::BinOp::Sub: op = " - "; break;
        case ast::BinOp::Mul: op = " * "; break;
        case ast::BinOp::Div: op = " / "; break;
        case ast::BinOp::Eq: op = " = "; break;
        case ast::BinOp::Ne: op = " <> "; break;
        case ast::BinOp::Lt: op = " < "; break;
        case ast::BinOp::Le: op = " <= "; break;
        case ast::BinOp::Gt: op = " > "; break;
        case ast::BinOp::Ge: op = " >= "; break;
        case ast::BinOp::And: op = " AND "; break;
        case ast::BinOp::Or: op = " OR "; break;
        }
        bool sub_rvar = rvar_pos && (e.op == ast::BinOp::Union || e.op == ast::BinOp::Minus ||
                                     e.op == ast::BinOp::Intersect ||
                                     e.op == ast::BinOp::Times || e.op == ast::BinOp::Join);
        return set_form(*e.a, sub_rvar) + op + set_form(*e.b, sub_rvar);
    }
    case ast::ExprKind::Where:
        return "(" + set_form(*e.a, rvar_pos) + ") WHERE (" + set_form(*e.b, false) + ")";
    case ast::ExprKind::Not: return "NOT (" + set_form(*e.a, false) + ")";
    case ast::ExprKind::IsNull:
        return set_form(*e.a, false) + (e.negated ? " NOT IS NULL" : " IS NULL");
    case ast::ExprKind::Exist: return "EXIST(" + set_form(*e.a, true) + ")";
    case ast::ExprKind::ObjectOf: return "Object(" + set_form(*e.a, true) + ")";
    case ast::ExprKind::Project: {
        std::string s = "(" + set_form(*e.a, rvar_pos) + ")[";
        if (e.proj_drop) s += "!";
        for (std::size_t i = 0; i < e.proj.size(); ++i) {
            if (i) s += ", ";
            s += AttrName(e.proj[i].path).display();
            if (e.proj[i].rename) s += " AS " + *e.proj[i].rename;
        }
        return s + "]";
    }
    default: return lang::print_expr(e);
    }
}

} // namespace

std::string set_level_form(const ast::Expr& e) { return set_form(e, true); }

// --- The per-object oracle ------------------------------------------------
// Everything below interprets expressions and statements one object at a
// time against base variables directly; it shares only the relational kernel
// with the set-at-a-time path and exists to check it.

namespace {

/// A per-object value: a payload relation with no threading column; scalars
/// are a one-row #val relation.
struct OVal {
    RelationValue rel;
    bool scalar = false;
    std::string obj_type;

    ScalarValue scalar_value() const {
        std::size_t i = rel.scheme().require(val_attr());
        if (rel.empty()) return ScalarValue::undefined();
        return rel.tuples()[0][i];
    }
};

OVal make_scalar(ScalarValue v, ScalarType t, std::string obj_type = "") {
    OVal o;
    Scheme s;
    s.add(val_attr(), t);
    o.rel = RelationValue(std::move(s), {{std::move(v)}});
    o.scalar = true;
    o.obj_type = std::move(obj_type);
    return o;
}

class Oracle {
  public:
    explicit Oracle(storage::Database& db) : db_(db) {}

    struct OFrame {
        std::string type;
        Oid self{};
        bool has_self = false;
        const std::map<std::string, std::pair<ScalarValue, ScalarType>>* params = nullptr;
        std::map<std::string, OVal>* locals = nullptr;
    };

    OVal eval(OFrame& f, const ast::Expr& e);
    RelationValue run_method(const std::string& type, const std::string& method,
                             const std::vector<Oid>& group,
                             const std::vector<ScalarValue>& args);
    std::vector<std::string> warnings;

  private:
    storage::Database& db_;
    int depth_ = 0;

    OVal component_read(OFrame& f, Oid o, const std::string& ctx_type, const std::string& comp);
    RelationValue type_rel(const std::string& type);
    OVal eval_path(OFrame& f, const std::vector<std::string>& path);
    OVal step(OFrame& f, OVal v, std::vector<std::string>& prefix, const std::string& seg);
    bool eval_row_cond(OFrame& f, const Scheme& scheme, const Tuple& row, const ast::Expr& e);
    ScalarValue eval_row_term(OFrame& f, const Scheme& scheme, const Tuple& row,
                              const ast::Expr& e);
    RelationValue expand(OFrame& f, const RelationValue& rel, const AttrName& attr);
    OVal call(OFrame& f, const ast::Expr& e);

    struct RunState {
        OFrame f;
        std::map<std::string, OVal> locals;
        std::map<std::string, std::pair<ScalarValue, ScalarType>> params;
        bool returned = false;
        const typesys::ComponentSpec* spec = nullptr;
        Scheme result_payload;
        std::vector<Tuple> result_rows; // OID + payload
    };
    void run_statements(RunState& st, const std::vector<ast::StmtPtr>& stmts);
    void assign(RunState& st, const ast::Expr& target, const ast::Expr& rhs);
    void write_component(Oid o, const std::string& ctx_type, const std::string& comp,
                         const OVal& v);
};

OVal Oracle::component_read(OFrame& f, Oid o, const std::string& ctx_type,
                            const std::string& comp) {
    (void)f;
    auto ec = db_.types.require_component(ctx_type, comp);
    if (ec.spec.is_method)
        fail(ErrorCode::ExprTypeError, "method '" + comp + "' must be called");
    const std::string& of = db_.cat.oids().type_of(o);
    auto impl = db_.types.lookup_realization(of, comp);
    bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;

    if (impl && impl->first.kind == typesys::ComponentImpl::Kind::Computed) {
        if (++depth_ > kDepthCap) fail(ErrorCode::EvaluationError, "call depth limit exceeded");
        OFrame g;
        g.type = impl->second;
        g.self = o;
        g.has_self = true;
        OVal v = eval(g, *impl->first.expr);
        --depth_;
        if (scalar && !v.scalar)
            fail(ErrorCode::SchemeMismatch, "computed scalar yields a relation");
        return v;
    }

    // Stored: read the declaring type's base variable directly.
    Scheme cs = db_.types.component_scheme(ctx_type, comp);
    if (scalar) {
        const RelationValue& own = db_.base_var(ec.owner, "");
        std::size_t oi = own.scheme().require(oid_attr());
        std::size_t ci = own.scheme().require(AttrName(comp));
        ScalarValue val = ScalarValue::undefined();
        for (const auto& t : own.tuples())
            if (!t[oi].is_undefined() && t[oi].as_oid() == o) {
                val = t[ci];
                break;
            }
        return make_scalar(val, ec.spec.value.scalar,
                           ec.spec.value.scalar.is_ref() ? ec.spec.value.scalar.ref_target : "");
    }
    const RelationValue& bv = db_.base_var(ec.owner, comp);
    std::size_t oi = bv.scheme().require(oid_attr());
    Scheme s;
    std::vector<std::size_t> idx;
    for (const auto& [n, t] : cs.attrs) {
        s.add(n, t);
        idx.push_back(bv.scheme().require(n));
    }
    std::vector<Tuple> rows;
    for (const auto& t : bv.tuples())
        if (!t[oi].is_undefined() && t[oi].as_oid() == o) {
            Tuple row;
            for (auto i : idx) row.push_back(t[i]);
            rows.push_back(std::move(row));
        }
    OVal v;
    v.rel = RelationValue(std::move(s), std::move(rows));
    return v;
}

RelationValue Oracle::type_rel(const std::string& type) {
    // Naive per-object assembly: for every live object, the product of its
    // component values with refined names, empty sets padded with one
    // undefined row.
    auto comps = db_.types.effective_components(type);
    Scheme s;
    s.add(oid_attr(), ScalarType::ref(type));
    struct Part {
        std::string name;
        bool scalar;
        std::vector<AttrName> cols; // refined names, in scheme order
    };
    std::vector<Part> parts;
    for (const auto& ec : comps) {
        if (ec.spec.is_method || !ec.spec.has_value) continue;
        bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;
        Part p;
        p.name = ec.spec.name;
        p.scalar = scalar;
        if (scalar) {
            AttrName col(ec.spec.name);
            s.add(col, ec.spec.value.scalar);
            p.cols = {col};
        } else {
            for (const auto& [n, t] : db_.types.component_scheme(type, ec.spec.name).attrs) {
                AttrName col = n.prefixed(ec.spec.name);
                s.add(col, t);
                p.cols.push_back(col);
            }
        }
        parts.push_back(std::move(p));
    }

    std::vector<Tuple> rows;
    OFrame f;
    f.type = type;
    for (const auto& [ord, of] : db_.cat.oids().rows()) {
        if (!db_.types.is_subtype(of, type)) continue;
        Oid o{ord};
        std::vector<Tuple> acc{{ScalarValue::of_oid(o)}};
        for (const auto& p : parts) {
            OVal v = component_read(f, o, type, p.name);
            std::vector<Tuple> vals;
            if (p.scalar) {
                vals.push_back({v.scalar_value()});
            } else {
                // reorder payload to the part's column order
                std::vector<std::size_t> idx;
                for (std::size_t k = 0; k < p.cols.size(); ++k)
                    idx.push_back(k); // component_scheme order matches
                Scheme cs = db_.types.component_scheme(type, p.name);
                for (const auto& t : v.rel.tuples()) {
                    Tuple row;
                    for (const auto& [n, ty] : cs.attrs)
                        row.push_back(t[v.rel.scheme().require(n)]);
                    vals.push_back(std::move(row));
                }
                if (vals.empty())
                    vals.push_back(Tuple(p.cols.size(), ScalarValue::undefined()));
            }
            std::vector<Tuple> next;
            for (const auto& a : acc)
                for (const auto& b : vals) {
                    Tuple row = a;
                    row.insert(row.end(), b.begin(), b.end());
                    next.push_back(row);
                }
            acc = std::move(next);
        }
        rows.insert(rows.end(), acc.begin(), acc.end());
    }
    return RelationValue(std::move(s), std::move(rows));
}

RelationValue Oracle::expand(OFrame& f, const RelationValue& rel, const AttrName& attr) {
    (void)f;
    auto i = rel.scheme().find(attr);
    if (!i) fail(ErrorCode::UnknownAttribute, "no attribute '" + attr.display() + "'");
    const ScalarType& t = rel.scheme().attrs[*i].second;
    if (!t.is_ref() || t.ref_target == typesys::object_root() ||
        !db_.types.find_class(t.ref_target))
        fail(ErrorCode::NotARefAttribute, "'" + attr.display() + "' is not a typed reference");
    RelationValue target = type_rel(t.ref_target);
    std::size_t toi = target.scheme().require(oid_attr());

    Scheme s = rel.scheme();
    s.keys.clear();
    std::vector<std::size_t> tcols;
    for (std::size_t j = 0; j < target.scheme().attrs.size(); ++j) {
        if (j == toi) continue;
        s.add(target.scheme().attrs[j].first.prefixed(attr), target.scheme().attrs[j].second);
        tcols.push_back(j);
    }
    std::vector<Tuple> rows;
    for (const auto& a : rel.tuples()) {
        if (a[*i].is_undefined()) continue;
        for (const auto& b : target.tuples()) {
            if (b[toi] == a[*i]) {
                Tuple row = a;
                for (auto j : tcols) row.push_back(b[j]);
                rows.push_back(std::move(row));
            }
        }
    }
    return RelationValue(std::move(s), std::move(rows));
}

OVal Oracle::eval_path(OFrame& f, const std::vector<std::string>& path) {
    const std::string& head = path[0];
    OVal v;
    bool have = false;
    if (head == "this") {
        if (!f.has_self) fail(ErrorCode::UnknownName, "'this' outside an object context");
        v = make_scalar(ScalarValue::of_oid(f.self), ScalarType::ref(f.type), f.type);
        have = true;
    }
    if (!have && f.params) {
        auto it = f.params->find(head);
        if (it != f.params->end()) {
            v = make_scalar(it->second.first, it->second.second,
                            it->second.second.is_ref() ? it->second.second.ref_target : "");
            have = true;
        }
    }
    if (!have && f.locals) {
        auto it = f.locals->find(head);
        if (it != f.locals->end()) {
            v = it->second;
            have = true;
        }
    }
    if (!have && f.has_self) {
        bool is_comp = false;
        try {
            // A constructor shares its class's name; the bare name keeps
            // meaning the type.
            auto ec = db_.types.require_component(f.type, head);
            is_comp = !(ec.spec.is_method && db_.types.find_class(head));
        } catch (const Error&) {
        }
        if (is_comp) {
            v = component_read(f, f.self, f.type, head);
            have = true;
        }
    }
    if (!have && (db_.types.find_class(head) || head == typesys::object_root())) {
        v.rel = type_rel(head);
        v.obj_type = head;
        have = true;
    }
    if (!have && db_.globals.count(head)) {
        const auto& gv = db_.globals.at(head);
        v.rel = gv.value;
        if (!gv.type.is_set && !gv.type.is_tuple) {
            if (gv.type.scalar.is_ref()) {
                v.rel = relalg::rename(v.rel, {{oid_attr(), val_attr()}});
                v.obj_type = gv.type.scalar.ref_target;
            }
            if (v.rel.empty()) {
                std::vector<Tuple> one{{ScalarValue::undefined()}};
                v.rel = RelationValue(v.rel.scheme(), std::move(one));
            }
            v.scalar = true;
        } else if (!gv.type.is_tuple && gv.type.scalar.is_ref()) {
            v.obj_type = gv.type.scalar.ref_target;
        }
        have = true;
    }
    if (!have) fail(ErrorCode::UnknownName, "unknown name '" + head + "'");

    std::vector<std::string> prefix;
    for (std::size_t i = 1; i < path.size(); ++i) v = step(f, std::move(v), prefix, path[i]);
    if (!prefix.empty()) {
        std::vector<AttrName> keep;
        for (const auto& [name, type] : v.rel.scheme().attrs)
            if (name.segments.size() > prefix.size() &&
                std::equal(prefix.begin(), prefix.end(), name.segments.begin()))
                keep.push_back(name);
        v.rel = keep_attrs(v.rel, keep);
    }
    return v;
}

OVal Oracle::step(OFrame& f, OVal v, std::vector<std::string>& prefix, const std::string& seg) {
    if (v.scalar) {
        if (v.obj_type.empty())
            fail(ErrorCode::UnresolvablePath, "'" + seg + "' after a non-reference value");
        ScalarValue ref = v.scalar_value();
        prefix.clear();
        if (ref.is_undefined()) {
            auto ec = db_.types.require_component(v.obj_type, seg);
            bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;
            if (scalar)
                return make_scalar(ScalarValue::undefined(), ec.spec.value.scalar,
                                   ec.spec.value.scalar.is_ref() ? ec.spec.value.scalar.ref_target
                                                                 : "");
            OVal out;
            Scheme s = db_.types.component_scheme(v.obj_type, seg);
            s.keys.clear();
            out.rel = RelationValue(std::move(s));
            return out;
        }
        return component_read(f, ref.as_oid(), v.obj_type, seg);
    }
    if (v.rel.scheme().has(oid_attr()) && !v.obj_type.empty()) {
        bool is_comp = false;
        try {
            db_.types.require_component(v.obj_type, seg);
            is_comp = true;
        } catch (const Error&) {
        }
        if (is_comp && !v.rel.scheme().has(AttrName(seg))) {
            auto ec = db_.types.require_component(v.obj_type, seg);
            std::size_t oi = v.rel.scheme().require(oid_attr());
            std::set<ScalarValue> oids;
            for (const auto& t : v.rel.tuples())
                if (!t[oi].is_undefined()) oids.insert(t[oi]);
            bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;
            prefix.clear();
            Scheme s;
            s.add(oid_attr(), ScalarType::ref(v.obj_type));
            Scheme cs = scalar ? Scheme{} : db_.types.component_scheme(v.obj_type, seg);
            if (scalar) {
                s.add(AttrName(seg), ec.spec.value.scalar);
            } else {
                for (const auto& [n, t] : cs.attrs) s.add(n, t);
            }
            std::vector<Tuple> rows;
            for (const auto& sv : oids) {
                OVal c = component_read(f, sv.as_oid(), v.obj_type, seg);
                if (scalar) {
                    rows.push_back({sv, c.scalar_value()});
                } else {
                    for (const auto& t : c.rel.tuples()) {
                        Tuple row{sv};
                        for (const auto& [n, ty] : cs.attrs)
                            row.push_back(t[c.rel.scheme().require(n)]);
                        rows.push_back(std::move(row));
                    }
                }
            }
            OVal out;
            out.rel = RelationValue(std::move(s), std::move(rows));
            if (scalar && ec.spec.value.scalar.is_ref())
                out.obj_type = ec.spec.value.scalar.ref_target;
            return out;
        }
    }
    std::vector<std::string> cand = prefix;
    cand.push_back(seg);
    AttrName attr(cand);
    if (v.rel.scheme().has(attr)) {
        const ScalarType& t = v.rel.scheme().attrs[v.rel.scheme().require(attr)].second;
        if (t.is_ref() && t.ref_target != typesys::object_root() &&
            db_.types.find_class(t.ref_target)) {
            v.rel = expand(f, v.rel, attr);
            prefix = cand;
            v.obj_type.clear();
            return v;
        }
        prefix.clear();
        OVal out;
        out.rel = relalg::rename(keep_attrs(v.rel, {attr}), {{attr, AttrName(seg)}});
        if (t.is_ref()) out.obj_type = t.ref_target;
        return out;
    }
    for (const auto& [name, type] : v.rel.scheme().attrs) {
        if (name.segments.size() > cand.size() &&
            std::equal(cand.begin(), cand.end(), name.segments.begin())) {
            prefix = cand;
            return v;
        }
    }
    fail(ErrorCode::UnresolvablePath, "cannot resolve '" + seg + "'");
}

ScalarValue Oracle::eval_row_term(OFrame& f, const Scheme& scheme, const Tuple& row,
                                  const ast::Expr& e) {
    switch (e.kind) {
    case ast::ExprKind::Lit: return e.lit;
    case ast::ExprKind::Path: {
        AttrName full(e.path);
        if (auto i = scheme.find(full)) return row[*i];
        break;
    }
    case ast::ExprKind::Binary:
        if (e.op == ast::BinOp::Add || e.op == ast::BinOp::Sub || e.op == ast::BinOp::Mul ||
            e.op == ast::BinOp::Div)
            return scalar_arith(e.op, eval_row_term(f, scheme, row, *e.a),
                                eval_row_term(f, scheme, row, *e.b));
        break;
    default: break;
    }
    OVal v = eval(f, e);
    if (!v.scalar) fail(ErrorCode::ExprTypeError, "relation used where a scalar is needed");
    return v.scalar_value();
}

bool Oracle::eval_row_cond(OFrame& f, const Scheme& scheme, const Tuple& row,
                           const ast::Expr& e) {
    switch (e.kind) {
    case ast::ExprKind::Lit:
        if (std::holds_alternative<bool>(e.lit.storage())) return e.lit.as_bool();
        break;
    case ast::ExprKind::Not: return !eval_row_cond(f, scheme, row, *e.a);
    case ast::ExprKind::IsNull:
        return eval_row_term(f, scheme, row, *e.a).is_undefined() != e.negated;
    case ast::ExprKind::Binary:
        switch (e.op) {
        case ast::BinOp::And:
            return eval_row_cond(f, scheme, row, *e.a) && eval_row_cond(f, scheme, row, *e.b);
        case ast::BinOp::Or:
            return eval_row_cond(f, scheme, row, *e.a) || eval_row_cond(f, scheme, row, *e.b);
        case ast::BinOp::Eq:
        case ast::BinOp::Ne:
        case ast::BinOp::Lt:
        case ast::BinOp::Le:
        case ast::BinOp::Gt:
        case ast::BinOp::Ge:
            return scalar_compare(e.op, eval_row_term(f, scheme, row, *e.a),
                                  eval_row_term(f, scheme, row, *e.b));
        default: break;
        }
        break;
    case ast::ExprKind::OvRetrieve: {
        // Membership of the referenced object in the retrieved set.
        ScalarValue ref;
        std::string target;
        if (e.a->kind == ast::ExprKind::Path && scheme.has(AttrName(e.a->path))) {
            std::size_t i = scheme.require(AttrName(e.a->path));
            ref = row[i];
            target = scheme.attrs[i].second.ref_target;
        } else {
            OVal v = eval(f, *e.a);
            if (!v.scalar || v.obj_type.empty())
                fail(ErrorCode::NotARefAttribute, "retrieval base is not a reference");
            ref = v.scalar_value();
            target = v.obj_type;
        }
        if (ref.is_undefined()) return false;
        if (target.empty() || target == typesys::object_root() ||
            !db_.types.find_class(target))
            fail(ErrorCode::NotARefAttribute, "reference target type is unknown");
        RelationValue trel = type_rel(target);
        std::size_t oi = trel.scheme().require(oid_attr());
        std::set<ScalarValue> members;
        for (const auto& t : trel.tuples()) members.insert(t[oi]);
        for (const auto& c : e.conds) {
            std::set<ScalarValue> sat;
            for (const auto& t : trel.tuples())
                if (eval_row_cond(f, trel.scheme(), t, *c)) sat.insert(t[oi]);
            std::set<ScalarValue> inter;
            for (const auto& m : members)
                if (sat.count(m)) inter.insert(m);
            members = std::move(inter);
        }
        return members.count(ref) != 0;
    }
    default: break;
    }
    ScalarValue v = eval_row_term(f, scheme, row, e);
    if (v.is_undefined()) return false;
    if (!std::holds_alternative<bool>(v.storage()))
        fail(ErrorCode::NonBooleanCondition, "condition is not boolean");
    return v.as_bool();
}

OVal Oracle::call(OFrame& f, const ast::Expr& e) {
    std::string rtype;
    std::vector<Oid> oids;
    if (e.a) {
        OVal recv = eval(f, *e.a);
        if (recv.obj_type.empty())
            fail(ErrorCode::ExprTypeError,
                 "cannot determine the receiver type of '" + e.name + "'");
        rtype = recv.obj_type;
        if (recv.scalar) {
            ScalarValue v = recv.scalar_value();
            if (!v.is_undefined()) oids.push_back(v.as_oid());
        } else {
            std::size_t oi = recv.rel.scheme().require(oid_attr());
            std::set<Oid> seen;
            for (const auto& t : recv.rel.tuples())
                if (!t[oi].is_undefined()) seen.insert(t[oi].as_oid());
            oids.assign(seen.begin(), seen.end());
        }
    } else {
        if (!f.has_self)
            fail(ErrorCode::UnknownName, "method call '" + e.name + "' outside an object context");
        rtype = f.type;
        oids.push_back(f.self);
    }
    auto ec = db_.types.require_component(rtype, e.name);
    if (!ec.spec.is_method) fail(ErrorCode::ExprTypeError, "'" + e.name + "' is not a method");
    std::vector<ScalarValue> args;
    for (const auto& a : e.args) {
        OVal av = eval(f, *a);
        if (!av.scalar) fail(ErrorCode::ExprTypeError, "method argument must be scalar");
        args.push_back(av.scalar_value());
    }
    RelationValue results = run_method(rtype, e.name, oids, args);
    OVal out;
    out.rel = drop_attrs(results, {oid_attr()});
    if (ec.spec.has_value && !ec.spec.value.is_set && !ec.spec.value.is_tuple &&
        out.rel.size() <= 1) {
        out.scalar = true;
        if (out.rel.empty()) {
            std::vector<Tuple> one{{ScalarValue::undefined()}};
            out.rel = RelationValue(out.rel.scheme(), std::move(one));
        }
        if (ec.spec.value.scalar.is_ref()) out.obj_type = ec.spec.value.scalar.ref_target;
    }
    return out;
}

OVal Oracle::eval(OFrame& f, const ast::Expr& e) {
    switch (e.kind) {
    case ast::ExprKind::Lit: {
        ScalarType t = ScalarType::integer();
        const auto& st = e.lit.storage();
        if (std::holds_alternative<double>(st)) t = ScalarType::floating();
        else if (std::holds_alternative<std::string>(st)) t = ScalarType::string();
        else if (std::holds_alternative<bool>(st)) t = ScalarType::boolean();
        else if (std::holds_alternative<Date>(st)) t = ScalarType::date();
        else if (std::holds_alternative<Oid>(st)) t = ScalarType::doid();
        return make_scalar(e.lit, t);
    }
    case ast::ExprKind::Path: return eval_path(f, e.path);
    case ast::ExprKind::Binary: {
        switch (e.op) {
        case ast::BinOp::Union:
        case ast::BinOp::Minus:
        case ast::BinOp::Intersect: {
            OVal a = eval(f, *e.a);
            OVal b = eval(f, *e.b);
            OVal out;
            if (e.op == ast::BinOp::Union) out.rel = relalg::set_union(a.rel, b.rel);
            else if (e.op == ast::BinOp::Minus) out.rel = relalg::minus(a.rel, b.rel);
            else out.rel = relalg::intersect(a.rel, b.rel);
            if (a.obj_type == b.obj_type) out.obj_type = a.obj_type;
            return out;
        }
        case ast::BinOp::Times: {
            OVal a = eval(f, *e.a);
            OVal b = eval(f, *e.b);
            OVal out;
            out.rel = relalg::product(a.rel, b.rel);
            return out;
        }
        case ast::BinOp::Join: {
            OVal a = eval(f, *e.a);
            OVal b = eval(f, *e.b);
            std::vector<std::pair<AttrName, AttrName>> on;
            for (const auto& [name, type] : a.rel.scheme().attrs)
                if (b.rel.scheme().has(name)) on.emplace_back(name, name);
            OVal out;
            out.rel = relalg::join_on(a.rel, b.rel, on);
            if (a.obj_type == b.obj_type) out.obj_type = a.obj_type;
            return out;
        }
        case ast::BinOp::Add:
        case ast::BinOp::Sub:
        case ast::BinOp::Mul:
        case ast::BinOp::Div: {
            OVal a = eval(f, *e.a);
            OVal b = eval(f, *e.b);
            if (!a.scalar || !b.scalar)
                fail(ErrorCode::ExprTypeError, "arithmetic on non-scalars");
            ScalarValue r = scalar_arith(e.op, a.scalar_value(), b.scalar_value());
            ScalarType t = std::holds_alternative<double>(r.storage())
                               ? ScalarType::floating()
                               : ScalarType::integer();
            return make_scalar(r, t);
        }
        default: {
            OVal a = eval(f, *e.a);
            OVal b = eval(f, *e.b);
            if (!a.scalar || !b.scalar)
                fail(ErrorCode::ExprTypeError, "comparison on non-scalars");
            bool r;
            if (e.op == ast::BinOp::And || e.op == ast::BinOp::Or) {
                auto as_b = [](const ScalarValue& v) {
                    if (v.is_undefined()) return false;
                    if (!std::holds_alternative<bool>(v.storage()))
                        fail(ErrorCode::NonBooleanCondition, "operand is not boolean");
                    return v.as_bool();
                };
                bool x = as_b(a.scalar_value()), y = as_b(b.scalar_value());
                r = e.op == ast::BinOp::And ? (x && y) : (x || y);
            } else {
                r = scalar_compare(e.op, a.scalar_value(), b.scalar_value());
            }
            return make_scalar(ScalarValue::of_bool(r), ScalarType::boolean());
        }
        }
    }
    case ast::ExprKind::Not: {
        OVal a = eval(f, *e.a);
        bool x = false;
        if (a.scalar) {
            ScalarValue v = a.scalar_value();
            if (!v.is_undefined()) {
                if (!std::holds_alternative<bool>(v.storage()))
                    fail(ErrorCode::NonBooleanCondition, "NOT operand is not boolean");
                x = v.as_bool();
            }
        } else {
            fail(ErrorCode::NonBooleanCondition, "NOT operand is not boolean");
        }
        return make_scalar(ScalarValue::of_bool(!x), ScalarType::boolean());
    }
    case ast::ExprKind::IsNull: {
        OVal a = eval(f, *e.a);
        if (!a.scalar) fail(ErrorCode::ExprTypeError, "IS NULL needs a scalar");
        return make_scalar(
            ScalarValue::of_bool(a.scalar_value().is_undefined() != e.negated),
            ScalarType::boolean());
    }
    case ast::ExprKind::Exist: {
        OVal a = eval(f, *e.a);
        bool nonempty = a.scalar ? !a.scalar_value().is_undefined() : !a.rel.empty();
        return make_scalar(ScalarValue::of_bool(nonempty), ScalarType::boolean());
    }
    case ast::ExprKind::ObjectOf: {
        OVal a = eval(f, *e.a);
        OVal out;
        if (a.scalar) {
            Scheme s;
            s.add(oid_attr(), a.obj_type.empty() ? ScalarType::doid()
                                                 : ScalarType::ref(a.obj_type));
            std::vector<Tuple> rows;
            if (!a.scalar_value().is_undefined()) rows.push_back({a.scalar_value()});
            out.rel = RelationValue(std::move(s), std::move(rows));
        } else {
            if (!a.rel.scheme().has(oid_attr()))
                fail(ErrorCode::NoOidAttribute, "relation has no OID attribute");
            out.rel = keep_attrs(a.rel, {oid_attr()});
        }
        out.obj_type = a.obj_type;
        return out;
    }
    case ast::ExprKind::Where: {
        OVal a = eval(f, *e.a);
        OVal out;
        std::vector<Tuple> rows;
        for (const auto& t : a.rel.tuples())
            if (eval_row_cond(f, a.rel.scheme(), t, *e.b)) rows.push_back(t);
        Scheme s = a.rel.scheme();
        s.keys.clear();
        out.rel = RelationValue(std::move(s), std::move(rows));
        out.scalar = a.scalar;
        out.obj_type = a.obj_type;
        return out;
    }
    case ast::ExprKind::Project: {
        OVal a = eval(f, *e.a);
        relalg::ProjectSpec spec;
        if (e.proj_drop) {
            for (const auto& it : e.proj) spec.drop.push_back(AttrName(it.path));
        } else {
            for (const auto& it : e.proj) {
                AttrName name(it.path);
                if (!a.rel.scheme().has(name) && it.path.size() == 1) {
                    for (const auto& [attr, type] : a.rel.scheme().attrs)
                        if (!attr.is_reserved() && attr.segments.back() == it.path[0]) {
                            name = attr;
                            break;
                        }
                }
                spec.keep.push_back(name);
                if (it.rename) spec.renames.emplace_back(name, AttrName(*it.rename));
            }
        }
        OVal out;
        out.rel = relalg::project(a.rel, spec);
        out.obj_type = out.rel.scheme().has(oid_attr()) ? a.obj_type : "";
        return out;
    }
    case ast::ExprKind::Summarize: {
        OVal a = eval(f, *e.a);
        RelationValue rel = a.rel;
        std::vector<AttrName> by;
        for (const auto& p : e.by) by.push_back(AttrName(p));
        std::vector<relalg::SummarizeAdd> adds;
        int n = 0;
        for (const auto& add : e.adds) {
            AttrName src;
            if (add.source->kind == ast::ExprKind::Path &&
                rel.scheme().has(AttrName(add.source->path))) {
                src = AttrName(add.source->path);
            } else {
                AttrName aux(std::string("#s") + std::to_string(n++));
                const ast::Expr* sexpr = add.source.get();
                Scheme cur = rel.scheme();
                rel = relalg::extend(rel, aux, ScalarType::integer(),
                                     [this, &f, sexpr, cur](const Tuple& row) {
                                         OFrame g = f;
                                         return eval_row_term(g, cur, row, *sexpr);
                                     });
                src = aux;
            }
            adds.push_back({add.agg, src, AttrName(add.result)});
        }
        OVal out;
        out.rel = relalg::summarize(rel, by, adds);
        if (e.by.empty() && adds.size() == 1) {
            out.rel = relalg::rename(out.rel, {{adds[0].result, val_attr()}});
            if (out.rel.empty()) {
                std::vector<Tuple> one{{ScalarValue::undefined()}};
                out.rel = RelationValue(out.rel.scheme(), std::move(one));
            }
            out.scalar = true;
        }
        return out;
    }
    case ast::ExprKind::Expand: {
        OVal a = eval(f, *e.a);
        OVal out;
        out.rel = expand(f, a.rel, AttrName(e.path));
        out.obj_type = a.obj_type;
        return out;
    }
    case ast::ExprKind::OvRetrieve: {
        OVal base = eval(f, *e.a);
        bool was_scalar = base.scalar;
        if (base.scalar) {
            if (base.obj_type.empty())
                fail(ErrorCode::NotARefAttribute, "value retrieval needs an object set");
            RelationValue trel = type_rel(base.obj_type);
            std::size_t oi = trel.scheme().require(oid_attr());
            ScalarValue ref = base.scalar_value();
            std::vector<Tuple> rows;
            for (const auto& t : trel.tuples())
                if (!ref.is_undefined() && t[oi] == ref) rows.push_back(t);
            base.rel = RelationValue(trel.scheme(), std::move(rows));
            base.scalar = false;
        }
        if (!base.rel.scheme().has(oid_attr()))
            fail(ErrorCode::NoOidAttribute, "value retrieval needs an OID attribute");
        std::size_t oi = base.rel.scheme().require(oid_attr());
        std::set<ScalarValue> members;
        for (const auto& t : base.rel.tuples()) members.insert(t[oi]);
        for (const auto& c : e.conds) {
            std::set<ScalarValue> sat;
            for (const auto& t : base.rel.tuples())
                if (eval_row_cond(f, base.rel.scheme(), t, *c)) sat.insert(t[oi]);
            std::set<ScalarValue> inter;
            for (const auto& m : members)
                if (sat.count(m)) inter.insert(m);
            members = std::move(inter);
        }
        std::vector<Tuple> rows;
        for (const auto& t : base.rel.tuples())
            if (members.count(t[oi])) rows.push_back(t);
        OVal out;
        Scheme s = base.rel.scheme();
        s.keys.clear();
        out.rel = RelationValue(std::move(s), std::move(rows));
        out.obj_type = base.obj_type;
        if (was_scalar) out.rel = keep_attrs(out.rel, {oid_attr()});
        return out;
    }
    case ast::ExprKind::Call: return call(f, e);
    case ast::ExprKind::Member: {
        OVal a = eval(f, *e.a);
        std::vector<std::string> prefix;
        return step(f, std::move(a), prefix, e.name);
    }
    case ast::ExprKind::IsType:
    case ast::ExprKind::OfType: {
        OVal a = eval(f, *e.a);
        if (!a.scalar) fail(ErrorCode::ExprTypeError, "type test needs a reference scalar");
        ScalarValue v = a.scalar_value();
        bool r = false;
        if (!v.is_undefined() && std::holds_alternative<Oid>(v.storage()))
            r = e.kind == ast::ExprKind::IsType ? db_.cat.is_a(v.as_oid(), e.name)
                                                : db_.cat.is_of(v.as_oid(), e.name);
        return make_scalar(ScalarValue::of_bool(r), ScalarType::boolean());
    }
    case ast::ExprKind::UpdateMap: {
        OVal a = eval(f, *e.a);
        Scheme cur = a.rel.scheme();
        std::vector<std::pair<AttrName, std::function<ScalarValue(const Tuple&)>>> sets;
        for (const auto& [path, expr] : e.sets) {
            AttrName col(path);
            if (!cur.has(col))
                fail(ErrorCode::UnknownAttribute, "no attribute '" + col.display() + "'");
            const ast::Expr* sexpr = expr.get();
            sets.emplace_back(col, [this, &f, sexpr, cur](const Tuple& row) {
                OFrame g = f;
                return eval_row_term(g, cur, row, *sexpr);
            });
        }
        OVal out;
        out.rel = relalg::map_rows(a.rel, sets, nullptr);
        out.obj_type = a.obj_type;
        return out;
    }
    }
    fail(ErrorCode::EvaluationError, "unhandled expression form");
}

void Oracle::write_component(Oid o, const std::string& ctx_type, const std::string& comp,
                             const OVal& v) {
    auto ec = db_.types.require_component(ctx_type, comp);
    bool scalar = !ec.spec.value.is_set && !ec.spec.value.is_tuple;
    if (scalar) {
        if (!v.scalar) fail(ErrorCode::SchemeMismatch, "relation assigned to scalar component");
        if (!v.scalar_value().fits(ec.spec.value.scalar))
            fail(ErrorCode::TypeMismatch, "value does not fit component '" + comp + "'");
        RelationValue& own = db_.base_var(ec.owner, "");
        std::size_t oi = own.scheme().require(oid_attr());
        std::size_t ci = own.scheme().require(AttrName(comp));
        std::vector<Tuple> rows = own.tuples();
        for (auto& t : rows)
            if (!t[oi].is_undefined() && t[oi].as_oid() == o) t[ci] = v.scalar_value();
        own = RelationValue(own.scheme(), std::move(rows));
        return;
    }
    Scheme cs = db_.types.component_scheme(ctx_type, comp);
    RelationValue payload = v.rel;
    if (v.scalar && cs.attrs.size() == 1)
        payload = relalg::rename(payload, {{val_attr(), cs.attrs[0].first}});
    Scheme expect;
    for (const auto& [n, t] : cs.attrs) expect.add(n, t);
    if (!payload.scheme().consistent_with(expect))
        fail(ErrorCode::SchemeMismatch, "value does not fit component '" + comp + "'");
    if (!ec.spec.value.is_set && payload.size() > 1)
        fail(ErrorCode::EvaluationError, "several rows assigned to tuple component");
    RelationValue& bv = db_.base_var(ec.owner, comp);
    std::size_t oi = bv.scheme().require(oid_attr());
    std::vector<Tuple> rows;
    for (const auto& t : bv.tuples())
        if (t[oi].is_undefined() || t[oi].as_oid() != o) rows.push_back(t);
    std::vector<std::size_t> idx;
    for (std::size_t j = 1; j < bv.scheme().attrs.size(); ++j)
        idx.push_back(payload.scheme().require(bv.scheme().attrs[j].first));
    for (const auto& t : payload.tuples()) {
        Tuple row{ScalarValue::of_oid(o)};
        for (auto j : idx) row.push_back(t[j]);
        rows.push_back(std::move(row));
    }
    if (!ec.spec.value.is_set && payload.empty()) {
        Tuple row{ScalarValue::of_oid(o)};
        for (std::size_t j = 1; j < bv.scheme().attrs.size(); ++j)
            row.push_back(ScalarValue::undefined());
        rows.push_back(std::move(row));
    }
    bv = RelationValue(bv.scheme(), std::move(rows));
}

void Oracle::assign(RunState& st, const ast::Expr& target, const ast::Expr& rhs) {
    if (target.kind != ast::ExprKind::Path)
        fail(ErrorCode::NotWritable, "assignment target must be a name");
    std::vector<std::string> path = target.path;
    if (path.size() == 2 && path[0] == "this") path.erase(path.begin());
    if (path.size() != 1)
        fail(ErrorCode::NotWritable,
             "cannot assign through '" + AttrName(target.path).display() + "'");
    const std::string& name = path[0];
    OVal v = eval(st.f, rhs);

    bool is_comp = false;
    try {
        db_.types.require_component(st.f.type, name);
        is_comp = true;
    } catch (const Error&) {
    }
    if (is_comp) {
        auto ec = db_.types.require_component(st.f.type, name);
        if (ec.spec.is_method) fail(ErrorCode::NotWritable, "cannot assign to a method");
        auto impl = db_.types.lookup_realization(db_.cat.oids().type_of(st.f.self), name);
        if (impl && impl->first.kind == typesys::ComponentImpl::Kind::Computed) {
            warnings.push_back("assignment to computed component '" + name + "' ignored");
            return;
        }
        write_component(st.f.self, st.f.type, name, v);
        return;
    }
    if (db_.globals.count(name)) {
        auto& gv = db_.globals[name];
        Scheme vs = storage::value_scheme(db_.types, gv.type);
        RelationValue payload = v.rel;
        if (!gv.type.is_tuple && v.scalar) {
            payload = relalg::rename(payload, {{val_attr(), vs.attrs[0].first}});
            if (!gv.type.is_set) {
                // a scalar Undefined clears the variable
                if (v.scalar_value().is_undefined()) payload = RelationValue(payload.scheme());
            }
        }
        if (!payload.scheme().consistent_with(vs))
            fail(ErrorCode::SchemeMismatch, "value does not fit variable '" + name + "'");
        if (!gv.type.is_set && payload.size() > 1)
            fail(ErrorCode::EvaluationError, "several values assigned to scalar variable");
        gv.value = payload.with_keys(gv.keys);
        return;
    }
    st.locals[name] = std::move(v);
}

void Oracle::run_statements(RunState& st, const std::vector<ast::StmtPtr>& stmts) {
    for (const auto& sp : stmts) {
        if (st.returned) return;
        const ast::Stmt& s = *sp;
        switch (s.kind) {
        case ast::StmtKind::Assign: assign(st, *s.target, *s.expr); break;
        case ast::StmtKind::Insert:
        case ast::StmtKind::Delete:
        case ast::StmtKind::Update: {
            ast::StmtPtr rw = rewrite_dml_as_assignment(s);
            assign(st, *rw->target, *rw->expr);
            break;
        }
        case ast::StmtKind::If: {
            OVal c = eval(st.f, *s.cond);
            bool b = false;
            if (c.scalar) {
                ScalarValue v = c.scalar_value();
                if (!v.is_undefined()) {
                    if (!std::holds_alternative<bool>(v.storage()))
                        fail(ErrorCode::NonBooleanCondition, "IF condition is not boolean");
                    b = v.as_bool();
                }
            } else {
                fail(ErrorCode::NonBooleanCondition, "IF condition is not boolean");
            }
            run_statements(st, b ? s.then_block : s.else_block);
            break;
        }
        case ast::StmtKind::DoWhile: {
            int iter = 0;
            for (;;) {
                run_statements(st, s.body);
                if (st.returned) break;
                OVal c = eval(st.f, *s.cond);
                if (!c.scalar) fail(ErrorCode::NonBooleanCondition, "WHILE condition");
                ScalarValue v = c.scalar_value();
                bool b = !v.is_undefined() && std::holds_alternative<bool>(v.storage())
                             ? v.as_bool()
                             : false;
                if (!v.is_undefined() && !std::holds_alternative<bool>(v.storage()))
                    fail(ErrorCode::NonBooleanCondition, "WHILE condition is not boolean");
                if (!b) break;
                if (++iter >= kLoopCap)
                    fail(ErrorCode::LoopLimitExceeded,
                         "loop exceeded " + std::to_string(kLoopCap) + " iterations");
            }
            break;
        }
        case ast::StmtKind::Return: {
            if (s.expr && st.spec && st.spec->has_value) {
                OVal v = eval(st.f, *s.expr);
                bool scalar_result = st.result_payload.attrs.size() == 1 &&
                                     st.result_payload.attrs[0].first == val_attr();
                if (scalar_result) {
                    ScalarValue sv = v.scalar ? v.scalar_value() : ScalarValue::undefined();
                    if (!v.scalar) {
                        if (v.rel.scheme().attrs.size() == 1 && v.rel.size() <= 1)
                            sv = v.rel.empty() ? ScalarValue::undefined() : v.rel.tuples()[0][0];
                        else
                            fail(ErrorCode::SchemeMismatch, "relation returned for scalar value");
                    }
                    st.result_rows.push_back({ScalarValue::of_oid(st.f.self), sv});
                } else {
                    for (const auto& t : v.rel.tuples()) {
                        Tuple row{ScalarValue::of_oid(st.f.self)};
                        for (const auto& [n, ty] : st.result_payload.attrs)
                            row.push_back(t[v.rel.scheme().require(n)]);
                        st.result_rows.push_back(std::move(row));
                    }
                }
            } else {
                st.result_rows.push_back({ScalarValue::of_oid(st.f.self)});
            }
            st.returned = true;
            break;
        }
        case ast::StmtKind::Exec: eval(st.f, *s.expr); break;
        }
    }
}

RelationValue Oracle::run_method(const std::string& type, const std::string& method,
                                 const std::vector<Oid>& group,
                                 const std::vector<ScalarValue>& args) {
    if (++depth_ > kDepthCap) fail(ErrorCode::EvaluationError, "call depth limit exceeded");
    auto ec = db_.types.require_component(type, method);
    if (!ec.spec.is_method) fail(ErrorCode::ExprTypeError, "'" + method + "' is not a method");
    if (args.size() != ec.spec.params.size())
        fail(ErrorCode::ArityMismatch, method + " takes " +
                                           std::to_string(ec.spec.params.size()) +
                                           " argument(s), got " + std::to_string(args.size()));
    Scheme rs;
    rs.add(oid_attr(), ScalarType::ref(type));
    Scheme payload = result_payload_scheme(db_.types, &ec.spec);
    for (const auto& [n, t] : payload.attrs) rs.add(n, t);

    std::vector<Oid> ordered = group;
    std::sort(ordered.begin(), ordered.end());
    std::vector<Tuple> rows;
    for (Oid o : ordered) {
        const std::string& of = db_.cat.oids().type_of(o);
        if (!db_.types.is_subtype(of, type))
            fail(ErrorCode::TypeMismatch, "object is not of type " + type);
        auto impl = db_.types.lookup_realization(of, method);
        if (!impl)
            fail(ErrorCode::UnrealizedComponent, "method '" + method + "' is not realized");
        if (impl->first.kind != typesys::ComponentImpl::Kind::Method)
            fail(ErrorCode::ImplKindMismatch, "'" + method + "' is not realized as a method");
        RunState st;
        st.f.type = impl->second;
        st.f.self = o;
        st.f.has_self = true;
        st.spec = &ec.spec;
        st.result_payload = payload;
        for (std::size_t i = 0; i < args.size(); ++i) {
            ScalarType pt = ec.spec.params[i].second.is_tuple
                                ? ScalarType::integer()
                                : ec.spec.params[i].second.scalar;
            st.params[ec.spec.params[i].first] = {args[i], pt};
        }
        st.f.params = &st.params;
        st.f.locals = &st.locals;
        run_statements(st, impl->first.body);
        rows.insert(rows.end(), st.result_rows.begin(), st.result_rows.end());
    }
    --depth_;
    return RelationValue(std::move(rs), std::move(rows));
}

} // namespace

ExecResult oracle_execute(storage::Database& db, const std::string& type,
                          const std::string& method, const std::vector<Oid>& group,
                          const std::vector<ScalarValue>& args) {
    Oracle orc(db);
    ExecResult r;
    r.results = orc.run_method(type, method, group, args);
    r.warnings = std::move(orc.warnings);
    return r;
}

RelationValue oracle_eval(storage::Database& db, const std::string& type, Oid o,
                          const ast::Expr& e) {
    Oracle orc(db);
    Oracle::OFrame f;
    f.type = type;
    f.self = o;
    f.has_self = true;
    OVal v = orc.eval(f, e);
    return v.rel;
}

} // namespace ro::rcompiler
