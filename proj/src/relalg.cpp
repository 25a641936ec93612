#include "ro/relalg.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ro::relalg {

namespace {

[[noreturn]] void fail(ErrorCode code, std::string msg) { throw Error(code, std::move(msg)); }

} // namespace

std::optional<std::size_t> Scheme::find(const AttrName& name) const {
    for (std::size_t i = 0; i < attrs.size(); ++i)
        if (attrs[i].first == name) return i;
    return std::nullopt;
}

std::size_t Scheme::require(const AttrName& name) const {
    if (auto i = find(name)) return *i;
    fail(ErrorCode::UnknownAttribute, "no attribute '" + name.display() + "' in " + display());
}

void Scheme::add(AttrName name, ScalarType type) {
    if (find(name))
        fail(ErrorCode::AttrCollision, "duplicate attribute '" + name.display() + "'");
    attrs.emplace_back(std::move(name), std::move(type));
}

bool Scheme::consistent_with(const Scheme& other) const {
    if (attrs.size() != other.attrs.size()) return false;
    for (const auto& [name, type] : attrs) {
        auto i = other.find(name);
        if (!i || other.attrs[*i].second != type) return false;
    }
    return true;
}

std::string Scheme::display() const {
    std::string r = "(";
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (i) r += ", ";
        r += attrs[i].first.display() + ":" + type_display(attrs[i].second);
    }
    return r + ")";
}

RelationValue::RelationValue(Scheme scheme, std::vector<Tuple> tuples)
    : scheme_(std::move(scheme)), tuples_(std::move(tuples)) {
    for (const auto& t : tuples_) {
        if (t.size() != scheme_.attrs.size())
            fail(ErrorCode::SchemeMismatch, "tuple arity does not match scheme");
        for (std::size_t i = 0; i < t.size(); ++i)
            if (!t[i].fits(scheme_.attrs[i].second))
                fail(ErrorCode::TypeMismatch, "value " + t[i].display() + " does not fit " +
                                                  type_display(scheme_.attrs[i].second) +
                                                  " attribute '" +
                                                  scheme_.attrs[i].first.display() + "'");
    }
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
}

bool RelationValue::contains(const Tuple& t) const {
    return std::binary_search(tuples_.begin(), tuples_.end(), t);
}

std::optional<std::string> RelationValue::key_violation() const {
    for (const auto& key : scheme_.keys) {
        if (key.kind == KeyKind::Foreign) continue; // checked against the target relation
        std::vector<std::size_t> idx;
        for (const auto& f : key.fields) idx.push_back(scheme_.require(f));
        std::set<Tuple> seen;
        for (const auto& t : tuples_) {
            Tuple kv;
            for (auto i : idx) {
                if (t[i].is_undefined())
                    return "Undefined value in key field '" + scheme_.attrs[i].first.display() +
                           "'";
                kv.push_back(t[i]);
            }
            if (!seen.insert(kv).second) {
                std::string fields;
                for (const auto& f : key.fields) fields += (fields.empty() ? "" : ",") + f.display();
                return "duplicate key {" + fields + "} value";
            }
        }
    }
    return std::nullopt;
}

RelationValue RelationValue::with_keys(std::vector<KeySpec> keys) const {
    RelationValue r = *this;
    r.scheme_.keys = std::move(keys);
    return r;
}

// --- Terms & predicates ---------------------------------------------------

TermPtr Term::make_attr(AttrName a) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Attr;
    t->attr = std::move(a);
    return t;
}
TermPtr Term::make_lit(ScalarValue v) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Lit;
    t->lit = std::move(v);
    return t;
}
TermPtr Term::make_arith(ArithOp op, TermPtr l, TermPtr r) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Arith;
    t->op = op;
    t->lhs = std::move(l);
    t->rhs = std::move(r);
    return t;
}

PredicatePtr Predicate::make_cmp(CmpOp op, TermPtr l, TermPtr r) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::Cmp;
    p->op = op;
    p->lhs = std::move(l);
    p->rhs = std::move(r);
    return p;
}
PredicatePtr Predicate::make_is_null(TermPtr t, bool negated) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::IsNull;
    p->term = std::move(t);
    p->negated = negated;
    return p;
}
PredicatePtr Predicate::make_and(PredicatePtr a, PredicatePtr b) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::And;
    p->a = std::move(a);
    p->b = std::move(b);
    return p;
}
PredicatePtr Predicate::make_or(PredicatePtr a, PredicatePtr b) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::Or;
    p->a = std::move(a);
    p->b = std::move(b);
    return p;
}
PredicatePtr Predicate::make_not(PredicatePtr a) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::Not;
    p->a = std::move(a);
    return p;
}
PredicatePtr Predicate::make_bool(bool v) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::Bool;
    p->value = v;
    return p;
}
PredicatePtr Predicate::make_in(std::vector<TermPtr> terms, RelationValue rel) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::InRel;
    p->terms = std::move(terms);
    p->rel = std::make_shared<RelationValue>(std::move(rel));
    return p;
}

ScalarValue eval_term(const Term& t, const Scheme& scheme, const Tuple& row) {
    switch (t.kind) {
    case Term::Kind::Attr: return row[scheme.require(t.attr)];
    case Term::Kind::Lit: return t.lit;
    case Term::Kind::Arith: {
        ScalarValue l = eval_term(*t.lhs, scheme, row);
        ScalarValue r = eval_term(*t.rhs, scheme, row);
        if (l.is_undefined() || r.is_undefined()) return ScalarValue::undefined();
        bool lf = std::holds_alternative<double>(l.storage());
        bool rf = std::holds_alternative<double>(r.storage());
        bool li = std::holds_alternative<std::int64_t>(l.storage());
        bool ri = std::holds_alternative<std::int64_t>(r.storage());
        if (li && ri) {
            std::int64_t a = l.as_int(), b = r.as_int();
            switch (t.op) {
            case ArithOp::Add: return ScalarValue::of_int(a + b);
            case ArithOp::Sub: return ScalarValue::of_int(a - b);
            case ArithOp::Mul: return ScalarValue::of_int(a * b);
            case ArithOp::Div:
                if (b == 0) fail(ErrorCode::EvaluationError, "integer division by zero");
                return ScalarValue::of_int(a / b);
            }
        }
        if (lf && rf) {
            double a = l.as_float(), b = r.as_float();
            switch (t.op) {
            case ArithOp::Add: return ScalarValue::of_float(a + b);
            case ArithOp::Sub: return ScalarValue::of_float(a - b);
            case ArithOp::Mul: return ScalarValue::of_float(a * b);
            case ArithOp::Div:
                if (b == 0.0) fail(ErrorCode::EvaluationError, "division by zero");
                return ScalarValue::of_float(a / b);
            }
        }
        fail(ErrorCode::TypeMismatch, "arithmetic on non-numeric or mixed operands");
    }
    }
    fail(ErrorCode::EvaluationError, "bad term");
}

bool eval_predicate(const Predicate& p, const Scheme& scheme, const Tuple& row) {
    switch (p.kind) {
    case Predicate::Kind::Cmp: {
        auto ord = compare_for_predicate(eval_term(*p.lhs, scheme, row),
                                         eval_term(*p.rhs, scheme, row));
        if (!ord) return false;
        switch (p.op) {
        case CmpOp::Eq: return *ord == std::strong_ordering::equal;
        case CmpOp::Ne: return *ord != std::strong_ordering::equal;
        case CmpOp::Lt: return *ord == std::strong_ordering::less;
        case CmpOp::Le: return *ord != std::strong_ordering::greater;
        case CmpOp::Gt: return *ord == std::strong_ordering::greater;
        case CmpOp::Ge: return *ord != std::strong_ordering::less;
        }
        return false;
    }
    case Predicate::Kind::IsNull: {
        bool null = eval_term(*p.term, scheme, row).is_undefined();
        return p.negated ? !null : null;
    }
    case Predicate::Kind::And:
        return eval_predicate(*p.a, scheme, row) && eval_predicate(*p.b, scheme, row);
    case Predicate::Kind::Or:
        return eval_predicate(*p.a, scheme, row) || eval_predicate(*p.b, scheme, row);
    case Predicate::Kind::Not: return !eval_predicate(*p.a, scheme, row);
    case Predicate::Kind::Bool: return p.value;
    case Predicate::Kind::InRel: {
        Tuple key;
        for (const auto& t : p.terms) key.push_back(eval_term(*t, scheme, row));
        return p.rel->contains(key);
    }
    }
    return false;
}

namespace {

ScalarType check_term(const Term& t, const Scheme& scheme) {
    switch (t.kind) {
    case Term::Kind::Attr: return scheme.attrs[scheme.require(t.attr)].second;
    case Term::Kind::Lit: {
        // Literal type inferred from payload; Undefined is a wildcard.
        const auto& s = t.lit.storage();
        if (std::holds_alternative<std::int64_t>(s)) return ScalarType::integer();
        if (std::holds_alternative<double>(s)) return ScalarType::floating();
        if (std::holds_alternative<std::string>(s)) return ScalarType::string();
        if (std::holds_alternative<bool>(s)) return ScalarType::boolean();
        if (std::holds_alternative<Date>(s)) return ScalarType::date();
        if (std::holds_alternative<Oid>(s)) return ScalarType::doid();
        return ScalarType::integer(); // Undefined: caller-compatible
    }
    case Term::Kind::Arith: {
        ScalarType l = check_term(*t.lhs, scheme);
        ScalarType r = check_term(*t.rhs, scheme);
        if (!l.is_numeric() || l.kind != r.kind)
            fail(ErrorCode::TypeMismatch, "arithmetic requires matching numeric operands");
        return l;
    }
    }
    fail(ErrorCode::TypeMismatch, "bad term");
}

bool types_comparable(const ScalarType& a, const ScalarType& b) {
    if (a.kind != b.kind) return false;
    // Refs compare across targets: OID identity comparison is total.
    return true;
}

} // namespace

void check_predicate(const Predicate& p, const Scheme& scheme) {
    switch (p.kind) {
    case Predicate::Kind::Cmp: {
        ScalarType l = check_term(*p.lhs, scheme);
        ScalarType r = check_term(*p.rhs, scheme);
        bool l_wild = p.lhs->kind == Term::Kind::Lit && p.lhs->lit.is_undefined();
        bool r_wild = p.rhs->kind == Term::Kind::Lit && p.rhs->lit.is_undefined();
        if (!l_wild && !r_wild && !types_comparable(l, r))
            fail(ErrorCode::TypeMismatch, "incomparable operand types " + type_display(l) +
                                              " and " + type_display(r));
        return;
    }
    case Predicate::Kind::IsNull: check_term(*p.term, scheme); return;
    case Predicate::Kind::And:
    case Predicate::Kind::Or:
        check_predicate(*p.a, scheme);
        check_predicate(*p.b, scheme);
        return;
    case Predicate::Kind::Not: check_predicate(*p.a, scheme); return;
    case Predicate::Kind::Bool: return;
    case Predicate::Kind::InRel:
        for (const auto& t : p.terms) check_term(*t, scheme);
        return;
    }
}

// --- Operations -----------------------------------------------------------

namespace {

Scheme bare(const Scheme& s) {
    Scheme r;
    r.attrs = s.attrs;
    return r;
}

// Reorders b's tuples into a's attribute order.
std::vector<Tuple> align(const Scheme& a, const RelationValue& b) {
    std::vector<std::size_t> idx;
    idx.reserve(a.attrs.size());
    for (const auto& [name, type] : a.attrs) idx.push_back(b.scheme().require(name));
    std::vector<Tuple> out;
    out.reserve(b.size());
    for (const auto& t : b.tuples()) {
        Tuple row;
        row.reserve(idx.size());
        for (auto i : idx) row.push_back(t[i]);
        out.push_back(std::move(row));
    }
    return out;
}

void require_consistent(const RelationValue& a, const RelationValue& b) {
    if (!a.scheme().consistent_with(b.scheme()))
        fail(ErrorCode::SchemeMismatch,
             "schemes differ: " + a.scheme().display() + " vs " + b.scheme().display());
}

} // namespace

RelationValue set_union(const RelationValue& a, const RelationValue& b) {
    require_consistent(a, b);
    std::vector<Tuple> tuples = a.tuples();
    auto more = align(a.scheme(), b);
    tuples.insert(tuples.end(), more.begin(), more.end());
    return RelationValue(bare(a.scheme()), std::move(tuples));
}

RelationValue minus(const RelationValue& a, const RelationValue& b) {
    require_consistent(a, b);
    RelationValue bb(bare(a.scheme()), align(a.scheme(), b));
    std::vector<Tuple> tuples;
    for (const auto& t : a.tuples())
        if (!bb.contains(t)) tuples.push_back(t);
    return RelationValue(bare(a.scheme()), std::move(tuples));
}

RelationValue intersect(const RelationValue& a, const RelationValue& b) {
    require_consistent(a, b);
    RelationValue bb(bare(a.scheme()), align(a.scheme(), b));
    std::vector<Tuple> tuples;
    for (const auto& t : a.tuples())
        if (bb.contains(t)) tuples.push_back(t);
    return RelationValue(bare(a.scheme()), std::move(tuples));
}

RelationValue product(const RelationValue& a, const RelationValue& b) {
    Scheme s = bare(a.scheme());
    for (const auto& [name, type] : b.scheme().attrs) s.add(name, type); // AttrCollision on clash
    std::vector<Tuple> tuples;
    tuples.reserve(a.size() * b.size());
    for (const auto& ta : a.tuples())
        for (const auto& tb : b.tuples()) {
            Tuple row = ta;
            row.insert(row.end(), tb.begin(), tb.end());
            tuples.push_back(std::move(row));
        }
    return RelationValue(std::move(s), std::move(tuples));
}

RelationValue join_on(const RelationValue& a, const RelationValue& b,
                      const std::vector<std::pair<AttrName, AttrName>>& pairs) {
    std::vector<std::size_t> ai, bi;
    for (const auto& [an, bn] : pairs) {
        std::size_t i = a.scheme().require(an);
        std::size_t j = b.scheme().require(bn);
        if (a.scheme().attrs[i].second.kind != b.scheme().attrs[j].second.kind)
            fail(ErrorCode::SchemeMismatch, "join columns '" + an.display() + "'/'" +
                                                bn.display() + "' have different types");
        ai.push_back(i);
        bi.push_back(j);
    }
    // b's residual columns (join columns dropped).
    std::vector<std::size_t> bres;
    for (std::size_t j = 0; j < b.scheme().attrs.size(); ++j)
        if (std::find(bi.begin(), bi.end(), j) == bi.end()) bres.push_back(j);

    Scheme s = bare(a.scheme());
    for (auto j : bres) s.add(b.scheme().attrs[j].first, b.scheme().attrs[j].second);

    std::map<Tuple, std::vector<const Tuple*>> index;
    for (const auto& tb : b.tuples()) {
        Tuple key;
        for (auto j : bi) key.push_back(tb[j]);
        index[key].push_back(&tb);
    }
    std::vector<Tuple> tuples;
    for (const auto& ta : a.tuples()) {
        Tuple key;
        for (auto i : ai) key.push_back(ta[i]);
        auto it = index.find(key);
        if (it == index.end()) continue;
        for (const Tuple* tb : it->second) {
            Tuple row = ta;
            for (auto j : bres) row.push_back((*tb)[j]);
            tuples.push_back(std::move(row));
        }
    }
    return RelationValue(std::move(s), std::move(tuples));
}

RelationValue select_where(const RelationValue& a, const Predicate& cond) {
    check_predicate(cond, a.scheme());
    return select_rows(a, [&](const Tuple& t) { return eval_predicate(cond, a.scheme(), t); });
}

RelationValue select_rows(const RelationValue& a,
                          const std::function<bool(const Tuple&)>& keep) {
    std::vector<Tuple> tuples;
    for (const auto& t : a.tuples())
        if (keep(t)) tuples.push_back(t);
    return RelationValue(bare(a.scheme()), std::move(tuples));
}

RelationValue project(const RelationValue& a, const ProjectSpec& spec) {
    if (spec.keep.empty() == spec.drop.empty())
        fail(ErrorCode::UnknownAttribute, "project needs exactly one of keep/drop");
    std::vector<std::size_t> idx;
    if (!spec.keep.empty()) {
        for (const auto& n : spec.keep) idx.push_back(a.scheme().require(n));
    } else {
        std::set<std::size_t> dropped;
        for (const auto& n : spec.drop) dropped.insert(a.scheme().require(n));
        for (std::size_t i = 0; i < a.scheme().attrs.size(); ++i)
            if (!dropped.count(i)) idx.push_back(i);
    }
    Scheme s;
    for (auto i : idx) s.add(a.scheme().attrs[i].first, a.scheme().attrs[i].second);
    std::vector<Tuple> tuples;
    tuples.reserve(a.size());
    for (const auto& t : a.tuples()) {
        Tuple row;
        row.reserve(idx.size());
        for (auto i : idx) row.push_back(t[i]);
        tuples.push_back(std::move(row));
    }
    RelationValue r(std::move(s), std::move(tuples));
    if (!spec.renames.empty()) r = rename(r, spec.renames);
    return r;
}

RelationValue rename(const RelationValue& a,
                     const std::vector<std::pair<AttrName, AttrName>>& renames) {
    Scheme s;
    for (const auto& [name, type] : a.scheme().attrs) {
        AttrName out = name;
        for (const auto& [from, to] : renames)
            if (name == from) out = to;
        s.add(std::move(out), type); // AttrCollision if renames collide
    }
    for (const auto& [from, to] : renames) a.scheme().require(from);
    return RelationValue(std::move(s), a.tuples());
}

RelationValue summarize(const RelationValue& a, const std::vector<AttrName>& by,
                        const std::vector<SummarizeAdd>& adds) {
    std::vector<std::size_t> byi;
    for (const auto& n : by) byi.push_back(a.scheme().require(n));
    struct Acc {
        std::int64_t isum = 0;
        double fsum = 0;
        std::int64_t count = 0;
        bool any_defined = false;
    };
    std::vector<std::size_t> srci;
    for (const auto& add : adds) {
        std::size_t i = a.scheme().require(add.source);
        if (add.agg == Aggregate::Sum && !a.scheme().attrs[i].second.is_numeric())
            fail(ErrorCode::TypeMismatch, "SUM source '" + add.source.display() + "' not numeric");
        srci.push_back(i);
    }
    std::map<Tuple, std::vector<Acc>> groups;
    for (const auto& t : a.tuples()) {
        Tuple key;
        for (auto i : byi) key.push_back(t[i]);
        auto& accs = groups.try_emplace(std::move(key), adds.size()).first->second;
        for (std::size_t k = 0; k < adds.size(); ++k) {
            const ScalarValue& v = t[srci[k]];
            if (v.is_undefined()) continue; // Undefined is absent
            accs[k].any_defined = true;
            accs[k].count++;
            if (std::holds_alternative<std::int64_t>(v.storage())) accs[k].isum += v.as_int();
            else if (std::holds_alternative<double>(v.storage())) accs[k].fsum += v.as_float();
        }
    }
    Scheme s;
    for (auto i : byi) s.add(a.scheme().attrs[i].first, a.scheme().attrs[i].second);
    for (std::size_t k = 0; k < adds.size(); ++k) {
        if (adds[k].agg == Aggregate::Count) s.add(adds[k].result, ScalarType::integer());
        else s.add(adds[k].result, a.scheme().attrs[srci[k]].second);
    }
    std::vector<Tuple> tuples;
    for (const auto& [key, accs] : groups) {
        Tuple row = key;
        for (std::size_t k = 0; k < adds.size(); ++k) {
            if (adds[k].agg == Aggregate::Count) {
                row.push_back(ScalarValue::of_int(accs[k].count));
            } else if (!accs[k].any_defined) {
                row.push_back(ScalarValue::undefined());
            } else if (a.scheme().attrs[srci[k]].second.kind == TypeKind::Float) {
                row.push_back(ScalarValue::of_float(accs[k].fsum));
            } else {
                row.push_back(ScalarValue::of_int(accs[k].isum));
            }
        }
        tuples.push_back(std::move(row));
    }
    return RelationValue(std::move(s), std::move(tuples));
}

RelationValue extend(const RelationValue& a, AttrName name, ScalarType type,
                     const std::function<ScalarValue(const Tuple&)>& fn) {
    Scheme s = bare(a.scheme());
    s.add(std::move(name), type);
    std::vector<Tuple> tuples;
    tuples.reserve(a.size());
    for (const auto& t : a.tuples()) {
        Tuple row = t;
        ScalarValue v = fn(t);
        if (!v.fits(type))
            fail(ErrorCode::TypeMismatch, "computed value does not fit extension column");
        row.push_back(std::move(v));
        tuples.push_back(std::move(row));
    }
    return RelationValue(std::move(s), std::move(tuples));
}

RelationValue map_rows(const RelationValue& a,
                       const std::vector<std::pair<AttrName,
                                                   std::function<ScalarValue(const Tuple&)>>>& sets,
                       const std::function<bool(const Tuple&)>& keep) {
    std::vector<std::pair<std::size_t, const std::function<ScalarValue(const Tuple&)>*>> cols;
    for (const auto& [name, fn] : sets) cols.emplace_back(a.scheme().require(name), &fn);
    std::vector<Tuple> tuples;
    tuples.reserve(a.size());
    for (const auto& t : a.tuples()) {
        if (keep && !keep(t)) {
            tuples.push_back(t);
            continue;
        }
        Tuple row = t;
        for (const auto& [i, fn] : cols) {
            ScalarValue v = (*fn)(t);
            if (!v.fits(a.scheme().attrs[i].second))
                fail(ErrorCode::TypeMismatch, "updated value does not fit column type");
            row[i] = std::move(v);
        }
        tuples.push_back(std::move(row));
    }
    return RelationValue(bare(a.scheme()), std::move(tuples));
}

} // namespace ro::relalg
