#include "doctest.h"

#include <random>

#include "ro/relalg.hpp"
#include "testutil.hpp"

using namespace ro;
using namespace ro::relalg;
using namespace ro::testutil;

namespace {

Scheme xint() { return scheme_of({{"x", ScalarType::integer()}}); }

RelationValue ints(std::vector<std::int64_t> xs) {
    std::vector<Tuple> rows;
    for (auto x : xs) rows.push_back({I(x)});
    return rel(xint(), std::move(rows));
}

} // namespace

TEST_CASE("union identity, set semantics, scheme mismatch") {
    auto r = ints({1, 2});
    CHECK(set_union(r, rel(xint(), {})) == r);
    CHECK(set_union(ints({1, 2}), ints({2, 3})) == ints({1, 2, 3}));
    auto other = rel(scheme_of({{"y", ScalarType::integer()}}), {});
    CHECK_THROWS_AS(set_union(r, other), Error);
}

TEST_CASE("minus basics") {
    auto r = ints({1, 2});
    CHECK(minus(r, r) == ints({}));
    CHECK(minus(r, ints({})) == r);
    CHECK(minus(ints({1, 2}), ints({2})) == ints({1}));
}

TEST_CASE("product basics and cardinality") {
    auto a = ints({1, 2, 3});
    auto b = rel(scheme_of({{"y", ScalarType::integer()}}), {{I(7)}});
    auto p = product(a, b);
    CHECK(p.size() == 3);
    CHECK(p.scheme().attrs.size() == 2);
    CHECK(product(rel(scheme_of({{"z", ScalarType::integer()}}), {}), a).empty());
    CHECK_THROWS_AS(product(a, a), Error); // name collision

    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        auto r1 = random_int_relation(rng, 2, 5);
        Scheme s2;
        s2.add(AttrName{"q0"}, ScalarType::integer());
        auto r2 = random_relation_with_scheme(rng, s2, 5);
        CHECK(product(r1, r2).size() == r1.size() * r2.size());
    }
}

TEST_CASE("join_on drops right join columns and matches product+filter oracle") {
    // join on empty right operand
    auto a = rel(scheme_of({{"k", ScalarType::integer()}, {"v", ScalarType::integer()}}),
                 {{I(1), I(10)}, {I(2), I(20)}});
    auto b = rel(scheme_of({{"k2", ScalarType::integer()}}), {});
    CHECK(join_on(a, b, {{AttrName{"k"}, AttrName{"k2"}}}).empty());

    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        auto l = random_relation_with_scheme(
            rng, scheme_of({{"k", ScalarType::integer()}, {"v", ScalarType::integer()}}), 6);
        auto r = random_relation_with_scheme(
            rng, scheme_of({{"k2", ScalarType::integer()}, {"w", ScalarType::integer()}}), 6);
        auto joined = join_on(l, r, {{AttrName{"k"}, AttrName{"k2"}}});

        // Oracle: product + filter + drop right join column.
        auto p = product(l, r);
        auto sel = select_where(*&p, *Predicate::make_cmp(CmpOp::Eq, Term::make_attr(AttrName{"k"}),
                                                          Term::make_attr(AttrName{"k2"})));
        ProjectSpec drop;
        drop.drop = {AttrName{"k2"}};
        CHECK(joined == project(sel, drop));
    }
}

TEST_CASE("select_where: trivial, undefined semantics") {
    auto r = ints({1, 2, 3});
    CHECK(select_where(r, *Predicate::make_bool(true)) == r);

    auto with_null = rel(xint(), {{I(1)}, {U()}});
    auto eq1 = select_where(with_null, *Predicate::make_cmp(CmpOp::Eq, Term::make_attr(AttrName{"x"}),
                                                            Term::make_lit(I(1))));
    CHECK(eq1 == ints({1}));
    auto isnull = select_where(with_null, *Predicate::make_is_null(Term::make_attr(AttrName{"x"})));
    CHECK(isnull.size() == 1);
    CHECK(isnull.tuples()[0][0].is_undefined());

    // Three-case truth table: x = 1 FALSE on Undefined, NOT (x = 1) TRUE on Undefined
    // under two-valued logic, IS NULL TRUE.
    auto null_only = rel(xint(), {{U()}});
    auto eq = Predicate::make_cmp(CmpOp::Eq, Term::make_attr(AttrName{"x"}), Term::make_lit(I(1)));
    CHECK(select_where(null_only, *eq).empty());
    CHECK(select_where(null_only, *Predicate::make_not(eq)).size() == 1);

    CHECK_THROWS_AS(select_where(r, *Predicate::make_cmp(CmpOp::Eq, Term::make_attr(AttrName{"z"}),
                                                         Term::make_lit(I(1)))),
                    Error);
    CHECK_THROWS_AS(select_where(r, *Predicate::make_cmp(CmpOp::Eq, Term::make_attr(AttrName{"x"}),
                                                         Term::make_lit(S("a")))),
                    Error);
}

TEST_CASE("project keep/drop/rename and forced dedup") {
    auto r = rel(scheme_of({{"a", ScalarType::integer()}, {"b", ScalarType::integer()}}),
                 {{I(1), I(1)}, {I(2), I(1)}, {I(3), I(1)}});
    ProjectSpec keep_all;
    keep_all.keep = {AttrName{"a"}, AttrName{"b"}};
    CHECK(project(r, keep_all) == r);

    ProjectSpec onto_const;
    onto_const.keep = {AttrName{"b"}};
    CHECK(project(r, onto_const).size() == 1);

    ProjectSpec drop_a;
    drop_a.drop = {AttrName{"a"}};
    CHECK(project(r, drop_a).scheme().attrs.size() == 1);

    ProjectSpec bad;
    CHECK_THROWS_AS(project(r, bad), Error);

    ProjectSpec renamed;
    renamed.keep = {AttrName{"a"}};
    renamed.renames = {{AttrName{"a"}, AttrName{"z"}}};
    CHECK(project(r, renamed).scheme().attrs[0].first == AttrName{"z"});
}

TEST_CASE("summarize: arithmetic, undefined handling, empty input") {
    auto s = scheme_of({{"Art", ScalarType::string()}, {"Quantity", ScalarType::integer()}});
    CHECK(summarize(rel(s, {}), {AttrName{"Art"}},
                    {{Aggregate::Sum, AttrName{"Quantity"}, AttrName{"s"}}})
              .empty());

    auto r = rel(s, {{S("a1"), I(2)}, {S("a1"), I(3)}, {S("a2"), I(5)}});
    auto g = summarize(r, {AttrName{"Art"}}, {{Aggregate::Sum, AttrName{"Quantity"}, AttrName{"Quantity"}}});
    CHECK(g == rel(scheme_of({{"Art", ScalarType::string()}, {"Quantity", ScalarType::integer()}}),
                   {{S("a1"), I(5)}, {S("a2"), I(5)}}));

    // SUM skips Undefined; all-Undefined group yields Undefined; COUNT counts defined.
    auto withnull = rel(s, {{S("a"), I(1)}, {S("a"), U()}, {S("b"), U()}});
    auto agg = summarize(withnull, {AttrName{"Art"}},
                         {{Aggregate::Sum, AttrName{"Quantity"}, AttrName{"s"}},
                          {Aggregate::Count, AttrName{"Quantity"}, AttrName{"c"}}});
    CHECK(agg.size() == 2);
    for (const auto& t : agg.tuples()) {
        if (t[0] == S("a")) {
            CHECK(t[1] == I(1));
            CHECK(t[2] == I(1));
        } else {
            CHECK(t[1].is_undefined());
            CHECK(t[2] == I(0));
        }
    }

    CHECK_THROWS_AS(summarize(r, {AttrName{"Art"}},
                              {{Aggregate::Sum, AttrName{"Art"}, AttrName{"s"}}}),
                    Error);
}

TEST_CASE("algebraic properties on random relations") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i) {
        Scheme s = scheme_of({{"x0", ScalarType::integer()}, {"x1", ScalarType::integer()}});
        auto a = random_relation_with_scheme(rng, s, 6);
        auto b = random_relation_with_scheme(rng, s, 6);
        auto c = random_relation_with_scheme(rng, s, 6);

        CHECK(set_union(a, b) == set_union(b, a));
        CHECK(set_union(set_union(a, b), c) == set_union(a, set_union(b, c)));
        CHECK(set_union(a, a) == a.with_keys({}));
        CHECK(minus(a, rel(s, {})) == a.with_keys({}));

        // select distributes over union
        auto pred = Predicate::make_cmp(CmpOp::Lt, Term::make_attr(AttrName{"x0"}),
                                        Term::make_lit(I(3)));
        CHECK(select_where(set_union(a, b), *pred) ==
              set_union(select_where(a, *pred), select_where(b, *pred)));

        // project-after-project equals single project on the intersection
        ProjectSpec p01;
        p01.keep = {AttrName{"x0"}, AttrName{"x1"}};
        ProjectSpec p0;
        p0.keep = {AttrName{"x0"}};
        CHECK(project(project(a, p01), p0) == project(a, p0));
    }
}

TEST_CASE("relation invariants: duplicate-free, type-checked, key checks") {
    auto s = xint();
    auto r = rel(s, {{I(1)}, {I(1)}, {I(2)}});
    CHECK(r.size() == 2);
    CHECK_THROWS_AS(rel(xint(), {{S("oops")}}), Error);

    Scheme keyed = xint();
    keyed.keys = {{KeyKind::Global, {AttrName{"x"}}, std::nullopt}};
    RelationValue ok(keyed, {{I(1)}, {I(2)}});
    CHECK(!ok.key_violation().has_value());
    // Local/Global keys reject duplicates and Undefined in key fields.
    Scheme local_keyed = xint();
    local_keyed.attrs.push_back({AttrName{"y"}, ScalarType::integer()});
    local_keyed.keys = {{KeyKind::Local, {AttrName{"x"}}, std::nullopt}};
    RelationValue dup(local_keyed, {{I(1), I(1)}, {I(1), I(2)}});
    CHECK(dup.key_violation().has_value());
    RelationValue nullkey(keyed, {{U()}});
    CHECK(nullkey.key_violation().has_value());
}

TEST_CASE("arithmetic terms: undefined propagates, div by zero errors") {
    auto s = xint();
    Tuple row{I(6)};
    auto t = Term::make_arith(ArithOp::Div, Term::make_attr(AttrName{"x"}), Term::make_lit(I(2)));
    CHECK(eval_term(*t, s, row) == I(3));
    auto u = Term::make_arith(ArithOp::Add, Term::make_attr(AttrName{"x"}), Term::make_lit(U()));
    CHECK(eval_term(*u, s, row).is_undefined());
    auto z = Term::make_arith(ArithOp::Div, Term::make_attr(AttrName{"x"}), Term::make_lit(I(0)));
    CHECK_THROWS_AS(eval_term(*z, s, row), Error);
}

TEST_CASE("closure: op results feed any other op") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Scheme s = scheme_of({{"x0", ScalarType::integer()}});
        auto a = random_relation_with_scheme(rng, s, 5);
        auto b = random_relation_with_scheme(rng, s, 5);
        auto u = set_union(a, b);
        auto m = minus(u, a);
        auto sel = select_where(m, *Predicate::make_bool(true));
        ProjectSpec keep;
        keep.keep = {AttrName{"x0"}};
        auto pr = project(sel, keep);
        auto sum = summarize(pr, {}, {{Aggregate::Count, AttrName{"x0"}, AttrName{"n"}}});
        CHECK(sum.scheme().attrs.size() == 1);
    }
}
