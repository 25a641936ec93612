#include "doctest.h"

#include <random>
#include <set>

#include "ro/catalog.hpp"
#include "ro/parser.hpp"
#include "ro/typesys.hpp"

using namespace ro;
using namespace ro::typesys;
using catalog::Catalog;

namespace {

ObjectTypeDef cls(std::string name, std::vector<std::string> parents,
                  std::vector<ComponentSpec> own = {}) {
    ObjectTypeDef d;
    d.name = std::move(name);
    d.parents = std::move(parents);
    d.own = std::move(own);
    return d;
}

ComponentSpec attr(std::string name) {
    ComponentSpec s;
    s.name = std::move(name);
    s.value = ValueType::of_scalar(ScalarType::integer());
    return s;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::UsageError;
}

TypeRegistry sales_registry() {
    TypeRegistry reg;
    reg.create_class(cls("Brand", {}, {attr("Name")}));
    reg.create_class(cls("GoodsMotion", {}, {attr("No"), attr("DateOfAction"),
                                             attr("FromWarehouse"), attr("ToWarehouse"),
                                             attr("MovedItems")}));
    reg.create_class(cls("Sales", {"GoodsMotion"}, {attr("IsPayed")}));
    for (const char* c : {"No", "DateOfAction", "FromWarehouse", "ToWarehouse", "MovedItems"})
        reg.realize("GoodsMotion", c, {ComponentImpl::Kind::Stored, nullptr, {}});
    reg.realize("Sales", "IsPayed", {ComponentImpl::Kind::Stored, nullptr, {}});
    reg.realize("Brand", "Name", {ComponentImpl::Kind::Stored, nullptr, {}});
    return reg;
}

std::set<std::string> contents(const relalg::RelationValue& r) {
    std::set<std::string> out;
    for (const auto& t : r.tuples()) {
        std::string row;
        for (const auto& v : t) {
            std::string d = v.display();
            if (d.size() >= 2 && d.front() == '"' && d.back() == '"')
                d = d.substr(1, d.size() - 2);
            row += d + "|";
        }
        out.insert(row);
    }
    return out;
}

} // namespace

TEST_CASE("oid table: monotone, never reused, restore keeps the high-water mark") {
    catalog::OidTable t;
    auto a = t.allocate("X");
    auto b = t.allocate("Y");
    CHECK(b.value > a.value);
    CHECK(t.type_of(a) == "X");
    t.remove(a);
    CHECK(!t.contains(a));
    auto c = t.allocate("X");
    CHECK(c.value > b.value);
    CHECK(code_of([&] { t.type_of(a); }) == ErrorCode::UnknownOid);
    CHECK(code_of([&] { t.remove(a); }) == ErrorCode::UnknownOid);

    catalog::OidTable restored;
    for (const auto& [v, ty] : t.rows()) restored.restore_row(Oid{v}, ty);
    restored.set_next_ordinal(t.next_ordinal());
    auto d = restored.allocate("Z");
    CHECK(d.value == c.value + 1);
    CHECK(restored.type_of(b) == "Y");
}

TEST_CASE("new_oid requires an existing, fully realized type") {
    TypeRegistry reg = sales_registry();
    reg.create_class(cls("Half", {}, {attr("V")}));
    Catalog cat(reg);
    CHECK(code_of([&] { cat.new_oid("Nope"); }) == ErrorCode::UnknownType);
    CHECK(code_of([&] { cat.new_oid("Half"); }) == ErrorCode::UnrealizedComponent);
    auto o1 = cat.new_oid("Sales");
    auto o2 = cat.new_oid("Sales");
    CHECK(o2.value > o1.value);
    CHECK(cat.oids().type_of(o1) == "Sales");
}

TEST_CASE("is_of is exact, is_a follows inheritance") {
    TypeRegistry reg = sales_registry();
    Catalog cat(reg);
    auto s = cat.new_oid("Sales");
    auto g = cat.new_oid("GoodsMotion");

    CHECK(cat.is_of(s, "Sales"));
    CHECK(!cat.is_of(s, "GoodsMotion"));
    CHECK(!cat.is_of(s, object_root()));
    CHECK(!cat.is_of(g, "Sales"));

    CHECK(cat.is_a(s, "Sales"));
    CHECK(cat.is_a(s, "GoodsMotion"));
    CHECK(cat.is_a(s, object_root()));
    CHECK(!cat.is_a(g, "Sales"));
    CHECK(!cat.is_a(s, "Brand"));

    CHECK(code_of([&] { cat.is_of(Oid{999}, "Sales"); }) == ErrorCode::UnknownOid);
    CHECK(code_of([&] { cat.is_a(s, "Nope"); }) == ErrorCode::UnknownType);
}

TEST_CASE("derived relations over the example hierarchy") {
    TypeRegistry reg = sales_registry();
    reg.define_tuple({"AQ", {{"Art", ScalarType::string()}}});
    Catalog cat(reg);

    auto ist = contents(cat.is_t());
    CHECK(ist.count("Sales|Sales|"));
    CHECK(ist.count("Sales|GoodsMotion|"));
    CHECK(ist.count("Sales|Object|"));
    CHECK(ist.count("Brand|Brand|"));
    CHECK(ist.count("Brand|Object|"));
    CHECK(ist.count("Object|Object|"));
    CHECK(!ist.count("GoodsMotion|Sales|"));

    auto ot = contents(cat.obj_types());
    CHECK(ot == std::set<std::string>{"Object|", "Brand|", "GoodsMotion|", "Sales|"});

    auto vt = contents(cat.val_types());
    CHECK(vt.count("INTEGER|"));
    CHECK(vt.count("AQ|"));

    // One SPEC row per own component.
    int gm = 0;
    auto spec = cat.spec();
    for (const auto& t : spec.tuples())
        if (t[1].display() == "\"GoodsMotion\"") ++gm;
    CHECK(gm == 5);

    // REAL carries the stored flag and the realization text.
    reg.realize("Sales", "MovedItems",
                {ComponentImpl::Kind::Computed, lang::parse_expr("IsPayed"), {}});
    bool found = false;
    auto real = cat.real();
    for (const auto& t : real.tuples()) {
        if (t[0].display() == "\"MovedItems\"" && t[1].display() == "\"Sales\"") {
            found = true;
            CHECK(t[2] == ScalarValue::of_bool(false));
            CHECK(t[3].display() == "\"IsPayed\"");
        }
    }
    CHECK(found);

    auto a = cat.new_oid("Brand");
    auto rel = cat.oids_relation();
    REQUIRE(rel.size() == 1);
    CHECK(rel.tuples()[0][0] == ScalarValue::of_oid(a));
    CHECK(rel.tuples()[0][1].display() == "\"Brand\"");
}

TEST_CASE("IS_T equals a reachability oracle on random hierarchies") {
    std::mt19937 rng(20260823);
    for (int iter = 0; iter < 200; ++iter) {
        TypeRegistry reg;
        int n = 2 + static_cast<int>(rng() % 10);
        std::vector<std::string> names;
        // parent_sets[i]: indices of direct parents (earlier types only).
        std::vector<std::set<int>> parent_sets(n);
        for (int i = 0; i < n; ++i) {
            names.push_back("T" + std::to_string(i));
            std::vector<std::string> parents;
            if (i > 0) {
                int k = static_cast<int>(rng() % std::min(i, 3));
                while (static_cast<int>(parent_sets[i].size()) < k) {
                    int p = static_cast<int>(rng() % i);
                    if (parent_sets[i].insert(p).second) parents.push_back(names[p]);
                }
            }
            reg.create_class(cls(names[i], parents));
        }
        // Independent oracle: straightforward transitive closure.
        std::vector<std::set<int>> reach(n);
        for (int i = 0; i < n; ++i) {
            reach[i].insert(i);
            for (int p : parent_sets[i])
                reach[i].insert(reach[p].begin(), reach[p].end());
        }
        Catalog cat(reg);
        auto ist = contents(cat.is_t());
        std::set<std::string> expect{"Object|Object|"};
        for (int i = 0; i < n; ++i) {
            expect.insert(names[i] + "|Object|");
            for (int j : reach[i]) expect.insert(names[i] + "|" + names[j] + "|");
        }
        REQUIRE(ist == expect);

        // is_a agrees with the oracle for objects of a random creation type.
        int who = static_cast<int>(rng() % n);
        auto o = cat.new_oid(names[who]);
        for (int j = 0; j < n; ++j)
            REQUIRE(cat.is_a(o, names[j]) == (reach[who].count(j) != 0));
        REQUIRE(cat.is_a(o, object_root()));
        for (int j = 0; j < n; ++j)
            REQUIRE(cat.is_of(o, names[j]) == (j == who));
    }
}
