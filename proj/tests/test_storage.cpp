#include "doctest.h"

#include <functional>

#include "ro/storage.hpp"

using namespace ro;
using namespace ro::typesys;
using storage::Database;

namespace {

ObjectTypeDef cls(std::string name, std::vector<std::string> parents,
                  std::vector<ComponentSpec> own) {
    ObjectTypeDef d;
    d.name = std::move(name);
    d.parents = std::move(parents);
    d.own = std::move(own);
    return d;
}

ComponentSpec attr(std::string name, ValueType v, std::vector<relalg::KeySpec> keys = {}) {
    ComponentSpec s;
    s.name = std::move(name);
    s.value = std::move(v);
    s.keys = std::move(keys);
    return s;
}

relalg::KeySpec gkey(std::vector<std::string> fields) {
    relalg::KeySpec k;
    k.kind = relalg::KeyKind::Global;
    for (auto& f : fields) k.fields.push_back(AttrName{std::move(f)});
    return k;
}

relalg::KeySpec lkey(std::vector<std::string> fields) {
    auto k = gkey(std::move(fields));
    k.kind = relalg::KeyKind::Local;
    return k;
}

relalg::KeySpec fkey(std::vector<std::string> fields, std::string type,
                     std::vector<std::string> tfields) {
    auto k = gkey(std::move(fields));
    k.kind = relalg::KeyKind::Foreign;
    relalg::ForeignTarget t;
    t.type_name = std::move(type);
    for (auto& f : tfields) t.fields.push_back(AttrName{std::move(f)});
    k.target = std::move(t);
    return k;
}

ValueType vint() { return ValueType::of_scalar(ScalarType::integer()); }
ValueType vstr() { return ValueType::of_scalar(ScalarType::string()); }
ValueType vref(const std::string& t) { return ValueType::of_scalar(ScalarType::ref(t)); }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::UsageError;
}

Database warehouse_db() {
    Database db;
    auto& reg = db.types;
    reg.define_tuple({"ArtQty",
                      {{"Art", ScalarType::ref("Article")}, {"Quantity", ScalarType::integer()}}});
    reg.create_class(cls("Brand", {}, {attr("Name", vstr(), {gkey({"Name"})})}));
    reg.create_class(cls("Article", {},
                         {attr("No", vstr(), {gkey({"No"})}),
                          attr("BrandName", vstr(), {fkey({"BrandName"}, "Brand", {"Name"})})}));
    reg.create_class(cls("Warehouse", {}, {attr("Address", vstr())}));
    reg.create_class(cls("GoodsMotion", {},
                         {attr("No", vint(), {gkey({"No"})}),
                          attr("FromWarehouse", vref("Warehouse")),
                          attr("ToWarehouse", vref("Warehouse")),
                          attr("MovedItems", ValueType::set_of(ValueType::of_tuple("ArtQty")),
                               {lkey({"Art"})})}));
    reg.create_class(cls("Sales", {"GoodsMotion"},
                         {attr("IsPayed", ValueType::of_scalar(ScalarType::boolean()))}));
    for (const auto& t : reg.class_order())
        for (const auto& c : reg.require_class(t).own)
            reg.realize(t, c.name, {ComponentImpl::Kind::Stored, nullptr, {}});
    db.sync_base_vars();
    return db;
}

relalg::RelationValue rows_for(const relalg::Scheme& s, std::vector<relalg::Tuple> rows) {
    return relalg::RelationValue(s, std::move(rows));
}

ScalarValue S(const char* s) { return ScalarValue::of_string(s); }
ScalarValue I(std::int64_t v) { return ScalarValue::of_int(v); }
ScalarValue R(Oid o) { return ScalarValue::of_oid(o); }
ScalarValue U() { return ScalarValue(); }

void set_scalar(Database& db, const std::string& type, const std::string& comp, Oid o,
                ScalarValue val) {
    relalg::Scheme s;
    s.add(oid_attr(), ScalarType::doid());
    auto ec = db.types.require_component(type, comp);
    s.add(AttrName{comp}, ec.spec.value.scalar);
    storage::apply_assignment(db, type, comp, {o}, rows_for(s, {{R(o), std::move(val)}}));
}

} // namespace

TEST_CASE("base variable layout follows the declarations") {
    auto db = warehouse_db();
    const auto& own = db.base_var("GoodsMotion", "");
    CHECK(own.scheme().attrs.size() == 4); // OID, No, FromWarehouse, ToWarehouse
    CHECK(own.scheme().has(oid_attr()));
    CHECK(own.scheme().type_of(AttrName{"No"}) == ScalarType::integer());
    CHECK(own.scheme().type_of(AttrName{"FromWarehouse"}) == ScalarType::ref("Warehouse"));
    CHECK(!own.scheme().has(AttrName{"MovedItems"}));

    const auto& moved = db.base_var("GoodsMotion", "MovedItems");
    CHECK(moved.scheme().attrs.size() == 3);
    CHECK(moved.scheme().type_of(AttrName{"Art"}) == ScalarType::ref("Article"));
    CHECK(moved.scheme().type_of(AttrName{"Quantity"}) == ScalarType::integer());

    // Inherited scalars live in the declaring type's variable.
    const auto& sales_own = db.base_var("Sales", "");
    CHECK(sales_own.scheme().attrs.size() == 2); // OID, IsPayed
    CHECK(!sales_own.scheme().has(AttrName{"No"}));

    CHECK(!db.has_base_var("Sales", "MovedItems"));
    CHECK(code_of([&] { db.base_var("Sales", "MovedItems"); }) == ErrorCode::UnknownName);
}

TEST_CASE("object creation fills the chain with Undefined rows") {
    auto db = warehouse_db();
    auto s = storage::create_object(db, "Sales");
    // One row in each own-tuple variable along the chain.
    const auto& gm = db.base_var("GoodsMotion", "");
    REQUIRE(gm.size() == 1);
    CHECK(gm.tuples()[0][gm.scheme().require(oid_attr())] == R(s));
    CHECK(gm.tuples()[0][gm.scheme().require(AttrName{"No"})].is_undefined());
    const auto& so = db.base_var("Sales", "");
    REQUIRE(so.size() == 1);
    CHECK(so.tuples()[0][1].is_undefined());
    CHECK(db.base_var("GoodsMotion", "MovedItems").size() == 0);

    auto g = storage::create_object(db, "GoodsMotion");
    CHECK(g.value > s.value);
    CHECK(db.base_var("GoodsMotion", "").size() == 2);
    CHECK(db.base_var("Sales", "").size() == 1);

    // A type with an unrealized component refuses creation.
    db.types.create_class(cls("Half", {}, {attr("V", vint())}));
    db.sync_base_vars();
    CHECK(code_of([&] { storage::create_object(db, "Half"); }) ==
          ErrorCode::UnrealizedComponent);
}

TEST_CASE("scalar assignment updates the own-tuple column for the group only") {
    auto db = warehouse_db();
    auto a = storage::create_object(db, "Article");
    auto b = storage::create_object(db, "Article");
    set_scalar(db, "Article", "No", a, S("art1"));
    set_scalar(db, "Article", "No", b, S("art2"));

    const auto& own = db.base_var("Article", "");
    std::size_t no = own.scheme().require(AttrName{"No"});
    std::size_t oc = own.scheme().require(oid_attr());
    for (const auto& t : own.tuples())
        CHECK(t[no] == (t[oc] == R(a) ? S("art1") : S("art2")));

    // Scheme mismatch and out-of-group rows are rejected.
    relalg::Scheme s;
    s.add(oid_attr(), ScalarType::doid());
    s.add(AttrName{"No"}, ScalarType::string());
    CHECK(code_of([&] {
              storage::apply_assignment(db, "Article", "No", {a},
                                        rows_for(s, {{R(b), S("x")}}));
          }) == ErrorCode::EvaluationError);
    relalg::Scheme bad;
    bad.add(oid_attr(), ScalarType::doid());
    bad.add(AttrName{"Nope"}, ScalarType::string());
    CHECK(code_of([&] {
              storage::apply_assignment(db, "Article", "No", {a},
                                        rows_for(bad, {{R(a), S("x")}}));
          }) == ErrorCode::SchemeMismatch);
    // Two different values for one object are contradictory.
    CHECK(code_of([&] {
              storage::apply_assignment(db, "Article", "No", {a},
                                        rows_for(s, {{R(a), S("x")}, {R(a), S("y")}}));
          }) == ErrorCode::EvaluationError);
    // A group OID absent from the rows resets to Undefined.
    storage::apply_assignment(db, "Article", "No", {a}, rows_for(s, {}));
    for (const auto& t : db.base_var("Article", "").tuples())
        if (t[oc] == R(a)) CHECK(t[no].is_undefined());
}

TEST_CASE("set assignment replaces rows of the group, leaves others alone") {
    auto db = warehouse_db();
    auto m1 = storage::create_object(db, "GoodsMotion");
    auto m2 = storage::create_object(db, "GoodsMotion");
    auto a1 = storage::create_object(db, "Article");

    relalg::Scheme s;
    s.add(oid_attr(), ScalarType::doid());
    s.add(AttrName{"Art"}, ScalarType::ref("Article"));
    s.add(AttrName{"Quantity"}, ScalarType::integer());
    storage::apply_assignment(db, "GoodsMotion", "MovedItems", {m1},
                              rows_for(s, {{R(m1), R(a1), I(10)}}));
    storage::apply_assignment(db, "GoodsMotion", "MovedItems", {m2},
                              rows_for(s, {{R(m2), R(a1), I(4)}, {R(m2), R(a1), I(5)}}));
    CHECK(db.base_var("GoodsMotion", "MovedItems").size() == 3);

    // Reassigning m2 replaces only m2's rows.
    storage::apply_assignment(db, "GoodsMotion", "MovedItems", {m2},
                              rows_for(s, {{R(m2), R(a1), I(7)}}));
    const auto& v = db.base_var("GoodsMotion", "MovedItems");
    REQUIRE(v.size() == 2);
    int m1_rows = 0, m2_rows = 0;
    for (const auto& t : v.tuples()) {
        if (t[0] == R(m1)) {
            ++m1_rows;
            CHECK(t[2] == I(10));
        }
        if (t[0] == R(m2)) {
            ++m2_rows;
            CHECK(t[2] == I(7));
        }
    }
    CHECK(m1_rows == 1);
    CHECK(m2_rows == 1);

    // Assigning the identity is a no-op.
    auto before = v.tuples();
    relalg::RelationValue same(v.scheme(), before);
    storage::apply_assignment(db, "GoodsMotion", "MovedItems", {m1, m2}, same);
    CHECK(db.base_var("GoodsMotion", "MovedItems").tuples() == before);
}

TEST_CASE("global keys span subtype objects; undefined keys are violations") {
    auto db = warehouse_db();
    auto g = storage::create_object(db, "GoodsMotion");
    auto s = storage::create_object(db, "Sales");
    // Fresh objects have Undefined global keys: flagged until they are set.
    CHECK(storage::check_keys(db).size() == 2);
    set_scalar(db, "GoodsMotion", "No", g, I(7));
    set_scalar(db, "GoodsMotion", "No", s, I(8));
    CHECK(storage::check_keys(db).empty());
    // Same No for a plain motion and a sale: one shared component, one key.
    set_scalar(db, "GoodsMotion", "No", s, I(7));
    auto v = storage::check_keys(db);
    REQUIRE(v.size() == 1);
    CHECK(v[0].where == "GoodsMotion.No");
}

TEST_CASE("local keys are scoped per object") {
    auto db = warehouse_db();
    auto m1 = storage::create_object(db, "GoodsMotion");
    auto m2 = storage::create_object(db, "GoodsMotion");
    set_scalar(db, "GoodsMotion", "No", m1, I(1));
    set_scalar(db, "GoodsMotion", "No", m2, I(2));
    auto a1 = storage::create_object(db, "Article");
    set_scalar(db, "Article", "No", a1, S("art1"));

    relalg::Scheme s;
    s.add(oid_attr(), ScalarType::doid());
    s.add(AttrName{"Art"}, ScalarType::ref("Article"));
    s.add(AttrName{"Quantity"}, ScalarType::integer());
    // The same article in two different objects is fine.
    storage::apply_assignment(db, "GoodsMotion", "MovedItems", {m1},
                              rows_for(s, {{R(m1), R(a1), I(10)}}));
    storage::apply_assignment(db, "GoodsMotion", "MovedItems", {m2},
                              rows_for(s, {{R(m2), R(a1), I(4)}}));
    CHECK(storage::check_keys(db).empty());
    // The same article twice in one object violates LOCALKEY Art.
    storage::apply_assignment(db, "GoodsMotion", "MovedItems", {m1},
                              rows_for(s, {{R(m1), R(a1), I(10)}, {R(m1), R(a1), I(3)}}));
    auto v = storage::check_keys(db);
    REQUIRE(v.size() == 1);
    CHECK(v[0].where == "GoodsMotion.MovedItems");
}

TEST_CASE("foreign keys check against the target's global key values") {
    auto db = warehouse_db();
    auto b = storage::create_object(db, "Brand");
    set_scalar(db, "Brand", "Name", b, S("b1"));
    auto a = storage::create_object(db, "Article");
    set_scalar(db, "Article", "No", a, S("art1"));
    // Undefined foreign value: no check.
    CHECK(storage::check_keys(db).empty());
    set_scalar(db, "Article", "BrandName", a, S("nope"));
    auto v = storage::check_keys(db);
    REQUIRE(v.size() == 1);
    CHECK(v[0].where == "Article.BrandName");
    set_scalar(db, "Article", "BrandName", a, S("b1"));
    CHECK(storage::check_keys(db).empty());
}

TEST_CASE("reference integrity: live object of the declared type or Undefined") {
    auto db = warehouse_db();
    auto m = storage::create_object(db, "GoodsMotion");
    set_scalar(db, "GoodsMotion", "No", m, I(1));
    auto w = storage::create_object(db, "Warehouse");
    auto b = storage::create_object(db, "Brand");
    set_scalar(db, "Brand", "Name", b, S("b1"));

    CHECK(storage::check_ref_integrity(db).empty()); // FromWarehouse Undefined: legal
    set_scalar(db, "GoodsMotion", "FromWarehouse", m, R(w));
    CHECK(storage::check_ref_integrity(db).empty());
    // A Brand where a Warehouse is expected.
    set_scalar(db, "GoodsMotion", "ToWarehouse", m, R(b));
    auto v = storage::check_ref_integrity(db);
    REQUIRE(v.size() == 1);
    CHECK(v[0].where == "GoodsMotion (own tuple)");
    // A reference to a never-created object.
    set_scalar(db, "GoodsMotion", "ToWarehouse", m, R(Oid{9999}));
    CHECK(storage::check_ref_integrity(db).size() == 1);
    set_scalar(db, "GoodsMotion", "ToWarehouse", m, U());
    CHECK(storage::check_ref_integrity(db).empty());
}

TEST_CASE("destroy: cascade, veto, group-internal references") {
    auto db = warehouse_db();
    auto w = storage::create_object(db, "Warehouse");
    auto m = storage::create_object(db, "GoodsMotion");
    set_scalar(db, "GoodsMotion", "No", m, I(1));
    set_scalar(db, "GoodsMotion", "ToWarehouse", m, R(w));

    // The warehouse is referenced by the motion: veto.
    CHECK(code_of([&] { storage::destroy_objects(db, {w}); }) == ErrorCode::ReferentialVeto);
    CHECK(db.cat.oids().contains(w));
    // Destroying referencer and referencee together is allowed.
    storage::destroy_objects(db, {w, m});
    CHECK(!db.cat.oids().contains(w));
    CHECK(!db.cat.oids().contains(m));
    CHECK(db.base_var("GoodsMotion", "").size() == 0);
    CHECK(storage::check_database(db).empty());

    // A global variable holding a reference also vetoes.
    auto w2 = storage::create_object(db, "Warehouse");
    storage::GlobalVar gv;
    gv.type = ValueType::set_of(ValueType::of_scalar(ScalarType::ref("Warehouse")));
    gv.value = relalg::RelationValue(storage::value_scheme(db.types, gv.type), {{R(w2)}});
    db.globals.emplace("someWare", std::move(gv));
    CHECK(code_of([&] { storage::destroy_objects(db, {w2}); }) == ErrorCode::ReferentialVeto);
    db.globals.clear();
    storage::destroy_objects(db, {w2});

    CHECK(code_of([&] { storage::destroy_objects(db, {w2}); }) == ErrorCode::UnknownOid);
}

TEST_CASE("destroying a set-component referencer cascades its rows") {
    auto db = warehouse_db();
    auto a = storage::create_object(db, "Article");
    set_scalar(db, "Article", "No", a, S("art1"));
    auto m = storage::create_object(db, "GoodsMotion");
    set_scalar(db, "GoodsMotion", "No", m, I(1));
    relalg::Scheme s;
    s.add(oid_attr(), ScalarType::doid());
    s.add(AttrName{"Art"}, ScalarType::ref("Article"));
    s.add(AttrName{"Quantity"}, ScalarType::integer());
    storage::apply_assignment(db, "GoodsMotion", "MovedItems", {m},
                              rows_for(s, {{R(m), R(a), I(5)}}));

    // The article is referenced from MovedItems: veto.
    CHECK(code_of([&] { storage::destroy_objects(db, {a}); }) == ErrorCode::ReferentialVeto);
    // Destroying the motion removes its set rows, then the article is free.
    storage::destroy_objects(db, {m});
    CHECK(db.base_var("GoodsMotion", "MovedItems").size() == 0);
    storage::destroy_objects(db, {a});
    CHECK(storage::check_database(db).empty());
}

TEST_CASE("schema changes migrate existing rows") {
    auto db = warehouse_db();
    auto a = storage::create_object(db, "Article");
    set_scalar(db, "Article", "No", a, S("art1"));

    db.types.alter_add("Article", attr("Weight", vint()));
    db.types.realize("Article", "Weight", {ComponentImpl::Kind::Stored, nullptr, {}});
    db.sync_base_vars();
    const auto& own = db.base_var("Article", "");
    CHECK(own.scheme().has(AttrName{"Weight"}));
    REQUIRE(own.size() == 1);
    CHECK(own.tuples()[0][own.scheme().require(AttrName{"Weight"})].is_undefined());
    CHECK(own.tuples()[0][own.scheme().require(AttrName{"No"})] == S("art1"));

    db.types.alter_drop("Article", "Weight");
    db.sync_base_vars();
    CHECK(!db.base_var("Article", "").scheme().has(AttrName{"Weight"}));
    CHECK(db.base_var("Article", "").tuples()[0][db.base_var("Article", "").scheme().require(
              AttrName{"No"})] == S("art1"));
}

TEST_CASE("database copies are independent snapshots") {
    auto db = warehouse_db();
    auto a = storage::create_object(db, "Article");
    set_scalar(db, "Article", "No", a, S("art1"));

    Database snap = db;
    // Mutate the original: snapshot unaffected.
    set_scalar(db, "Article", "No", a, S("changed"));
    auto b = storage::create_object(db, "Article");
    set_scalar(db, "Article", "No", b, S("art2"));
    CHECK(snap.base_var("Article", "").size() == 1);
    CHECK(snap.base_var("Article", "").tuples()[0][snap.base_var("Article", "").scheme().require(
              AttrName{"No"})] == S("art1"));
    CHECK(!snap.cat.oids().contains(b));

    // Rollback by assignment restores the old state.
    db = snap;
    CHECK(db.base_var("Article", "").size() == 1);
    CHECK(!db.cat.oids().contains(b));
    // The catalog reads the copied registry, not the donor's.
    db.types.create_class(cls("Extra", {}, {}));
    db.sync_base_vars();
    auto e = storage::create_object(db, "Extra");
    CHECK(db.cat.is_a(e, "Extra"));
    CHECK(!snap.types.find_class("Extra"));
    // OIDs continue past the snapshot's high-water mark after restore.
    CHECK(e.value > a.value);
}

TEST_CASE("check_database flags orphan rows") {
    auto db = warehouse_db();
    auto a = storage::create_object(db, "Article");
    set_scalar(db, "Article", "No", a, S("art1"));
    CHECK(storage::check_database(db).empty());
    // Forge a row whose OID is not in the identifier table.
    auto& v = db.base_var("Article", "");
    auto rows = v.tuples();
    rows.push_back({R(Oid{777}), S("ghost"), U()});
    v = relalg::RelationValue(v.scheme(), std::move(rows));
    auto out = storage::check_database(db);
    REQUIRE(!out.empty());
    bool orphan = false;
    for (const auto& viol : out)
        if (viol.message.find("orphan") != std::string::npos) orphan = true;
    CHECK(orphan);
}
