#include "doctest.h"

#include <fstream>
#include <sstream>

#include "ro/engine.hpp"
#include "ro/error.hpp"
#include "ro/parser.hpp"

namespace {

using namespace ro;
using engine::Engine;
using relalg::RelationValue;

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(RO_SOURCE_DIR) + "/" + rel);
    REQUIRE_MESSAGE(in.good(), "cannot open " << rel);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

engine::CommandResult run(Engine& e, const std::string& cmd) {
    return e.execute(*lang::parse_command(cmd));
}

RelationValue q(Engine& e, const std::string& text) {
    auto r = run(e, text);
    REQUIRE(r.has_relation);
    return r.relation;
}

std::int64_t scalar_int(const RelationValue& r) {
    REQUIRE(r.size() == 1);
    REQUIRE(r.scheme().attrs.size() == 1);
    return r.tuples()[0][0].as_int();
}

template <typename F> ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::EvaluationError;
}

Engine with_warehouse() {
    Engine e;
    e.execute_script(slurp("scripts/warehouse.ro"));
    return e;
}

} // namespace

TEST_CASE("warehouse script: the same stock query answers 15, then 13") {
    Engine e;
    auto results = e.execute_script(slurp("scripts/warehouse.ro"));
    std::vector<std::int64_t> sums;
    for (const auto& r : results)
        if (r.has_relation && r.relation.scheme().attrs.size() == 1 &&
            r.relation.scheme().attrs[0].first == val_attr())
            sums.push_back(scalar_int(r.relation));
    CHECK(sums == std::vector<std::int64_t>{15, 13});
}

TEST_CASE("warehouse script: stock and sales totals per object") {
    Engine e = with_warehouse();
    CHECK(scalar_int(q(e, "SELECT SUM(ResourceItems.Quantity) FROM"
                         " Warehouse<Address = \"North dock\">;")) == 9);
    CHECK(scalar_int(q(e, "SELECT SUM(ResourceItems.Quantity) FROM"
                         " Warehouse<Address = \"South dock\">;")) == 4);
    CHECK(scalar_int(q(e, "SELECT SUM(SaledItems.Quantity) FROM Brand;")) == 2);
    CHECK(q(e, "Object(Article);").size() == 2);
    CHECK(q(e, "Object(GoodsMotion);").size() == 3);
    CHECK(q(e, "Object(Sales);").size() == 1);
}

TEST_CASE("tuple variables always hold exactly one row") {
    Engine e = with_warehouse();
    CHECK(q(e, "NewItem;").size() == 1);
    run(e, "CREATE Fresh AS ArtQty;");
    RelationValue f = q(e, "Fresh;");
    REQUIRE(f.size() == 1);
    for (const auto& v : f.tuples()[0]) CHECK(v.is_undefined());
}

TEST_CASE("a duplicate global key rolls the whole command back") {
    Engine e = with_warehouse();
    CHECK(code_of([&] { run(e, "NEW Article(\"art1\");"); }) == ErrorCode::KeyViolation);
    CHECK(q(e, "Object(Article);").size() == 2);
    CHECK(code_of([&] { run(e, "NEW Article();"); }) == ErrorCode::CtorArityMismatch);
}

TEST_CASE("global variables veto destroying the objects they reference") {
    Engine e = with_warehouse();
    run(e, "CREATE someSales AS SET OF Sales;");
    run(e, "someSales := Object(Sales);");
    CHECK(code_of([&] { run(e, "DESTROY Object(Sales WHERE No = 3);"); }) ==
          ErrorCode::ReferentialVeto);
    CHECK(q(e, "Object(Sales);").size() == 1);
    run(e, "DELETE FROM someSales;");
    run(e, "DESTROY Object(Sales WHERE No = 3);");
    CHECK(q(e, "Object(Sales);").empty());
}

TEST_CASE("types with live objects cannot be dropped") {
    Engine e = with_warehouse();
    CHECK(code_of([&] { run(e, "DROP CLASS GoodsMotion;"); }) == ErrorCode::TypeInUse);
}

TEST_CASE("shipping run commits when every pending sale is paid") {
    Engine e = with_warehouse();
    e.execute_script(slurp("scripts/dosale_commit.ro"));
    CHECK_FALSE(e.in_transaction());
    RelationValue shipped = q(e, "Object(Sales WHERE DateOfAction = #15.01.2006#);");
    CHECK(shipped.size() == 1);
}

TEST_CASE("shipping run rolls back when one pending sale is unpaid") {
    Engine e = with_warehouse();
    e.execute_script(slurp("scripts/dosale_rollback.ro"));
    CHECK_FALSE(e.in_transaction());
    CHECK(q(e, "Object(Sales);").size() == 2);
    CHECK(q(e, "Object(Sales WHERE DateOfAction IS NOT NULL);").empty());
}

TEST_CASE("assigning to a computed component warns and changes nothing") {
    Engine e = with_warehouse();
    auto r = run(e, "Object(Warehouse WHERE Address = \"North dock\").ResourceItems :="
                    " Object(Warehouse WHERE Address = \"North dock\").ResourceItems;");
    REQUIRE(r.messages.size() == 1);
    CHECK(r.messages[0].find("computed") != std::string::npos);
    CHECK(scalar_int(q(e, "SELECT SUM(ResourceItems.Quantity) FROM Warehouse;")) == 13);
}

TEST_CASE("transactions cannot nest and verbs need an open transaction") {
    Engine e;
    CHECK(code_of([&] { run(e, "COMMIT;"); }) == ErrorCode::UsageError);
    CHECK(code_of([&] { run(e, "ROLLBACK;"); }) == ErrorCode::UsageError);
    run(e, "BEGIN TRANSACTION;");
    CHECK(code_of([&] { run(e, "BEGIN TRANSACTION;"); }) == ErrorCode::UsageError);
    CHECK(e.in_transaction());
    run(e, "ROLLBACK;");
    CHECK_FALSE(e.in_transaction());
}

TEST_CASE("scalar reference variables coerce from retrieved groups") {
    Engine e = with_warehouse();
    run(e, "CREATE oneArt AS Article;");
    run(e, "oneArt := Object(Article WHERE No = \"art1\");");
    RelationValue v = q(e, "oneArt;");
    REQUIRE(v.size() == 1);
    CHECK_FALSE(v.tuples()[0][0].is_undefined());
    // Retrieving nothing clears the variable; reading it back pads a NULL.
    run(e, "oneArt := Object(Article WHERE No = \"no such\");");
    v = q(e, "oneArt;");
    REQUIRE(v.size() == 1);
    CHECK(v.tuples()[0][0].is_undefined());
    CHECK(code_of([&] { run(e, "oneArt := Object(Article);"); }) ==
          ErrorCode::EvaluationError);
}
