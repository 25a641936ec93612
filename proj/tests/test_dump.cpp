#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ro/dump.hpp"
#include "ro/engine.hpp"
#include "ro/error.hpp"
#include "ro/parser.hpp"
#include "ro/rcompiler.hpp"

namespace {

using namespace ro;

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(RO_SOURCE_DIR) + "/" + rel);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

engine::Engine with_warehouse() {
    engine::Engine e;
    e.execute_script(slurp("scripts/warehouse.ro"));
    return e;
}

relalg::RelationValue query(storage::Database& db, const std::string& text) {
    return rcompiler::eval_query(db, *lang::parse_expr(text));
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

} // namespace

TEST_CASE("dump, load, dump is byte-identical on the warehouse dataset") {
    engine::Engine e = with_warehouse();
    std::string once = dump::dump_database(e.db());
    storage::Database copy = dump::load_database(once);
    CHECK(dump::dump_database(copy) == once);
}

TEST_CASE("queries agree before the dump and after the load") {
    engine::Engine e = with_warehouse();
    storage::Database copy = dump::load_database(dump::dump_database(e.db()));
    for (const char* q : {
             "SELECT SUM(ResourceItems.Quantity) FROM Warehouse",
             "Warehouse<Address = \"North dock\">.ResourceItems",
             "Object(Sales WHERE IsPayed = TRUE)",
             "Sales.SaleItems",
             "GoodsMotion.MovedItems",
             "Brand.SaledItems",
             "NewItem",
         }) {
        CAPTURE(q);
        CHECK(query(e.db(), q) == query(copy, q));
    }
}

TEST_CASE("the loaded object table keeps allocating fresh ordinals") {
    engine::Engine e = with_warehouse();
    storage::Database copy = dump::load_database(dump::dump_database(e.db()));
    std::uint64_t max_seen = 0;
    for (const auto& [ord, type] : copy.cat.oids().rows()) max_seen = ord;
    CHECK(copy.cat.oids().next_ordinal() > max_seen);
    CHECK(copy.cat.oids().next_ordinal() == e.db().cat.oids().next_ordinal());
}

TEST_CASE("truncated and malformed input is rejected as corrupt") {
    engine::Engine e = with_warehouse();
    std::string full = dump::dump_database(e.db());
    CHECK(code_of([&] { dump::load_database(full.substr(0, full.size() / 2)); }) ==
          ErrorCode::IntegrityCheckFailed);
    CHECK(code_of([&] { dump::load_database("not json at all"); }) ==
          ErrorCode::IntegrityCheckFailed);
    CHECK(code_of([&] { dump::load_database("{}"); }) ==
          ErrorCode::IntegrityCheckFailed);
}

TEST_CASE("foreign format versions are refused") {
    engine::Engine e = with_warehouse();
    std::string full = dump::dump_database(e.db());
    auto pos = full.find("\"format\": 1");
    REQUIRE(pos != std::string::npos);
    std::string other = full.substr(0, pos) + "\"format\": 99" + full.substr(pos + 11);
    CHECK(code_of([&] { dump::load_database(other); }) ==
          ErrorCode::FormatVersionMismatch);
}

TEST_CASE("a dump with a dangling reference fails the load-time check") {
    engine::Engine e = with_warehouse();
    std::string full = dump::dump_database(e.db());
    // Point one SaleItems article reference at a never-allocated object.
    auto pos = full.find("\"o\": 2");
    REQUIRE(pos != std::string::npos);
    std::string other = full.substr(0, pos) + "\"o\": 9999" + full.substr(pos + 6);
    CHECK(code_of([&] { dump::load_database(other); }) ==
          ErrorCode::IntegrityCheckFailed);
}

TEST_CASE("file round trip") {
    engine::Engine e = with_warehouse();
    std::string path = "test_dump_roundtrip.json";
    dump::save_file(e.db(), path);
    storage::Database copy = dump::load_file(path);
    CHECK(dump::dump_database(copy) == dump::dump_database(e.db()));
    CHECK(code_of([&] { dump::load_file("no/such/file.json"); }) == ErrorCode::IoError);
    std::remove(path.c_str());
}
