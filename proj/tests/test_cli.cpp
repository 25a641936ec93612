#include "doctest.h"

#include <fstream>
#include <sstream>

#include "ro/session.hpp"

namespace {

using namespace ro;

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(RO_SOURCE_DIR) + "/" + rel);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    std::ostringstream out, err;
    cli::Session s;
    explicit Run(cli::SessionOptions opt = {}) : s(out, err, opt) {}
};

} // namespace

TEST_CASE("input splits on top-level semicolons only") {
    auto r = cli::split_input("a := 1; b := \"x;y\"; // c; d;\nd := #01.02.2003#;");
    REQUIRE(r.complete.size() == 3);
    CHECK(r.complete[0].text == "a := 1;");
    CHECK(r.complete[1].text == "b := \"x;y\";");
    CHECK(r.complete[2].text == "d := #01.02.2003#;");
    CHECK(r.rest.empty());
}

TEST_CASE("semicolons inside method bodies do not end the command") {
    std::string text = "ALTER CLASS T REALIZE M AS BEGIN x := 1; RETURN TRUE; END;\nM;";
    auto r = cli::split_input(text);
    REQUIRE(r.complete.size() == 2);
    CHECK(r.complete[0].text.ends_with("END;"));
    CHECK(r.complete[1].text == "M;");
    CHECK(r.complete[1].line == 2);
}

TEST_CASE("BEGIN TRANSACTION opens no block and an incomplete tail is kept") {
    auto r = cli::split_input("BEGIN TRANSACTION; COMMIT; SELECT");
    REQUIRE(r.complete.size() == 2);
    CHECK(r.rest == "SELECT");
    auto more = cli::split_input(r.rest + " SUM(Q) FROM W;");
    REQUIRE(more.complete.size() == 1);
    CHECK(more.rest.empty());
}

TEST_CASE("a backslash line is its own chunk") {
    auto r = cli::split_input("\\d GoodsMotion\nObject(Article);");
    REQUIRE(r.complete.size() == 2);
    CHECK(r.complete[0].text == "\\d GoodsMotion");
    CHECK(r.complete[1].text == "Object(Article);");
}

TEST_CASE("the bundled warehouse script runs clean and prints its totals") {
    Run r;
    CHECK(r.s.run_text(slurp("scripts/warehouse.ro"), "warehouse.ro") == 0);
    CHECK(r.err.str().empty());
    std::string out = r.out.str();
    CHECK(out.find("value\n") != std::string::npos);
    CHECK(out.find("\n 15\n") != std::string::npos);
    CHECK(out.find("\n 13\n") != std::string::npos);
}

TEST_CASE("an empty script succeeds with an empty transcript") {
    Run r;
    CHECK(r.s.run_text("", "empty.ro") == 0);
    CHECK(r.out.str().empty());
    CHECK(r.err.str().empty());
}

TEST_CASE("tables are aligned with refined headers and OID columns as Object(type)") {
    Run r;
    REQUIRE(r.s.run_text(slurp("scripts/warehouse.ro"), "warehouse.ro") == 0);
    Run q;
    q.s.eng() = r.s.eng();
    REQUIRE(q.s.run_text("Warehouse<Address = \"North dock\">.ResourceItems;", "") == 0);
    std::string out = q.out.str();
    CHECK(out.find(" Object ") != std::string::npos);
    CHECK(out.find(" Art ") != std::string::npos);
    CHECK(out.find("| Quantity") != std::string::npos);
    CHECK(out.find("(2 rows)") != std::string::npos);
    CHECK(out.find("---+---") != std::string::npos);
}

TEST_CASE("an error outside a transaction aborts a script with status 1") {
    Run r;
    REQUIRE(r.s.run_text(slurp("scripts/warehouse.ro"), "warehouse.ro") == 0);
    CHECK(r.s.run_text("NEW Brand(\"Acme\");\nNEW Brand(\"Other\");", "bad.ro") == 1);
    CHECK(r.err.str().find("bad.ro:1: KeyViolation") != std::string::npos);
    Run q;
    q.s.eng() = r.s.eng();
    REQUIRE(q.s.run_text("Object(Brand);", "") == 0);
    // The failing command rolled back; the following one never ran.
    CHECK(q.out.str().find("(1 row)") != std::string::npos);
}

TEST_CASE("an error inside a transaction rolls back and the script continues") {
    Run r;
    REQUIRE(r.s.run_text(slurp("scripts/warehouse.ro"), "warehouse.ro") == 0);
    std::string script =
        "BEGIN TRANSACTION;\n"
        "NEW Brand(\"Fresh\");\n"
        "NEW Brand(\"Acme\");\n"
        "Object(Brand);\n";
    CHECK(r.s.run_text(script, "tx.ro") == 0);
    CHECK(r.err.str().find("tx.ro:3: KeyViolation") != std::string::npos);
    CHECK(r.err.str().find("rolling back") != std::string::npos);
    CHECK_FALSE(r.s.eng().in_transaction());
    // "Fresh" went with the rollback: only the original brand remains.
    CHECK(r.out.str().find("(1 row)") != std::string::npos);
}

TEST_CASE("describe prints R-variable schemes with derived keys") {
    Run r;
    REQUIRE(r.s.run_text(slurp("scripts/warehouse.ro"), "warehouse.ro") == 0);
    Run q;
    q.s.eng() = r.s.eng();
    REQUIRE(q.s.run_text("\\d GoodsMotion\n", "") == 0);
    std::string out = q.out.str();
    CHECK(out.find("CLASS GoodsMotion") != std::string::npos);
    CHECK(out.find("GoodsMotion.No (Object(GoodsMotion), No:INTEGER)  GLOBAL KEY (No)") !=
          std::string::npos);
    CHECK(out.find("GoodsMotion.MovedItems (Object(GoodsMotion), Art:Article, "
                   "Quantity:INTEGER)  KEY (Object(GoodsMotion), Art)") != std::string::npos);

    Run d;
    d.s.eng() = r.s.eng();
    REQUIRE(d.s.run_text("\\d ArtQty\n\\d NewItem\n", "") == 0);
    CHECK(d.out.str().find("TUPLE ArtQty (Art:Article, Quantity:INTEGER)") !=
          std::string::npos);
    CHECK(d.out.str().find("VAR NewItem : ArtQty") != std::string::npos);

    Run u;
    CHECK(u.s.run_text("\\d NoSuch\n", "meta.ro") == 1);
    CHECK(u.err.str().find("UnknownName") != std::string::npos);
}

TEST_CASE("dump and load meta-commands round-trip through a file") {
    Run r;
    REQUIRE(r.s.run_text(slurp("scripts/warehouse.ro"), "warehouse.ro") == 0);
    REQUIRE(r.s.run_text("\\dump test_cli_db.json\n", "") == 0);
    Run q;
    REQUIRE(q.s.run_text("\\load test_cli_db.json\n"
                         "SELECT SUM(ResourceItems.Quantity) FROM Warehouse;",
                         "") == 0);
    CHECK(q.out.str().find("\n 13\n") != std::string::npos);
    std::remove("test_cli_db.json");
}

TEST_CASE("the repl accumulates lines until the semicolon and stops at \\q") {
    Run r;
    std::istringstream in(
        "CREATE x AS INTEGER;\n"
        "x :=\n"
        "  41 + 1;\n"
        "x;\n"
        "\\q\n"
        "x := 0;\n");
    r.s.repl(in);
    CHECK(r.s.done());
    CHECK(r.out.str().find("\n 42\n") != std::string::npos);
    // Nothing after \q ran.
    CHECK(r.out.str().find(" 0\n") == std::string::npos);
}

TEST_CASE("repl diagnostics do not end the session") {
    Run r;
    std::istringstream in(
        "no such syntax;\n"
        "\\bogus\n"
        "1 + 1;\n");
    r.s.repl(in);
    CHECK(r.err.str().find("SyntaxError") != std::string::npos);
    CHECK(r.err.str().find("UsageError") != std::string::npos);
    CHECK(r.out.str().find("\n 2\n") != std::string::npos);
}
