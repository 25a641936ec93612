#include "doctest.h"

#include <random>

#include "ro/error.hpp"
#include "ro/parser.hpp"
#include "ro/printer.hpp"

using namespace ro;
using namespace ro::ast;
using namespace ro::lang;

TEST_CASE("full class definition parses: components and keys") {
    auto cmd = parse_command(R"(
CREATE CLASS GoodsMotion
{
  No INTEGER
  CONSTRAIN GLOBALKEY No;
  DateOfAction DATE;
  FromWarehouse Warehouse;
  ToWarehouse Warehouse;
  MovedItems SET OF ArtQty
  CONSTRAIN
  LOCALKEY Art;
}
)");
    REQUIRE(cmd->kind == CmdKind::CreateClass);
    CHECK(cmd->name == "GoodsMotion");
    REQUIRE(cmd->sigs.size() == 5);
    CHECK(cmd->sigs[0].name == "No");
    CHECK(cmd->sigs[0].value_type == TypeRef{false, "INTEGER"});
    REQUIRE(cmd->sigs[0].keys.size() == 1);
    CHECK(cmd->sigs[0].keys[0].kind == relalg::KeyKind::Global);
    CHECK(cmd->sigs[0].keys[0].fields == std::vector<std::string>{"No"});
    CHECK(cmd->sigs[4].name == "MovedItems");
    CHECK(cmd->sigs[4].value_type == TypeRef{true, "ArtQty"});
    REQUIRE(cmd->sigs[4].keys.size() == 1);
    CHECK(cmd->sigs[4].keys[0].kind == relalg::KeyKind::Local);
    int global_keys = 0, local_keys = 0;
    for (const auto& s : cmd->sigs)
        for (const auto& k : s.keys)
            (k.kind == relalg::KeyKind::Global ? global_keys : local_keys)++;
    CHECK(global_keys == 1);
    CHECK(local_keys == 1);
}

TEST_CASE("inheritance, foreign keys, tuple types, methods") {
    auto cmds = parse_commands(R"(
DESCRIBE TUPLE SaleQty
{
  Art Article;
  Quantity INTEGER;
  Price FLOAT;
}
CREATE CLASS Article
{
  No STRING
  CONSTRAIN GLOBALKEY No;
  BrandName STRING
  CONSTRAIN FOREIGNKEY BrandName ON Brand.Name;
}
CREATE CLASS Sales EXTENDED GoodsMotion
{
  IsPayed BOOLEAN;
  SaleItems SET OF SaleQty
  CONSTRAIN
  LOCALKEY (Art, Price);
  DoSale (DateOfSale AS DATE) BOOLEAN;
}
)");
    REQUIRE(cmds.size() == 3);
    CHECK(cmds[0]->kind == CmdKind::DescribeTuple);
    CHECK(cmds[0]->sigs.size() == 3);
    const auto& fk = cmds[1]->sigs[1].keys.at(0);
    CHECK(fk.kind == relalg::KeyKind::Foreign);
    CHECK(fk.fk_type == "Brand");
    CHECK(fk.fk_fields == std::vector<std::string>{"Name"});
    CHECK(cmds[2]->parents == std::vector<std::string>{"GoodsMotion"});
    const auto& dosale = cmds[2]->sigs[2];
    CHECK(dosale.is_method);
    REQUIRE(dosale.params.size() == 1);
    CHECK(dosale.params[0].name == "DateOfSale");
    CHECK(dosale.params[0].type == TypeRef{false, "DATE"});
    CHECK(dosale.value_type == TypeRef{false, "BOOLEAN"});
    const auto& saleitems = cmds[2]->sigs[1];
    CHECK(saleitems.keys.at(0).fields == std::vector<std::string>{"Art", "Price"});
}

TEST_CASE("new / destroy / execute commands") {
    auto c = parse_command("new Article(\"art1\");");
    CHECK(c->kind == CmdKind::New);
    CHECK(c->name == "Article");
    REQUIRE(c->args.size() == 1);
    CHECK(c->args[0]->kind == ExprKind::Lit);
    CHECK(c->args[0]->lit == ScalarValue::of_string("art1"));

    auto d = parse_command("DESTROY Object(Sales WHERE IsPayed = FALSE);");
    CHECK(d->kind == CmdKind::Destroy);
    CHECK(d->expr->kind == ExprKind::ObjectOf);

    auto e = parse_command("EXECUTE t<GlobalKeyField=1>.method(2, \"x\");");
    CHECK(e->kind == CmdKind::Execute);
    REQUIRE(e->expr->kind == ExprKind::Call);
    CHECK(e->expr->name == "method");
    CHECK(e->expr->a->kind == ExprKind::OvRetrieve);
    CHECK(e->expr->args.size() == 2);
}

TEST_CASE("syntax errors carry position and expected-set") {
    CHECK_THROWS_WITH_AS(parse_command("CREATE CLASS {"), doctest::Contains("class name"),
                         Error);
    try {
        parse_command("CREATE CLASS {");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::SyntaxError);
        CHECK(std::string(err.what()).find("line 1:") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expr("1 +"), Error);
    CHECK_THROWS_AS(parse_expr(""), Error);
    CHECK_THROWS_AS(parse_commands("a := ;"), Error);
}

TEST_CASE("expression shapes from typical queries") {
    auto e = parse_expr("Object(Sales WHERE IsPayed = TRUE)");
    REQUIRE(e->kind == ExprKind::ObjectOf);
    REQUIRE(e->a->kind == ExprKind::Where);
    CHECK(e->a->a->path == std::vector<std::string>{"Sales"});
    CHECK(e->a->b->kind == ExprKind::Binary);
    CHECK(e->a->b->op == BinOp::Eq);

    auto ov = parse_expr("t<a.xref<a*.x*=1, a*.x*=2>>");
    REQUIRE(ov->kind == ExprKind::OvRetrieve);
    REQUIRE(ov->conds.size() == 1);
    REQUIRE(ov->conds[0]->kind == ExprKind::OvRetrieve);
    CHECK(ov->conds[0]->a->path == std::vector<std::string>{"a", "xref"});
    CHECK(ov->conds[0]->conds.size() == 2);

    auto ex = parse_expr("(t EXPAND a.xref) WHERE a.xref.a*.x* = 1");
    REQUIRE(ex->kind == ExprKind::Where);
    REQUIRE(ex->a->kind == ExprKind::Expand);
    CHECK(ex->a->path == std::vector<std::string>{"a", "xref"});
    CHECK(ex->b->a->path == std::vector<std::string>{"a", "xref", "a*", "x*"});

    auto pr = parse_expr("((t WHERE a.xref<a*.x* = 1>).method())[x]");
    REQUIRE(pr->kind == ExprKind::Project);
    CHECK(pr->proj.size() == 1);
    REQUIRE(pr->a->kind == ExprKind::Call);
    REQUIRE(pr->a->a->kind == ExprKind::Where);
    CHECK(pr->a->a->b->kind == ExprKind::OvRetrieve);
}

TEST_CASE("retrieval-by-value vs comparison disambiguation") {
    auto cmp = parse_expr("a < 3 AND b > 2");
    REQUIRE(cmp->kind == ExprKind::Binary);
    CHECK(cmp->op == BinOp::And);
    CHECK(cmp->a->op == BinOp::Lt);
    CHECK(cmp->b->op == BinOp::Gt);

    auto inner_cmp = parse_expr("t<Quantity < 3>");
    REQUIRE(inner_cmp->kind == ExprKind::OvRetrieve);
    REQUIRE(inner_cmp->conds.size() == 1);
    CHECK(inner_cmp->conds[0]->op == BinOp::Lt);

    auto spaced = parse_expr("SALES <DateOfAction IS NULL>");
    REQUIRE(spaced->kind == ExprKind::OvRetrieve);
    CHECK(spaced->conds[0]->kind == ExprKind::IsNull);

    auto empty = parse_expr("t< >");
    REQUIRE(empty->kind == ExprKind::OvRetrieve);
    CHECK(empty->conds.empty());

    auto chain = parse_expr("t<cond1 = 1>.xref.somemethod()");
    REQUIRE(chain->kind == ExprKind::Call);
    CHECK(chain->a->kind == ExprKind::Member);
    CHECK(chain->a->a->kind == ExprKind::OvRetrieve);
}

TEST_CASE("precedence: postfix > comparison > NOT > AND > OR > set ops") {
    auto e = parse_expr("NOT x = 1 AND y = 2 OR z = 3");
    REQUIRE(e->op == BinOp::Or);
    REQUIRE(e->a->op == BinOp::And);
    CHECK(e->a->a->kind == ExprKind::Not);
    CHECK(e->a->a->a->op == BinOp::Eq);

    auto s = parse_expr("a UNION b MINUS c");
    REQUIRE(s->op == BinOp::Minus); // left-assoc
    CHECK(s->a->op == BinOp::Union);

    auto w = parse_expr("a WHERE x = 1 UNION b");
    REQUIRE(w->op == BinOp::Union);
    CHECK(w->a->kind == ExprKind::Where);

    auto arith = parse_expr("1 + 2 * 3");
    REQUIRE(arith->op == BinOp::Add);
    CHECK(arith->b->op == BinOp::Mul);

    CHECK(parse_expr("a INTERSEPT b")->op == BinOp::Intersect);
    CHECK(parse_expr("a INTERSECT b")->op == BinOp::Intersect);

    auto neg = parse_expr("-2 + 3");
    REQUIRE(neg->op == BinOp::Add);
    CHECK(neg->a->op == BinOp::Sub);
    CHECK(neg->a->a->lit == ScalarValue::of_int(0));
}

TEST_CASE("literals") {
    CHECK(parse_expr("NULL")->lit.is_undefined());
    CHECK(parse_expr("TRUE")->lit == ScalarValue::of_bool(true));
    CHECK(parse_expr("false")->lit == ScalarValue::of_bool(false));
    CHECK(parse_expr("2.5")->lit == ScalarValue::of_float(2.5));
    CHECK(parse_expr("#01.04.2005#")->lit == ScalarValue::of_date(Date{1, 4, 2005}));
    CHECK(parse_expr("#31.12.1999#")->lit == ScalarValue::of_date(Date{31, 12, 1999}));
    CHECK_THROWS_AS(parse_expr("#32.13.2005#"), Error);
    CHECK(parse_expr("\"a\\\"b\"")->lit == ScalarValue::of_string("a\"b"));
    CHECK(parse_expr("x IS NULL")->kind == ExprKind::IsNull);
    auto nn = parse_expr("x NOT IS NULL");
    CHECK(nn->kind == ExprKind::IsNull);
    CHECK(nn->negated);
    auto nn2 = parse_expr("x IS NOT NULL");
    CHECK(nn2->kind == ExprKind::IsNull);
    CHECK(nn2->negated);
}

TEST_CASE("IS / OF type tests") {
    auto is = parse_expr("o IS Object");
    CHECK(is->kind == ExprKind::IsType);
    CHECK(is->name == "Object");
    auto of = parse_expr("o OF Sales");
    CHECK(of->kind == ExprKind::OfType);
    CHECK(of->name == "Sales");
}

TEST_CASE("summarize forms and SELECT sugar") {
    auto s = parse_expr(
        "SUMMARIZE SaleItems BY Art ADD Sum(Pieces) AS Pieces, Count(Pieces) AS N");
    REQUIRE(s->kind == ExprKind::Summarize);
    CHECK(s->by == std::vector<std::vector<std::string>>{{"Art"}});
    REQUIRE(s->adds.size() == 2);
    CHECK(s->adds[0].agg == relalg::Aggregate::Sum);
    CHECK(s->adds[1].agg == relalg::Aggregate::Count);
    CHECK(s->adds[1].result == "N");

    auto neg = parse_expr("SUMMARIZE (g WHERE f = this) BY Art ADD Sum(0 - Quantity) AS Q");
    CHECK(neg->adds[0].source->op == BinOp::Sub);
    CHECK(neg->a->kind == ExprKind::Where);
    CHECK(neg->a->b->b->path == std::vector<std::string>{"this"});

    auto sel = parse_expr("SELECT SUM(pieces) FROM Warehouse.ResourceItems");
    REQUIRE(sel->kind == ExprKind::Summarize);
    CHECK(sel->by.empty());
    REQUIRE(sel->adds.size() == 1);
    CHECK(sel->adds[0].result == "pieces");
    CHECK(sel->a->path == std::vector<std::string>{"Warehouse", "ResourceItems"});
}

TEST_CASE("projection keep, rename, drop") {
    auto keep = parse_expr("t[a, b.x AS y]");
    REQUIRE(keep->kind == ExprKind::Project);
    CHECK(!keep->proj_drop);
    REQUIRE(keep->proj.size() == 2);
    CHECK(keep->proj[1].path == std::vector<std::string>{"b", "x"});
    CHECK(keep->proj[1].rename == "y");

    auto drop = parse_expr("t[!OID, a.x]");
    CHECK(drop->proj_drop);
    CHECK(drop->proj.size() == 2);
}

TEST_CASE("method body statements") {
    auto body = parse_statements(R"(
IF DateOfAction NOT IS NULL THEN //if the shipment is made
  IF DateOfAction = DateOfSale THEN RETURN TRUE;
  ELSE RETURN FALSE;
ELSE
  IF IsPayed THEN
  BEGIN
    DateOfAction := DateOfSale;
    RETURN TRUE;
  END
  ELSE
    RETURN FALSE;
)");
    REQUIRE(body.size() == 1);
    const auto& outer = *body[0];
    REQUIRE(outer.kind == StmtKind::If);
    CHECK(outer.cond->kind == ExprKind::IsNull);
    CHECK(outer.cond->negated);
    REQUIRE(outer.then_block.size() == 1);
    REQUIRE(outer.then_block[0]->kind == StmtKind::If);
    CHECK(outer.then_block[0]->else_block.size() == 1);
    REQUIRE(outer.else_block.size() == 1);
    const auto& inner = *outer.else_block[0];
    REQUIRE(inner.then_block.size() == 2);
    CHECK(inner.then_block[0]->kind == StmtKind::Assign);
    CHECK(inner.then_block[1]->kind == StmtKind::Return);
}

TEST_CASE("do-while, dml statements, method call statement") {
    auto body = parse_statements(R"(
DO
  n := n - 1;
  INSERT INTO log VALUE (x WHERE q = n);
WHILE n > 0;
DELETE FROM items WHERE Quantity = 0;
UPDATE items SET Quantity = Quantity + 1, Price = 2.0 WHERE Art = "a1";
Helper(n);
)");
    REQUIRE(body.size() == 4);
    REQUIRE(body[0]->kind == StmtKind::DoWhile);
    CHECK(body[0]->body.size() == 2);
    CHECK(body[0]->body[1]->kind == StmtKind::Insert);
    CHECK(body[0]->cond->op == BinOp::Gt);
    CHECK(body[1]->kind == StmtKind::Delete);
    CHECK(body[2]->kind == StmtKind::Update);
    CHECK(body[2]->sets.size() == 2);
    REQUIRE(body[3]->kind == StmtKind::Exec);
    CHECK(body[3]->expr->name == "Helper");
}

TEST_CASE("alter class: multiple clauses expand to one command each") {
    auto cmds = parse_commands(R"(
ALTER CLASS Warehouse
REALIZE Address AS STORED
REALIZE ResourceItems AS
SUMMARIZE (GoodsMotion WHERE ToWarehouse = this)
BY Art ADD Sum(MovedItems.Quantity) AS Quantity;
)");
    REQUIRE(cmds.size() == 2);
    CHECK(cmds[0]->kind == CmdKind::Realize);
    CHECK(cmds[0]->impl_kind == ImplKind::Stored);
    CHECK(cmds[0]->realize_names == std::vector<std::string>{"Address"});
    CHECK(cmds[1]->impl_kind == ImplKind::Expr);
    CHECK(cmds[1]->impl_expr->kind == ExprKind::Summarize);

    auto all = parse_command("ALTER CLASS Article REALIZE * AS STORED;");
    CHECK(all->realize_all);

    auto meth = parse_command(R"(
ALTER CLASS Article
  REALIZE Article AS
  BEGIN
    No := InArticle;
  END;
)");
    CHECK(meth->impl_kind == ImplKind::Body);
    REQUIRE(meth->impl_body.size() == 1);
    CHECK(meth->impl_body[0]->kind == StmtKind::Assign);

    auto added = parse_command("ALTER CLASS Article ADD Article(InArticle AS STRING);");
    CHECK(added->kind == CmdKind::AlterAdd);
    CHECK(added->sigs[0].is_method);
    CHECK(added->sigs[0].value_type.name.empty());

    auto dropped = parse_command("ALTER CLASS Brand DROP SaledItems;");
    CHECK(dropped->kind == CmdKind::AlterDrop);
    CHECK(dropped->realize_names == std::vector<std::string>{"SaledItems"});
}

TEST_CASE("key spelling variants") {
    auto a = parse_command("ALTER CLASS Brand ADD SaledItems SET OF ArtQty CONSTRAIN GLOBALKEY Art;");
    CHECK(a->sigs[0].keys[0].kind == relalg::KeyKind::Global);
    auto b = parse_command("ALTER CLASS Brand ADD S2 SET OF ArtQty CONSTRAIN GLOBAL KEY Art;");
    CHECK(b->sigs[0].keys[0].kind == relalg::KeyKind::Global);
    auto c = parse_command(
        "CREATE ArticleOnWarehouse AS SET OF Art2Ware CONSTRAIN Art AS GLOBAL KEY REALIZE AS STORED;");
    CHECK(c->kind == CmdKind::CreateGlobal);
    CHECK(c->global_type == TypeRef{true, "Art2Ware"});
    REQUIRE(c->global_keys.size() == 1);
    CHECK(c->global_keys[0].kind == relalg::KeyKind::Global);
    CHECK(c->global_keys[0].fields == std::vector<std::string>{"Art"});
    auto d = parse_command("CREATE someSales AS SET OF Sales REALIZE AS STORED;");
    CHECK(d->global_keys.empty());
}

TEST_CASE("transaction commands") {
    auto cmds = parse_commands(R"(
BEGIN TRANSACTION;
IF EXIST ((SALES<DateOfAction IS NULL>.DoSale(#01.04.2005#)) WHERE result = FALSE)
THEN ROLLBACK
ELSE COMMIT;
)");
    REQUIRE(cmds.size() == 2);
    CHECK(cmds[0]->kind == CmdKind::Begin);
    REQUIRE(cmds[1]->kind == CmdKind::IfCmd);
    CHECK(cmds[1]->then_cmd->kind == CmdKind::Rollback);
    CHECK(cmds[1]->else_cmd->kind == CmdKind::Commit);
    CHECK(cmds[1]->cond->kind == ExprKind::Exist);
}

TEST_CASE("assignment and query commands") {
    auto q = parse_command("Object(Article WHERE No = \"art1\");");
    CHECK(q->kind == CmdKind::Query);
    auto a = parse_command("Article<No=\"art1\">.BrandName := \"b1\";");
    REQUIRE(a->kind == CmdKind::Assign);
    CHECK(a->target->kind == ExprKind::Member);
    CHECK(a->target->a->kind == ExprKind::OvRetrieve);
    auto g = parse_command("g := Object(Sales WHERE IsPayed = TRUE);");
    CHECK(g->kind == CmdKind::Assign);
    CHECK(g->target->path == std::vector<std::string>{"g"});
}

namespace {

std::string reprint(const std::string& script) {
    return print_commands(parse_commands(script));
}

// Random expression generator for the round-trip property. Shapes are
// restricted to what the surface grammar can express (no bare-literal
// retrieval conditions, no negative literals).
ExprPtr random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
    auto leaf_path = [&](const char* n) {
        auto e = make_expr(ExprKind::Path);
        e->path = {n};
        return e;
    };
    auto cmp = [&](int d) {
        auto c = make_expr(ExprKind::Binary);
        c->op = BinOp::Eq;
        c->a = leaf_path("x");
        c->b = d > 0 ? random_expr(rng, 0) : ExprPtr(leaf_path("y"));
        return c;
    };
    switch (pick(rng)) {
    case 0: return leaf_path(rng() % 2 ? "t" : "a");
    case 1: {
        auto e = make_expr(ExprKind::Lit);
        switch (rng() % 5) {
        case 0: e->lit = ScalarValue::of_int(static_cast<std::int64_t>(rng() % 100)); break;
        case 1: e->lit = ScalarValue::of_string("s"); break;
        case 2: e->lit = ScalarValue::of_bool(rng() % 2 == 0); break;
        case 3: e->lit = ScalarValue::of_date(Date{5, 6, 2005}); break;
        default: e->lit = ScalarValue::undefined(); break;
        }
        return e;
    }
    case 2: {
        auto e = make_expr(ExprKind::Binary);
        const BinOp ops[] = {BinOp::Add,   BinOp::Mul, BinOp::Eq,    BinOp::Lt,
                             BinOp::And,   BinOp::Or,  BinOp::Union, BinOp::Minus,
                             BinOp::Times, BinOp::Join};
        e->op = ops[rng() % (sizeof(ops) / sizeof(ops[0]))];
        e->a = random_expr(rng, depth - 1);
        e->b = random_expr(rng, depth - 1);
        return e;
    }
    case 3: {
        auto e = make_expr(ExprKind::Not);
        e->a = random_expr(rng, depth - 1);
        return e;
    }
    case 4: {
        auto e = make_expr(ExprKind::IsNull);
        e->a = leaf_path("x");
        e->negated = rng() % 2 == 0;
        return e;
    }
    case 5: {
        auto e = make_expr(rng() % 2 ? ExprKind::Exist : ExprKind::ObjectOf);
        e->a = random_expr(rng, depth - 1);
        return e;
    }
    case 6: {
        auto e = make_expr(ExprKind::Where);
        e->a = random_expr(rng, depth - 1);
        e->b = cmp(depth - 1);
        return e;
    }
    case 7: {
        auto e = make_expr(ExprKind::Project);
        e->a = random_expr(rng, depth - 1);
        e->proj_drop = rng() % 2 == 0;
        ProjItem it;
        it.path = {"x"};
        if (!e->proj_drop && rng() % 2) it.rename = "y";
        e->proj.push_back(it);
        return e;
    }
    case 8: {
        auto e = make_expr(ExprKind::Summarize);
        e->a = random_expr(rng, depth - 1);
        if (rng() % 2) e->by.push_back({"x"});
        AggAdd add;
        add.agg = rng() % 2 ? relalg::Aggregate::Sum : relalg::Aggregate::Count;
        add.source = leaf_path("q");
        add.result = "r";
        e->adds.push_back(add);
        return e;
    }
    case 9: {
        auto e = make_expr(ExprKind::Expand);
        e->a = random_expr(rng, depth - 1);
        e->path = {"a", "xref"};
        return e;
    }
    case 10: {
        auto e = make_expr(ExprKind::OvRetrieve);
        e->a = leaf_path("t");
        if (rng() % 2) e->conds.push_back(cmp(depth - 1));
        if (rng() % 2) e->conds.push_back(cmp(0));
        return e;
    }
    default: {
        auto e = make_expr(ExprKind::Call);
        if (rng() % 2) e->a = leaf_path("t");
        e->name = "m";
        if (rng() % 2) e->args.push_back(random_expr(rng, depth - 1));
        return e;
    }
    }
}

} // namespace

TEST_CASE("round-trip: print then reparse is a fixpoint for scripts") {
    const char* scripts[] = {
        "DESCRIBE TUPLE ArtQty { Art Article; Quantity INTEGER; }",
        "CREATE CLASS Brand { Name STRING CONSTRAIN GLOBALKEY Name; }",
        "CREATE CLASS Sales EXTENDED GoodsMotion { IsPayed BOOLEAN; DoSale(D AS DATE) BOOLEAN; }",
        "ALTER CLASS GoodsMotion REALIZE No, DateOfAction AS STORED;",
        "ALTER CLASS Article REALIZE * AS STORED;",
        "ALTER CLASS Sales REALIZE MovedItems AS SUMMARIZE SaleItems BY Art ADD Sum(Quantity) AS Quantity;",
        "ALTER CLASS Sales REALIZE DoSale AS BEGIN IF a = 1 THEN RETURN TRUE; ELSE RETURN FALSE; END;",
        "ALTER CLASS T REALIZE M AS BEGIN DO x := x - 1; WHILE x > 0; END;",
        "CREATE g AS SET OF Sales;",
        "CREATE v AS SET OF ArtQty CONSTRAIN GLOBALKEY Art;",
        "DROP CLASS Sales;",
        "DROP g;",
        "NEW Article(\"art1\");",
        "DESTROY Object(Sales WHERE IsPayed = FALSE);",
        "EXECUTE t.somemethod();",
        "EXECUTE SALES<DateOfAction IS NULL>.DoSale(#01.04.2005#);",
        "INSERT INTO w.ResourceItems VALUE (x WHERE q = 1);",
        "UPDATE w.ResourceItems SET Quantity = Quantity + 1 WHERE Art = \"a\";",
        "DELETE FROM w.ResourceItems WHERE Quantity = 0;",
        "g := Object(Sales WHERE IsPayed = TRUE);",
        "Object(Article WHERE No = \"art1\");",
        "SELECT SUM(pieces) FROM Warehouse.ResourceItems;",
        "BEGIN TRANSACTION;",
        "IF EXIST (g) THEN ROLLBACK ELSE COMMIT;",
        "COMMIT;",
        "t<a.xref<a*.x*=1, a*.x*=2>>;",
        "((t WHERE a.xref<a*.x* = 1>).method())[x];",
        "(t EXPAND a.xref) WHERE a.xref.a*.x* = 1;",
        "o IS Object;",
        "o OF Sales;",
    };
    for (const char* s : scripts) {
        CAPTURE(s);
        std::string once = reprint(s);
        CHECK(once == reprint(once));
    }
}

TEST_CASE("round-trip: randomized expression asts") {
    std::mt19937_64 rng(2025);
    for (int i = 0; i < 2000; ++i) {
        auto ast = random_expr(rng, 4);
        std::string printed = print_expr(*ast);
        CAPTURE(printed);
        ast::ExprPtr back;
        REQUIRE_NOTHROW(back = parse_expr(printed));
        CHECK(print_expr(*back) == printed);
    }
}

TEST_CASE("fuzz smoke: arbitrary bytes never crash the parser") {
    std::mt19937_64 rng(7);
    const std::string alphabet =
        "abcXYZ019 \t\n()<>[]{}.,;:=+-*/\"#!~\\%&|\x80\xff";
    for (int i = 0; i < 3000; ++i) {
        std::uniform_int_distribution<int> len(0, 60);
        std::string s;
        int n = len(rng);
        for (int k = 0; k < n; ++k) s += alphabet[rng() % alphabet.size()];
        try {
            (void)parse_commands(s);
        } catch (const Error&) {
            // expected for most inputs
        }
    }
}
