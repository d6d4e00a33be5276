#include <doctest.h>

#include "ckml/query.hpp"
#include "support.hpp"

using namespace ckml;

namespace {

const std::string kBlockQuery = R"(<DB:Support inst="Cylinder" thme="Prism#?"/>)";

std::set<std::string> ask(const std::string& text, const KnowledgeBase& kb = testing::table_blocks()) {
  return answer(parse_query(text), kb);
}

std::string sql_of(const std::string& text, const KnowledgeBase& kb = testing::table_blocks()) {
  return to_sql(parse_query(text), kb).render();
}

}  // namespace

TEST_CASE("queries need a marker") {
  CHECK_THROWS_AS(parse_query(R"(<DB:Support inst="a" thme="c"/>)"), EvalError);
  Expr q = parse_query(kBlockQuery);
  CHECK(count_markers(q) == 1);
}

TEST_CASE("desugaring type-name arguments") {
  const KnowledgeBase& kb = testing::table_blocks();
  Expr d = desugar_query(parse_query(kBlockQuery), kb);
  REQUIRE(d.op == Expr::Op::Exists);
  CHECK(d.var == "x");
  CHECK(d.var_type == "Cylinder");
  REQUIRE(d.children.size() == 1);
  CHECK(d.children[0].op == Expr::Op::Atom);
  CHECK(d.children[0].arg("inst")->name == "x");
  CHECK(d.children[0].arg("thme")->marker);

  SUBCASE("two type names bind two variables around their atom") {
    Expr two = desugar_query(parse_query(R"(<DB:Support inst="Cylinder" thme="Prism"/><DB:Block id="?"/>)"), kb);
    REQUIRE(two.op == Expr::Op::And);
    const Expr& outer = two.children.at(0);
    REQUIRE(outer.op == Expr::Op::Exists);
    CHECK(outer.var == "x");
    REQUIRE(outer.children.at(0).op == Expr::Op::Exists);
    CHECK(outer.children[0].var == "y");
  }
  SUBCASE("instance ids stay constants") {
    Expr c = desugar_query(parse_query(R"(<DB:Support inst="g" thme="?"/>)"), kb);
    CHECK(c.op == Expr::Op::Atom);
  }
  SUBCASE("desugaring is idempotent") {
    CHECK(desugar_query(d, kb) == d);
  }
}

TEST_CASE("answers") {
  SUBCASE("the block query over the relational table") {
    CHECK(ask(kBlockQuery) == std::set<std::string>{"d", "g"});
  }
  SUBCASE("explicit quantifier gives the same answer") {
    CHECK(ask(R"(<Exists var="x" type="Cylinder"><DB:Support inst="x" thme="Prism#?"/></Exists>)") ==
          ask(kBlockQuery));
  }
  SUBCASE("blocks supported by g") {
    CHECK(ask(R"(<DB:Support inst="g" thme="?"/>)") == std::set<std::string>{"h", "i"});
    CHECK(ask(R"(<RDB:support source.Instance="g" target.Instance="?"/>)") == std::set<std::string>{"h", "i"});
  }
  SUBCASE("marker on the source side") {
    CHECK(ask(R"(<DB:Support inst="?" thme="c"/>)") == std::set<std::string>{"a", "b"});
  }
  SUBCASE("colour filter") {
    CHECK(ask(R"(<Exists var="y" type="DB:Block"><DB:Support inst="?" thme="y"/></Exists>)"
              R"(<DB:Block id="?" color="Color#red"/>)") == std::set<std::string>{"b", "e"});
  }
  SUBCASE("the full knowledge base agrees with the table") {
    CHECK(ask(kBlockQuery, testing::blocks()) == ask(kBlockQuery));
  }
  SUBCASE("empty collection") {
    std::vector<Document> docs{parse(R"(<Collection.Block ontology="http://www.database.org/ontology/rdb/"/>)")};
    KnowledgeBase empty = KnowledgeBase::load(docs, testing::block_paths());
    CHECK(ask(kBlockQuery, empty).empty());
    CHECK(run_sql(to_sql(parse_query(kBlockQuery), empty), empty).empty());
  }
}

TEST_CASE("sql translation of the block query") {
  std::string want =
      "SELECT Supportee\n"
      "FROM support, Block x, Block y\n"
      "WHERE\n"
      "  Supporter = x.ID AND Supportee = y.ID\n"
      "  AND x.Shape = 'cylindrical'\n"
      "  AND y.Shape = 'prismatic'\n";
  CHECK(sql_of(kBlockQuery) == want);
  CHECK(run_sql(to_sql(parse_query(kBlockQuery), testing::table_blocks()), testing::table_blocks()) ==
        ask(kBlockQuery));
  CHECK(sql_of(kBlockQuery) == sql_of(kBlockQuery));
}

TEST_CASE("sql shapes") {
  SUBCASE("relation only") {
    std::string sql = sql_of(R"(<DB:Support inst="g" thme="?"/>)");
    CHECK(sql == "SELECT Supportee\nFROM support\nWHERE\n  Supporter = 'g'\n");
  }
  SUBCASE("an entity-typed variable joins its table") {
    std::string sql = sql_of(R"(<Exists var="x" type="DB:Block"><DB:Support inst="x" thme="?"/></Exists>)");
    CHECK(sql == "SELECT Supportee\nFROM support, Block x\nWHERE\n  Supporter = x.ID\n");
  }
  SUBCASE("a role-typed variable adds nothing") {
    std::string sql = sql_of(R"(<Exists var="x" type="RDB:Supporter"><DB:Support inst="x" thme="?"/></Exists>)");
    CHECK(sql == "SELECT Supportee\nFROM support\n");
  }
  SUBCASE("colour filters on both sides") {
    std::string sql = sql_of(
        R"(<Exists var="x" type="DB:Block"><DB:Support inst="x" thme="?"/>)"
        R"(<DB:Block id="x" color="Color#red"/></Exists>)"
        R"(<DB:Block id="?" color="Color#green"/>)");
    CHECK(sql.find("x.Color = 'red'") != std::string::npos);
    CHECK(sql.find("y.Color = 'green'") != std::string::npos);
    CHECK(sql.rfind("SELECT Supportee\nFROM support, Block x, Block y\n", 0) == 0);
  }
  SUBCASE("selecting the supporter") {
    CHECK(sql_of(R"(<DB:Support inst="?" thme="c"/>)").rfind("SELECT Supporter\n", 0) == 0);
  }
}

TEST_CASE("unsupported queries") {
  for (const char* text : {
           R"(<or><DB:Support inst="?" thme="c"/><DB:Support inst="?" thme="d"/></or>)",
           R"(<not><DB:Support inst="?" thme="c"/></not>)",
           R"(<Forall var="x" type="DB:Block"><DB:Support inst="?" thme="x"/></Forall>)",
           R"(<DB:Block id="?" color="Color#red"/>)",
           R"(<Exists var="x" type="DB:Block"><DB:Support inst="?" thme="x"/>)"
           R"(<DB:Support inst="x" thme="c"/></Exists>)",
       }) {
    CAPTURE(text);
    CHECK_THROWS_AS(to_sql(parse_query(text), testing::table_blocks()), UnsupportedQueryError);
  }
}

TEST_CASE("relational rendering and sql evaluation") {
  Database db = relational_rendering(testing::table_blocks());
  const SqlTable* block = db.table("Block");
  REQUIRE(block != nullptr);
  CHECK(block->columns == std::vector<std::string>{"ID", "Shape", "Color"});
  CHECK(block->rows.size() == 9);
  const SqlTable* support = db.table("support");
  REQUIRE(support != nullptr);
  CHECK(support->columns == std::vector<std::string>{"Supporter", "Supportee"});
  CHECK(support->rows.size() == 7);

  SUBCASE("contradictory filters") {
    SqlQuery q = to_sql(parse_query(kBlockQuery), testing::table_blocks());
    q.where.push_back({{"y", "Shape"}, std::nullopt, "cylindrical"});
    CHECK(run_sql(q, db).empty());
  }
  SUBCASE("unknown tables and columns") {
    SqlQuery q;
    q.select = {"", "ID"};
    q.from = {{"Nope", ""}};
    CHECK_THROWS_AS(run_sql(q, db), SqlError);
    q.from = {{"Block", ""}};
    q.select = {"", "Weight"};
    CHECK_THROWS_AS(run_sql(q, db), SqlError);
    q.select = {"", "ID"};
    CHECK(run_sql(q, db).size() == 9);
  }
}
