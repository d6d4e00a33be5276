#include <doctest.h>

#include <sstream>

#include "ckml/context.hpp"
#include "ckml/context_io.hpp"
#include "support.hpp"

using namespace ckml;

TEST_CASE("living context loads with labels") {
  FormalContext ctx = testing::living();
  CHECK(ctx.object_count() == 8);
  CHECK(ctx.attribute_count() == 9);
  CHECK(ctx.object_index("Spike-Weed") == ctx.object_index("SW"));
  CHECK(ctx.attribute_index("Needs Chlorophyll") == 3);
  CHECK(ctx.incident(ctx.object_index("Dog"), ctx.attribute_index("sk")));
  CHECK_FALSE(ctx.incident(ctx.object_index("Bean"), ctx.attribute_index("mo")));
}

TEST_CASE("derivation operators") {
  FormalContext ctx = testing::living();

  SUBCASE("intent of a pair of plants") {
    ObjectSet x = ctx.object_set({"Rd", "Ma"});
    CHECK(ctx.attribute_names(derive_intent(ctx, x)) == std::vector<std::string>{"nw", "ll", "nc", "1lg"});
  }
  SUBCASE("extent of an attribute set") {
    AttributeSet a = ctx.attribute_set({"nw", "nc", "1lg"});
    CHECK(ctx.object_names(derive_extent(ctx, a)) == std::vector<std::string>{"SW", "Rd", "Ma"});
  }
  SUBCASE("empty sets derive to everything") {
    CHECK(derive_intent(ctx, ObjectSet(8)).full());
    CHECK(derive_extent(ctx, AttributeSet(9)).full());
  }
  SUBCASE("sets over the wrong universe are rejected") {
    CHECK_THROWS_AS(derive_intent(ctx, ObjectSet(3)), InvalidSetError);
    CHECK_THROWS_AS(derive_extent(ctx, AttributeSet(10)), InvalidSetError);
  }
  SUBCASE("is_formal_concept") {
    CHECK(is_formal_concept(ctx, ctx.object_set({"Rd", "Ma"}), ctx.attribute_set({"nw", "ll", "nc", "1lg"})));
    CHECK_FALSE(is_formal_concept(ctx, ctx.object_set({"Rd"}), ctx.attribute_set({"nw", "ll", "nc", "1lg"})));
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(FormalContext::from_cross_table({"a", "a"}, {"m"}, {"X", "."}), ContextError);
  CHECK_THROWS_AS(FormalContext::from_cross_table({"a"}, {"m", "n"}, {"X"}), ContextError);
  CHECK_THROWS_AS(FormalContext::from_cross_table({"a"}, {"m"}, {"?"}), ContextError);
  CHECK_THROWS_AS(FormalContext::from_cross_table({" "}, {"m"}, {"X"}), ContextError);
  FormalContext ctx = FormalContext::from_cross_table({"a"}, {"m"}, {"x"});
  CHECK(ctx.incident(0, 0));
  CHECK_THROWS_AS(ctx.object_index("b"), ContextError);
  CHECK_THROWS_AS(ctx.with_label("zz", "Z"), ContextError);
}

TEST_CASE("context file round trip") {
  FormalContext ctx = testing::living();
  std::string text = format_context(ctx);
  FormalContext back = parse_context(text);
  CHECK(back == ctx);
  CHECK(format_context(back) == text);
}

TEST_CASE("context reader accepts the classic variant") {
  FormalContext ctx = parse_context("B\r\nname\r\n\r\n2\r\n1\r\n\r\ng1\r\ng2\r\nm\r\nx\r\n.\r\n");
  CHECK(ctx.object_count() == 2);
  CHECK(ctx.incident(0, 0));
  CHECK_FALSE(ctx.incident(1, 0));
}

TEST_CASE("context reader errors") {
  CHECK_THROWS_AS(parse_context("C\n1\n1\na\nm\nX\n"), ContextError);
  CHECK_THROWS_AS(parse_context("B\n2\n1\na\nb\nm\nX\n"), ContextError);
  CHECK_THROWS_AS(parse_context("B\nx\n1\n"), ContextError);
  CHECK_THROWS_AS(read_context_file("/nonexistent/file.cxt"), ContextError);
}

TEST_CASE("empty context") {
  FormalContext ctx = read_context_file(testing::fixture("contexts/empty.cxt"));
  CHECK(ctx.object_count() == 0);
  CHECK(ctx.attribute_count() == 0);
  CHECK(format_context(ctx) == "B\n0\n0\n");
}

TEST_CASE("labels sidecar") {
  std::istringstream in("# comment\nnw = Needs Water\n\nLe = Leech\n");
  FormalContext ctx = apply_labels(read_context_file(testing::fixture("living/living.cxt")), in);
  CHECK(ctx.attribute_index("Needs Water") == 0);
  CHECK(ctx.object_index("Leech") == 0);
  std::istringstream bad("nw Needs Water\n");
  CHECK_THROWS_AS(apply_labels(ctx, bad), ContextError);
}

TEST_CASE("apposition") {
  FormalContext left = FormalContext::from_cross_table({"a", "b"}, {"p", "q"}, {"X.", ".X"}, "L");
  FormalContext right = FormalContext::from_cross_table({"b", "a"}, {"q", "r"}, {"XX", ".."}, "R");

  SUBCASE("right rows follow the left object order; colliding names get a prefix") {
    FormalContext ap = apposition(left, right);
    CHECK(ap.attributes() == std::vector<std::string>{"p", "q", "R:q", "r"});
    CHECK(ap.objects() == std::vector<std::string>{"a", "b"});
    CHECK(ap.attribute_names(ap.row(0)) == std::vector<std::string>{"p"});
    CHECK(ap.attribute_names(ap.row(1)) == std::vector<std::string>{"q", "R:q", "r"});
  }
  SUBCASE("prefix_all") {
    AppositionOptions opts;
    opts.left_prefix = "x";
    opts.right_prefix = "y";
    opts.prefix_all = true;
    CHECK(apposition(left, right, opts).attributes() == std::vector<std::string>{"x:p", "x:q", "y:q", "y:r"});
  }
  SUBCASE("object sets must match") {
    FormalContext other = FormalContext::from_cross_table({"a", "c"}, {"z"}, {"X", "."});
    CHECK_THROWS_AS(apposition(left, other), AppositionError);
  }
  SUBCASE("empty right side is an identity") {
    FormalContext none = FormalContext::from_cross_table({"a", "b"}, {}, {"", ""});
    CHECK(apposition(left, none) == left);
  }
}

TEST_CASE("select_attributes keeps order") {
  FormalContext ctx = testing::living();
  FormalContext sub = select_attributes(ctx, ctx.attribute_set({"mo", "nw"}));
  CHECK(sub.attributes() == std::vector<std::string>{"nw", "mo"});
  CHECK(sub.object_count() == 8);
}
