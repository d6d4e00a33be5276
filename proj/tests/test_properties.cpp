#include <doctest.h>

#include <algorithm>

#include "ckml/context.hpp"
#include "ckml/lattice.hpp"
#include "ckml/markup.hpp"
#include "ckml/query.hpp"
#include "ckml/theory.hpp"
#include "support.hpp"

using namespace ckml;
using testing::Rng;

TEST_CASE("derivation forms a Galois connection") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    FormalContext ctx = testing::random_context(rng, 9, 9);
    const std::size_t g = ctx.object_count(), m = ctx.attribute_count();
    auto x1 = testing::random_subset<ObjectSet>(rng, g);
    auto x2 = x1 | testing::random_subset<ObjectSet>(rng, g);
    auto a = testing::random_subset<AttributeSet>(rng, m);

    AttributeSet i1 = derive_intent(ctx, x1);
    CHECK(i1.indices() == testing::common_attributes(ctx, x1.indices()));
    CHECK(derive_extent(ctx, a).indices() == testing::common_objects(ctx, a.indices()));
    // Antitone, extensive, and the triple-prime law.
    CHECK(derive_intent(ctx, x2).is_subset_of(i1));
    CHECK(x1.is_subset_of(derive_extent(ctx, i1)));
    CHECK(a.is_subset_of(derive_intent(ctx, derive_extent(ctx, a))));
    CHECK(derive_intent(ctx, derive_extent(ctx, i1)) == i1);
    // X ⊆ B' iff B ⊆ X'.
    CHECK(x1.is_subset_of(derive_extent(ctx, a)) == a.is_subset_of(i1));
  }
}

TEST_CASE("lattices of random contexts match both oracles") {
  Rng rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    FormalContext ctx = testing::random_context(rng, 8, 8);
    CAPTURE(format_context(ctx));
    ConceptLattice lat = build_lattice(ctx);
    auto got = testing::lattice_concepts(lat);
    CHECK(got == testing::closure_oracle(ctx));
    CHECK(got == testing::rectangle_oracle(ctx));
    auto edges = lat.cover_edges();
    CHECK(std::set(edges.begin(), edges.end()) == testing::cover_oracle(lat));
    for (const auto& c : lat.concepts()) CHECK(is_formal_concept(ctx, c.extent, c.intent));
    // Lectic order: ids follow next_closure from the closure of the empty set.
    auto intents = next_closure_intents(ctx, 1u << 10);
    REQUIRE(intents.size() == lat.size());
    for (std::size_t i = 0; i < intents.size(); ++i) CHECK(lat.concept_at(i).intent == intents[i]);
  }
}

TEST_CASE("apposition of an attribute split restores the context") {
  Rng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    FormalContext ctx = testing::random_context(rng, 7, 8);
    std::size_t m = ctx.attribute_count();
    std::size_t k = testing::uniform(rng, 0, m);
    AttributeSet left(m), right(m);
    for (std::size_t j = 0; j < m; ++j) (j < k ? left : right).insert(j);
    FormalContext back = apposition(select_attributes(ctx, left), select_attributes(ctx, right));
    CHECK(back.objects() == ctx.objects());
    CHECK(back.attributes() == ctx.attributes());
    for (std::size_t g = 0; g < ctx.object_count(); ++g) CHECK(back.row(g) == ctx.row(g));
  }
}

namespace {

// A random theory as markup plus an independent model check.
struct RandomTheory {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> subtypes;
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> sequents;
  // Partitions: (genus type index or n for the theory genus, parts).
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> partitions;

  static std::string name(std::size_t i) { return "t" + std::to_string(i); }

  std::string text() const {
    std::string out = "<Theory name=\"random\" genus=\"g\">\n";
    for (std::size_t i = 0; i < n; ++i) out += "  <Type.Object name=\"" + name(i) + "\"/>\n";
    for (const auto& [a, b] : subtypes) out += "  <subtype specific=\"" + name(a) + "\" generic=\"" + name(b) + "\"/>\n";
    for (const auto& [gamma, delta] : sequents) {
      out += "  <sequent>";
      for (auto i : gamma) out += "<li type=\"" + name(i) + "\"/>";
      out += "<entails/>";
      for (auto i : delta) out += "<li type=\"" + name(i) + "\"/>";
      out += "</sequent>\n";
    }
    for (const auto& [genus, parts] : partitions) {
      out += genus == n ? "  <partition>" : "  <partition genus=\"" + name(genus) + "\">";
      for (auto i : parts) out += "<li type=\"" + name(i) + "\"/>";
      out += "</partition>\n";
    }
    return out + "</Theory>\n";
  }

  bool model(std::uint64_t mask) const {
    auto in = [&](std::size_t i) { return i == n || (mask >> i & 1) != 0; };
    for (const auto& [a, b] : subtypes) {
      if (in(a) && !in(b)) return false;
    }
    for (const auto& [gamma, delta] : sequents) {
      bool all = std::all_of(gamma.begin(), gamma.end(), in);
      bool any = std::any_of(delta.begin(), delta.end(), in);
      if (all && !any) return false;
    }
    for (const auto& [genus, parts] : partitions) {
      std::size_t hits = std::count_if(parts.begin(), parts.end(), in);
      if (in(genus) ? hits != 1 : hits != 0) return false;
    }
    return true;
  }

  std::vector<std::string> model_names() const {
    std::vector<std::string> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      if (!model(mask)) continue;
      std::string s = "{";
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) s += (s.size() > 1 ? "," : "") + name(i);
      }
      out.push_back(s + "}");
    }
    return out;
  }
};

RandomTheory random_theory(Rng& rng) {
  RandomTheory t;
  t.n = testing::uniform(rng, 1, 6);
  auto pick = [&] { return testing::uniform(rng, 0, t.n - 1); };
  auto distinct = [&](std::size_t max) {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < t.n; ++i) {
      if (v.size() < max && testing::coin(rng, 0.4)) v.push_back(i);
    }
    return v;
  };
  for (std::size_t k = testing::uniform(rng, 0, 2); k > 0; --k) {
    std::size_t a = pick(), b = pick();
    if (a != b) t.subtypes.emplace_back(a, b);
  }
  for (std::size_t k = testing::uniform(rng, 0, 2); k > 0; --k) t.sequents.emplace_back(distinct(2), distinct(2));
  if (testing::coin(rng, 0.6)) {
    auto parts = distinct(t.n);
    std::size_t genus = testing::coin(rng, 0.5) ? t.n : pick();
    parts.erase(std::remove(parts.begin(), parts.end(), genus), parts.end());
    if (!parts.empty()) t.partitions.emplace_back(genus, parts);
  }
  return t;
}

}  // namespace

TEST_CASE("random theories round-trip and keep their models when desugared") {
  Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    RandomTheory t = random_theory(rng);
    CAPTURE(t.text());
    Document doc = parse(t.text());
    CHECK(parse(serialize(doc)) == doc);
    Document flat = desugar(doc);
    CHECK(parse(serialize(flat)) == flat);

    auto want = t.model_names();
    CHECK(models_of_theory(theory_of(doc.root)).objects() == want);
    CHECK(models_of_theory(theory_of(flat.root)).objects() == want);
  }
}

TEST_CASE("answers and sql agree with a direct oracle on random block worlds") {
  Rng rng(505);
  for (int trial = 0; trial < 150; ++trial) {
    testing::BlockWorld w = testing::random_world(rng);
    KnowledgeBase kb = testing::load_world(w);
    Database db = relational_rendering(kb);
    for (int k = 0; k < 4; ++k) {
      testing::RandomQuery rq = testing::random_query(rng, w);
      CAPTURE(rq.text());
      Expr q = parse_query(rq.text());
      auto want = rq.oracle(w);
      CHECK(answer(q, kb) == want);
      CHECK(answer(desugar_query(q, kb), kb) == want);
      SqlQuery sql = to_sql(q, kb);
      CAPTURE(sql.render());
      CHECK(run_sql(sql, db) == want);
    }
  }
}
