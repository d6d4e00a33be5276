// Acceptance gate: one PASS/FAIL line per criterion. Exits nonzero if any
// criterion fails.

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ckml/context.hpp"
#include "ckml/lattice.hpp"
#include "ckml/markup.hpp"
#include "ckml/query.hpp"
#include "ckml/scaling.hpp"
#include "ckml/theory.hpp"
#include "support.hpp"

using namespace ckml;

namespace {

// Wall-clock budgets, in milliseconds.
constexpr double kLivingBudgetMs = 1000.0;
constexpr double kOracleBudgetMs = 10000.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string join(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& v : s) out += (out.size() > 1 ? "," : "") + v;
  return out + "}";
}

std::string squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::vector<std::string> extent_of(const FormalContext& ctx, const std::string& attribute) {
  std::vector<std::string> out;
  std::size_t m = ctx.attribute_index(attribute);
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    if (ctx.incident(g, m)) out.push_back(ctx.objects()[g]);
  }
  return out;
}

Outcome living_lattice(double& ms) {
  Outcome o;
  FormalContext ctx = testing::living();
  auto start = std::chrono::steady_clock::now();
  ConceptLattice lat = build_lattice(ctx);
  ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  o.require(lat.size() == 19, "expected 19 concepts, got " + std::to_string(lat.size()));
  auto c9 = lat.find_by_extent(ctx.object_set({"Reed", "Maize"}));
  auto c4 = lat.find_by_extent(ctx.object_set({"Spike-Weed", "Reed", "Maize"}));
  o.require(c9 && ctx.attribute_names(lat.concept_at(*c9).intent) ==
                      std::vector<std::string>{"nw", "ll", "nc", "1lg"},
            "concept {Reed,Maize} missing or wrong intent");
  o.require(c4 && ctx.attribute_names(lat.concept_at(*c4).intent) == std::vector<std::string>{"nw", "nc", "1lg"},
            "concept {Spike-Weed,Reed,Maize} missing or wrong intent");
  o.require(c9 && c4 && leq(lat, *c9, *c4), "order between the two concepts");
  o.require(ms < kLivingBudgetMs, "took " + std::to_string(ms) + " ms");
  return o;
}

Outcome living_sequents() {
  Outcome o;
  FormalContext ctx = testing::living();
  std::vector<Sequent> hold{Sequent({"nc", "mo"}, {}), Sequent({"2lg", "1lg"}, {}), Sequent({"sk"}, {"lb"}),
                            Sequent({"lb"}, {"mo"}),     Sequent({"1lg"}, {"nc"}),     Sequent({}, {"mo", "nc"})};
  for (const auto& s : hold) o.require(satisfies(ctx, s).holds, to_string(s) + " should hold");
  Satisfaction cover = satisfies(ctx, Sequent({}, {"ll", "mo"}));
  o.require(!cover.holds, "⊢ ll, mo should fail");
  o.require(cover.witness == "SW", "witness " + cover.witness.value_or("none") + ", expected SW");
  return o;
}

Outcome partition_expansion() {
  Outcome o;
  auto got = expand_partition("Needs Water", {"Needs Chlorophyll", "Is Motile"});
  std::set<Sequent> want{
      Sequent({"Needs Chlorophyll"}, {"Needs Water"}),
      Sequent({"Is Motile"}, {"Needs Water"}),
      Sequent({"Needs Water"}, {"Needs Chlorophyll", "Is Motile"}),
      Sequent({"Needs Chlorophyll", "Is Motile"}, {}),
  };
  o.require(got.size() == 4, std::to_string(got.size()) + " sequents");
  o.require(std::set<Sequent>(got.begin(), got.end()) == want, "sequent set differs");
  return o;
}

Outcome apposition_identity() {
  Outcome o;
  FormalContext ctx = testing::living();
  const std::size_t m = ctx.attribute_count();
  std::size_t splits = 0;
  auto check = [&](const AttributeSet& left) {
    ++splits;
    FormalContext ap = apposition(select_attributes(ctx, left), select_attributes(ctx, left.complement()));
    bool same = ap.objects() == ctx.objects() && ap.attribute_count() == m;
    for (std::size_t j = 0; j < ap.attribute_count() && same; ++j) {
      std::size_t orig = ctx.attribute_index(ap.attributes()[j]);
      for (std::size_t g = 0; g < ctx.object_count(); ++g) same = same && ap.incident(g, j) == ctx.incident(g, orig);
    }
    if (!same) o.require(false, "split " + std::to_string(splits) + " differs");
    std::size_t n = build_lattice(ap).size();
    if (n != 19) o.require(false, "split " + std::to_string(splits) + " has " + std::to_string(n) + " concepts");
  };
  // Every 3/6 split of the nine attributes.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (std::popcount(mask) != 3) continue;
    AttributeSet left(m);
    for (auto j : testing::bits_of(mask, m)) left.insert(j);
    check(left);
  }
  testing::Rng rng(4);
  for (int i = 0; i < 20; ++i) check(testing::random_subset<AttributeSet>(rng, m));
  o.detail = o.pass ? std::to_string(splits) + " splits" : o.detail;
  return o;
}

Outcome lattice_oracle(double& ms) {
  Outcome o;
  testing::Rng rng(5);
  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 200; ++i) {
    FormalContext ctx = testing::random_context(rng, 7, 7);
    if (testing::lattice_concepts(build_lattice(ctx)) != testing::closure_oracle(ctx)) {
      o.require(false, "context " + std::to_string(i) + " differs");
    }
  }
  ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  o.require(ms < kOracleBudgetMs, "took " + std::to_string(ms) + " ms");
  return o;
}

Outcome block_query() {
  Outcome o;
  const KnowledgeBase& kb = testing::table_blocks();
  const std::set<std::string> expected{"g"};
  const std::string listing =
      "SELECT Supportee FROM support, Block x, Block y WHERE Supporter = x.ID AND Supportee = y.ID "
      "AND x.Shape = 'cylindrical' AND y.Shape = 'prismatic'";
  Expr q = parse_query(R"(<DB:Support inst="Cylinder" thme="Prism#?"/>)");
  auto got = answer(q, kb);
  o.require(got == expected, "answer " + join(got) + ", expected {g}");
  SqlQuery sql = to_sql(q, kb);
  o.require(squash(sql.render()) == listing, "SQL text differs: " + squash(sql.render()));
  auto rows = run_sql(sql, relational_rendering(kb));
  o.require(rows == expected, "run_sql " + join(rows) + ", expected {g}");
  return o;
}

Outcome sql_equivalence() {
  Outcome o;
  testing::Rng rng(7);
  std::size_t queries = 0;
  for (int w = 0; w < 50; ++w) {
    testing::BlockWorld world = testing::random_world(rng, 10);
    KnowledgeBase kb = testing::load_world(world);
    Database db = relational_rendering(kb);
    for (int k = 0; k < 20; ++k, ++queries) {
      testing::RandomQuery rq = testing::random_query(rng, world);
      Expr q = parse_query(rq.text());
      auto direct = answer(q, kb);
      auto via_sql = run_sql(to_sql(q, kb), db);
      if (direct != via_sql) {
        o.require(false, "world " + std::to_string(w) + ": " + join(direct) + " vs " + join(via_sql));
      }
    }
  }
  if (o.pass) o.detail = std::to_string(queries) + " queries";
  return o;
}

Outcome scaling_facets() {
  Outcome o;
  const KnowledgeBase& blocks = testing::table_blocks();
  auto scales = compile_scales(blocks);
  auto shape = std::find_if(scales.begin(), scales.end(), [](const ConcreteScale& s) { return s.name == "shape"; });
  o.require(shape != scales.end(), "no shape interpretation");
  if (shape != scales.end()) {
    Facet f = realize(*shape, blocks);
    o.require(extent_of(f.context, "Cylinder") == std::vector<std::string>{"a", "c", "f", "h"}, "Cylinder extent");
    o.require(extent_of(f.context, "Pyramid") == std::vector<std::string>{"b", "i"}, "Pyramid extent");
  }

  const KnowledgeBase& intel = testing::intel();
  auto intel_scales = compile_scales(intel);
  auto date = std::find_if(intel_scales.begin(), intel_scales.end(),
                           [](const ConcreteScale& s) { return s.name == "Release Date"; });
  o.require(date != intel_scales.end(), "no release date scale");
  if (date != intel_scales.end()) {
    Facet f = realize(*date, intel);
    ConceptLattice lat = build_lattice(f.context);
    o.require(f.context.object_count() == 3, "expected 3 releases");
    // A chain: every pair of concepts is comparable.
    bool chain = true;
    for (std::size_t a = 0; a < lat.size(); ++a) {
      for (std::size_t b = 0; b < lat.size(); ++b) chain = chain && (leq(lat, a, b) || leq(lat, b, a));
    }
    o.require(chain, "release date lattice is not a chain");
  }
  return o;
}

Outcome parser_corpus() {
  Outcome o;
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(testing::fixture("snippets"))) {
    if (entry.path().extension() != ".ckml") continue;
    ++files;
    std::string name = entry.path().filename().string();
    try {
      Document doc = parse_file(entry.path());
      std::string text = serialize(doc);
      Document back = parse(text);
      o.require(back == doc && serialize(back) == text, name + " does not round-trip");
    } catch (const InputError& e) {
      o.require(false, name + ": " + e.what());
    }
  }
  o.require(files == 12, std::to_string(files) + " snippets");
  Document part = desugar(parse_file(testing::fixture("snippets/03-partition.ckml")));
  Document listing = parse_file(testing::fixture("snippets/04-partition-sequents.ckml"));
  o.require(part.root == listing.root, "desugared partition differs from the sequent listing");
  return o;
}

Outcome galois_triples() {
  Outcome o;
  testing::Rng rng(10);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    FormalContext ctx = testing::random_context(rng, 10, 10);
    auto x = testing::random_subset<ObjectSet>(rng, ctx.object_count());
    auto a = testing::random_subset<AttributeSet>(rng, ctx.attribute_count());
    AttributeSet x1 = derive_intent(ctx, x);
    ObjectSet x2 = derive_extent(ctx, x1);
    bool ok = a.is_subset_of(x1) == x.is_subset_of(derive_extent(ctx, a));
    ok = ok && x.is_subset_of(x2);
    ok = ok && derive_intent(ctx, x2) == x1;
    if (!ok) ++failures;
  }
  o.require(failures == 0, std::to_string(failures) + " failing triples");
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& run) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %-28s %9.1f ms%s%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), ms,
                o.detail.empty() ? "" : "  ", o.detail.c_str());
  };

  double living_ms = 0, oracle_ms = 0;
  report(1, "living lattice", [&] { return living_lattice(living_ms); });
  report(2, "living sequents", living_sequents);
  report(3, "partition expansion", partition_expansion);
  report(4, "apposition identity", apposition_identity);
  report(5, "lattice vs closure oracle", [&] { return lattice_oracle(oracle_ms); });
  report(6, "block query end to end", block_query);
  report(7, "sql equivalence", sql_equivalence);
  report(8, "scaling facets", scaling_facets);
  report(9, "parser corpus", parser_corpus);
  report(10, "galois connection", galois_triples);
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
