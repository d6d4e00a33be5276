#pragma once

// Fixtures, random generators and brute-force oracles shared by the test
// binaries. The oracles read the incidence matrix directly and never call the
// library's derivation or lattice code.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ckml/context.hpp"
#include "ckml/context_io.hpp"
#include "ckml/lattice.hpp"
#include "ckml/markup.hpp"
#include "ckml/ontology.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(CKML_FIXTURES) / rel; }

inline ckml::FormalContext living() {
  return ckml::apply_labels_file(ckml::read_context_file(fixture("living/living.cxt")),
                                 fixture("living/living.labels"));
}

inline ckml::PathMap block_paths() { return ckml::read_path_map(fixture("blocks/paths.txt")); }

inline std::vector<std::filesystem::path> block_files() {
  std::vector<std::filesystem::path> out;
  for (const char* f : {"db.ckml", "oodb.ckml", "rdb.ckml", "rdb-blocks.ckml", "rdb-support.ckml",
                        "oodb-collection.ckml", "block-theory.ckml"}) {
    out.push_back(fixture(std::string("blocks/") + f));
  }
  return out;
}

inline const ckml::KnowledgeBase& blocks() {
  static const ckml::KnowledgeBase kb = ckml::KnowledgeBase::load_files(block_files(), block_paths());
  return kb;
}

// The relational data alone (Table layout: Block rows plus Support rows).
inline const ckml::KnowledgeBase& table_blocks() {
  static const ckml::KnowledgeBase kb = ckml::KnowledgeBase::load_files(
      {fixture("blocks/rdb-blocks.ckml"), fixture("blocks/rdb-support.ckml")}, block_paths());
  return kb;
}

inline ckml::PathMap intel_paths() { return ckml::read_path_map(fixture("intel/paths.txt")); }

inline const ckml::KnowledgeBase& intel() {
  static const ckml::KnowledgeBase kb = ckml::KnowledgeBase::load_files(
      {fixture("intel/intel.ckml"), fixture("intel/releases.ckml"), fixture("intel/theories.ckml")}, intel_paths());
  return kb;
}

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline ckml::FormalContext random_context(Rng& rng, std::size_t max_objects, std::size_t max_attributes) {
  std::size_t g = uniform(rng, 0, max_objects), m = uniform(rng, 0, max_attributes);
  double density = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
  std::vector<std::string> objects, attributes, rows;
  for (std::size_t i = 0; i < g; ++i) objects.push_back("g" + std::to_string(i));
  for (std::size_t j = 0; j < m; ++j) attributes.push_back("m" + std::to_string(j));
  for (std::size_t i = 0; i < g; ++i) {
    std::string row;
    for (std::size_t j = 0; j < m; ++j) row += coin(rng, density) ? 'X' : '.';
    rows.push_back(row);
  }
  return ckml::FormalContext::from_cross_table(objects, attributes, rows);
}

template <class Set>
Set random_subset(Rng& rng, std::size_t universe) {
  Set s(universe);
  for (std::size_t i = 0; i < universe; ++i) {
    if (coin(rng, 0.4)) s.insert(i);
  }
  return s;
}

// Concepts as (sorted object indices, sorted attribute indices).
using RawConcept = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

inline std::vector<std::size_t> common_attributes(const ckml::FormalContext& ctx, const std::vector<std::size_t>& objs) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < ctx.attribute_count(); ++j) {
    bool all = std::all_of(objs.begin(), objs.end(), [&](std::size_t i) { return ctx.incident(i, j); });
    if (all) out.push_back(j);
  }
  return out;
}

inline std::vector<std::size_t> common_objects(const ckml::FormalContext& ctx, const std::vector<std::size_t>& attrs) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ctx.object_count(); ++i) {
    bool all = std::all_of(attrs.begin(), attrs.end(), [&](std::size_t j) { return ctx.incident(i, j); });
    if (all) out.push_back(i);
  }
  return out;
}

inline std::vector<std::size_t> bits_of(std::uint64_t mask, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (mask >> k & 1) out.push_back(k);
  }
  return out;
}

// Every concept as the double-prime closure of some attribute subset.
inline std::set<RawConcept> closure_oracle(const ckml::FormalContext& ctx) {
  std::set<RawConcept> out;
  const std::size_t m = ctx.attribute_count();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    auto ext = common_objects(ctx, bits_of(mask, m));
    out.insert({ext, common_attributes(ctx, ext)});
  }
  return out;
}

// Every maximal all-cross rectangle, by scanning object subsets.
inline std::set<RawConcept> rectangle_oracle(const ckml::FormalContext& ctx) {
  std::set<RawConcept> out;
  const std::size_t g = ctx.object_count();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g); ++mask) {
    auto objs = bits_of(mask, g);
    auto attrs = common_attributes(ctx, objs);
    bool maximal = true;
    for (std::size_t i = 0; i < g && maximal; ++i) {
      if (mask >> i & 1) continue;
      maximal = !std::all_of(attrs.begin(), attrs.end(), [&](std::size_t j) { return ctx.incident(i, j); });
    }
    if (maximal) out.insert({objs, attrs});
  }
  return out;
}

inline std::set<RawConcept> lattice_concepts(const ckml::ConceptLattice& lat) {
  std::set<RawConcept> out;
  for (const auto& c : lat.concepts()) out.insert({c.extent.indices(), c.intent.indices()});
  return out;
}

// Cover pairs (lower, upper) of a finite order given by extent inclusion:
// the transitive reduction of the strict order.
inline std::set<std::pair<std::size_t, std::size_t>> cover_oracle(const ckml::ConceptLattice& lat) {
  const auto& cs = lat.concepts();
  auto below = [&](std::size_t a, std::size_t b) {
    return a != b && cs[a].extent.is_subset_of(cs[b].extent) && cs[a].extent != cs[b].extent;
  };
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < cs.size(); ++a) {
    for (std::size_t b = 0; b < cs.size(); ++b) {
      if (!below(a, b)) continue;
      bool direct = true;
      for (std::size_t c = 0; c < cs.size() && direct; ++c) direct = !(below(a, c) && below(c, b));
      if (direct) out.insert({cs[a].id, cs[b].id});
    }
  }
  return out;
}

// A small block world in relational form: blocks with random shape and
// colour plus random support pairs.
struct BlockWorld {
  std::vector<std::tuple<std::string, std::string, std::string>> blocks;  // id, shape, color
  std::vector<std::pair<std::string, std::string>> support;

  std::string collection_text() const {
    std::ostringstream out;
    out << "<CKML>\n  <Collection.Block ontology=\"http://www.database.org/ontology/rdb/\">\n";
    for (const auto& [id, shape, color] : blocks) {
      out << "    <Block id=\"" << id << "\" shape=\"Shape#" << shape << "\" color=\"Color#" << color << "\"/>\n";
    }
    out << "  </Collection.Block>\n  <Collection.Support ontology=\"http://www.database.org/ontology/rdb/\">\n";
    for (const auto& [a, b] : support) {
      out << "    <support source.Instance=\"" << a << "\" target.Instance=\"" << b << "\"/>\n";
    }
    out << "  </Collection.Support>\n</CKML>\n";
    return out.str();
  }
};

inline const std::vector<std::string>& shapes() {
  static const std::vector<std::string> v{"cubical", "prismatic", "pyramidal", "cylindrical", "conical", "spherical"};
  return v;
}

inline const std::vector<std::string>& shape_types() {
  static const std::vector<std::string> v{"Cube", "Prism", "Pyramid", "Cylinder", "Cone", "Sphere"};
  return v;
}

inline const std::vector<std::string>& colors() {
  static const std::vector<std::string> v{"red", "orange", "yellow", "green", "blue", "violet", "brown", "gray"};
  return v;
}

inline BlockWorld random_world(Rng& rng, std::size_t max_blocks = 10) {
  BlockWorld w;
  std::size_t n = uniform(rng, 1, max_blocks);
  for (std::size_t i = 0; i < n; ++i) {
    w.blocks.emplace_back(std::string(1, static_cast<char>('a' + i)), shapes()[uniform(rng, 0, 3)],
                          colors()[uniform(rng, 0, 3)]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && coin(rng, 0.25)) w.support.emplace_back(std::get<0>(w.blocks[i]), std::get<0>(w.blocks[j]));
    }
  }
  return w;
}

inline ckml::KnowledgeBase load_world(const BlockWorld& w) {
  std::vector<ckml::Document> docs{ckml::parse(w.collection_text())};
  return ckml::KnowledgeBase::load(docs, block_paths());
}

// One participant of a random support query.
struct QuerySide {
  enum Kind { Any, ShapeType, Color, ShapeColor, Constant } kind = Any;
  std::size_t shape = 0;
  std::size_t color = 0;
  std::string constant;
};

// A query in the translatable fragment: the support relation in one of its
// forms, the marker on one side, and shape/colour/type constraints.
struct RandomQuery {
  QuerySide source, target;
  bool marker_target = true;
  int form = 0;

  std::string text() const {
    std::string extra;
    auto term = [&](const QuerySide& s, bool is_marker, const std::string& var) -> std::string {
      std::string id = is_marker ? "?" : var;
      switch (s.kind) {
        case QuerySide::Any:
          return id;
        case QuerySide::ShapeType:
          return shape_types()[s.shape] + "#" + id;
        case QuerySide::Color:
          extra += "<DB:Block id=\"" + id + "\" color=\"Color#" + colors()[s.color] + "\"/>";
          return id;
        case QuerySide::ShapeColor:
          extra += "<DB:Block id=\"" + id + "\" shape=\"Shape#" + shapes()[s.shape] + "\" color=\"Color#" +
                   colors()[s.color] + "\"/>";
          return id;
        default:
          return s.constant;
      }
    };
    std::string src = term(source, !marker_target, "x");
    std::string tgt = term(target, marker_target, "y");
    std::string atom;
    switch (form) {
      case 0:
        atom = "<DB:Support inst=\"" + src + "\" thme=\"" + tgt + "\"/>";
        break;
      case 1:
        atom = "<DB:support source.Instance=\"" + src + "\" target.Instance=\"" + tgt + "\"/>";
        break;
      case 2:
        atom = "<RDB:support source.Instance=\"" + src + "\" target.Instance=\"" + tgt + "\"/>";
        break;
      default:
        atom = "<OODB:support source.Instance=\"" + src + "\" target.Instance=\"" + tgt + "\"/>";
        break;
    }
    std::string body = atom + extra;
    // Variables need a quantifier; constants and markers do not.
    if (marker_target && source.kind != QuerySide::Constant) {
      body = "<Exists var=\"x\" type=\"DB:Block\">" + body + "</Exists>";
    }
    if (!marker_target && target.kind != QuerySide::Constant) {
      body = "<Exists var=\"y\" type=\"DB:Block\">" + body + "</Exists>";
    }
    return body;
  }

  // Direct evaluation over the world's tuples.
  std::set<std::string> oracle(const BlockWorld& w) const {
    auto ok = [&](const QuerySide& s, const std::string& id) {
      auto it = std::find_if(w.blocks.begin(), w.blocks.end(), [&](const auto& b) { return std::get<0>(b) == id; });
      if (it == w.blocks.end()) return false;
      const auto& [_, shape, color] = *it;
      switch (s.kind) {
        case QuerySide::Any:
          return true;
        case QuerySide::ShapeType:
          return shape == shapes()[s.shape];
        case QuerySide::Color:
          return color == colors()[s.color];
        case QuerySide::ShapeColor:
          return shape == shapes()[s.shape] && color == colors()[s.color];
        default:
          return id == s.constant;
      }
    };
    std::set<std::string> out;
    for (const auto& [a, b] : w.support) {
      if (ok(source, a) && ok(target, b)) out.insert(marker_target ? b : a);
    }
    return out;
  }
};

inline RandomQuery random_query(Rng& rng, const BlockWorld& w) {
  RandomQuery q;
  q.marker_target = coin(rng, 0.5);
  q.form = static_cast<int>(uniform(rng, 0, 3));
  auto side = [&](bool is_marker) {
    QuerySide s;
    s.kind = static_cast<QuerySide::Kind>(uniform(rng, 0, is_marker ? 3 : 4));
    s.shape = uniform(rng, 0, 3);
    s.color = uniform(rng, 0, 3);
    if (s.kind == QuerySide::Constant) s.constant = std::get<0>(w.blocks[uniform(rng, 0, w.blocks.size() - 1)]);
    return s;
  };
  q.source = side(!q.marker_target);
  q.target = side(q.marker_target);
  return q;
}

}  // namespace testing
