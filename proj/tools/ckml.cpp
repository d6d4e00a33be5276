// Command-line front end: lattice export, conceptual scaling, queries and
// validation over context and CKML files.
//
// Exit codes: 0 ok, 1 data violations, 2 input errors, 3 resource limits,
// 4 query outside the SQL-translatable fragment.

#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "ckml/context_io.hpp"
#include "ckml/error.hpp"
#include "ckml/lattice.hpp"
#include "ckml/lattice_export.hpp"
#include "ckml/markup.hpp"
#include "ckml/ontology.hpp"
#include "ckml/query.hpp"
#include "ckml/scaling.hpp"
#include "ckml/theory.hpp"

namespace fs = std::filesystem;
using namespace ckml;

namespace {

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kInputError = 2;
constexpr int kLimit = 3;
constexpr int kUnsupported = 4;

PathMap path_map() {
  const char* env = std::getenv("CKML_PATH_MAP");
  if (!env || !*env) return {};
  return read_path_map(env);
}

KnowledgeBase load_kb(const std::vector<std::string>& files) {
  std::vector<fs::path> paths(files.begin(), files.end());
  return KnowledgeBase::load_files(paths, path_map());
}

FormalContext load_context(const std::string& file, const std::string& labels) {
  FormalContext ctx = read_context_file(file);
  if (!labels.empty()) ctx = apply_labels_file(ctx, labels);
  return ctx;
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out.empty() ? "facet" : out;
}

// Concept count by closing every attribute subset.
std::size_t brute_force_count(const FormalContext& ctx) {
  const std::size_t m = ctx.attribute_count();
  if (m > 20) throw LimitError("oracle: " + std::to_string(m) + " attributes exceed the limit of 20");
  std::set<std::vector<std::size_t>> intents;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    AttributeSet a(m);
    for (std::size_t j = 0; j < m; ++j) {
      if (mask >> j & 1) a.insert(j);
    }
    AttributeSet closed = close_intent(ctx, a);
    std::vector<std::size_t> key;
    for (std::size_t j = 0; j < m; ++j) {
      if (closed.contains(j)) key.push_back(j);
    }
    intents.insert(std::move(key));
  }
  return intents.size();
}

// Sequent text using the context's own attribute names where a label matches.
std::string sequent_text(const FormalContext& ctx, const Sequent& s) {
  auto canon = [&](const std::vector<std::string>& side) {
    std::vector<std::string> out;
    for (const auto& n : side) {
      auto j = ctx.find_attribute(n);
      out.push_back(j ? ctx.attributes()[*j] : n);
    }
    return out;
  };
  return to_string(Sequent(canon(s.antecedent), canon(s.consequent)));
}

int cmd_lattice(const std::string& file, const std::string& labels, const std::string& format, std::size_t max) {
  FormalContext ctx = load_context(file, labels);
  LatticeOptions opts;
  opts.max_concepts = max;
  LatticeFormat fmt = parse_lattice_format(format);
  ConceptLattice lat = build_lattice(ctx, opts);
  std::cout << export_lattice(lat, fmt);
  std::cerr << lat.size() << " concepts\n";
  return kOk;
}

int cmd_oracle(const std::string& file) {
  std::size_t n = brute_force_count(read_context_file(file));
  std::cout << n << '\n';
  std::cerr << n << " concepts\n";
  return kOk;
}

int cmd_scale(const std::vector<std::string>& files, const std::vector<std::string>& names, bool all,
              const std::string& out_dir) {
  KnowledgeBase kb = load_kb(files);
  std::vector<ConcreteScale> scales = compile_scales(kb);
  std::vector<const ConcreteScale*> chosen;
  if (all) {
    for (const auto& s : scales) chosen.push_back(&s);
  }
  for (const auto& n : names) {
    bool found = false;
    for (const auto& s : scales) {
      if (s.name == n) {
        chosen.push_back(&s);
        found = true;
      }
    }
    if (!found) {
      std::string known;
      for (const auto& s : scales) known += (known.empty() ? "" : ", ") + s.name;
      throw ScaleError("no scale named '" + n + "' (available: " + (known.empty() ? "none" : known) + ")");
    }
  }
  if (chosen.empty()) throw ScaleError("no scales selected; use --scale NAME or --all");

  std::vector<Facet> facets;
  for (const auto* s : chosen) facets.push_back(realize(*s, kb));
  FormalContext space = build_space(facets);

  for (const auto& f : facets) {
    for (const auto& v : f.violations) {
      std::cerr << f.name << ": " << to_string(v.sequent) << " violated by " << v.object << '\n';
    }
  }
  if (out_dir.empty()) {
    write_context(std::cout, space);
    return kOk;
  }
  fs::create_directories(out_dir);
  for (const auto& f : facets) {
    fs::path p = fs::path(out_dir) / (file_stem(f.name) + ".cxt");
    write_context_file(p, f.context);
    std::cout << p.string() << '\n';
  }
  fs::path p = fs::path(out_dir) / "space.cxt";
  write_context_file(p, space);
  std::cout << p.string() << '\n';
  return kOk;
}

int cmd_query(const std::vector<std::string>& files, const std::string& text, bool emit_sql, bool check) {
  KnowledgeBase kb = load_kb(files);
  Expr q = parse_query(text);
  if (emit_sql) {
    std::cout << to_sql(q, kb).render();
    return kOk;
  }
  std::set<std::string> answers = answer(q, kb);
  for (const auto& a : answers) std::cout << a << '\n';
  if (check) {
    std::set<std::string> via_sql = run_sql(to_sql(q, kb), kb);
    if (via_sql != answers) {
      std::cerr << "check failed: SQL evaluation returned";
      for (const auto& a : via_sql) std::cerr << ' ' << a;
      std::cerr << '\n';
      return kViolations;
    }
    std::cerr << "check passed\n";
  }
  return kOk;
}

int cmd_check(const std::vector<std::string>& files, const std::string& context, const std::string& labels) {
  std::size_t count = 0;
  if (!context.empty()) {
    FormalContext ctx = load_context(context, labels);
    for (const auto& f : files) {
      Document doc = desugar(parse_file(f));
      std::vector<Theory> theories;
      Theory loose;
      std::function<void(const Node&)> walk = [&](const Node& n) {
        for (const auto& c : n.children) {
          if (c.kind == NodeKind::Theory) theories.push_back(theory_of(c));
          else if (c.kind == NodeKind::Sequent) {
            for (auto& s : sequents_of(c)) loose.sequents.push_back(std::move(s));
          } else if (c.kind == NodeKind::Root) walk(c);
        }
      };
      if (doc.root.kind == NodeKind::Theory) theories.push_back(theory_of(doc.root));
      else walk(doc.root);
      if (!loose.sequents.empty()) theories.push_back(loose);
      for (const auto& th : theories) {
        for (const auto& v : theory_violations(ctx, th)) {
          std::cout << sequent_text(ctx, v.sequent) << " violated by " << v.object << '\n';
          ++count;
        }
      }
    }
  } else {
    KnowledgeBase kb = load_kb(files);
    for (const auto& v : kb.validate()) {
      std::cout << v.kind << ": " << v.message << '\n';
      ++count;
    }
  }
  std::cerr << count << (count == 1 ? " violation\n" : " violations\n");
  return count ? kViolations : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formal concept analysis and CKML knowledge-base tool"};
  app.require_subcommand(1);

  std::string file, labels, format = "dot";
  std::size_t max_concepts = LatticeOptions{}.max_concepts;
  auto* lattice = app.add_subcommand("lattice", "Build and export the concept lattice of a context");
  lattice->add_option("context", file, "Context file")->required()->check(CLI::ExistingFile);
  lattice->add_option("--labels", labels, "Label sidecar file")->check(CLI::ExistingFile);
  lattice->add_option("--format", format, "dot, structured or ascii-hasse");
  lattice->add_option("--max-concepts", max_concepts, "Abort once more concepts exist");

  auto* oracle = app.add_subcommand("oracle", "Count concepts by exhaustive closure (at most 20 attributes)");
  oracle->add_option("context", file, "Context file")->required()->check(CLI::ExistingFile);

  std::vector<std::string> files, scale_names;
  std::string out_dir;
  bool all = false;
  auto* scale = app.add_subcommand("scale", "Realize conceptual scales and write facet and space contexts");
  scale->add_option("files", files, "CKML documents")->required()->check(CLI::ExistingFile);
  scale->add_option("--scale", scale_names, "Scale name (repeatable)");
  scale->add_flag("--all", all, "Realize every declared scale");
  scale->add_option("--out-dir", out_dir, "Directory for <facet>.cxt and space.cxt");

  std::string query_text;
  bool emit_sql = false, check_sql = false;
  auto* query = app.add_subcommand("query", "Answer a question-marked query");
  query->add_option("files", files, "CKML documents")->required()->check(CLI::ExistingFile);
  query->add_option("--query", query_text, "Query expression markup")->required();
  auto* emit = query->add_flag("--emit-sql", emit_sql, "Print the SQL translation instead of answers");
  query->add_flag("--check", check_sql, "Also evaluate the SQL translation and compare")->excludes(emit);

  std::string context;
  auto* check = app.add_subcommand("check", "Validate collections, or check theories against a context");
  check->add_option("files", files, "CKML documents")->required()->check(CLI::ExistingFile);
  check->add_option("--context", context, "Context to check theory sequents against")->check(CLI::ExistingFile);
  check->add_option("--labels", labels, "Label sidecar for --context")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*lattice) return cmd_lattice(file, labels, format, max_concepts);
    if (*oracle) return cmd_oracle(file);
    if (*scale) return cmd_scale(files, scale_names, all, out_dir);
    if (*query) return cmd_query(files, query_text, emit_sql, check_sql);
    if (*check) return cmd_check(files, context, labels);
  } catch (const LimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kLimit;
  } catch (const UnsupportedQueryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnsupported;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
