#include "ckml/lattice_export.hpp"

#include <sstream>

#include <json.hpp>

#include "text_util.hpp"

namespace ckml {

LatticeFormat parse_lattice_format(std::string_view name) {
  if (name == "dot") return LatticeFormat::Dot;
  if (name == "structured" || name == "json") return LatticeFormat::Structured;
  if (name == "ascii-hasse" || name == "ascii") return LatticeFormat::AsciiHasse;
  throw InputError("unknown lattice format '" + std::string(name) + "' (expected dot, structured or ascii-hasse)");
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string to_dot(const ConceptLattice& lat) {
  const auto& ctx = lat.context();
  std::ostringstream out;
  out << "digraph lattice {\n";
  out << "  rankdir=BT;\n";
  out << "  node [shape=box];\n";
  for (const auto& c : lat.concepts()) {
    std::vector<std::string> attrs, objs;
    for (auto m : lat.own_attributes(c.id)) attrs.push_back(ctx.attributes()[m]);
    for (auto g : lat.own_objects(c.id)) objs.push_back(ctx.objects()[g]);
    out << "  c" << c.id << " [label=\"" << c.id;
    if (!attrs.empty()) out << "\\n" << dot_escape(join(attrs, ", "));
    if (!objs.empty()) out << "\\n" << dot_escape(join(objs, ", "));
    out << "\"];\n";
  }
  for (auto [lower, upper] : lat.cover_edges()) out << "  c" << lower << " -> c" << upper << ";\n";
  out << "}\n";
  return out.str();
}

std::string to_structured(const ConceptLattice& lat) {
  const auto& ctx = lat.context();
  nlohmann::ordered_json doc;
  doc["objects"] = ctx.objects();
  doc["attributes"] = ctx.attributes();
  auto& concepts = doc["concepts"] = nlohmann::ordered_json::array();
  for (const auto& c : lat.concepts()) {
    nlohmann::ordered_json item;
    item["id"] = c.id;
    item["extent"] = ctx.object_names(c.extent);
    item["intent"] = ctx.attribute_names(c.intent);
    concepts.push_back(std::move(item));
  }
  auto& order = doc["order"] = nlohmann::ordered_json::array();
  for (auto [lower, upper] : lat.cover_edges()) order.push_back({{"lower", lower}, {"upper", upper}});
  nlohmann::ordered_json objects = nlohmann::ordered_json::object();
  for (std::size_t g = 0; g < ctx.object_count(); ++g) objects[ctx.objects()[g]] = lat.object_concept(g);
  nlohmann::ordered_json attributes = nlohmann::ordered_json::object();
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m) {
    attributes[ctx.attributes()[m]] = lat.attribute_concept(m);
  }
  doc["labels"] = {{"objects", std::move(objects)}, {"attributes", std::move(attributes)}};
  return doc.dump(2) + "\n";
}

std::string to_ascii(const ConceptLattice& lat) {
  const auto& ctx = lat.context();
  std::ostringstream out;
  for (const auto& c : lat.concepts()) {
    std::vector<std::string> ups;
    for (auto u : lat.upper_covers(c.id)) ups.push_back(std::to_string(u));
    out << c.id << " ^ " << (ups.empty() ? "-" : join(ups, " ")) << " | {"
        << join(ctx.object_names(c.extent), ", ") << "} | {" << join(ctx.attribute_names(c.intent), ", ")
        << "}\n";
  }
  return out.str();
}

}  // namespace

std::string export_lattice(const ConceptLattice& lat, LatticeFormat format) {
  switch (format) {
    case LatticeFormat::Dot:
      return to_dot(lat);
    case LatticeFormat::Structured:
      return to_structured(lat);
    case LatticeFormat::AsciiHasse:
      return to_ascii(lat);
  }
  throw InputError("unknown lattice format");
}

}  // namespace ckml
