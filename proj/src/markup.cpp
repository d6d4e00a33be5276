#include "ckml/markup.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace ckml {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Root: return "CKML";
    case NodeKind::Ontology: return "Ontology";
    case NodeKind::Extends: return "extends";
    case NodeKind::TypeObject: return "Type.Object";
    case NodeKind::TypeData: return "Type.Data";
    case NodeKind::DataValue: return "value";
    case NodeKind::TypeBinaryRelation: return "Type.BinaryRelation";
    case NodeKind::TypeFunction: return "Type.Function";
    case NodeKind::TypeRelation: return "Type.Relation";
    case NodeKind::TypeSet: return "Type.Set";
    case NodeKind::TypeCollection: return "Type.Collection";
    case NodeKind::Theory: return "Theory";
    case NodeKind::Interpretation: return "Interpretation";
    case NodeKind::Foreach: return "Foreach";
    case NodeKind::Where: return "Where";
    case NodeKind::Subrange: return "subrange";
    case NodeKind::ObjectTemplate: return "Object";
    case NodeKind::Sequent: return "sequent";
    case NodeKind::Subtype: return "subtype";
    case NodeKind::Partition: return "partition";
    case NodeKind::Item: return "li";
    case NodeKind::Entails: return "entails";
    case NodeKind::Collection: return "collection";
    case NodeKind::Instance: return "instance";
    case NodeKind::RelationInstance: return "relation instance";
    case NodeKind::Property: return "property";
    case NodeKind::ValueSet: return "value set";
    case NodeKind::Classification: return "classification";
    case NodeKind::Assertion: return "Assertion";
    case NodeKind::Expression: return "Expression";
    case NodeKind::Lambda: return "Lambda";
    case NodeKind::Exists: return "Exists";
    case NodeKind::Forall: return "Forall";
    case NodeKind::Implies: return "implies";
    case NodeKind::Equiv: return "equiv";
    case NodeKind::And: return "and";
    case NodeKind::Or: return "or";
    case NodeKind::Not: return "not";
    case NodeKind::Comment: return "comment";
    case NodeKind::Atom: return "atom";
  }
  return "?";
}

std::string_view to_string(DocumentKind kind) {
  switch (kind) {
    case DocumentKind::Ontology: return "ontology";
    case DocumentKind::Collection: return "collection";
    case DocumentKind::TheorySet: return "theory-set";
    case DocumentKind::KnowledgeBase: return "knowledge-base";
  }
  return "?";
}

const std::string* Node::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string Node::attr_or(std::string_view key, std::string fallback) const {
  if (const auto* v = attr(key)) return *v;
  return fallback;
}

Node& Node::set(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
  return *this;
}

bool operator==(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.tag != b.tag || a.text != b.text || a.children != b.children) return false;
  auto sa = a.attributes, sb = b.attributes;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

namespace {

// ---------------------------------------------------------------------------
// Tokenizer: builds an untyped element tree.

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  std::vector<Node> parse_top_level() {
    std::vector<Node> out;
    skip_prolog();
    for (;;) {
      std::string chars = read_text();
      if (!trim(chars).empty()) fail("text outside of any element");
      if (at_end()) break;
      if (peek_is("</")) fail("unmatched closing tag");
      out.push_back(read_element());
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }

  [[noreturn]] void fail_at(const std::string& what, std::size_t offset) const {
    auto [line, col] = position(offset);
    throw ParseError(what, line, col);
  }

  std::pair<std::size_t, std::size_t> position(std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

  bool at_end() const { return pos_ >= text_.size(); }
  bool peek_is(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void skip_space() {
    while (!at_end() && is_space(text_[pos_])) ++pos_;
  }

  void skip_prolog() {
    skip_space();
    if (peek_is("\xEF\xBB\xBF")) pos_ += 3;
    skip_space();
    if (peek_is("<?xml")) {
      auto end = text_.find("?>", pos_);
      if (end == std::string_view::npos) fail("unterminated XML declaration");
      pos_ = end + 2;
    }
  }

  static bool name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
  }
  static bool name_char(char c) { return name_start(c) || (c >= '0' && c <= '9') || c == '.' || c == '-'; }

  std::string read_name(const char* what) {
    std::size_t start = pos_;
    if (at_end() || !name_start(text_[pos_])) fail(std::string("expected ") + what);
    while (!at_end() && name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw, std::size_t offset) const {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail_at("unterminated character reference", offset + i);
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out.push_back('&');
      else if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else if (!ent.empty() && ent[0] == '#') {
        unsigned long code = 0;
        try {
          code = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')
                     ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                     : std::stoul(std::string(ent.substr(1)), nullptr, 10);
        } catch (const std::exception&) {
          fail_at("invalid character reference", offset + i);
        }
        append_utf8(out, code);
      } else {
        fail_at("unknown entity '&" + std::string(ent) + ";'", offset + i);
      }
      i = semi;
    }
    return out;
  }

  static void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  // Character data up to the next '<'. Rejects constructs outside the
  // normalized schema.
  std::string read_text() {
    std::size_t start = pos_;
    while (!at_end() && text_[pos_] != '<') ++pos_;
    std::string out = decode(text_.substr(start, pos_ - start), start);
    if (peek_is("<!--")) fail("XML comments are not part of the normalized schema; use <comment>");
    if (peek_is("<![CDATA[")) fail("CDATA sections are not supported");
    if (peek_is("<!")) fail("declarations are not supported");
    if (peek_is("<?")) fail("processing instructions are only allowed as the XML declaration");
    return out;
  }

  Node read_element() {
    std::size_t start = pos_;
    ++pos_;  // '<'
    Node node;
    auto [line, col] = position(start);
    node.line = line;
    node.column = col;
    node.tag = read_name("element name");
    for (;;) {
      bool had_space = !at_end() && is_space(text_[pos_]);
      skip_space();
      if (at_end()) fail_at("unterminated start tag <" + node.tag + ">", start);
      if (peek_is("/>")) {
        pos_ += 2;
        return node;
      }
      if (text_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (!had_space) fail("expected whitespace before attribute");
      std::size_t attr_pos = pos_;
      std::string key = read_name("attribute name");
      skip_space();
      if (at_end() || text_[pos_] != '=') fail("expected '=' after attribute '" + key + "'");
      ++pos_;
      skip_space();
      if (at_end() || (text_[pos_] != '"' && text_[pos_] != '\'')) fail("expected quoted value for '" + key + "'");
      char quote = text_[pos_++];
      std::size_t vstart = pos_;
      while (!at_end() && text_[pos_] != quote) {
        if (text_[pos_] == '<') fail("'<' in attribute value");
        ++pos_;
      }
      if (at_end()) fail_at("unterminated attribute value", vstart);
      std::string value = trim(decode(text_.substr(vstart, pos_ - vstart), vstart));
      ++pos_;
      if (node.has(key)) fail_at("duplicate attribute '" + key + "'", attr_pos);
      node.attributes.emplace_back(std::move(key), std::move(value));
    }
    // Content.
    std::string text;
    for (;;) {
      text += read_text();
      if (at_end()) fail_at("element <" + node.tag + "> is never closed", start);
      if (peek_is("</")) {
        std::size_t close_pos = pos_;
        pos_ += 2;
        std::string closing = read_name("closing tag name");
        skip_space();
        if (at_end() || text_[pos_] != '>') fail("expected '>' in closing tag");
        ++pos_;
        if (closing != node.tag) {
          fail_at("closing tag </" + closing + "> does not match <" + node.tag + "> opened at " +
                      std::to_string(node.line) + ":" + std::to_string(node.column),
                  close_pos);
        }
        break;
      }
      node.children.push_back(read_element());
    }
    node.text = collapse_space(text);
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Classification against the normalized schema.

std::optional<NodeKind> keyword_kind(const std::string& tag) {
  static const std::map<std::string, NodeKind, std::less<>> table = {
      {"CKML", NodeKind::Root},
      {"Ontology", NodeKind::Ontology},
      {"extends", NodeKind::Extends},
      {"Type.Object", NodeKind::TypeObject},
      {"Type.Data", NodeKind::TypeData},
      {"value", NodeKind::DataValue},
      {"Type.BinaryRelation", NodeKind::TypeBinaryRelation},
      {"Type.Function", NodeKind::TypeFunction},
      {"Type.Relation", NodeKind::TypeRelation},
      {"Type.Set", NodeKind::TypeSet},
      {"Type.Collection", NodeKind::TypeCollection},
      {"Theory", NodeKind::Theory},
      {"Interpretation", NodeKind::Interpretation},
      {"Foreach", NodeKind::Foreach},
      {"Where", NodeKind::Where},
      {"subrange", NodeKind::Subrange},
      {"Object", NodeKind::ObjectTemplate},
      {"sequent", NodeKind::Sequent},
      {"subtype", NodeKind::Subtype},
      {"partition", NodeKind::Partition},
      {"li", NodeKind::Item},
      {"entails", NodeKind::Entails},
      {"classification", NodeKind::Classification},
      {"Assertion", NodeKind::Assertion},
      {"Expression", NodeKind::Expression},
      {"Lambda", NodeKind::Lambda},
      {"Exists", NodeKind::Exists},
      {"Forall", NodeKind::Forall},
      {"implies", NodeKind::Implies},
      {"equiv", NodeKind::Equiv},
      {"and", NodeKind::And},
      {"or", NodeKind::Or},
      {"not", NodeKind::Not},
      {"comment", NodeKind::Comment},
  };
  if (auto it = table.find(tag); it != table.end()) return it->second;
  if (starts_with(tag, "Collection.")) return NodeKind::Collection;
  return std::nullopt;
}

bool is_expression_kind(NodeKind k) {
  switch (k) {
    case NodeKind::Exists:
    case NodeKind::Forall:
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Not:
    case NodeKind::Implies:
    case NodeKind::Equiv:
      return true;
    default:
      return false;
  }
}

using KindSet = std::set<NodeKind>;

// Keyword children allowed under each kind. Expression-family kinds and the
// "free tag" fallback are handled in allowed_child / free_kind.
const KindSet& keyword_children(NodeKind parent) {
  static const KindSet none;
  static const KindSet comment_only = {NodeKind::Comment};
  static const std::map<NodeKind, KindSet> table = {
      {NodeKind::Root,
       {NodeKind::Ontology, NodeKind::Theory, NodeKind::Collection, NodeKind::Assertion, NodeKind::Expression,
        NodeKind::Lambda, NodeKind::Sequent, NodeKind::Subtype, NodeKind::Partition, NodeKind::Comment,
        NodeKind::TypeObject, NodeKind::TypeData, NodeKind::TypeBinaryRelation, NodeKind::TypeFunction,
        NodeKind::TypeRelation, NodeKind::TypeSet, NodeKind::TypeCollection, NodeKind::Interpretation}},
      {NodeKind::Ontology,
       {NodeKind::Extends, NodeKind::TypeObject, NodeKind::TypeData, NodeKind::TypeBinaryRelation,
        NodeKind::TypeFunction, NodeKind::TypeRelation, NodeKind::TypeSet, NodeKind::TypeCollection,
        NodeKind::Interpretation, NodeKind::Theory, NodeKind::Subtype, NodeKind::Assertion, NodeKind::Comment}},
      {NodeKind::TypeObject, {NodeKind::TypeFunction, NodeKind::Comment}},
      {NodeKind::TypeData, {NodeKind::DataValue, NodeKind::Comment}},
      {NodeKind::TypeRelation, {NodeKind::TypeFunction, NodeKind::Comment}},
      {NodeKind::Theory,
       {NodeKind::TypeObject, NodeKind::TypeData, NodeKind::Sequent, NodeKind::Subtype, NodeKind::Partition,
        NodeKind::Interpretation, NodeKind::Comment}},
      {NodeKind::Interpretation, {NodeKind::Foreach, NodeKind::TypeObject, NodeKind::Comment}},
      {NodeKind::Foreach, {NodeKind::Where, NodeKind::ObjectTemplate, NodeKind::Foreach, NodeKind::Comment}},
      {NodeKind::Where, {NodeKind::Subrange}},
      {NodeKind::Sequent, {NodeKind::Item, NodeKind::Entails}},
      {NodeKind::Partition, {NodeKind::Item}},
      {NodeKind::ValueSet, {NodeKind::Item}},
      {NodeKind::Collection, {NodeKind::Comment}},
      {NodeKind::Instance, {NodeKind::Comment, NodeKind::Classification}},
      {NodeKind::Property, {NodeKind::Comment}},
      {NodeKind::Atom, {NodeKind::Comment}},
  };
  if (auto it = table.find(parent); it != table.end()) return it->second;
  switch (parent) {
    case NodeKind::DataValue:
    case NodeKind::TypeBinaryRelation:
    case NodeKind::TypeFunction:
    case NodeKind::TypeSet:
    case NodeKind::TypeCollection:
    case NodeKind::Extends:
    case NodeKind::Subtype:
    case NodeKind::Classification:
      return comment_only;
    default:
      return none;
  }
}

// Parents whose body is an expression (quantifiers, connectives and atoms).
bool takes_expressions(NodeKind parent) {
  switch (parent) {
    case NodeKind::TypeObject:
    case NodeKind::TypeBinaryRelation:
    case NodeKind::TypeFunction:
    case NodeKind::ObjectTemplate:
    case NodeKind::Assertion:
    case NodeKind::Expression:
    case NodeKind::Lambda:
      return true;
    default:
      return is_expression_kind(parent);
  }
}

// Kind of a non-keyword tag under `parent`, if such tags are allowed there.
std::optional<NodeKind> free_kind(NodeKind parent, const Node& n) {
  switch (parent) {
    case NodeKind::Collection:
      return n.has("source.Instance") ? NodeKind::RelationInstance : NodeKind::Instance;
    case NodeKind::Instance:
      return NodeKind::Property;
    case NodeKind::Property:
      return NodeKind::ValueSet;
    case NodeKind::Atom:
      return NodeKind::Atom;
    default:
      if (takes_expressions(parent)) return NodeKind::Atom;
      return std::nullopt;
  }
}

const std::map<NodeKind, std::vector<std::string>>& required_attributes() {
  static const std::map<NodeKind, std::vector<std::string>> table = {
      {NodeKind::Ontology, {"name"}},
      {NodeKind::Extends, {"ontology"}},
      {NodeKind::TypeObject, {"name"}},
      {NodeKind::TypeData, {"name"}},
      {NodeKind::DataValue, {"name"}},
      {NodeKind::TypeBinaryRelation, {"name"}},
      {NodeKind::TypeFunction, {"name"}},
      {NodeKind::TypeRelation, {"name"}},
      {NodeKind::TypeSet, {"name"}},
      {NodeKind::TypeCollection, {"name"}},
      {NodeKind::Theory, {"name"}},
      {NodeKind::Foreach, {"var", "type"}},
      {NodeKind::Subrange, {"var"}},
      {NodeKind::ObjectTemplate, {"var", "type"}},
      {NodeKind::Subtype, {"specific", "generic"}},
      {NodeKind::Classification, {"type"}},
      {NodeKind::Exists, {"var"}},
      {NodeKind::Forall, {"var"}},
      {NodeKind::Instance, {"id"}},
      {NodeKind::RelationInstance, {"source.Instance", "target.Instance"}},
  };
  return table;
}

class Classifier {
 public:
  void classify(Node& n, NodeKind parent) {
    auto kw = keyword_kind(n.tag);
    std::optional<NodeKind> kind;
    if (kw && keyword_children(parent).contains(*kw)) {
      kind = kw;
    } else if (kw && (is_expression_kind(*kw) || *kw == NodeKind::Comment) && takes_expressions(parent)) {
      kind = kw;
    } else if (!kw || *kw == NodeKind::Collection) {
      // Collection.* tags are free tags outside a document root.
      kind = free_kind(parent, n);
    }
    if (!kind) {
      throw ParseError("element <" + n.tag + "> is not allowed inside " + describe(parent), n.line, n.column);
    }
    n.kind = *kind;
    check(n, parent);
    for (auto& child : n.children) classify(child, n.kind);
    check_shape(n);
  }

  void classify_root(Node& n) {
    n.kind = *keyword_kind(n.tag);
    check(n, NodeKind::Root);
    for (auto& child : n.children) classify(child, n.kind);
    check_shape(n);
  }

 private:
  static std::string describe(NodeKind parent) { return "<" + std::string(to_string(parent)) + ">"; }

  void check(const Node& n, NodeKind parent) {
    auto& req = required_attributes();
    if (auto it = req.find(n.kind); it != req.end()) {
      for (const auto& key : it->second) {
        if (!n.has(key)) {
          throw ParseError("<" + n.tag + "> is missing required attribute '" + key + "'", n.line, n.column);
        }
      }
    }
    if (n.kind == NodeKind::Item) {
      const char* key = parent == NodeKind::ValueSet ? "instance" : "type";
      if (!n.has(key)) {
        throw ParseError("<li> is missing required attribute '" + std::string(key) + "'", n.line, n.column);
      }
    }
    if (n.kind != NodeKind::Comment && !n.text.empty()) {
      throw ParseError("unexpected text inside <" + n.tag + ">", n.line, n.column);
    }
    if (n.kind == NodeKind::Instance) {
      const std::string& id = *n.attr("id");
      if (!ids_.insert(id).second) throw ParseError("duplicate id '" + id + "'", n.line, n.column);
    }
  }

  static void check_shape(const Node& n) {
    auto operands = std::count_if(n.children.begin(), n.children.end(),
                                  [](const Node& c) { return c.kind != NodeKind::Comment; });
    auto fail = [&](const std::string& what) { throw ParseError(what, n.line, n.column); };
    switch (n.kind) {
      case NodeKind::Sequent: {
        auto entails = std::count_if(n.children.begin(), n.children.end(),
                                     [](const Node& c) { return c.kind == NodeKind::Entails; });
        if (entails != 1) fail("<sequent> needs exactly one <entails/> separator");
        break;
      }
      case NodeKind::Partition:
        if (n.children.empty()) fail("<partition> needs at least one <li>");
        break;
      case NodeKind::Not:
        if (operands != 1) fail("<not> takes exactly one operand");
        break;
      case NodeKind::Implies:
      case NodeKind::Equiv:
        if (operands != 2) fail("<" + n.tag + "> takes exactly two operands");
        break;
      case NodeKind::Exists:
      case NodeKind::Forall:
        if (operands == 0) fail("<" + n.tag + "> needs a body");
        break;
      default:
        break;
    }
  }

  std::set<std::string> ids_;
};

bool is_root_tag(const std::string& tag) {
  return tag == "CKML" || tag == "Ontology" || tag == "Theory" || starts_with(tag, "Collection.");
}

DocumentKind kind_of_root(const Node& root) {
  switch (root.kind) {
    case NodeKind::Ontology: return DocumentKind::Ontology;
    case NodeKind::Collection: return DocumentKind::Collection;
    case NodeKind::Theory: return DocumentKind::TheorySet;
    default: break;
  }
  bool all_theories = !root.children.empty() &&
                      std::all_of(root.children.begin(), root.children.end(),
                                  [](const Node& c) { return c.kind == NodeKind::Theory; });
  return all_theories ? DocumentKind::TheorySet : DocumentKind::KnowledgeBase;
}

// ---------------------------------------------------------------------------
// Serialization.

int attribute_rank(const std::string& key) {
  static const std::array<std::string_view, 27> order = {
      "name", "id", "var", "type", "genus", "specific", "generic", "ontology", "prefix", "uri",
      "instance", "source", "source.Type", "source.Instance", "source.Function", "target", "target.Type",
      "target.Instance", "target.Function", "function.Type", "binaryRelation", "order", "begin", "end",
      "ordered", "text", "about"};
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == key) return static_cast<int>(i);
  }
  return static_cast<int>(order.size());
}

std::string escape(std::string_view s, bool attribute) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) out += "&quot;";
        else out.push_back(c);
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

void write_node(std::ostringstream& out, const Node& n, std::size_t indent) {
  std::string pad(indent, ' ');
  auto attrs = n.attributes;
  std::stable_sort(attrs.begin(), attrs.end(), [](const auto& a, const auto& b) {
    int ra = attribute_rank(a.first), rb = attribute_rank(b.first);
    if (ra != rb) return ra < rb;
    return a.first < b.first;
  });
  out << pad << '<' << n.tag;
  for (const auto& [k, v] : attrs) out << ' ' << k << "=\"" << escape(v, true) << '"';
  if (n.children.empty() && n.text.empty()) {
    out << "/>\n";
    return;
  }
  out << '>';
  if (n.children.empty()) {
    out << escape(n.text, false) << "</" << n.tag << ">\n";
    return;
  }
  out << '\n';
  if (!n.text.empty()) out << pad << "  " << escape(n.text, false) << '\n';
  for (const auto& c : n.children) write_node(out, c, indent + 2);
  out << pad << "</" << n.tag << ">\n";
}

// ---------------------------------------------------------------------------
// Desugaring.

void desugar_children(Node& parent, const std::string& genus) {
  std::vector<Node> out;
  for (auto& c : parent.children) {
    if (c.kind == NodeKind::Subtype || c.kind == NodeKind::Partition) {
      for (const auto& s : sequents_of(c, genus)) out.push_back(sequent_node(s));
    } else {
      out.push_back(std::move(c));
    }
  }
  parent.children = std::move(out);
}

void desugar_node(Node& n) {
  if (n.kind == NodeKind::Theory) {
    desugar_children(n, n.attr_or("genus"));
    return;
  }
  if (n.kind == NodeKind::Root) desugar_children(n, {});
  for (auto& c : n.children) {
    if (c.kind == NodeKind::Root || c.kind == NodeKind::Theory || c.kind == NodeKind::Ontology) desugar_node(c);
  }
}

}  // namespace

Document parse(std::string_view text) {
  std::vector<Node> top = Scanner(text).parse_top_level();
  Document doc;
  Classifier classifier;
  if (top.size() == 1 && is_root_tag(top.front().tag)) {
    doc.root = std::move(top.front());
    classifier.classify_root(doc.root);
  } else {
    doc.root = make_node(NodeKind::Root, "CKML");
    doc.root.children = std::move(top);
    for (auto& c : doc.root.children) classifier.classify(c, NodeKind::Root);
  }
  doc.kind = kind_of_root(doc.root);
  return doc;
}

Document parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + std::string(e.what()).substr(0, std::string(e.what()).rfind(" at ")),
                     e.line(), e.column());
  }
}

Node parse_expression(std::string_view text) {
  std::vector<Node> top = Scanner(text).parse_top_level();
  if (top.empty()) throw ParseError("empty expression", 1, 1);
  Classifier classifier;
  for (auto& n : top) classifier.classify(n, NodeKind::Expression);
  if (top.size() == 1) return std::move(top.front());
  Node conj = make_node(NodeKind::And, "and");
  conj.children = std::move(top);
  return conj;
}

std::string serialize(const Node& node, std::size_t indent) {
  std::ostringstream out;
  write_node(out, node, indent);
  return out.str();
}

std::string serialize(const Document& doc) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" + serialize(doc.root);
}

Document desugar(const Document& doc) {
  Document out = doc;
  desugar_node(out.root);
  return out;
}

Node sequent_node(const Sequent& s) {
  Node n = make_node(NodeKind::Sequent, "sequent");
  for (const auto& t : s.antecedent) n.children.push_back(make_node(NodeKind::Item, "li", {{"type", t}}));
  n.children.push_back(make_node(NodeKind::Entails, "entails"));
  for (const auto& t : s.consequent) n.children.push_back(make_node(NodeKind::Item, "li", {{"type", t}}));
  return n;
}

std::vector<Sequent> sequents_of(const Node& node, const std::string& default_genus) {
  switch (node.kind) {
    case NodeKind::Sequent: {
      std::vector<std::string> gamma, delta;
      bool after = false;
      for (const auto& c : node.children) {
        if (c.kind == NodeKind::Entails) after = true;
        else (after ? delta : gamma).push_back(c.attr_or("type"));
      }
      return {Sequent(std::move(gamma), std::move(delta))};
    }
    case NodeKind::Subtype:
      return {expand_subtype(node.attr_or("specific"), node.attr_or("generic"))};
    case NodeKind::Partition: {
      std::vector<std::string> parts;
      for (const auto& c : node.children) parts.push_back(c.attr_or("type"));
      return expand_partition(node.attr_or("genus", default_genus), parts);
    }
    default:
      return {};
  }
}

Theory theory_of(const Node& theory) {
  Theory th;
  th.name = theory.attr_or("name");
  th.genus = theory.attr_or("genus");
  auto add_type = [&](const std::string& t) {
    if (t != th.genus && std::find(th.types.begin(), th.types.end(), t) == th.types.end()) th.types.push_back(t);
  };
  for (const auto& c : theory.children) {
    if (c.kind == NodeKind::TypeObject) add_type(c.attr_or("name"));
  }
  for (const auto& c : theory.children) {
    for (auto& s : sequents_of(c, th.genus)) {
      for (const auto& t : s.antecedent) add_type(t);
      for (const auto& t : s.consequent) add_type(t);
      th.sequents.push_back(std::move(s));
    }
  }
  return th;
}

}  // namespace ckml
