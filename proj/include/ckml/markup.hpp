#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ckml/error.hpp"
#include "ckml/theory.hpp"

namespace ckml {

/// Role of an element in the normalized CKML/OML schema. Keyword elements
/// get their own kind; elements whose tag is a user type, relation or
/// function name are classified by where they occur (Instance, Property,
/// Atom, ...).
enum class NodeKind {
  Root,                // <CKML> knowledge-base wrapper
  Ontology,
  Extends,
  TypeObject,
  TypeData,
  DataValue,           // <value name=.../> inside Type.Data
  TypeBinaryRelation,
  TypeFunction,
  TypeRelation,        // reified relation
  TypeSet,
  TypeCollection,
  Theory,
  Interpretation,
  Foreach,
  Where,
  Subrange,
  ObjectTemplate,      // <Object var type> inside Foreach
  Sequent,
  Subtype,
  Partition,
  Item,                // <li>
  Entails,
  Collection,          // <Collection.*>
  Instance,            // typed object instance inside a collection
  RelationInstance,    // <rel source.Instance target.Instance/> inside a collection
  Property,            // function/relation value element inside an instance
  ValueSet,            // <Set.*> wrapper inside a property
  Classification,      // <classification type=.../> inside an instance
  Assertion,
  Expression,
  Lambda,
  Exists,
  Forall,
  Implies,
  Equiv,
  And,
  Or,
  Not,
  Comment,
  Atom,                // type/relation/function atom inside an expression
};

std::string_view to_string(NodeKind kind);

struct Node {
  NodeKind kind = NodeKind::Root;
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attributes;  // values trimmed
  std::vector<Node> children;
  std::string text;  // whitespace-collapsed character data (comments only)
  std::size_t line = 0;
  std::size_t column = 0;

  const std::string* attr(std::string_view key) const;
  std::string attr_or(std::string_view key, std::string fallback = {}) const;
  bool has(std::string_view key) const { return attr(key) != nullptr; }
  Node& set(std::string key, std::string value);

  /// Structural equality: kind, tag, attributes (as a set), text and
  /// children in order. Source positions are ignored.
  friend bool operator==(const Node& a, const Node& b);
};

/// Shorthand for a fresh node without position information.
inline Node make_node(NodeKind kind, std::string tag, std::vector<std::pair<std::string, std::string>> attributes = {}) {
  Node n;
  n.kind = kind;
  n.tag = std::move(tag);
  n.attributes = std::move(attributes);
  return n;
}

enum class DocumentKind { Ontology, Collection, TheorySet, KnowledgeBase };

std::string_view to_string(DocumentKind kind);

struct Document {
  DocumentKind kind = DocumentKind::KnowledgeBase;
  Node root = make_node(NodeKind::Root, "CKML");

  friend bool operator==(const Document& a, const Document& b) { return a.kind == b.kind && a.root == b.root; }
};

/// Parses a normalized CKML document. A single top-level Ontology, Theory,
/// Collection.* or CKML element becomes the root; anything else (several
/// top-level elements, a lone sequent, ...) is wrapped in a CKML root.
///
/// Throws ParseError (with line:column) for malformed markup, elements not
/// allowed where they occur, missing required attributes, stray text and
/// duplicate instance ids.
Document parse(std::string_view text);
Document parse_file(const std::filesystem::path& path);

/// Parses a bare expression (a query or assertion body): the top-level
/// elements are classified in expression position, so any type, relation
/// or function tag is an atom. Several top-level elements form a
/// conjunction under a synthetic <and>.
Node parse_expression(std::string_view text);

/// Canonical text: XML declaration, 2-space indentation, attributes in a
/// fixed order (a priority list of well-known keys, then alphabetical),
/// empty elements self-closed, comments on one line.
std::string serialize(const Document& doc);
std::string serialize(const Node& node, std::size_t indent = 0);

/// Rewrites subtype and partition abbreviations inside theories (and at the
/// knowledge-base top level) into explicit <sequent> elements. A partition
/// without a genus uses its enclosing theory's genus.
Document desugar(const Document& doc);

/// <sequent> element for a sequent, items in written order.
Node sequent_node(const Sequent& s);

/// The sequent a <sequent>, <subtype> node denotes; partitions expand to
/// several. `default_genus` applies to partitions lacking a genus.
std::vector<Sequent> sequents_of(const Node& node, const std::string& default_genus = {});

/// The abstract theory declared by a <Theory> element: its declared
/// Type.Object names, every name used in its constraints, and all
/// constraints expanded to sequents.
Theory theory_of(const Node& theory);

}  // namespace ckml
