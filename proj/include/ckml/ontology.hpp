#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ckml/expression.hpp"
#include "ckml/markup.hpp"

namespace ckml {

enum class EntityKind { ObjectType, DataType, BinaryRelation, Function, SetType, CollectionType };

std::string_view to_string(EntityKind kind);

/// One schema declaration. Ids are "<ontology uri>#<name>"; references
/// between entities always use ids.
struct Entity {
  EntityKind kind = EntityKind::ObjectType;
  std::string id;
  std::string name;
  std::string ontology;

  // Object types.
  std::vector<std::string> parents;
  std::string definition_var;
  std::optional<Expr> definition;  // role restriction; membership = declared or query holds

  // Reified relations (Type.Relation): participant functions and the
  // binary relation they reify.
  std::string source_role;
  std::string target_role;
  std::string linked_relation;

  // Data types. An empty value list is an open domain.
  std::vector<std::string> values;
  bool ordered = false;

  // Binary relations and functions.
  std::string owner;
  std::string source_type;
  std::string target_type;

  // Set and collection types.
  std::string genus;
};

/// ∂0/∂1 pairs of inter-translatable relation types, anchored at a reified
/// relation type. `swapped` members store (target, source).
struct RelationFamily {
  std::string relation;
  std::vector<std::pair<std::string, bool>> members;
};

struct OntologyInfo {
  std::string uri;
  std::string name;
  std::string prefix;
  std::vector<std::pair<std::string, std::string>> extends;  // (uri, prefix)
  std::map<std::string, std::string> names;                  // local name -> entity id
};

struct Instance {
  std::string id;
  std::vector<std::string> types;  // declared type ids, including classifications
  std::map<std::string, std::string> metadata;
  std::string collection;
  bool implied = false;  // introduced by a qualified reference such as Company#Intel
};

/// A function value or relation instance: predicate(subject, value).
struct Fact {
  std::string predicate;
  std::string subject;
  std::string value;
  std::string qualifier;  // type id given by a qualified reference, if any
};

struct CollectionInfo {
  std::string id;
  std::string tag;
  std::string ontology;
  std::string genus;  // type id, empty if none
  std::vector<std::string> members;
};

struct Violation {
  std::string kind;  // "projection", "value", "genus" or "unresolved"
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// A Theory or Interpretation element with the ontology its names resolve in.
struct ScopedNode {
  Node node;
  std::string ontology;
};

/// Numeric comparison when both values parse as numbers, else text order.
int compare_values(std::string_view a, std::string_view b);

using PathMap = std::map<std::string, std::filesystem::path>;

/// Reads "uri path" lines ('#' comments). Relative paths are taken relative
/// to the map file.
PathMap read_path_map(const std::filesystem::path& file);

/// Ontologies, instance collections and theories loaded from CKML documents.
///
/// Immutable after loading. Instances with the same id in several
/// collections are one individual.
class KnowledgeBase {
 public:
  KnowledgeBase();

  /// Ontologies referenced through `extends` or a collection's `ontology`
  /// attribute that are not among `docs` are read from `paths`.
  static KnowledgeBase load(const std::vector<Document>& docs, const PathMap& paths = {});
  static KnowledgeBase load_files(const std::vector<std::filesystem::path>& files, const PathMap& paths = {});

  // Schema.

  const std::vector<OntologyInfo>& ontologies() const noexcept { return ontologies_; }
  const Entity& entity(const std::string& id) const;
  /// Entity ids in declaration order.
  const std::vector<std::string>& entity_ids() const noexcept { return entity_order_; }
  /// Resolves an entity id, `prefix:Name` or `Name`, trying `ontology` and what it extends
  /// first. A name with '-' also matches the name with spaces. Throws
  /// LoadError if the name is ambiguous.
  const Entity* find(std::string_view name, std::string_view ontology = {}) const;
  const Entity& resolve(std::string_view name, std::string_view ontology = {}) const;

  /// Reflexive-transitive subtype order on object types (by name).
  bool subtype_leq(std::string_view t1, std::string_view t2) const;
  bool leq(const std::string& a, const std::string& b) const;
  /// Object types at or below `id`, in declaration order.
  std::vector<std::string> types_below(const std::string& id) const;

  const RelationFamily* family_of(const std::string& predicate) const;
  const std::vector<RelationFamily>& families() const noexcept { return families_; }

  // Instances.

  const std::vector<Instance>& instances() const noexcept { return instances_; }
  const Instance* instance(std::string_view id) const;
  const std::vector<Fact>& facts() const noexcept { return facts_; }
  const std::vector<CollectionInfo>& collections() const noexcept { return collections_; }

  std::vector<std::string> values(const std::string& predicate, const std::string& subject) const;
  /// Extension of a binary relation or function, as (source, target) pairs;
  /// for a member of a relation family the whole family's extension.
  std::vector<std::pair<std::string, std::string>> pairs(const std::string& predicate) const;

  /// Classification: declared at or below `type`, or satisfies the type's
  /// defining query. Data values belong to a data type if listed (or if the
  /// domain is open and the value occurs).
  bool is_a(const std::string& value, const std::string& type) const;
  /// The instances (object type) or values (data type) of a type.
  std::vector<std::string> domain(const std::string& type) const;
  /// Three-way comparison of two values of a data type: enumeration order
  /// for ordered types, numeric when both parse as numbers, else text.
  int compare(const std::string& type, const std::string& a, const std::string& b) const;

  /// Classification-projection, value and genus checks plus unresolved
  /// references. Empty when the collections conform.
  std::vector<Violation> validate() const;

  // Documents.

  const std::vector<ScopedNode>& theories() const noexcept { return theories_; }
  const std::vector<ScopedNode>& interpretations() const noexcept { return interpretations_; }
  /// Sequent, subtype and partition elements at the knowledge-base top level.
  const std::vector<Node>& constraints() const noexcept { return constraints_; }
  const std::vector<Node>& assertions() const noexcept { return assertions_; }

 private:
  friend class Loader;
  friend class Evaluator;

  std::vector<OntologyInfo> ontologies_;
  std::map<std::string, Entity> entities_;
  std::vector<std::string> entity_order_;
  std::map<std::string, std::string> prefixes_;  // global prefix -> uri
  std::vector<RelationFamily> families_;
  std::map<std::string, std::size_t> family_index_;

  std::vector<Instance> instances_;
  std::map<std::string, std::size_t> instance_index_;
  std::vector<Fact> facts_;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> fact_index_;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> extension_;
  std::vector<std::vector<std::pair<std::string, std::string>>> family_pairs_;
  std::vector<CollectionInfo> collections_;

  std::vector<ScopedNode> theories_;
  std::vector<ScopedNode> interpretations_;
  std::vector<Node> constraints_;
  std::vector<Node> assertions_;
};

/// Truth of a closed expression (free names are constants unless bound in
/// `env`).
bool holds(const KnowledgeBase& kb, const Expr& e, const std::map<std::string, std::string>& env = {});

using Binding = std::map<std::string, std::string>;

/// All assignments of domain members to the typed free variables that make
/// `e` true, in domain order.
std::vector<Binding> evaluate(const KnowledgeBase& kb, const Expr& e,
                              const std::vector<std::pair<std::string, std::string>>& free_vars);

}  // namespace ckml
