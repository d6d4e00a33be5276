#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ckml/context.hpp"
#include "ckml/expression.hpp"
#include "ckml/ontology.hpp"
#include "ckml/theory.hpp"

namespace ckml {

/// One scale attribute and the single-variable query deciding it.
struct ScaleBinding {
  std::string attribute;
  std::string var;
  Expr query;
};

/// A concrete conceptual scale: an abstract theory over the attribute names
/// plus a query per attribute, ranging over the instances of `genus`.
struct ConcreteScale {
  std::string name;
  std::string genus;
  Theory abstract;
  std::string description;  // description function; instances without a value are reported
  std::vector<ScaleBinding> bindings;

  std::vector<std::string> attributes() const;
};

/// A realized scale (facet): the context plus the sequents it violates.
/// Instances lacking the description function appear as violations of the
/// synthetic sequent "⊢ undescribed".
struct Facet {
  std::string name;
  FormalContext context;
  std::vector<SequentViolation> violations;
};

enum class Direction { Geq, Leq };

/// One attribute per value, decided by `function(x) = value`; pairwise
/// disjoint.
ConcreteScale nominal_scale(const std::string& name, const std::string& genus, const std::string& function,
                            const std::vector<std::string>& values);

/// Attributes ">=t" (or "<=t"), decided by comparing `function(x)` with t.
/// The theory chains them: a larger threshold implies a smaller one for
/// Geq, the reverse for Leq. Thresholds must be strictly increasing.
ConcreteScale ordinal_scale(const std::string& name, const std::string& genus, const std::string& function,
                            const std::vector<std::string>& thresholds, Direction direction = Direction::Geq);

/// The union of the Geq and Leq ordinal scales over the same thresholds.
ConcreteScale interordinal_scale(const std::string& name, const std::string& genus, const std::string& function,
                                 const std::vector<std::string>& thresholds);

/// One attribute per type in a tree rooted at `genus`, given as
/// (child, parent) edges, decided by instance-of. Sequents child ⊢ parent,
/// plus pairwise sibling disjointness when requested.
ConcreteScale hierarchical_scale(const std::string& name, const std::string& genus,
                                 const std::vector<std::pair<std::string, std::string>>& edges,
                                 bool disjoint_siblings = false);

/// Applies a scale to the instances of its genus. Throws ScaleError naming
/// the binding when a query cannot be evaluated.
Facet realize(const ConcreteScale& scale, const KnowledgeBase& kb);

/// Wraps an existing context as a facet, checking `abstract` against it.
Facet facet_of(const std::string& name, const FormalContext& context, const Theory& abstract = {});

/// Left-to-right apposition of the facets; every attribute is prefixed with
/// "<facet name>:".
FormalContext build_space(const std::vector<Facet>& facets);

/// Scales declared by the knowledge base: theories with Foreach
/// interpretations, ontology-level interpretations of a description function,
/// theories listing object types, and the implicit hierarchical "genus"
/// scale of the theories' genus.
std::vector<ConcreteScale> compile_scales(const KnowledgeBase& kb);

}  // namespace ckml
