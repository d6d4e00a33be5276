#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "ckml/context.hpp"

namespace ckml {

using ConceptId = std::size_t;

struct FormalConcept {
  ConceptId id = 0;
  ObjectSet extent;
  AttributeSet intent;

  friend bool operator==(const FormalConcept& a, const FormalConcept& b) {
    return a.id == b.id && a.extent == b.extent && a.intent == b.intent;
  }
};

struct LatticeOptions {
  /// build_lattice throws LimitError once more concepts than this exist.
  std::size_t max_concepts = 100000;
};

/// The concept lattice of a formal context.
///
/// Concepts are numbered in ascending lectic order of their intents, so the
/// top concept (smallest intent) is always id 0 and two builds of the same
/// context assign identical ids. The order is kept as upper/lower cover
/// lists; `leq` decides comparability by extent inclusion.
class ConceptLattice {
 public:
  const FormalContext& context() const noexcept { return context_; }
  std::size_t size() const noexcept { return concepts_.size(); }
  const std::vector<FormalConcept>& concepts() const noexcept { return concepts_; }
  const FormalConcept& concept_at(ConceptId id) const;

  ConceptId top() const noexcept { return top_; }
  ConceptId bottom() const noexcept { return bottom_; }

  const std::vector<ConceptId>& upper_covers(ConceptId id) const;
  const std::vector<ConceptId>& lower_covers(ConceptId id) const;

  /// Cover edges (lower, upper), sorted.
  std::vector<std::pair<ConceptId, ConceptId>> cover_edges() const;

  /// Smallest concept whose extent contains the object.
  ConceptId object_concept(std::size_t object) const;
  /// Largest concept whose intent contains the attribute.
  ConceptId attribute_concept(std::size_t attribute) const;
  const std::vector<ConceptId>& object_labels() const noexcept { return object_labels_; }
  const std::vector<ConceptId>& attribute_labels() const noexcept { return attribute_labels_; }

  /// Objects / attributes whose label is exactly this concept.
  std::vector<std::size_t> own_objects(ConceptId id) const;
  std::vector<std::size_t> own_attributes(ConceptId id) const;

  /// Concept with exactly this extent (or intent), if it is one.
  std::optional<ConceptId> find_by_extent(const ObjectSet& extent) const;
  std::optional<ConceptId> find_by_intent(const AttributeSet& intent) const;

 private:
  friend ConceptLattice build_lattice(const FormalContext&, const LatticeOptions&);

  void check(ConceptId id) const;

  FormalContext context_;
  std::vector<FormalConcept> concepts_;
  std::vector<std::vector<ConceptId>> upper_;
  std::vector<std::vector<ConceptId>> lower_;
  std::vector<ConceptId> object_labels_;
  std::vector<ConceptId> attribute_labels_;
  std::unordered_map<ObjectSet, ConceptId, IndexSetHash> by_extent_;
  ConceptId top_ = 0;
  ConceptId bottom_ = 0;
};

/// Enumerates all concepts with NextClosure (lectic order of intents), then
/// computes upper covers by the neighbour search over objects outside each
/// extent, and finally the object and attribute labels.
ConceptLattice build_lattice(const FormalContext& ctx, const LatticeOptions& options = {});

/// The closed intents of `ctx` in lectic order, without building the order.
std::vector<AttributeSet> next_closure_intents(const FormalContext& ctx, std::size_t max_count);

/// Lectic successor of `current` among closed intents, or nullopt when
/// `current` is the last one (the full attribute set).
std::optional<AttributeSet> next_closure(const FormalContext& ctx, const AttributeSet& current);

bool leq(const ConceptLattice& lat, ConceptId a, ConceptId b);
const FormalConcept& meet(const ConceptLattice& lat, ConceptId a, ConceptId b);
const FormalConcept& join(const ConceptLattice& lat, ConceptId a, ConceptId b);

}  // namespace ckml
