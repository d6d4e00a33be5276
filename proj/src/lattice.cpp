#include "ckml/lattice.hpp"

#include <algorithm>

namespace ckml {

std::optional<AttributeSet> next_closure(const FormalContext& ctx, const AttributeSet& current) {
  const std::size_t n = ctx.attribute_count();
  AttributeSet prefix = current;  // current ∩ {0, ..., i-1} as i descends
  for (std::size_t i = n; i-- > 0;) {
    if (current.contains(i)) {
      prefix.erase(i);
      continue;
    }
    AttributeSet candidate = prefix;
    candidate.insert(i);
    AttributeSet closed = close_intent(ctx, candidate);
    // Canonical iff the closure adds no attribute smaller than i.
    auto first_added = (closed - current).bits().find_first();
    if (first_added == Bits::npos || first_added >= i) return closed;
  }
  return std::nullopt;
}

std::vector<AttributeSet> next_closure_intents(const FormalContext& ctx, std::size_t max_count) {
  std::vector<AttributeSet> out;
  std::optional<AttributeSet> current = close_intent(ctx, AttributeSet(ctx.attribute_count()));
  while (current) {
    if (out.size() == max_count) {
      throw LimitError("concept limit of " + std::to_string(max_count) + " exceeded");
    }
    out.push_back(*current);
    if (current->full()) break;
    current = next_closure(ctx, *current);
  }
  return out;
}

ConceptLattice build_lattice(const FormalContext& ctx, const LatticeOptions& options) {
  ConceptLattice lat;
  lat.context_ = ctx;

  std::vector<AttributeSet> intents = next_closure_intents(ctx, options.max_concepts);
  lat.concepts_.reserve(intents.size());
  for (std::size_t id = 0; id < intents.size(); ++id) {
    ObjectSet extent = derive_extent(ctx, intents[id]);
    lat.by_extent_.emplace(extent, id);
    lat.concepts_.push_back(FormalConcept{id, std::move(extent), std::move(intents[id])});
  }

  const std::size_t n = lat.concepts_.size();
  lat.upper_.assign(n, {});
  lat.lower_.assign(n, {});
  const std::size_t objects = ctx.object_count();
  for (const auto& c : lat.concepts_) {
    ObjectSet minimal = c.extent.complement();
    std::vector<ConceptId>& upper = lat.upper_[c.id];
    for (std::size_t g = 0; g < objects; ++g) {
      if (c.extent.contains(g)) continue;
      ObjectSet grown = c.extent;
      grown.insert(g);
      ObjectSet closed = close_extent(ctx, grown);
      ObjectSet extra = closed - c.extent;
      extra.erase(g);
      if ((minimal & extra).empty()) {
        ConceptId up = lat.by_extent_.at(closed);
        if (std::find(upper.begin(), upper.end(), up) == upper.end()) upper.push_back(up);
      } else {
        minimal.erase(g);
      }
    }
    std::sort(upper.begin(), upper.end());
  }
  for (ConceptId c = 0; c < n; ++c) {
    for (ConceptId up : lat.upper_[c]) lat.lower_[up].push_back(c);
  }
  for (auto& l : lat.lower_) std::sort(l.begin(), l.end());

  lat.top_ = lat.by_extent_.at(ObjectSet::all(objects));
  lat.bottom_ = lat.by_extent_.at(derive_extent(ctx, AttributeSet::all(ctx.attribute_count())));

  lat.object_labels_.reserve(objects);
  for (std::size_t g = 0; g < objects; ++g) {
    lat.object_labels_.push_back(lat.by_extent_.at(close_extent(ctx, ObjectSet::of(objects, {g}))));
  }
  lat.attribute_labels_.reserve(ctx.attribute_count());
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m) {
    lat.attribute_labels_.push_back(lat.by_extent_.at(ctx.column(m)));
  }
  return lat;
}

void ConceptLattice::check(ConceptId id) const {
  if (id >= concepts_.size()) {
    throw UnknownConceptError("concept id " + std::to_string(id) + " is not in a lattice of " +
                              std::to_string(concepts_.size()) + " concepts");
  }
}

const FormalConcept& ConceptLattice::concept_at(ConceptId id) const {
  check(id);
  return concepts_[id];
}

const std::vector<ConceptId>& ConceptLattice::upper_covers(ConceptId id) const {
  check(id);
  return upper_[id];
}

const std::vector<ConceptId>& ConceptLattice::lower_covers(ConceptId id) const {
  check(id);
  return lower_[id];
}

std::vector<std::pair<ConceptId, ConceptId>> ConceptLattice::cover_edges() const {
  std::vector<std::pair<ConceptId, ConceptId>> edges;
  for (ConceptId c = 0; c < upper_.size(); ++c) {
    for (ConceptId up : upper_[c]) edges.emplace_back(c, up);
  }
  return edges;
}

ConceptId ConceptLattice::object_concept(std::size_t object) const {
  if (object >= object_labels_.size()) throw InvalidSetError("object index out of range");
  return object_labels_[object];
}

ConceptId ConceptLattice::attribute_concept(std::size_t attribute) const {
  if (attribute >= attribute_labels_.size()) throw InvalidSetError("attribute index out of range");
  return attribute_labels_[attribute];
}

std::vector<std::size_t> ConceptLattice::own_objects(ConceptId id) const {
  check(id);
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < object_labels_.size(); ++g) {
    if (object_labels_[g] == id) out.push_back(g);
  }
  return out;
}

std::vector<std::size_t> ConceptLattice::own_attributes(ConceptId id) const {
  check(id);
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < attribute_labels_.size(); ++m) {
    if (attribute_labels_[m] == id) out.push_back(m);
  }
  return out;
}

std::optional<ConceptId> ConceptLattice::find_by_extent(const ObjectSet& extent) const {
  if (auto it = by_extent_.find(extent); it != by_extent_.end()) return it->second;
  return std::nullopt;
}

std::optional<ConceptId> ConceptLattice::find_by_intent(const AttributeSet& intent) const {
  if (intent.universe() != context_.attribute_count()) return std::nullopt;
  ObjectSet extent = derive_extent(context_, intent);
  auto id = find_by_extent(extent);
  if (id && concepts_[*id].intent == intent) return id;
  return std::nullopt;
}

bool leq(const ConceptLattice& lat, ConceptId a, ConceptId b) {
  return lat.concept_at(a).extent.is_subset_of(lat.concept_at(b).extent);
}

const FormalConcept& meet(const ConceptLattice& lat, ConceptId a, ConceptId b) {
  ObjectSet extent = lat.concept_at(a).extent & lat.concept_at(b).extent;
  return lat.concept_at(*lat.find_by_extent(close_extent(lat.context(), extent)));
}

const FormalConcept& join(const ConceptLattice& lat, ConceptId a, ConceptId b) {
  AttributeSet intent = lat.concept_at(a).intent & lat.concept_at(b).intent;
  return lat.concept_at(*lat.find_by_extent(derive_extent(lat.context(), intent)));
}

}  // namespace ckml
