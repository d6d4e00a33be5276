#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ckml/index_set.hpp"

namespace ckml {

/// A formal context (classification): objects, attributes and the incidence
/// relation between them.
///
/// Incidence is indexed both ways (one attribute bitset per object and one
/// object bitset per attribute) so that both derivation operators are a
/// single pass of intersections. Contexts are immutable once built.
class FormalContext {
 public:
  /// The empty 0x0 context.
  FormalContext() = default;

  /// Names are trimmed of outer whitespace and must be nonempty and pairwise
  /// distinct within objects and within attributes. `rows[i]` is the intent
  /// of object i.
  FormalContext(std::vector<std::string> objects, std::vector<std::string> attributes,
                const std::vector<AttributeSet>& rows, std::string name = {});

  /// Builds a context from a cross table: one string per object, one
  /// character per attribute, 'X' or 'x' for incidence and '.' otherwise.
  static FormalContext from_cross_table(std::vector<std::string> objects,
                                        std::vector<std::string> attributes,
                                        const std::vector<std::string>& rows,
                                        std::string name = {});

  const std::string& name() const noexcept { return name_; }
  std::size_t object_count() const noexcept { return objects_.size(); }
  std::size_t attribute_count() const noexcept { return attributes_.size(); }
  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const std::vector<std::string>& attributes() const noexcept { return attributes_; }

  bool incident(std::size_t object, std::size_t attribute) const;

  /// The attributes of one object.
  const AttributeSet& row(std::size_t object) const;
  /// The objects having one attribute.
  const ObjectSet& column(std::size_t attribute) const;

  std::optional<std::size_t> find_object(std::string_view name_or_label) const;
  std::optional<std::size_t> find_attribute(std::string_view name_or_label) const;
  /// As find_*, but throws ContextError naming the unknown entry.
  std::size_t object_index(std::string_view name_or_label) const;
  std::size_t attribute_index(std::string_view name_or_label) const;

  ObjectSet object_set(const std::vector<std::string>& names) const;
  AttributeSet attribute_set(const std::vector<std::string>& names) const;
  std::vector<std::string> object_names(const ObjectSet& objs) const;
  std::vector<std::string> attribute_names(const AttributeSet& attrs) const;

  /// Returns a copy whose alias table maps `label` to the canonical name
  /// `name` (an object or attribute). Lookups by label resolve to the name.
  FormalContext with_label(const std::string& name, const std::string& label) const;
  const std::map<std::string, std::string>& labels() const noexcept { return labels_; }

  FormalContext renamed(std::string name) const;

  friend bool operator==(const FormalContext& a, const FormalContext& b) {
    return a.objects_ == b.objects_ && a.attributes_ == b.attributes_ && a.rows_ == b.rows_;
  }

 private:
  void check_objects(const ObjectSet& objs) const;
  void check_attributes(const AttributeSet& attrs) const;

  friend AttributeSet derive_intent(const FormalContext&, const ObjectSet&);
  friend ObjectSet derive_extent(const FormalContext&, const AttributeSet&);

  std::string name_;
  std::vector<std::string> objects_;
  std::vector<std::string> attributes_;
  std::vector<AttributeSet> rows_;
  std::vector<ObjectSet> columns_;
  std::map<std::string, std::size_t, std::less<>> object_index_;
  std::map<std::string, std::size_t, std::less<>> attribute_index_;
  std::map<std::string, std::string> labels_;  // label -> canonical name
};

/// Attributes shared by every object in `objs` (all attributes when empty).
AttributeSet derive_intent(const FormalContext& ctx, const ObjectSet& objs);

/// Objects having every attribute in `attrs` (all objects when empty).
ObjectSet derive_extent(const FormalContext& ctx, const AttributeSet& attrs);

inline ObjectSet close_extent(const FormalContext& ctx, const ObjectSet& objs) {
  return derive_extent(ctx, derive_intent(ctx, objs));
}

inline AttributeSet close_intent(const FormalContext& ctx, const AttributeSet& attrs) {
  return derive_intent(ctx, derive_extent(ctx, attrs));
}

/// True iff (ext, in) is a formal concept: a maximal rectangle of crosses.
bool is_formal_concept(const FormalContext& ctx, const ObjectSet& ext, const AttributeSet& in);

/// Glues two contexts over a shared object set, attributes of `left` first.
///
/// `right` may list the same objects in another order; its rows are permuted
/// to `left`'s order. A right attribute whose name collides with a left one
/// is renamed `<right_prefix>:<name>` (prefix defaults to right's name, or
/// "right" when that is empty). With `prefix_all`, `left_prefix` and
/// `right_prefix` are applied to every attribute of the respective side.
struct AppositionOptions {
  std::string left_prefix;
  std::string right_prefix;
  bool prefix_all = false;
};

FormalContext apposition(const FormalContext& left, const FormalContext& right,
                         const AppositionOptions& options = {});

/// Restriction to a subset of attributes, keeping their relative order.
FormalContext select_attributes(const FormalContext& ctx, const AttributeSet& keep);

}  // namespace ckml
