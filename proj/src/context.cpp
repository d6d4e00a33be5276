#include "ckml/context.hpp"

#include <algorithm>
#include <set>

#include "text_util.hpp"

namespace ckml {

namespace {

std::map<std::string, std::size_t, std::less<>> index_names(std::vector<std::string>& names,
                                                            const char* what) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < names.size(); ++i) {
    names[i] = trim(names[i]);
    if (names[i].empty()) {
      throw ContextError(std::string("empty ") + what + " name at position " + std::to_string(i));
    }
    if (!index.emplace(names[i], i).second) {
      throw ContextError(std::string("duplicate ") + what + " name '" + names[i] + "'");
    }
  }
  return index;
}

}  // namespace

FormalContext::FormalContext(std::vector<std::string> objects, std::vector<std::string> attributes,
                             const std::vector<AttributeSet>& rows, std::string name)
    : name_(std::move(name)), objects_(std::move(objects)), attributes_(std::move(attributes)) {
  object_index_ = index_names(objects_, "object");
  attribute_index_ = index_names(attributes_, "attribute");
  if (rows.size() != objects_.size()) {
    throw ContextError("incidence has " + std::to_string(rows.size()) + " rows for " +
                       std::to_string(objects_.size()) + " objects");
  }
  rows_.reserve(rows.size());
  for (std::size_t g = 0; g < rows.size(); ++g) {
    if (rows[g].universe() != attributes_.size()) {
      throw ContextError("row '" + objects_[g] + "' has " + std::to_string(rows[g].universe()) +
                         " columns, expected " + std::to_string(attributes_.size()));
    }
    rows_.push_back(rows[g]);
  }
  columns_.assign(attributes_.size(), ObjectSet(objects_.size()));
  for (std::size_t g = 0; g < rows_.size(); ++g) {
    rows_[g].for_each([&](std::size_t m) { columns_[m].insert(g); });
  }
}

FormalContext FormalContext::from_cross_table(std::vector<std::string> objects,
                                              std::vector<std::string> attributes,
                                              const std::vector<std::string>& rows,
                                              std::string name) {
  std::vector<AttributeSet> sets;
  sets.reserve(rows.size());
  for (std::size_t g = 0; g < rows.size(); ++g) {
    const std::string& row = rows[g];
    if (row.size() != attributes.size()) {
      throw ContextError("cross table row " + std::to_string(g + 1) + " has " +
                         std::to_string(row.size()) + " cells, expected " +
                         std::to_string(attributes.size()));
    }
    AttributeSet set(attributes.size());
    for (std::size_t m = 0; m < row.size(); ++m) {
      switch (row[m]) {
        case 'X':
        case 'x':
          set.insert(m);
          break;
        case '.':
          break;
        default:
          throw ContextError("invalid cross table cell '" + std::string(1, row[m]) + "' in row " +
                             std::to_string(g + 1));
      }
    }
    sets.push_back(std::move(set));
  }
  return FormalContext(std::move(objects), std::move(attributes), sets, std::move(name));
}

bool FormalContext::incident(std::size_t object, std::size_t attribute) const {
  return row(object).contains(attribute);
}

const AttributeSet& FormalContext::row(std::size_t object) const {
  if (object >= rows_.size()) throw InvalidSetError("object index " + std::to_string(object) + " out of range");
  return rows_[object];
}

const ObjectSet& FormalContext::column(std::size_t attribute) const {
  if (attribute >= columns_.size()) {
    throw InvalidSetError("attribute index " + std::to_string(attribute) + " out of range");
  }
  return columns_[attribute];
}

std::optional<std::size_t> FormalContext::find_object(std::string_view name_or_label) const {
  std::string key = trim(name_or_label);
  if (auto it = object_index_.find(key); it != object_index_.end()) return it->second;
  if (auto l = labels_.find(key); l != labels_.end()) {
    if (auto it = object_index_.find(l->second); it != object_index_.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<std::size_t> FormalContext::find_attribute(std::string_view name_or_label) const {
  std::string key = trim(name_or_label);
  if (auto it = attribute_index_.find(key); it != attribute_index_.end()) return it->second;
  if (auto l = labels_.find(key); l != labels_.end()) {
    if (auto it = attribute_index_.find(l->second); it != attribute_index_.end()) return it->second;
  }
  return std::nullopt;
}

std::size_t FormalContext::object_index(std::string_view name_or_label) const {
  if (auto i = find_object(name_or_label)) return *i;
  throw ContextError("unknown object '" + std::string(name_or_label) + "'");
}

std::size_t FormalContext::attribute_index(std::string_view name_or_label) const {
  if (auto i = find_attribute(name_or_label)) return *i;
  throw ContextError("unknown attribute '" + std::string(name_or_label) + "'");
}

ObjectSet FormalContext::object_set(const std::vector<std::string>& names) const {
  ObjectSet s(object_count());
  for (const auto& n : names) s.insert(object_index(n));
  return s;
}

AttributeSet FormalContext::attribute_set(const std::vector<std::string>& names) const {
  AttributeSet s(attribute_count());
  for (const auto& n : names) s.insert(attribute_index(n));
  return s;
}

std::vector<std::string> FormalContext::object_names(const ObjectSet& objs) const {
  check_objects(objs);
  std::vector<std::string> out;
  objs.for_each([&](std::size_t g) { out.push_back(objects_[g]); });
  return out;
}

std::vector<std::string> FormalContext::attribute_names(const AttributeSet& attrs) const {
  check_attributes(attrs);
  std::vector<std::string> out;
  attrs.for_each([&](std::size_t m) { out.push_back(attributes_[m]); });
  return out;
}

FormalContext FormalContext::with_label(const std::string& name, const std::string& label) const {
  std::string n = trim(name);
  if (!object_index_.contains(n) && !attribute_index_.contains(n)) {
    throw ContextError("label target '" + n + "' is neither an object nor an attribute");
  }
  FormalContext copy = *this;
  copy.labels_[trim(label)] = n;
  return copy;
}

FormalContext FormalContext::renamed(std::string name) const {
  FormalContext copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

void FormalContext::check_objects(const ObjectSet& objs) const {
  if (objs.universe() != object_count()) {
    throw InvalidSetError("object set over " + std::to_string(objs.universe()) +
                          " objects used with a context of " + std::to_string(object_count()));
  }
}

void FormalContext::check_attributes(const AttributeSet& attrs) const {
  if (attrs.universe() != attribute_count()) {
    throw InvalidSetError("attribute set over " + std::to_string(attrs.universe()) +
                          " attributes used with a context of " + std::to_string(attribute_count()));
  }
}

AttributeSet derive_intent(const FormalContext& ctx, const ObjectSet& objs) {
  ctx.check_objects(objs);
  AttributeSet out = AttributeSet::all(ctx.attribute_count());
  objs.for_each([&](std::size_t g) { out &= ctx.rows_[g]; });
  return out;
}

ObjectSet derive_extent(const FormalContext& ctx, const AttributeSet& attrs) {
  ctx.check_attributes(attrs);
  ObjectSet out = ObjectSet::all(ctx.object_count());
  attrs.for_each([&](std::size_t m) { out &= ctx.columns_[m]; });
  return out;
}

bool is_formal_concept(const FormalContext& ctx, const ObjectSet& ext, const AttributeSet& in) {
  return derive_intent(ctx, ext) == in && derive_extent(ctx, in) == ext;
}

FormalContext apposition(const FormalContext& left, const FormalContext& right,
                         const AppositionOptions& options) {
  const auto& objs = left.objects();
  std::set<std::string> lset(objs.begin(), objs.end());
  std::set<std::string> rset(right.objects().begin(), right.objects().end());
  if (lset != rset) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(lset.begin(), lset.end(), rset.begin(), rset.end(),
                                  std::back_inserter(diff));
    throw AppositionError("apposition requires identical object sets; symmetric difference: {" +
                          join(diff, ", ") + "}");
  }

  std::string right_prefix = options.right_prefix;
  if (right_prefix.empty()) right_prefix = right.name().empty() ? "right" : right.name();

  std::vector<std::string> attributes;
  std::set<std::string> taken;
  for (const auto& a : left.attributes()) {
    std::string n = options.prefix_all && !options.left_prefix.empty() ? options.left_prefix + ":" + a : a;
    taken.insert(n);
    attributes.push_back(std::move(n));
  }
  for (const auto& a : right.attributes()) {
    std::string n = options.prefix_all ? right_prefix + ":" + a : a;
    while (taken.contains(n)) n = right_prefix + ":" + n;
    taken.insert(n);
    attributes.push_back(std::move(n));
  }

  const std::size_t nl = left.attribute_count();
  const std::size_t nr = right.attribute_count();
  std::vector<AttributeSet> rows;
  rows.reserve(objs.size());
  for (std::size_t g = 0; g < objs.size(); ++g) {
    AttributeSet row(nl + nr);
    left.row(g).for_each([&](std::size_t m) { row.insert(m); });
    right.row(right.object_index(objs[g])).for_each([&](std::size_t m) { row.insert(nl + m); });
    rows.push_back(std::move(row));
  }
  FormalContext out(objs, std::move(attributes), rows, left.name());
  for (const auto& [label, name] : left.labels()) {
    if (left.find_object(name)) out = out.with_label(name, label);
  }
  return out;
}

FormalContext select_attributes(const FormalContext& ctx, const AttributeSet& keep) {
  std::vector<std::string> names = ctx.attribute_names(keep);
  std::vector<std::size_t> idx = keep.indices();
  std::vector<AttributeSet> rows;
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    AttributeSet row(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (ctx.incident(g, idx[j])) row.insert(j);
    }
    rows.push_back(std::move(row));
  }
  return FormalContext(ctx.objects(), std::move(names), rows, ctx.name());
}

}  // namespace ckml
