#include "ckml/theory.hpp"

#include <algorithm>
#include <cstdint>

#include "text_util.hpp"

namespace ckml {

namespace {

std::vector<std::string> normalize_side(std::vector<std::string> names) {
  std::vector<std::string> out;
  for (auto& n : names) {
    std::string t = trim(n);
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

Sequent::Sequent(std::vector<std::string> gamma, std::vector<std::string> delta)
    : antecedent(normalize_side(std::move(gamma))), consequent(normalize_side(std::move(delta))) {}

bool operator==(const Sequent& a, const Sequent& b) {
  return as_set(a.antecedent) == as_set(b.antecedent) && as_set(a.consequent) == as_set(b.consequent);
}

bool operator<(const Sequent& a, const Sequent& b) {
  return std::pair(as_set(a.antecedent), as_set(a.consequent)) < std::pair(as_set(b.antecedent), as_set(b.consequent));
}

std::string to_string(const Sequent& s) {
  std::string out = join(s.antecedent, ", ");
  out += out.empty() ? "⊢" : " ⊢";
  if (!s.consequent.empty()) out += " " + join(s.consequent, ", ");
  return out;
}

void check_theory(const Theory& th) {
  std::set<std::string> known(th.types.begin(), th.types.end());
  if (!th.genus.empty()) known.insert(th.genus);
  for (const auto& s : th.sequents) {
    for (const auto* side : {&s.antecedent, &s.consequent}) {
      for (const auto& n : *side) {
        if (n.empty()) throw TheoryError("empty type name in sequent " + to_string(s));
        if (!known.contains(n)) {
          throw TheoryError("sequent " + to_string(s) + " mentions undeclared type '" + n + "'");
        }
      }
    }
  }
}

Sequent expand_subtype(const std::string& specific, const std::string& generic) {
  if (trim(specific).empty() || trim(generic).empty()) throw TheoryError("subtype needs two type names");
  return Sequent{{trim(specific)}, {trim(generic)}};
}

Sequent expand_disjoint(const std::vector<std::string>& types) {
  if (types.empty()) throw TheoryError("disjointness needs at least one type");
  return Sequent(types, {});
}

Sequent expand_cover(const std::string& genus, const std::vector<std::string>& types) {
  if (types.empty()) throw TheoryError("cover needs at least one type");
  std::vector<std::string> gamma;
  if (!trim(genus).empty()) gamma.push_back(genus);
  return Sequent(std::move(gamma), types);
}

std::vector<Sequent> expand_partition(const std::string& genus, const std::vector<std::string>& parts) {
  if (parts.empty()) throw TheoryError("partition needs at least one part");
  std::set<std::string> seen;
  for (const auto& p : parts) {
    if (!seen.insert(trim(p)).second) throw TheoryError("duplicate partition part '" + trim(p) + "'");
    if (trim(p) == trim(genus)) throw TheoryError("partition part equals its genus '" + trim(p) + "'");
  }
  std::vector<Sequent> out;
  if (!trim(genus).empty()) {
    for (const auto& p : parts) out.push_back(expand_subtype(p, genus));
  }
  out.push_back(expand_cover(genus, parts));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) out.push_back(expand_disjoint({parts[i], parts[j]}));
  }
  return out;
}

namespace {

struct ResolvedSide {
  AttributeSet attrs;
  bool implicit = false;  // contains an implicitly true name
};

ResolvedSide resolve(const FormalContext& ctx, const std::vector<std::string>& names,
                     const std::set<std::string>& implicit_true, std::vector<std::string>& unknown) {
  ResolvedSide side{AttributeSet(ctx.attribute_count())};
  for (const auto& n : names) {
    if (auto m = ctx.find_attribute(n)) {
      side.attrs.insert(*m);
    } else if (implicit_true.contains(n)) {
      side.implicit = true;
    } else {
      unknown.push_back(n);
    }
  }
  return side;
}

}  // namespace

Satisfaction satisfies(const FormalContext& ctx, const Sequent& s, const std::set<std::string>& implicit_true) {
  std::vector<std::string> unknown;
  ResolvedSide gamma = resolve(ctx, s.antecedent, implicit_true, unknown);
  ResolvedSide delta = resolve(ctx, s.consequent, implicit_true, unknown);
  if (!unknown.empty()) {
    throw TheoryError("sequent " + to_string(s) + " uses unknown attribute(s): " + join(unknown, ", "));
  }
  if (delta.implicit) return {};
  ObjectSet premise = derive_extent(ctx, gamma.attrs);
  for (std::size_t g : premise.indices()) {
    if ((ctx.row(g) & delta.attrs).empty()) return {false, ctx.objects()[g]};
  }
  return {};
}

std::vector<SequentViolation> theory_violations(const FormalContext& ctx, const Theory& th) {
  std::set<std::string> implicit;
  if (!th.genus.empty()) implicit.insert(th.genus);
  std::vector<SequentViolation> out;
  for (const auto& s : th.sequents) {
    std::vector<std::string> unknown;
    ResolvedSide gamma = resolve(ctx, s.antecedent, implicit, unknown);
    ResolvedSide delta = resolve(ctx, s.consequent, implicit, unknown);
    if (!unknown.empty()) {
      throw TheoryError("sequent " + to_string(s) + " uses unknown attribute(s): " + join(unknown, ", "));
    }
    if (delta.implicit) continue;
    for (std::size_t g : derive_extent(ctx, gamma.attrs).indices()) {
      if ((ctx.row(g) & delta.attrs).empty()) out.push_back({s, ctx.objects()[g]});
    }
  }
  return out;
}

FormalContext models_of_theory(const Theory& th, const ModelOptions& options) {
  check_theory(th);
  const std::size_t n = th.types.size();
  if (n > options.max_types || n >= 63) {
    throw LimitError("theory '" + th.name + "' has " + std::to_string(n) + " types; model enumeration bound is " +
                     std::to_string(options.max_types));
  }
  std::set<std::string> distinct(th.types.begin(), th.types.end());
  if (distinct.size() != n) throw TheoryError("theory '" + th.name + "' declares a type twice");

  auto bit_of = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(th.types.begin(), th.types.end(), name);
    if (it == th.types.end()) return std::nullopt;
    return static_cast<std::size_t>(it - th.types.begin());
  };
  // Each sequent as (antecedent mask, consequent mask, consequent holds implicitly).
  struct Compiled {
    std::uint64_t gamma = 0;
    std::uint64_t delta = 0;
    bool always = false;
  };
  std::vector<Compiled> compiled;
  for (const auto& s : th.sequents) {
    Compiled c;
    for (const auto& a : s.antecedent) {
      if (auto b = bit_of(a)) c.gamma |= std::uint64_t{1} << *b;
    }
    for (const auto& d : s.consequent) {
      if (auto b = bit_of(d)) c.delta |= std::uint64_t{1} << *b;
      else c.always = true;  // the genus outside the declared types
    }
    compiled.push_back(c);
  }

  std::vector<std::string> objects;
  std::vector<AttributeSet> rows;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    bool ok = std::all_of(compiled.begin(), compiled.end(), [&](const Compiled& c) {
      return c.always || (c.gamma & mask) != c.gamma || (c.delta & mask) != 0;
    });
    if (!ok) continue;
    AttributeSet row(n);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        row.insert(i);
        names.push_back(th.types[i]);
      }
    }
    std::sort(names.begin(), names.end());
    objects.push_back("{" + join(names, ",") + "}");
    rows.push_back(std::move(row));
  }
  return FormalContext(std::move(objects), th.types, rows, th.name);
}

}  // namespace ckml
