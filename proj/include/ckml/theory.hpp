#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ckml/context.hpp"

namespace ckml {

/// Γ ⊢ Δ over type (attribute) names: every object having all of Γ has at
/// least one of Δ. Either side may be empty.
///
/// Sides keep the order names were written in (markup round-trips rely on
/// it) but compare as sets.
struct Sequent {
  std::vector<std::string> antecedent;
  std::vector<std::string> consequent;

  Sequent() = default;
  Sequent(std::vector<std::string> gamma, std::vector<std::string> delta);

  friend bool operator==(const Sequent& a, const Sequent& b);
  friend bool operator<(const Sequent& a, const Sequent& b);
};

/// Renders "a, b ⊢ c" in written order.
std::string to_string(const Sequent& s);

/// An abstract conceptual scale: declared types plus sequent constraints.
struct Theory {
  std::string name;
  std::string genus;
  std::vector<std::string> types;
  std::vector<Sequent> sequents;
};

/// Throws TheoryError if a sequent mentions a name that is neither a
/// declared type nor the genus.
void check_theory(const Theory& th);

Sequent expand_subtype(const std::string& specific, const std::string& generic);
Sequent expand_disjoint(const std::vector<std::string>& types);
/// {genus} ⊢ types, or ∅ ⊢ types for an empty genus.
Sequent expand_cover(const std::string& genus, const std::vector<std::string>& types);

/// Subtype sequents {p} ⊢ {genus} in part order, then the cover
/// {genus} ⊢ parts, then {p_i, p_j} ⊢ ∅ for each pair i < j. With an empty
/// genus the subtype sequents are skipped.
std::vector<Sequent> expand_partition(const std::string& genus, const std::vector<std::string>& parts);

struct Satisfaction {
  bool holds = true;
  std::optional<std::string> witness;  // first violating object, by context order
};

/// Checks one sequent row by row. Names resolve through the context's label
/// table; names listed in `implicit_true` that are not attributes count as
/// possessed by every object (the genus of an anchored theory).
Satisfaction satisfies(const FormalContext& ctx, const Sequent& s,
                       const std::set<std::string>& implicit_true = {});

struct SequentViolation {
  Sequent sequent;
  std::string object;
};

/// Every (sequent, object) pair where the object violates the sequent. The
/// theory's genus is treated as implicitly true.
std::vector<SequentViolation> theory_violations(const FormalContext& ctx, const Theory& th);

struct ModelOptions {
  std::size_t max_types = 20;
};

/// The context of all models of the theory: attributes are th.types, objects
/// are the subsets of types that satisfy every sequent, enumerated in
/// increasing bitmask order (type i is bit i) and named "{a,b}" with names
/// sorted. A genus outside th.types is implicitly true in every model.
FormalContext models_of_theory(const Theory& th, const ModelOptions& options = {});

}  // namespace ckml
