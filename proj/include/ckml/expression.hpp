#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ckml/markup.hpp"

namespace ckml {

/// An argument written as `[Qualifier#]name`. The name "?" is the result
/// marker. Whether a plain name is a variable or a constant depends on the
/// quantifiers in scope, so that is decided during evaluation.
struct Term {
  std::string qualifier;  // type qualifier, possibly prefixed ("DB:Shape")
  std::string name;       // quotes stripped
  bool marker = false;

  static Term parse(std::string_view raw);
  std::string str() const;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Query / assertion AST.
///
/// Atoms keep the predicate tag as written plus their arguments in written
/// order. Embedded atoms (a relation element inside an object element) are
/// flattened into a conjunction with the enclosing element's id as the
/// implicit source.
struct Expr {
  enum class Op { True, Atom, And, Or, Not, Implies, Equiv, Exists, Forall };

  Op op = Op::True;
  std::string predicate;
  std::vector<std::pair<std::string, Term>> args;
  std::string order;  // "geq" / "leq" comparison on a function atom
  std::string var;
  std::string var_type;
  std::vector<Expr> children;

  const Term* arg(std::string_view key) const;

  static Expr atom(std::string predicate, std::vector<std::pair<std::string, Term>> args);
  static Expr conj(std::vector<Expr> parts);
  static Expr negate(Expr e);
  static Expr exists(std::string var, std::string type, Expr body);
  static Expr forall(std::string var, std::string type, Expr body);

  friend bool operator==(const Expr&, const Expr&) = default;
};

/// Converts an expression-position node (atom, connective, quantifier, or an
/// Assertion/Expression/Lambda/Object wrapper, whose bodies are conjoined).
/// Comments are dropped.
Expr expr_from_node(const Node& node);

/// Markup for an expression; atoms become self-closing elements with their
/// arguments as attributes.
Node expr_to_node(const Expr& e);

/// Compact one-line rendering, e.g. `Exists x:Cylinder. DB:Support(inst=x, thme=Prism#?)`.
std::string to_string(const Expr& e);

/// Number of result markers anywhere in the expression.
std::size_t count_markers(const Expr& e);

/// Replaces every term named `var` (unqualified or qualified) by `value`.
Expr substitute(const Expr& e, const std::string& var, const Term& value);

}  // namespace ckml
