#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ckml/expression.hpp"
#include "ckml/ontology.hpp"

namespace ckml {

/// Parses a query written as expression markup. At least one result marker
/// (`?` or `Type#?`) is required; every marker denotes the same result.
Expr parse_query(std::string_view text);

/// Replaces type names used as arguments (`inst="Cylinder"`) with fresh
/// variables bound by Exists of that type, outermost first. Throws EvalError
/// if such a name is also an instance id.
Expr desugar_query(const Expr& q, const KnowledgeBase& kb);

/// The values that can replace the marker, by exhaustive evaluation of the
/// desugared query. The marker ranges over its qualifier type, or else over
/// the type its position implies.
std::set<std::string> answer(const Expr& q, const KnowledgeBase& kb);

struct SqlColumn {
  std::string alias;  // empty for an unqualified column
  std::string column;

  std::string str() const { return alias.empty() ? column : alias + "." + column; }
  friend bool operator==(const SqlColumn&, const SqlColumn&) = default;
};

struct SqlCondition {
  SqlColumn lhs;
  std::optional<SqlColumn> rhs;  // column equality when set
  std::string literal;           // otherwise lhs = 'literal'

  bool is_join() const { return rhs.has_value(); }
  friend bool operator==(const SqlCondition&, const SqlCondition&) = default;
};

struct SqlTableRef {
  std::string table;
  std::string alias;  // empty when the table is not aliased

  friend bool operator==(const SqlTableRef&, const SqlTableRef&) = default;
};

/// SELECT one column FROM tables WHERE a conjunction of equalities.
struct SqlQuery {
  SqlColumn select;
  std::vector<SqlTableRef> from;
  std::vector<SqlCondition> where;

  /// Uppercase keywords, joins on the first WHERE line, one filter per
  /// following line, string literals in single quotes.
  std::string render() const;
  friend bool operator==(const SqlQuery&, const SqlQuery&) = default;
};

/// Translates a query in the existential fragment: one binary relation
/// (in any of its inter-translatable forms) plus object-type and attribute
/// constraints on its participants. Throws UnsupportedQueryError naming the
/// offending part for anything else.
SqlQuery to_sql(const Expr& q, const KnowledgeBase& kb);

struct SqlTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Relational rendering of a knowledge base: one table per entity type
/// with data-valued functions (ID plus one column per function, named by its
/// value type) and one table per binary relation, with the relation's
/// participant type names as columns.
struct Database {
  std::vector<SqlTable> tables;

  const SqlTable* table(std::string_view name) const;
};

Database relational_rendering(const KnowledgeBase& kb);

/// Nested-loop evaluation of the select-project-join. Throws SqlError for
/// unknown tables or columns.
std::set<std::string> run_sql(const SqlQuery& sql, const Database& db);
std::set<std::string> run_sql(const SqlQuery& sql, const KnowledgeBase& kb);

}  // namespace ckml
