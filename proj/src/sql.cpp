#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "ckml/query.hpp"

namespace ckml {

namespace {

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

// Column a data-valued function renders to: its value type's name.
std::string function_column(const KnowledgeBase& kb, const Entity& fn) {
  if (!fn.target_type.empty()) {
    const Entity& t = kb.entity(fn.target_type);
    if (t.kind == EntityKind::DataType) return t.name;
  }
  return fn.name;
}

std::vector<const Entity*> data_functions(const KnowledgeBase& kb, const std::string& owner) {
  std::vector<const Entity*> out;
  for (const auto& id : kb.entity_ids()) {
    const Entity& e = kb.entity(id);
    if (e.kind != EntityKind::Function || e.owner != owner || e.target_type.empty()) continue;
    if (kb.entity(e.target_type).kind == EntityKind::DataType) out.push_back(&e);
  }
  return out;
}

bool is_object_type(const KnowledgeBase& kb, const std::string& id) {
  return !id.empty() && kb.entity(id).kind == EntityKind::ObjectType;
}

// The binary relation a relation family is stored as, with its columns in
// the family's (source role, target role) orientation.
struct RelationTable {
  std::string member;
  bool swapped = false;
  std::string table;
  std::string source_column;
  std::string target_column;
};

std::optional<RelationTable> relation_table(const KnowledgeBase& kb, const std::string& predicate) {
  std::vector<std::pair<std::string, bool>> candidates;
  std::string source_role, target_role;
  if (const RelationFamily* fam = kb.family_of(predicate)) {
    candidates = fam->members;
    const Entity& rel = kb.entity(fam->relation);
    source_role = rel.source_role;
    target_role = rel.target_role;
  } else {
    candidates.emplace_back(predicate, false);
  }
  const Entity* best = nullptr;
  bool best_swapped = false;
  for (const auto& [id, swapped] : candidates) {
    const Entity& m = kb.entity(id);
    if (m.kind != EntityKind::BinaryRelation) continue;
    if (!is_object_type(kb, m.source_type) || !is_object_type(kb, m.target_type)) continue;
    bool distinct = m.source_type != m.target_type &&
                    kb.entity(m.source_type).name != kb.entity(m.target_type).name;
    bool best_distinct = best && best->source_type != best->target_type &&
                         kb.entity(best->source_type).name != kb.entity(best->target_type).name;
    if (!best || (distinct && !best_distinct)) {
      best = &m;
      best_swapped = swapped;
    }
  }
  if (!best) return std::nullopt;
  RelationTable out;
  out.member = best->id;
  out.swapped = best_swapped;
  out.table = best->name;
  std::string s = kb.entity(best->source_type).name, t = kb.entity(best->target_type).name;
  if (s == t) {
    s = source_role.empty() ? "source" : source_role;
    t = target_role.empty() ? "target" : target_role;
    if (best_swapped) std::swap(s, t);
  }
  out.source_column = best_swapped ? t : s;
  out.target_column = best_swapped ? s : t;
  return out;
}

struct Filter {
  std::string column;
  std::string value;

  friend bool operator==(const Filter&, const Filter&) = default;
};

// Everything known about one participant of the relation.
struct Side {
  std::optional<std::string> constant;
  std::vector<std::pair<std::string, std::vector<Filter>>> tables;  // entity table -> filters

  void add(const std::string& table, std::vector<Filter> filters) {
    auto it = std::find_if(tables.begin(), tables.end(), [&](const auto& t) { return t.first == table; });
    if (it == tables.end()) {
      tables.emplace_back(table, std::vector<Filter>{});
      it = tables.end() - 1;
    }
    for (auto& f : filters) {
      if (std::find(it->second.begin(), it->second.end(), f) == it->second.end()) it->second.push_back(std::move(f));
    }
  }
};

class SqlTranslator {
 public:
  explicit SqlTranslator(const KnowledgeBase& kb) : kb_(kb) {}

  SqlQuery run(const Expr& q) {
    if (count_markers(q) == 0) throw UnsupportedQueryError("query has no result marker '?'");
    owned_ = desugar_query(q, kb_);
    flatten(owned_);

    const Expr* rel_atom = nullptr;
    for (const auto* a : atoms_) {
      if (!is_relation_atom(*a)) continue;
      if (rel_atom) {
        throw UnsupportedQueryError("more than one relation atom (" + rel_atom->predicate + ", " + a->predicate +
                                    "); only a single binary relation translates");
      }
      rel_atom = a;
    }
    if (!rel_atom) throw UnsupportedQueryError("no binary relation atom to translate");

    const Entity& pred = kb_.resolve(rel_atom->predicate);
    auto table = relation_table(kb_, pred.id);
    if (!table) throw UnsupportedQueryError("relation " + rel_atom->predicate + " has no relational rendering");
    rel_ = *table;
    auto [src, tgt] = endpoints(*rel_atom, pred);
    const Entity& member = kb_.entity(rel_.member);
    std::string src_role_type = rel_.swapped ? member.target_type : member.source_type;
    std::string tgt_role_type = rel_.swapped ? member.source_type : member.target_type;

    Side sides[2];
    const Term* terms[2] = {src, tgt};
    const std::string* role_types[2] = {&src_role_type, &tgt_role_type};
    int marker_side = -1;
    for (int i = 0; i < 2; ++i) {
      const Term* t = terms[i];
      if (!t) continue;
      if (t->marker) {
        if (marker_side >= 0) throw UnsupportedQueryError("the result marker fills both participants");
        marker_side = i;
      } else if (!types_.contains(t->name)) {
        sides[i].constant = t->name;
      }
      if (!t->qualifier.empty()) constrain(sides[i], kb_.resolve(t->qualifier).id, *role_types[i]);
      if (!t->marker) {
        if (auto it = types_.find(t->name); it != types_.end()) {
          constrain(sides[i], kb_.resolve(it->second).id, *role_types[i]);
        }
      }
    }
    if (marker_side < 0) throw UnsupportedQueryError("the result marker must be a participant of " + rel_atom->predicate);

    for (const auto* a : atoms_) {
      if (a == rel_atom) continue;
      int side = side_of(*a, terms);
      add_atom(sides[side], *a, *role_types[side]);
    }

    SqlQuery out;
    out.select = {"", marker_side == 0 ? rel_.source_column : rel_.target_column};
    out.from.push_back({rel_.table, ""});
    std::vector<SqlCondition> filters;
    const char* letters[2] = {"x", "y"};
    for (int i = 0; i < 2; ++i) {
      const std::string& column = i == 0 ? rel_.source_column : rel_.target_column;
      if (sides[i].constant) filters.push_back({{"", column}, std::nullopt, *sides[i].constant});
      int n = 0;
      for (const auto& [name, fs] : sides[i].tables) {
        std::string alias = letters[i] + (n++ == 0 ? std::string() : std::to_string(n));
        out.from.push_back({name, alias});
        out.where.push_back({{"", column}, SqlColumn{alias, "ID"}, ""});
        for (const auto& f : fs) filters.push_back({{alias, f.column}, std::nullopt, f.value});
      }
    }
    out.where.insert(out.where.end(), filters.begin(), filters.end());
    return out;
  }

 private:
  void flatten(const Expr& e) {
    switch (e.op) {
      case Expr::Op::True:
        return;
      case Expr::Op::Exists:
        if (e.var_type.empty()) throw UnsupportedQueryError("Exists " + e.var + " has no type");
        types_[e.var] = e.var_type;
        flatten(e.children.at(0));
        return;
      case Expr::Op::And:
        for (const auto& c : e.children) flatten(c);
        return;
      case Expr::Op::Atom:
        if (!e.order.empty()) {
          throw UnsupportedQueryError("ordered comparison in " + to_string(e) + " is outside the equality fragment");
        }
        atoms_.push_back(&e);
        return;
      default:
        throw UnsupportedQueryError("'" + to_string(e) + "' is outside the existential conjunctive fragment");
    }
  }

  bool is_relation_atom(const Expr& a) const {
    const Entity* p = kb_.find(a.predicate);
    if (!p) throw UnsupportedQueryError("unknown predicate " + a.predicate);
    if (p->kind == EntityKind::ObjectType) return !p->source_role.empty() && !a.arg("id");
    if (p->kind == EntityKind::BinaryRelation) return true;
    if (p->kind == EntityKind::Function) return kb_.family_of(p->id) != nullptr || is_object_type(kb_, p->target_type);
    return false;
  }

  // Participant terms in the family's (source role, target role) orientation.
  std::pair<const Term*, const Term*> endpoints(const Expr& a, const Entity& p) const {
    if (p.kind == EntityKind::ObjectType) return {a.arg(p.source_role), a.arg(p.target_role)};
    const Term* s = a.arg("source.Instance");
    const Term* t = a.arg("target.Instance");
    if (const RelationFamily* fam = kb_.family_of(p.id)) {
      for (const auto& [m, swapped] : fam->members) {
        if (m == p.id && swapped) std::swap(s, t);
      }
    }
    return {s, t};
  }

  // Which participant an object or function atom constrains.
  int side_of(const Expr& a, const Term* const terms[2]) const {
    const Term* subject = a.arg("id");
    if (!subject) subject = a.arg("source.Instance");
    if (!subject) throw UnsupportedQueryError("'" + to_string(a) + "' constrains no participant");
    for (int i = 0; i < 2; ++i) {
      if (!terms[i]) continue;
      if (subject->marker && terms[i]->marker) return i;
      if (!subject->marker && !terms[i]->marker && subject->name == terms[i]->name) return i;
    }
    throw UnsupportedQueryError("'" + to_string(a) + "' does not constrain a participant of the relation");
  }

  std::string constant_of(const Term& t, const Expr& a) const {
    if (t.marker || types_.contains(t.name)) {
      throw UnsupportedQueryError("'" + to_string(a) + "' compares with a variable; only constant filters translate");
    }
    return t.name;
  }

  void add_atom(Side& side, const Expr& a, const std::string& role_type) {
    const Entity& p = kb_.resolve(a.predicate);
    if (p.kind == EntityKind::ObjectType) {
      if (const Term* id = a.arg("id"); id && !id->qualifier.empty()) {
        constrain(side, kb_.resolve(id->qualifier).id, role_type);
      }
      std::string table = constrain(side, p.id, role_type);
      std::vector<Filter> filters;
      for (const auto& [k, t] : a.args) {
        if (k == "id") continue;
        const Entity* fn = kb_.find(k, p.ontology);
        if (!fn || fn->kind != EntityKind::Function) throw UnsupportedQueryError("unknown function " + k + " on " + a.predicate);
        filters.push_back({function_column(kb_, *fn), constant_of(t, a)});
      }
      if (!filters.empty()) {
        if (table.empty()) table = entity_table_for(p.id, a);
        side.add(table, std::move(filters));
      }
      return;
    }
    if (p.kind == EntityKind::Function && !p.target_type.empty() &&
        kb_.entity(p.target_type).kind == EntityKind::DataType) {
      const Term* v = a.arg("target.Instance");
      if (!v) throw UnsupportedQueryError("'" + to_string(a) + "' needs a target value");
      side.add(entity_table_for(p.owner, a), {{function_column(kb_, p), constant_of(*v, a)}});
      return;
    }
    throw UnsupportedQueryError("'" + to_string(a) + "' is not an object or attribute constraint");
  }

  std::string entity_table_for(const std::string& type_id, const Expr& a) const {
    for (std::string t = type_id; !t.empty();) {
      const Entity& e = kb_.entity(t);
      if (!data_functions(kb_, t).empty()) return e.name;
      t = e.parents.empty() ? std::string() : e.parents.front();
    }
    throw UnsupportedQueryError("'" + to_string(a) + "' has no entity table");
  }

  // Adds the entity table and filters a type membership needs; returns the
  // table name, or "" when the relation column already guarantees it.
  std::string constrain(Side& side, const std::string& type_id, const std::string& role_type) {
    const Entity& t = kb_.entity(type_id);
    if (type_id == role_type || t.ontology == "urn:ckml:builtin") return {};
    if (!data_functions(kb_, type_id).empty()) {
      side.add(t.name, {});
      return t.name;
    }
    if (t.definition) {
      const Expr* d = &*t.definition;
      if (d->op == Expr::Op::And && d->children.size() == 1) d = &d->children[0];
      const Term* id = d->op == Expr::Op::Atom ? d->arg("id") : nullptr;
      if (id && id->name == t.definition_var && !id->marker) {
        const Entity& base = kb_.resolve(d->predicate, t.ontology);
        std::string table = constrain(side, base.id, role_type);
        if (table.empty()) table = entity_table_for(base.id, *d);
        std::vector<Filter> filters;
        for (const auto& [k, v] : d->args) {
          if (k == "id") continue;
          const Entity* fn = kb_.find(k, base.ontology);
          if (!fn || fn->kind != EntityKind::Function || v.marker || v.name == t.definition_var) {
            throw UnsupportedQueryError("definition of " + t.name + " is outside the translatable fragment");
          }
          filters.push_back({function_column(kb_, *fn), v.name});
        }
        side.add(table, std::move(filters));
        return table;
      }
    }
    throw UnsupportedQueryError("type " + t.name + " has no relational rendering");
  }

  const KnowledgeBase& kb_;
  std::map<std::string, std::string> types_;  // quantified variable -> type
  std::vector<const Expr*> atoms_;
  RelationTable rel_;
  Expr owned_;  // desugared query; atoms_ points into it
};

}  // namespace

std::string SqlQuery::render() const {
  std::ostringstream out;
  out << "SELECT " << select.str() << "\nFROM ";
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (i) out << ", ";
    out << from[i].table;
    if (!from[i].alias.empty()) out << ' ' << from[i].alias;
  }
  out << '\n';
  auto cond = [](const SqlCondition& c) {
    return c.lhs.str() + " = " + (c.rhs ? c.rhs->str() : quote(c.literal));
  };
  std::vector<std::string> joins, filters;
  for (const auto& c : where) (c.is_join() ? joins : filters).push_back(cond(c));
  if (joins.empty() && filters.empty()) return out.str();
  out << "WHERE\n  ";
  std::size_t first = 0;
  if (!joins.empty()) {
    for (std::size_t i = 0; i < joins.size(); ++i) out << (i ? " AND " : "") << joins[i];
  } else {
    out << filters[0];
    first = 1;
  }
  out << '\n';
  for (std::size_t i = first; i < filters.size(); ++i) out << "  AND " << filters[i] << '\n';
  return out.str();
}

SqlQuery to_sql(const Expr& q, const KnowledgeBase& kb) { return SqlTranslator(kb).run(q); }

const SqlTable* Database::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

Database relational_rendering(const KnowledgeBase& kb) {
  Database db;
  for (const auto& id : kb.entity_ids()) {
    const Entity& e = kb.entity(id);
    if (e.kind != EntityKind::ObjectType || db.table(e.name)) continue;
    auto fns = data_functions(kb, id);
    if (fns.empty()) continue;
    SqlTable t;
    t.name = e.name;
    t.columns.push_back("ID");
    for (const auto* f : fns) t.columns.push_back(function_column(kb, *f));
    for (const auto& inst : kb.domain(id)) {
      std::vector<std::string> row{inst};
      for (const auto* f : fns) {
        auto v = kb.values(f->id, inst);
        row.push_back(v.empty() ? std::string() : v.front());
      }
      t.rows.push_back(std::move(row));
    }
    db.tables.push_back(std::move(t));
  }
  std::set<std::string> done;
  for (const auto& id : kb.entity_ids()) {
    const Entity& e = kb.entity(id);
    if (e.kind != EntityKind::BinaryRelation && e.kind != EntityKind::ObjectType) continue;
    if (e.kind == EntityKind::ObjectType && e.source_role.empty()) continue;
    auto rt = relation_table(kb, id);
    if (!rt || !done.insert(rt->member).second || db.table(rt->table)) continue;
    SqlTable t;
    t.name = rt->table;
    t.columns = {rt->source_column, rt->target_column};
    // pairs() of a member is in the member's orientation.
    for (auto [a, b] : kb.pairs(rt->member)) {
      if (rt->swapped) std::swap(a, b);
      t.rows.push_back({a, b});
    }
    db.tables.push_back(std::move(t));
  }
  return db;
}

std::set<std::string> run_sql(const SqlQuery& sql, const Database& db) {
  std::vector<const SqlTable*> tables;
  for (const auto& f : sql.from) {
    const SqlTable* t = db.table(f.table);
    if (!t) throw SqlError("unknown table '" + f.table + "'");
    tables.push_back(t);
  }
  // (from item, column index) of a column reference.
  auto locate = [&](const SqlColumn& c) -> std::pair<std::size_t, std::size_t> {
    std::optional<std::pair<std::size_t, std::size_t>> hit;
    for (std::size_t i = 0; i < sql.from.size(); ++i) {
      const auto& f = sql.from[i];
      std::string name = f.alias.empty() ? f.table : f.alias;
      if (!c.alias.empty() && c.alias != name) continue;
      const auto& cols = tables[i]->columns;
      auto it = std::find(cols.begin(), cols.end(), c.column);
      if (it == cols.end()) continue;
      if (hit) throw SqlError("ambiguous column '" + c.str() + "'");
      hit = std::pair(i, static_cast<std::size_t>(it - cols.begin()));
    }
    if (!hit) throw SqlError("unknown column '" + c.str() + "'");
    return *hit;
  };
  struct Check {
    std::pair<std::size_t, std::size_t> lhs;
    std::optional<std::pair<std::size_t, std::size_t>> rhs;
    std::string literal;
    std::size_t ready;  // deepest from item referenced
  };
  std::vector<Check> checks;
  for (const auto& c : sql.where) {
    Check k{locate(c.lhs), std::nullopt, c.literal, 0};
    if (c.rhs) k.rhs = locate(*c.rhs);
    k.ready = std::max(k.lhs.first, k.rhs ? k.rhs->first : 0);
    checks.push_back(std::move(k));
  }
  auto select = locate(sql.select);

  std::set<std::string> out;
  std::vector<const std::vector<std::string>*> row(tables.size());
  auto cell = [&](std::pair<std::size_t, std::size_t> at) -> const std::string& { return (*row[at.first])[at.second]; };
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == tables.size()) {
      out.insert(cell(select));
      return;
    }
    for (const auto& r : tables[depth]->rows) {
      row[depth] = &r;
      bool ok = std::all_of(checks.begin(), checks.end(), [&](const Check& k) {
        if (k.ready != depth) return true;
        return cell(k.lhs) == (k.rhs ? cell(*k.rhs) : k.literal);
      });
      if (ok) rec(depth + 1);
    }
  };
  if (!tables.empty()) rec(0);
  return out;
}

std::set<std::string> run_sql(const SqlQuery& sql, const KnowledgeBase& kb) {
  return run_sql(sql, relational_rendering(kb));
}

}  // namespace ckml
