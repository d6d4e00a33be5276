#include "ckml/ontology.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace ckml {

// Expression evaluation over a knowledge base. The guard breaks cycles
// between defining queries (a type whose definition mentions itself).
class Evaluator {
 public:
  using Env = std::map<std::string, std::string>;

  explicit Evaluator(const KnowledgeBase& kb) : kb_(kb) {}

  bool is_a(const std::string& value, const std::string& type_id) {
    const Entity& t = kb_.entity(type_id);
    switch (t.kind) {
      case EntityKind::DataType:
        if (!t.values.empty()) return std::find(t.values.begin(), t.values.end(), value) != t.values.end();
        return occurs_as(value, type_id);
      case EntityKind::SetType:
        return false;
      case EntityKind::CollectionType:
        return false;
      case EntityKind::BinaryRelation:
      case EntityKind::Function:
        throw EvalError("'" + t.name + "' is a " + std::string(to_string(t.kind)) + ", not a type");
      case EntityKind::ObjectType:
        break;
    }
    const Instance* inst = kb_.instance(value);
    if (!inst) return false;
    for (const auto& d : inst->types) {
      if (kb_.entity(d).kind == EntityKind::ObjectType && kb_.leq(d, type_id)) return true;
    }
    // Defining queries of the type and of anything below it.
    for (const auto& sub : kb_.types_below(type_id)) {
      if (defined_member(value, sub)) return true;
    }
    return false;
  }

  std::vector<std::string> domain(const std::string& type_id) {
    const Entity& t = kb_.entity(type_id);
    std::vector<std::string> out;
    if (t.kind == EntityKind::DataType) {
      if (!t.values.empty()) return t.values;
      for (const auto& f : kb_.facts_) {
        const Entity& p = kb_.entity(f.predicate);
        if (p.target_type == type_id && std::find(out.begin(), out.end(), f.value) == out.end()) {
          out.push_back(f.value);
        }
      }
      std::stable_sort(out.begin(), out.end(),
                       [&](const std::string& a, const std::string& b) { return kb_.compare(type_id, a, b) < 0; });
      return out;
    }
    if (t.kind != EntityKind::ObjectType) {
      throw EvalError("cannot range over '" + t.name + "' (" + std::string(to_string(t.kind)) + ")");
    }
    for (const auto& inst : kb_.instances_) {
      if (is_a(inst.id, type_id)) out.push_back(inst.id);
    }
    return out;
  }

  bool holds(const Expr& e, const Env& env) {
    switch (e.op) {
      case Expr::Op::True:
        return true;
      case Expr::Op::And:
        return std::all_of(e.children.begin(), e.children.end(), [&](const Expr& c) { return holds(c, env); });
      case Expr::Op::Or:
        return std::any_of(e.children.begin(), e.children.end(), [&](const Expr& c) { return holds(c, env); });
      case Expr::Op::Not:
        return !holds(e.children.at(0), env);
      case Expr::Op::Implies:
        return !holds(e.children.at(0), env) || holds(e.children.at(1), env);
      case Expr::Op::Equiv:
        return holds(e.children.at(0), env) == holds(e.children.at(1), env);
      case Expr::Op::Exists:
      case Expr::Op::Forall: {
        if (e.var_type.empty()) throw EvalError("quantified variable '" + e.var + "' has no type");
        const Entity& t = kb_.resolve(e.var_type);
        bool exists = e.op == Expr::Op::Exists;
        Env inner = env;
        for (const auto& v : domain(t.id)) {
          inner[e.var] = v;
          if (holds(e.children.at(0), inner) == exists) return exists;
        }
        return !exists;
      }
      case Expr::Op::Atom:
        return atom(e, env);
    }
    return false;
  }

 private:
  bool occurs_as(const std::string& value, const std::string& data_type) {
    for (const auto& f : kb_.facts_) {
      if (f.value == value && kb_.entity(f.predicate).target_type == data_type) return true;
    }
    return false;
  }

  bool defined_member(const std::string& value, const std::string& type_id) {
    const Entity& t = kb_.entity(type_id);
    if (!t.definition) return false;
    auto key = std::pair(value, type_id);
    if (active_.contains(key)) return false;
    active_.insert(key);
    bool ok = true;
    for (const auto& p : t.parents) {
      if (!is_a(value, p)) {
        ok = false;
        break;
      }
    }
    ok = ok && holds(*t.definition, Env{{t.definition_var, value}});
    active_.erase(key);
    return ok;
  }

  // Value a term denotes, or nullopt for an unbound marker.
  std::optional<std::string> value_of(const Term& t, const Env& env) {
    if (t.marker) {
      auto it = env.find("?");
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    if (auto it = env.find(t.name); it != env.end()) return it->second;
    return t.name;
  }

  bool qualified(const Term& t, const std::string& value) {
    if (t.qualifier.empty()) return true;
    const Entity& q = kb_.resolve(t.qualifier);
    return is_a(value, q.id);
  }

  // Does the term accept `value` in this position?
  bool matches(const Term* t, const std::string& value, const Env& env) {
    if (!t) return true;
    auto v = value_of(*t, env);
    if (!v) throw EvalError("the result marker '?' is unbound here");
    return *v == value && qualified(*t, value);
  }

  const Entity& predicate_entity(const std::string& name, const std::string& ontology) {
    const Entity* e = kb_.find(name, ontology);
    if (!e || (e->kind != EntityKind::Function && e->kind != EntityKind::BinaryRelation)) {
      throw EvalError("unknown function or relation '" + name + "'");
    }
    return *e;
  }

  bool ordered_match(const Entity& pred, const std::string& order, const std::string& have, const std::string& want) {
    int c = kb_.compare(pred.target_type, have, want);
    if (order == "geq") return c >= 0;
    if (order == "leq") return c <= 0;
    throw EvalError("unknown order '" + order + "' (expected geq or leq)");
  }

  bool binary_atom(const Entity& pred, const Expr& e, const Env& env) {
    const Term* s = e.arg("source.Instance");
    const Term* t = e.arg("target.Instance");
    for (const auto& [k, v] : e.args) {
      if (k != "source.Instance" && k != "target.Instance") {
        throw EvalError("unexpected argument '" + k + "' on relation atom " + e.predicate);
      }
    }
    if (!e.order.empty() && t) {
      auto want = value_of(*t, env);
      if (!want) throw EvalError("ordered comparison against the result marker is not supported");
      for (const auto& [a, b] : kb_.pairs(pred.id)) {
        if (matches(s, a, env) && ordered_match(pred, e.order, b, *want) && qualified(*t, b)) return true;
      }
      return false;
    }
    for (const auto& [a, b] : kb_.pairs(pred.id)) {
      if (matches(s, a, env) && matches(t, b, env)) return true;
    }
    return false;
  }

  bool object_atom(const Entity& type, const Expr& e, const Env& env) {
    const Term* id = e.arg("id");
    if (!id && !type.source_role.empty()) {
      // Reified relation used with its participant roles.
      const Term* s = e.arg(type.source_role);
      const Term* t = e.arg(type.target_role);
      for (const auto& [k, v] : e.args) {
        if (k != type.source_role && k != type.target_role) {
          throw EvalError("unexpected argument '" + k + "' on " + e.predicate + " (roles are " + type.source_role +
                          ", " + type.target_role + ")");
        }
      }
      for (const auto& [a, b] : kb_.pairs(type.id)) {
        if (matches(s, a, env) && matches(t, b, env)) return true;
      }
      return false;
    }
    if (!id) throw EvalError("object atom " + e.predicate + " needs an id");
    auto subject = value_of(*id, env);
    if (!subject) throw EvalError("the result marker '?' is unbound here");
    if (!qualified(*id, *subject) || !is_a(*subject, type.id)) return false;
    for (const auto& [k, term] : e.args) {
      if (k == "id") continue;
      const Entity& pred = predicate_entity(k, type.ontology);
      auto want = value_of(term, env);
      if (!want) throw EvalError("the result marker '?' is unbound here");
      bool found = false;
      for (const auto& v : kb_.values(pred.id, *subject)) {
        bool hit = e.order.empty() ? v == *want : ordered_match(pred, e.order, v, *want);
        if (hit && qualified(term, v)) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  bool atom(const Expr& e, const Env& env) {
    const Entity* p = kb_.find(e.predicate);
    if (!p) throw EvalError("unknown type or relation '" + e.predicate + "'");
    switch (p->kind) {
      case EntityKind::BinaryRelation:
      case EntityKind::Function:
        return binary_atom(*p, e, env);
      case EntityKind::ObjectType:
        return object_atom(*p, e, env);
      default:
        throw EvalError("'" + e.predicate + "' cannot be used as an atom (" + std::string(to_string(p->kind)) + ")");
    }
  }

  const KnowledgeBase& kb_;
  std::set<std::pair<std::string, std::string>> active_;
};

bool KnowledgeBase::is_a(const std::string& value, const std::string& type) const {
  return Evaluator(*this).is_a(value, type);
}

std::vector<std::string> KnowledgeBase::domain(const std::string& type) const { return Evaluator(*this).domain(type); }

bool holds(const KnowledgeBase& kb, const Expr& e, const std::map<std::string, std::string>& env) {
  return Evaluator(kb).holds(e, env);
}

std::vector<Binding> evaluate(const KnowledgeBase& kb, const Expr& e,
                              const std::vector<std::pair<std::string, std::string>>& free_vars) {
  Evaluator ev(kb);
  std::vector<std::vector<std::string>> domains;
  for (const auto& [var, type] : free_vars) {
    if (type.empty()) throw EvalError("free variable '" + var + "' has no type");
    domains.push_back(ev.domain(kb.resolve(type).id));
  }
  std::vector<Binding> out;
  Binding env;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == free_vars.size()) {
      if (ev.holds(e, env)) out.push_back(env);
      return;
    }
    for (const auto& v : domains[i]) {
      env[free_vars[i].first] = v;
      rec(i + 1);
    }
    env.erase(free_vars[i].first);
  };
  rec(0);
  return out;
}

}  // namespace ckml
