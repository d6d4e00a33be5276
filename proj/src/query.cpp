#include "ckml/query.hpp"

#include <functional>

#include "ckml/markup.hpp"

namespace ckml {

Expr parse_query(std::string_view text) {
  Expr q = expr_from_node(parse_expression(text));
  if (count_markers(q) == 0) throw EvalError("query has no result marker '?'");
  return q;
}

namespace {

void collect_names(const Expr& e, std::set<std::string>& out) {
  if (!e.var.empty()) out.insert(e.var);
  for (const auto& [k, t] : e.args) out.insert(t.name);
  for (const auto& c : e.children) collect_names(c, out);
}

class Desugarer {
 public:
  Desugarer(const KnowledgeBase& kb, const Expr& q) : kb_(kb) { collect_names(q, used_); }

  Expr run(const Expr& e, std::set<std::string> bound) {
    if (e.op == Expr::Op::Exists || e.op == Expr::Op::Forall) bound.insert(e.var);
    if (e.op != Expr::Op::Atom) {
      Expr out = e;
      for (auto& c : out.children) c = run(c, bound);
      return out;
    }
    Expr atom = e;
    std::vector<std::pair<std::string, std::string>> wrap;  // (var, type)
    for (auto& [k, t] : atom.args) {
      if (k == "id" || t.marker || !t.qualifier.empty() || bound.contains(t.name)) continue;
      const Entity* type = kb_.find(t.name);
      if (!type || type->kind != EntityKind::ObjectType) continue;
      if (kb_.instance(t.name)) {
        throw EvalError("'" + t.name + "' in " + e.predicate + " is both a type and an instance id");
      }
      std::string var = fresh();
      wrap.emplace_back(var, t.name);
      t = Term{};
      t.name = var;
    }
    for (auto it = wrap.rbegin(); it != wrap.rend(); ++it) atom = Expr::exists(it->first, it->second, std::move(atom));
    return atom;
  }

 private:
  std::string fresh() {
    static const char* base[] = {"x", "y", "z"};
    for (int round = 0;; ++round) {
      for (const char* b : base) {
        std::string name = round == 0 ? b : b + std::to_string(round);
        if (used_.insert(name).second) return name;
      }
    }
  }

  const KnowledgeBase& kb_;
  std::set<std::string> used_;
};

std::string element_type(const KnowledgeBase& kb, const std::string& id) {
  if (id.empty()) return {};
  const Entity& e = kb.entity(id);
  return e.kind == EntityKind::SetType ? e.genus : id;
}

// Type a marker ranges over: its qualifier, or the type implied by its
// argument position.
std::string marker_type(const Expr& e, const KnowledgeBase& kb) {
  for (const auto& [k, t] : e.args) {
    if (t.marker && !t.qualifier.empty()) return kb.resolve(t.qualifier).id;
  }
  for (const auto& c : e.children) {
    if (auto t = marker_type(c, kb); !t.empty()) return t;
  }
  if (e.op != Expr::Op::Atom) return {};
  for (const auto& [k, t] : e.args) {
    if (!t.marker) continue;
    const Entity& p = kb.resolve(e.predicate);
    if (p.kind == EntityKind::ObjectType) {
      if (k == "id") return p.id;
      if (k == p.source_role || k == p.target_role) {
        const Entity& role = kb.resolve(k, p.ontology);
        return element_type(kb, role.target_type);
      }
      return element_type(kb, kb.resolve(k, p.ontology).target_type);
    }
    if (k == "source.Instance") return p.kind == EntityKind::Function ? p.owner : p.source_type;
    if (k == "target.Instance") return element_type(kb, p.target_type);
  }
  return {};
}

}  // namespace

Expr desugar_query(const Expr& q, const KnowledgeBase& kb) { return Desugarer(kb, q).run(q, {}); }

std::set<std::string> answer(const Expr& q, const KnowledgeBase& kb) {
  if (count_markers(q) == 0) throw EvalError("query has no result marker '?'");
  Expr d = desugar_query(q, kb);
  std::string type = marker_type(d, kb);
  if (type.empty()) throw EvalError("cannot infer a type for the result marker; write it as Type#?");
  std::set<std::string> out;
  for (const auto& v : kb.domain(type)) {
    if (holds(kb, d, {{"?", v}})) out.insert(v);
  }
  return out;
}

}  // namespace ckml
