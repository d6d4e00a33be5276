#include "ckml/scaling.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "ckml/markup.hpp"
#include "text_util.hpp"

namespace ckml {

namespace {

constexpr const char* kVar = "x";

Term constant(const std::string& value) {
  Term t;
  t.name = value;
  return t;
}

Term variable(const std::string& name) { return constant(name); }

Expr value_atom(const std::string& function, const std::string& var, const std::string& value,
                const std::string& order = {}) {
  Expr e = Expr::atom(function, {{"source.Instance", variable(var)}, {"target.Instance", constant(value)}});
  e.order = order;
  return e;
}

Expr type_atom(const std::string& type, const std::string& var) { return Expr::atom(type, {{"id", variable(var)}}); }

void check_increasing(const std::vector<std::string>& thresholds) {
  if (thresholds.empty()) throw ScaleError("ordinal scale needs at least one threshold");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (compare_values(thresholds[i - 1], thresholds[i]) >= 0) {
      throw ScaleError("thresholds must be strictly increasing ('" + thresholds[i - 1] + "' before '" +
                       thresholds[i] + "')");
    }
  }
}

// The abstract theory of a scale: its attributes are the types.
Theory theory_over(const std::string& name, const std::string& genus, const std::vector<ScaleBinding>& bindings,
                   std::vector<Sequent> sequents) {
  Theory th;
  th.name = name;
  th.genus = genus;
  for (const auto& b : bindings) th.types.push_back(b.attribute);
  th.sequents = std::move(sequents);
  return th;
}

}  // namespace

std::vector<std::string> ConcreteScale::attributes() const {
  std::vector<std::string> out;
  for (const auto& b : bindings) out.push_back(b.attribute);
  return out;
}

ConcreteScale nominal_scale(const std::string& name, const std::string& genus, const std::string& function,
                            const std::vector<std::string>& values) {
  if (values.empty()) throw ScaleError("nominal scale '" + name + "' needs at least one value");
  std::set<std::string> seen;
  ConcreteScale s;
  s.name = name;
  s.genus = genus;
  s.description = function;
  for (const auto& v : values) {
    if (!seen.insert(v).second) throw ScaleError("nominal scale '" + name + "' lists '" + v + "' twice");
    s.bindings.push_back({v, kVar, value_atom(function, kVar, v)});
  }
  std::vector<Sequent> sequents;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) sequents.push_back(expand_disjoint({values[i], values[j]}));
  }
  s.abstract = theory_over(name, genus, s.bindings, std::move(sequents));
  return s;
}

ConcreteScale ordinal_scale(const std::string& name, const std::string& genus, const std::string& function,
                            const std::vector<std::string>& thresholds, Direction direction) {
  check_increasing(thresholds);
  bool geq = direction == Direction::Geq;
  ConcreteScale s;
  s.name = name;
  s.genus = genus;
  s.description = function;
  auto label = [&](const std::string& t) { return (geq ? ">=" : "<=") + t; };
  for (const auto& t : thresholds) s.bindings.push_back({label(t), kVar, value_atom(function, kVar, t, geq ? "geq" : "leq")});
  std::vector<Sequent> sequents;
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (geq) sequents.push_back(expand_subtype(label(thresholds[i]), label(thresholds[i - 1])));
    else sequents.push_back(expand_subtype(label(thresholds[i - 1]), label(thresholds[i])));
  }
  s.abstract = theory_over(name, genus, s.bindings, std::move(sequents));
  return s;
}

ConcreteScale interordinal_scale(const std::string& name, const std::string& genus, const std::string& function,
                                 const std::vector<std::string>& thresholds) {
  ConcreteScale up = ordinal_scale(name, genus, function, thresholds, Direction::Geq);
  ConcreteScale down = ordinal_scale(name, genus, function, thresholds, Direction::Leq);
  for (auto& b : down.bindings) up.bindings.push_back(std::move(b));
  for (auto& q : down.abstract.sequents) up.abstract.sequents.push_back(std::move(q));
  up.abstract.types = up.attributes();
  return up;
}

ConcreteScale hierarchical_scale(const std::string& name, const std::string& genus,
                                 const std::vector<std::pair<std::string, std::string>>& edges,
                                 bool disjoint_siblings) {
  std::map<std::string, std::vector<std::string>> children;
  std::map<std::string, std::string> parent;
  for (const auto& [child, par] : edges) {
    if (child == par) throw ScaleError("hierarchy of '" + name + "' has a cycle at '" + child + "'");
    if (parent.contains(child) && parent[child] != par) {
      throw ScaleError("type '" + child + "' has two parents in the hierarchy of '" + name + "'");
    }
    if (!parent.contains(child)) children[par].push_back(child);
    parent[child] = par;
  }
  // Every node must reach the root without revisiting a node.
  for (const auto& [child, par] : parent) {
    std::set<std::string> seen{child};
    std::string at = par;
    while (at != genus) {
      if (!seen.insert(at).second) throw ScaleError("hierarchy of '" + name + "' has a cycle through '" + at + "'");
      auto it = parent.find(at);
      if (it == parent.end()) throw ScaleError("type '" + at + "' is not connected to the root '" + genus + "'");
      at = it->second;
    }
  }
  ConcreteScale s;
  s.name = name;
  s.genus = genus;
  std::vector<Sequent> sequents;
  std::vector<std::string> queue{genus};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const std::string node = queue[i];
    s.bindings.push_back({node, kVar, type_atom(node, kVar)});
    const auto& kids = children[node];
    for (const auto& k : kids) {
      sequents.push_back(expand_subtype(k, node));
      queue.push_back(k);
    }
    if (disjoint_siblings) {
      for (std::size_t a = 0; a < kids.size(); ++a) {
        for (std::size_t b = a + 1; b < kids.size(); ++b) sequents.push_back(expand_disjoint({kids[a], kids[b]}));
      }
    }
  }
  s.abstract = theory_over(name, {}, s.bindings, std::move(sequents));
  return s;
}

Facet facet_of(const std::string& name, const FormalContext& context, const Theory& abstract) {
  Facet f;
  f.name = name;
  f.context = context.renamed(name);
  f.violations = theory_violations(context, abstract);
  return f;
}

Facet realize(const ConcreteScale& scale, const KnowledgeBase& kb) {
  const Entity& genus = kb.resolve(scale.genus);
  std::vector<std::string> objects = kb.domain(genus.id);
  std::vector<AttributeSet> rows(objects.size(), AttributeSet(scale.bindings.size()));
  for (std::size_t m = 0; m < scale.bindings.size(); ++m) {
    const auto& b = scale.bindings[m];
    for (std::size_t g = 0; g < objects.size(); ++g) {
      bool hit;
      try {
        hit = holds(kb, b.query, {{b.var, objects[g]}});
      } catch (const InputError& e) {
        throw ScaleError("binding '" + b.attribute + "' of scale '" + scale.name + "': " + e.what());
      }
      if (hit) rows[g].insert(m);
    }
  }
  Facet f = facet_of(scale.name, FormalContext(objects, scale.attributes(), rows, scale.name), scale.abstract);
  if (!scale.description.empty()) {
    const Entity& fn = kb.resolve(scale.description);
    for (const auto& o : objects) {
      bool described = std::any_of(kb.facts().begin(), kb.facts().end(), [&](const Fact& fact) {
        return fact.subject == o && (fact.predicate == fn.id || (kb.family_of(fn.id) && kb.family_of(fn.id) == kb.family_of(fact.predicate)));
      });
      if (!described) f.violations.push_back({Sequent({}, {"undescribed"}), o});
    }
  }
  return f;
}

FormalContext build_space(const std::vector<Facet>& facets) {
  if (facets.empty()) return {};
  const auto& first = facets.front().context;
  FormalContext acc(first.objects(), {}, std::vector<AttributeSet>(first.object_count(), AttributeSet(0)), "space");
  for (const auto& f : facets) {
    AppositionOptions options;
    options.right_prefix = f.name;
    options.prefix_all = true;
    acc = apposition(acc, f.context, options).renamed("space");
  }
  return acc;
}

namespace {

std::string qualified_name(const KnowledgeBase& kb, const Entity& e) {
  for (const auto& o : kb.ontologies()) {
    if (o.uri == e.ontology && !o.prefix.empty()) return o.prefix + ":" + e.name;
  }
  return e.name;
}

const Node* first_atom(const Node& n) {
  for (const auto& c : n.children) {
    if (c.kind == NodeKind::Atom) return &c;
  }
  return nullptr;
}

struct ForeachCompiler {
  const KnowledgeBase& kb;
  const std::string& ontology;
  ConcreteScale& scale;
  std::vector<std::string> thresholds;  // ordered attributes, in domain order
  bool ordered = false;

  void run(const Node& foreach, const std::vector<std::pair<std::string, Term>>& outer, const std::string& prefix) {
    const std::string var = foreach.attr_or("var");
    const Entity& type = kb.resolve(foreach.attr_or("type"), ontology);
    std::vector<std::string> values = kb.domain(type.id);
    for (const auto& c : foreach.children) {
      if (c.kind != NodeKind::Where) continue;
      for (const auto& r : c.children) {
        if (r.attr_or("var") != var) {
          throw ScaleError("subrange on '" + r.attr_or("var") + "' inside Foreach over '" + var + "'");
        }
        std::string begin = r.attr_or("begin"), end = r.attr_or("end");
        std::erase_if(values, [&](const std::string& v) {
          return (!begin.empty() && kb.compare(type.id, v, begin) < 0) ||
                 (!end.empty() && kb.compare(type.id, v, end) >= 0);
        });
      }
    }
    for (const auto& v : values) {
      auto bound = outer;
      bound.emplace_back(var, constant(v));
      std::string label = prefix.empty() ? v : prefix + ", " + v;
      for (const auto& c : foreach.children) {
        if (c.kind == NodeKind::Foreach) run(c, bound, label);
        if (c.kind == NodeKind::ObjectTemplate) add_template(c, bound, label);
      }
    }
  }

  void add_template(const Node& tmpl, const std::vector<std::pair<std::string, Term>>& bound, const std::string& label) {
    Expr body = expr_from_node(tmpl);
    for (const auto& [var, value] : bound) body = substitute(body, var, value);
    const std::string var = tmpl.attr_or("var");
    const Entity& type = kb.resolve(tmpl.attr_or("type"), ontology);
    const Entity& genus = kb.resolve(scale.genus, ontology);
    if (type.id != genus.id) body = Expr::conj({type_atom(qualified_name(kb, type), var), body});
    std::string attribute = label;
    if (const Node* atom = first_atom(tmpl)) {
      std::string order = atom->attr_or("order");
      if (order == "geq") attribute = ">=" + label;
      if (order == "leq") attribute = "<=" + label;
      if (!order.empty()) {
        ordered = true;
        thresholds.push_back(attribute);
      }
      if (scale.description.empty()) {
        if (const Entity* p = kb.find(atom->tag, ontology);
            p && (p->kind == EntityKind::Function || p->kind == EntityKind::BinaryRelation)) {
          scale.description = qualified_name(kb, *p);
        }
      }
    }
    scale.bindings.push_back({attribute, var, std::move(body)});
  }
};

std::vector<Sequent> declared_sequents(const Node& theory) {
  std::vector<Sequent> out;
  for (const auto& c : theory.children) {
    for (auto& s : sequents_of(c, theory.attr_or("genus"))) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<ConcreteScale> compile_scales(const KnowledgeBase& kb) {
  std::vector<ConcreteScale> out;
  std::vector<std::string> genera;
  auto note_genus = [&](const std::string& g, const std::string& ontology) {
    if (g.empty()) return;
    std::string id = kb.resolve(g, ontology).id;
    if (std::find(genera.begin(), genera.end(), id) == genera.end()) genera.push_back(id);
  };

  for (const auto& [node, ontology] : kb.theories()) {
    const std::string genus = node.attr_or("genus");
    bool has_foreach = false;
    ConcreteScale scale;
    scale.name = node.attr_or("name");
    scale.genus = genus;
    ForeachCompiler fc{kb, ontology, scale, {}, false};
    for (const auto& interp : node.children) {
      if (interp.kind != NodeKind::Interpretation) continue;
      for (const auto& f : interp.children) {
        if (f.kind != NodeKind::Foreach) continue;
        has_foreach = true;
        fc.run(f, {}, {});
      }
    }
    std::vector<Sequent> sequents = declared_sequents(node);
    if (has_foreach) {
      for (std::size_t i = 1; i < fc.thresholds.size(); ++i) {
        sequents.push_back(expand_subtype(fc.thresholds[i], fc.thresholds[i - 1]));
      }
      scale.abstract = theory_over(scale.name, genus, scale.bindings, std::move(sequents));
      out.push_back(std::move(scale));
      note_genus(genus, ontology);
      continue;
    }
    std::vector<std::string> types;
    for (const auto& c : node.children) {
      if (c.kind == NodeKind::TypeObject) types.push_back(c.attr_or("name"));
    }
    if (types.empty()) continue;
    for (const auto& t : types) {
      const Entity* e = kb.find(t, ontology);
      scale.bindings.push_back({t, kVar, type_atom(e ? qualified_name(kb, *e) : t, kVar)});
    }
    scale.abstract = theory_over(scale.name, genus, scale.bindings, std::move(sequents));
    out.push_back(std::move(scale));
    note_genus(genus, ontology);
  }

  for (const auto& [node, ontology] : kb.interpretations()) {
    ConcreteScale scale;
    std::string function = node.attr_or("function.Type");
    if (!function.empty()) {
      const Entity& fn = kb.resolve(function, ontology);
      scale.name = node.attr_or("name", fn.name);
      scale.description = qualified_name(kb, fn);
    } else {
      scale.name = node.attr_or("name", "interpretation");
    }
    for (const auto& c : node.children) {
      if (c.kind != NodeKind::TypeObject) continue;
      const Entity& t = kb.resolve(c.attr_or("name"), ontology);
      if (scale.genus.empty()) {
        scale.genus = t.parents.empty() ? "CKML:Object" : qualified_name(kb, kb.entity(t.parents.front()));
      }
      scale.bindings.push_back({t.name, kVar, type_atom(qualified_name(kb, t), kVar)});
    }
    if (scale.bindings.empty()) continue;
    scale.abstract = theory_over(scale.name, {}, scale.bindings, {});
    out.push_back(std::move(scale));
  }

  for (const auto& g : genera) {
    const Entity& root = kb.entity(g);
    std::vector<std::pair<std::string, std::string>> edges;
    std::map<std::string, std::string> names;
    for (const auto& t : kb.types_below(g)) names[t] = qualified_name(kb, kb.entity(t));
    for (const auto& t : kb.types_below(g)) {
      if (t == g) continue;
      for (const auto& p : kb.entity(t).parents) {
        if (names.contains(p)) {
          edges.emplace_back(names[t], names[p]);
          break;
        }
      }
    }
    ConcreteScale scale = hierarchical_scale(genera.size() == 1 ? "genus" : "genus " + root.name, names[g], edges);
    scale.genus = names[g];
    out.push_back(std::move(scale));
  }
  return out;
}

}  // namespace ckml
