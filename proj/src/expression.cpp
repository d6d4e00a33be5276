#include "ckml/expression.hpp"

#include "text_util.hpp"

namespace ckml {

namespace {

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') || (s.front() == '"' && s.back() == '"'))) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(" #'") == std::string::npos) return s;
  return "'" + s + "'";
}

}  // namespace

Term Term::parse(std::string_view raw) {
  std::string text = trim(raw);
  // Split at the last '#' outside single quotes.
  std::size_t split = std::string::npos;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\'') quoted = !quoted;
    else if (text[i] == '#' && !quoted) split = i;
  }
  Term t;
  if (split == std::string::npos) {
    t.name = unquote(text);
  } else {
    t.qualifier = unquote(text.substr(0, split));
    t.name = unquote(text.substr(split + 1));
  }
  t.marker = t.name == "?";
  return t;
}

std::string Term::str() const {
  std::string n = marker ? "?" : quote_if_needed(name);
  return qualifier.empty() ? n : quote_if_needed(qualifier) + "#" + n;
}

const Term* Expr::arg(std::string_view key) const {
  for (const auto& [k, v] : args) {
    if (k == key) return &v;
  }
  return nullptr;
}

Expr Expr::atom(std::string predicate, std::vector<std::pair<std::string, Term>> args) {
  Expr e;
  e.op = Op::Atom;
  e.predicate = std::move(predicate);
  e.args = std::move(args);
  return e;
}

Expr Expr::conj(std::vector<Expr> parts) {
  std::vector<Expr> flat;
  for (auto& p : parts) {
    if (p.op == Op::True) continue;
    if (p.op == Op::And) {
      for (auto& c : p.children) flat.push_back(std::move(c));
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return Expr{};
  if (flat.size() == 1) return std::move(flat.front());
  Expr e;
  e.op = Op::And;
  e.children = std::move(flat);
  return e;
}

Expr Expr::negate(Expr inner) {
  Expr e;
  e.op = Op::Not;
  e.children.push_back(std::move(inner));
  return e;
}

Expr Expr::exists(std::string var, std::string type, Expr body) {
  Expr e;
  e.op = Op::Exists;
  e.var = std::move(var);
  e.var_type = std::move(type);
  e.children.push_back(std::move(body));
  return e;
}

Expr Expr::forall(std::string var, std::string type, Expr body) {
  Expr e = exists(std::move(var), std::move(type), std::move(body));
  e.op = Op::Forall;
  return e;
}

namespace {

std::vector<Expr> operands(const Node& node) {
  std::vector<Expr> out;
  for (const auto& c : node.children) {
    if (c.kind != NodeKind::Comment) out.push_back(expr_from_node(c));
  }
  return out;
}

Expr atom_from_node(const Node& node) {
  Expr head;
  head.op = Expr::Op::Atom;
  head.predicate = node.tag;
  for (const auto& [k, v] : node.attributes) {
    if (k == "order") head.order = v;
    else head.args.emplace_back(k, Term::parse(v));
  }
  std::vector<Expr> parts{head};
  const Term* subject = head.arg("id");
  for (const auto& c : node.children) {
    if (c.kind == NodeKind::Comment) continue;
    Expr child = expr_from_node(c);
    if (child.op == Expr::Op::Atom && subject && !child.arg("source.Instance") && !child.arg("id")) {
      child.args.insert(child.args.begin(), {"source.Instance", *subject});
    }
    parts.push_back(std::move(child));
  }
  if (parts.size() == 1) return head;
  Expr e;
  e.op = Expr::Op::And;
  e.children = std::move(parts);
  return e;
}

}  // namespace

Expr expr_from_node(const Node& node) {
  switch (node.kind) {
    case NodeKind::Atom:
      return atom_from_node(node);
    case NodeKind::And:
    case NodeKind::Or: {
      Expr e;
      e.op = node.kind == NodeKind::And ? Expr::Op::And : Expr::Op::Or;
      e.children = operands(node);
      return e;
    }
    case NodeKind::Not:
      return Expr::negate(operands(node).at(0));
    case NodeKind::Implies:
    case NodeKind::Equiv: {
      Expr e;
      e.op = node.kind == NodeKind::Implies ? Expr::Op::Implies : Expr::Op::Equiv;
      e.children = operands(node);
      if (e.children.size() != 2) throw EvalError("<" + node.tag + "> takes exactly two operands");
      return e;
    }
    case NodeKind::Exists:
    case NodeKind::Forall: {
      Expr body = Expr::conj(operands(node));
      return node.kind == NodeKind::Exists ? Expr::exists(node.attr_or("var"), node.attr_or("type"), std::move(body))
                                           : Expr::forall(node.attr_or("var"), node.attr_or("type"), std::move(body));
    }
    case NodeKind::Assertion:
    case NodeKind::Expression:
    case NodeKind::Lambda:
    case NodeKind::ObjectTemplate:
    case NodeKind::TypeObject:
    case NodeKind::TypeBinaryRelation:
    case NodeKind::TypeFunction: {
      std::vector<Expr> parts;
      for (const auto& c : node.children) {
        if (c.kind == NodeKind::Atom || c.kind == NodeKind::And || c.kind == NodeKind::Or ||
            c.kind == NodeKind::Not || c.kind == NodeKind::Implies || c.kind == NodeKind::Equiv ||
            c.kind == NodeKind::Exists || c.kind == NodeKind::Forall) {
          parts.push_back(expr_from_node(c));
        }
      }
      return Expr::conj(std::move(parts));
    }
    default:
      throw EvalError("<" + node.tag + "> is not an expression");
  }
}

Node expr_to_node(const Expr& e) {
  auto with_children = [&](NodeKind kind, std::string tag) {
    Node n = make_node(kind, std::move(tag));
    for (const auto& c : e.children) n.children.push_back(expr_to_node(c));
    return n;
  };
  switch (e.op) {
    case Expr::Op::True:
      return make_node(NodeKind::And, "and");
    case Expr::Op::Atom: {
      Node n = make_node(NodeKind::Atom, e.predicate);
      for (const auto& [k, t] : e.args) n.attributes.emplace_back(k, t.str());
      if (!e.order.empty()) n.attributes.emplace_back("order", e.order);
      return n;
    }
    case Expr::Op::And: return with_children(NodeKind::And, "and");
    case Expr::Op::Or: return with_children(NodeKind::Or, "or");
    case Expr::Op::Not: return with_children(NodeKind::Not, "not");
    case Expr::Op::Implies: return with_children(NodeKind::Implies, "implies");
    case Expr::Op::Equiv: return with_children(NodeKind::Equiv, "equiv");
    case Expr::Op::Exists:
    case Expr::Op::Forall: {
      bool ex = e.op == Expr::Op::Exists;
      Node n = make_node(ex ? NodeKind::Exists : NodeKind::Forall, ex ? "Exists" : "Forall");
      n.attributes.emplace_back("var", e.var);
      if (!e.var_type.empty()) n.attributes.emplace_back("type", e.var_type);
      const Expr& body = e.children.at(0);
      if (body.op == Expr::Op::And) {
        for (const auto& c : body.children) n.children.push_back(expr_to_node(c));
      } else if (body.op != Expr::Op::True) {
        n.children.push_back(expr_to_node(body));
      }
      return n;
    }
  }
  return make_node(NodeKind::And, "and");
}

std::string to_string(const Expr& e) {
  auto list = [&](std::string_view sep) {
    std::vector<std::string> parts;
    for (const auto& c : e.children) parts.push_back(to_string(c));
    return "(" + join(parts, sep) + ")";
  };
  switch (e.op) {
    case Expr::Op::True: return "true";
    case Expr::Op::Atom: {
      std::vector<std::string> parts;
      for (const auto& [k, t] : e.args) parts.push_back(k + "=" + t.str());
      std::string head = e.predicate;
      if (!e.order.empty()) head += "[" + e.order + "]";
      return head + "(" + join(parts, ", ") + ")";
    }
    case Expr::Op::And: return list(" and ");
    case Expr::Op::Or: return list(" or ");
    case Expr::Op::Implies: return list(" implies ");
    case Expr::Op::Equiv: return list(" equiv ");
    case Expr::Op::Not: return "not " + to_string(e.children.at(0));
    case Expr::Op::Exists:
    case Expr::Op::Forall: {
      std::string q = e.op == Expr::Op::Exists ? "Exists " : "Forall ";
      q += e.var;
      if (!e.var_type.empty()) q += ":" + e.var_type;
      return q + ". " + to_string(e.children.at(0));
    }
  }
  return "?";
}

std::size_t count_markers(const Expr& e) {
  std::size_t n = 0;
  for (const auto& [k, t] : e.args) n += t.marker ? 1 : 0;
  for (const auto& c : e.children) n += count_markers(c);
  return n;
}

Expr substitute(const Expr& e, const std::string& var, const Term& value) {
  if ((e.op == Expr::Op::Exists || e.op == Expr::Op::Forall) && e.var == var) return e;
  Expr out = e;
  for (auto& [k, t] : out.args) {
    if (!t.marker && t.name == var) {
      std::string qualifier = t.qualifier.empty() ? value.qualifier : t.qualifier;
      t = value;
      t.qualifier = qualifier;
    }
  }
  for (auto& c : out.children) c = substitute(c, var, value);
  return out;
}

}  // namespace ckml
