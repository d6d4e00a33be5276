#include <algorithm>
#include <functional>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "ckml/ontology.hpp"
#include "text_util.hpp"

namespace ckml {

namespace {

constexpr std::string_view kBuiltinUri = "urn:ckml:builtin";
constexpr std::string_view kDocumentUri = "urn:ckml:document";

bool truthy(const std::string& v) { return v == "yes" || v == "true" || v == "1"; }

bool is_expression_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::Atom:
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Not:
    case NodeKind::Implies:
    case NodeKind::Equiv:
    case NodeKind::Exists:
    case NodeKind::Forall:
      return true;
    default:
      return false;
  }
}

const std::set<std::string, std::less<>>& metadata_keys() {
  static const std::set<std::string, std::less<>> keys = {"text", "about", "image", "description", "comment"};
  return keys;
}

}  // namespace

int compare_values(std::string_view a, std::string_view b) {
  auto number = [](std::string_view s) -> std::optional<double> {
    try {
      std::size_t used = 0;
      double d = std::stod(std::string(s), &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  };
  auto na = number(a), nb = number(b);
  if (na && nb && *na != *nb) return *na < *nb ? -1 : 1;
  return a < b ? -1 : (a > b ? 1 : 0);
}

PathMap read_path_map(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError("cannot open ontology path map '" + file.string() + "'");
  PathMap out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos && (hash == 0 || is_space(line[hash - 1]))) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string uri, path;
    fields >> uri >> path;
    if (path.empty()) throw LoadError(file.string() + ":" + std::to_string(number) + ": expected 'uri path'");
    std::filesystem::path p(path);
    out[uri] = p.is_absolute() ? p : file.parent_path() / p;
  }
  return out;
}

// Builds a KnowledgeBase in phases: ontology registration (following
// extends through the path map), entity declaration, reference resolution,
// relation families, then collections.
class Loader {
 public:
  Loader(KnowledgeBase& kb, const PathMap& paths) : kb_(kb), paths_(paths) {}

  void run(const std::vector<Document>& docs) {
    for (const auto& d : docs) gather(d);
    if (!document_types_.children.empty()) ontology_nodes_.push_back(document_types_);
    for (const auto& n : ontology_nodes_) register_ontology(n);
    ensure_loaded();
    for (std::size_t i = 0; i < ontology_nodes_.size(); ++i) declare_ontology(ontology_nodes_[i], kb_.ontologies_[i + 1].uri);
    resolve_pending();
    build_families();
    for (const auto& c : collection_nodes_) load_collection(c);
    add_implied_instances();
    build_indexes();
  }

 private:
  struct PendingRef {
    std::string entity;
    std::string field;
    std::string raw;
    std::string ontology;
  };
  struct PendingReification {
    std::string predicate;
    std::string ontology;
    Node node;
  };

  void gather(const Document& doc) {
    const Node& root = doc.root;
    switch (root.kind) {
      case NodeKind::Ontology: ontology_nodes_.push_back(root); return;
      case NodeKind::Collection: collection_nodes_.push_back(root); return;
      case NodeKind::Theory: kb_.theories_.push_back({root, {}}); return;
      default: break;
    }
    for (const auto& c : root.children) {
      switch (c.kind) {
        case NodeKind::Ontology: ontology_nodes_.push_back(c); break;
        case NodeKind::Collection: collection_nodes_.push_back(c); break;
        case NodeKind::Theory: kb_.theories_.push_back({c, {}}); break;
        case NodeKind::Sequent:
        case NodeKind::Subtype:
        case NodeKind::Partition: kb_.constraints_.push_back(c); break;
        case NodeKind::Assertion:
        case NodeKind::Expression:
        case NodeKind::Lambda: kb_.assertions_.push_back(c); break;
        case NodeKind::Comment: break;
        default:
          // Type declarations and interpretations outside an Ontology
          // element form an implicit document-level ontology.
          if (document_types_.children.empty()) {
            document_types_ = make_node(NodeKind::Ontology, "Ontology",
                                        {{"name", "document"}, {"uri", std::string(kDocumentUri)}});
          }
          document_types_.children.push_back(c);
      }
    }
  }

  static std::string uri_of(const Node& ontology) {
    if (const auto* u = ontology.attr("uri")) return *u;
    return "urn:ckml:" + ontology.attr_or("name");
  }

  void register_ontology(const Node& node) {
    OntologyInfo info;
    info.uri = uri_of(node);
    info.name = node.attr_or("name");
    info.prefix = node.attr_or("prefix");
    for (const auto& o : kb_.ontologies_) {
      if (o.uri == info.uri) throw LoadError("ontology '" + info.uri + "' is loaded twice");
    }
    for (const auto& c : node.children) {
      if (c.kind == NodeKind::Extends) {
        std::string prefix = c.attr_or("prefix");
        info.extends.emplace_back(c.attr_or("ontology"), prefix);
        if (!prefix.empty()) kb_.prefixes_.emplace(prefix, c.attr_or("ontology"));
      }
    }
    if (!info.prefix.empty()) kb_.prefixes_[info.prefix] = info.uri;
    kb_.ontologies_.push_back(std::move(info));
  }

  bool is_loaded(const std::string& uri) const {
    return std::any_of(kb_.ontologies_.begin(), kb_.ontologies_.end(),
                       [&](const OntologyInfo& o) { return o.uri == uri; });
  }

  // Loads every referenced but missing ontology from the path map.
  void ensure_loaded() {
    for (;;) {
      std::vector<std::string> wanted;
      for (const auto& o : kb_.ontologies_) {
        for (const auto& [uri, prefix] : o.extends) wanted.push_back(uri);
      }
      for (const auto& c : collection_nodes_) {
        if (const auto* u = c.attr("ontology")) wanted.push_back(*u);
      }
      std::string missing;
      for (const auto& w : wanted) {
        if (!is_loaded(w)) {
          missing = w;
          break;
        }
      }
      if (missing.empty()) return;
      auto it = paths_.find(missing);
      if (it == paths_.end()) throw LoadError("cannot resolve ontology '" + missing + "' (not loaded, not in path map)");
      Document doc = parse_file(it->second);
      if (doc.root.kind != NodeKind::Ontology) {
        throw LoadError("'" + it->second.string() + "' mapped for '" + missing + "' is not an ontology document");
      }
      Node node = doc.root;
      if (!node.has("uri")) node.set("uri", missing);
      if (uri_of(node) != missing) {
        throw LoadError("'" + it->second.string() + "' declares uri '" + uri_of(node) + "', expected '" + missing + "'");
      }
      ontology_nodes_.push_back(node);
      register_ontology(node);
    }
  }

  OntologyInfo& ontology(const std::string& uri) {
    for (auto& o : kb_.ontologies_) {
      if (o.uri == uri) return o;
    }
    throw LoadError("unknown ontology '" + uri + "'");
  }

  Entity& declare(EntityKind kind, const std::string& name, const std::string& uri, const Node& at) {
    if (trim(name).empty()) throw LoadError("declaration without a name at line " + std::to_string(at.line));
    OntologyInfo& o = ontology(uri);
    std::string id = uri + "#" + name;
    if (o.names.contains(name)) {
      throw LoadError("'" + name + "' is declared twice in ontology '" + uri + "' (line " + std::to_string(at.line) +
                      ")");
    }
    o.names[name] = id;
    Entity e;
    e.kind = kind;
    e.id = id;
    e.name = name;
    e.ontology = uri;
    kb_.entity_order_.push_back(id);
    return kb_.entities_[id] = std::move(e);
  }

  void defer(const std::string& entity, std::string field, const std::string& raw, const std::string& uri) {
    if (!trim(raw).empty()) pending_.push_back({entity, std::move(field), trim(raw), uri});
  }

  void declare_function(const Node& n, const std::string& owner, const std::string& uri) {
    Entity& f = declare(EntityKind::Function, n.attr_or("name"), uri, n);
    std::string id = f.id;
    if (!owner.empty()) f.owner = owner;
    else defer(id, "owner", n.attr_or("source.Type"), uri);
    defer(id, "target", n.attr_or("target.Type"), uri);
    if (owner.empty() && n.has("source.Type")) defer(id, "source", n.attr_or("source.Type"), uri);
    maybe_reification(n, id, uri);
  }

  void maybe_reification(const Node& n, const std::string& id, const std::string& uri) {
    for (const auto& c : n.children) {
      if (c.kind == NodeKind::Atom) reifications_.push_back({id, uri, n});
    }
  }

  void declare_object_type(const Node& n, const std::string& uri, bool relation) {
    Entity& t = declare(EntityKind::ObjectType, n.attr_or("name"), uri, n);
    std::string id = t.id;
    if (relation) {
      t.source_role = n.attr_or("source.Function");
      t.target_role = n.attr_or("target.Function");
      defer(id, "linked", n.attr_or("binaryRelation"), uri);
    }
    defer(id, "parent", n.attr_or("type"), uri);
    bool has_definition = std::any_of(n.children.begin(), n.children.end(), is_expression_node);
    if (has_definition) {
      if (!n.has("var")) throw LoadError("defining query of '" + t.name + "' needs a var attribute");
      t.definition_var = n.attr_or("var");
      t.definition = expr_from_node(n);
    }
    for (const auto& c : n.children) {
      if (c.kind == NodeKind::TypeFunction) declare_function(c, id, uri);
    }
  }

  void declare_ontology(const Node& node, const std::string& uri) {
    for (const auto& c : node.children) {
      switch (c.kind) {
        case NodeKind::TypeObject:
          declare_object_type(c, uri, false);
          break;
        case NodeKind::TypeRelation:
          declare_object_type(c, uri, true);
          break;
        case NodeKind::TypeData: {
          Entity& d = declare(EntityKind::DataType, c.attr_or("name"), uri, c);
          d.ordered = truthy(c.attr_or("ordered"));
          for (const auto& v : c.children) {
            if (v.kind == NodeKind::DataValue) d.values.push_back(v.attr_or("name"));
          }
          break;
        }
        case NodeKind::TypeBinaryRelation: {
          Entity& r = declare(EntityKind::BinaryRelation, c.attr_or("name"), uri, c);
          std::string id = r.id;
          defer(id, "source", c.attr_or("source.Type"), uri);
          defer(id, "target", c.attr_or("target.Type"), uri);
          maybe_reification(c, id, uri);
          break;
        }
        case NodeKind::TypeFunction:
          declare_function(c, {}, uri);
          break;
        case NodeKind::TypeSet:
        case NodeKind::TypeCollection: {
          Entity& s = declare(c.kind == NodeKind::TypeSet ? EntityKind::SetType : EntityKind::CollectionType,
                              c.attr_or("name"), uri, c);
          defer(s.id, "genus", c.attr_or("genus"), uri);
          break;
        }
        case NodeKind::Subtype:
          subtype_edges_.push_back({c.attr_or("specific"), c.attr_or("generic"), uri});
          break;
        case NodeKind::Interpretation:
          kb_.interpretations_.push_back({c, uri});
          for (const auto& t : c.children) {
            if (t.kind == NodeKind::TypeObject) declare_object_type(t, uri, false);
          }
          break;
        case NodeKind::Theory:
          kb_.theories_.push_back({c, uri});
          break;
        case NodeKind::Assertion:
          kb_.assertions_.push_back(c);
          break;
        default:
          break;
      }
    }
  }

  std::string resolve_id(const std::string& raw, const std::string& uri, const std::string& what) {
    const Entity* e = kb_.find(raw, uri);
    if (!e) throw LoadError("unknown " + what + " '" + raw + "' in ontology '" + uri + "'");
    return e->id;
  }

  void resolve_pending() {
    for (const auto& p : pending_) {
      Entity& e = kb_.entities_.at(p.entity);
      if (p.field == "parent") {
        e.parents.push_back(resolve_id(p.raw, p.ontology, "supertype"));
      } else if (p.field == "owner") {
        e.owner = resolve_id(p.raw, p.ontology, "source type");
      } else if (p.field == "source") {
        e.source_type = resolve_id(p.raw, p.ontology, "source type");
      } else if (p.field == "target") {
        e.target_type = resolve_id(p.raw, p.ontology, "target type");
      } else if (p.field == "genus") {
        e.genus = resolve_id(p.raw, p.ontology, "genus");
      } else if (p.field == "linked") {
        e.linked_relation = resolve_id(p.raw, p.ontology, "binary relation");
      }
    }
    for (const auto& edge : subtype_edges_) {
      std::string s = resolve_id(edge.specific, edge.ontology, "subtype");
      std::string g = resolve_id(edge.generic, edge.ontology, "supertype");
      auto& parents = kb_.entities_.at(s).parents;
      if (std::find(parents.begin(), parents.end(), g) == parents.end()) parents.push_back(g);
    }
    for (auto& [id, e] : kb_.entities_) {
      if (e.kind == EntityKind::Function && e.source_type.empty()) e.source_type = e.owner;
      if (e.kind == EntityKind::Function && e.owner.empty()) e.owner = e.source_type;
      if (e.kind == EntityKind::ObjectType && e.parents.empty() && id != std::string(kBuiltinUri) + "#Object") {
        e.parents.push_back(std::string(kBuiltinUri) + "#Object");
      }
    }
    check_acyclic();
  }

  void check_acyclic() {
    std::map<std::string, int> state;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
      int& s = state[id];
      if (s == 2) return;
      if (s == 1) throw LoadError("subtype cycle through '" + kb_.entities_.at(id).name + "'");
      s = 1;
      for (const auto& p : kb_.entities_.at(id).parents) visit(p);
      state[id] = 2;
    };
    for (const auto& [id, e] : kb_.entities_) {
      if (e.kind == EntityKind::ObjectType) visit(id);
    }
  }

  std::size_t family_for(const std::string& relation) {
    if (auto it = kb_.family_index_.find(relation); it != kb_.family_index_.end()) return it->second;
    kb_.families_.push_back({relation, {{relation, false}}});
    std::size_t idx = kb_.families_.size() - 1;
    kb_.family_index_[relation] = idx;
    return idx;
  }

  void add_member(std::size_t family, const std::string& predicate, bool swapped) {
    auto [it, inserted] = kb_.family_index_.emplace(predicate, family);
    if (!inserted && it->second != family) {
      throw LoadError("'" + kb_.entities_.at(predicate).name + "' is linked to two reified relations");
    }
    if (inserted) kb_.families_[family].members.emplace_back(predicate, swapped);
  }

  void build_families() {
    for (const auto& id : kb_.entity_order_) {
      const Entity& e = kb_.entities_.at(id);
      if (e.kind != EntityKind::ObjectType || e.source_role.empty()) continue;
      std::size_t f = family_for(id);
      if (!e.linked_relation.empty()) add_member(f, e.linked_relation, false);
    }
    // Reverse reification: <Type.BinaryRelation source="y" target="z"><R inst="T#y" thme="T#z"/>.
    for (const auto& r : reifications_) {
      const Node* atom = nullptr;
      for (const auto& c : r.node.children) {
        if (c.kind == NodeKind::Atom) atom = &c;
      }
      const Entity& rel = kb_.resolve(atom->tag, r.ontology);
      if (rel.source_role.empty()) {
        throw LoadError("'" + atom->tag + "' in the definition of '" + kb_.entities_.at(r.predicate).name +
                        "' is not a reified relation (Type.Relation with source.Function/target.Function)");
      }
      std::string src = r.node.attr_or("source"), tgt = r.node.attr_or("target");
      std::string a = Term::parse(atom->attr_or(rel.source_role)).name;
      std::string b = Term::parse(atom->attr_or(rel.target_role)).name;
      bool swapped;
      if (a == src && b == tgt) swapped = false;
      else if (a == tgt && b == src) swapped = true;
      else {
        throw LoadError("reverse reification of '" + kb_.entities_.at(r.predicate).name +
                        "' does not map source/target onto " + rel.source_role + "/" + rel.target_role);
      }
      add_member(family_for(rel.id), r.predicate, swapped);
    }
  }

  Instance& instance(const std::string& id, const std::string& collection) {
    if (auto it = kb_.instance_index_.find(id); it != kb_.instance_index_.end()) return kb_.instances_[it->second];
    Instance inst;
    inst.id = id;
    inst.collection = collection;
    kb_.instance_index_[id] = kb_.instances_.size();
    kb_.instances_.push_back(std::move(inst));
    return kb_.instances_.back();
  }

  static void add_type(Instance& inst, const std::string& type) {
    if (std::find(inst.types.begin(), inst.types.end(), type) == inst.types.end()) inst.types.push_back(type);
  }

  const Entity& predicate(const std::string& name, const std::string& uri, const Node& at) {
    const Entity* e = kb_.find(name, uri);
    if (!e || (e->kind != EntityKind::Function && e->kind != EntityKind::BinaryRelation)) {
      throw LoadError("unknown function or relation '" + name + "' (line " + std::to_string(at.line) + ")");
    }
    return *e;
  }

  void add_fact(const Entity& pred, const std::string& subject, const std::string& raw, const std::string& uri) {
    Term t = Term::parse(raw);
    Fact f{pred.id, subject, t.name, {}};
    if (!t.qualifier.empty()) {
      const Entity* q = kb_.find(t.qualifier, uri);
      if (!q) throw LoadError("unknown type '" + t.qualifier + "' in reference '" + raw + "'");
      f.qualifier = q->id;
    }
    kb_.facts_.push_back(std::move(f));
  }

  void load_instance(const Node& n, CollectionInfo& info) {
    const Entity* type = kb_.find(n.tag, info.ontology);
    if (!type || type->kind != EntityKind::ObjectType) {
      throw LoadError("unknown object type '" + n.tag + "' (line " + std::to_string(n.line) + ")");
    }
    const std::string id = n.attr_or("id");
    Instance& inst = instance(id, info.id);
    inst.implied = false;
    add_type(inst, type->id);
    info.members.push_back(id);
    for (const auto& [k, v] : n.attributes) {
      if (k == "id") continue;
      if (metadata_keys().contains(k)) {
        kb_.instances_[kb_.instance_index_.at(id)].metadata[k] = collapse_space(v);
        continue;
      }
      add_fact(predicate(k, info.ontology, n), id, v, info.ontology);
    }
    for (const auto& c : n.children) {
      Instance& current = kb_.instances_[kb_.instance_index_.at(id)];
      if (c.kind == NodeKind::Comment) {
        current.metadata["comment"] = c.text;
      } else if (c.kind == NodeKind::Classification) {
        add_type(current, kb_.resolve(c.attr_or("type"), info.ontology).id);
      } else if (c.kind == NodeKind::Property) {
        const Entity& pred = predicate(c.tag, info.ontology, c);
        if (const auto* t = c.attr("target.Instance")) add_fact(pred, id, *t, info.ontology);
        for (const auto& set : c.children) {
          if (set.kind != NodeKind::ValueSet) continue;
          for (const auto& li : set.children) add_fact(pred, id, li.attr_or("instance"), info.ontology);
        }
      }
    }
  }

  void load_collection(const Node& node) {
    CollectionInfo info;
    info.tag = node.tag;
    info.id = node.attr_or("id", node.tag);
    info.ontology = node.attr_or("ontology");
    if (const auto* g = node.attr("genus")) {
      info.genus = kb_.resolve(*g, info.ontology).id;
    } else if (const Entity* ct = kb_.find(node.tag, info.ontology); ct && ct->kind == EntityKind::CollectionType) {
      info.genus = ct->genus;
    }
    for (const auto& c : node.children) {
      if (c.kind == NodeKind::Instance) {
        load_instance(c, info);
      } else if (c.kind == NodeKind::RelationInstance) {
        const Entity& pred = predicate(c.tag, info.ontology, c);
        std::string subject = Term::parse(c.attr_or("source.Instance")).name;
        add_fact(pred, subject, c.attr_or("target.Instance"), info.ontology);
      }
    }
    kb_.collections_.push_back(std::move(info));
  }

  bool object_valued(const Entity& pred) const {
    if (pred.target_type.empty()) return false;
    EntityKind k = kb_.entities_.at(pred.target_type).kind;
    return k == EntityKind::ObjectType || k == EntityKind::SetType;
  }

  void add_implied_instances() {
    for (const auto& f : kb_.facts_) {
      if (f.qualifier.empty() || kb_.instance_index_.contains(f.value)) continue;
      if (kb_.entities_.at(f.qualifier).kind != EntityKind::ObjectType) continue;
      if (!object_valued(kb_.entities_.at(f.predicate))) continue;
      Instance& inst = instance(f.value, {});
      inst.implied = true;
      add_type(inst, f.qualifier);
    }
  }

  static void push_unique(std::vector<std::pair<std::string, std::string>>& v, std::pair<std::string, std::string> p) {
    if (std::find(v.begin(), v.end(), p) == v.end()) v.push_back(std::move(p));
  }

  void build_indexes() {
    for (const auto& f : kb_.facts_) {
      auto& vals = kb_.fact_index_[{f.predicate, f.subject}];
      if (std::find(vals.begin(), vals.end(), f.value) == vals.end()) vals.push_back(f.value);
      push_unique(kb_.extension_[f.predicate], {f.subject, f.value});
    }
    for (const auto& fam : kb_.families_) {
      std::vector<std::pair<std::string, std::string>> out;
      const Entity& rel = kb_.entities_.at(fam.relation);
      const Entity* src = kb_.find(rel.source_role, rel.ontology);
      const Entity* tgt = kb_.find(rel.target_role, rel.ontology);
      for (const auto& [member, swapped] : fam.members) {
        if (member == fam.relation) {
          if (!src || !tgt) continue;
          for (const auto& inst : kb_.instances_) {
            bool declared = std::any_of(inst.types.begin(), inst.types.end(),
                                        [&](const std::string& t) { return kb_.leq(t, rel.id); });
            if (!declared) continue;
            for (const auto& a : kb_.values(src->id, inst.id)) {
              for (const auto& b : kb_.values(tgt->id, inst.id)) push_unique(out, {a, b});
            }
          }
          continue;
        }
        if (auto it = kb_.extension_.find(member); it != kb_.extension_.end()) {
          for (const auto& [a, b] : it->second) push_unique(out, swapped ? std::pair(b, a) : std::pair(a, b));
        }
      }
      kb_.family_pairs_.push_back(std::move(out));
    }
  }

  struct SubtypeEdge {
    std::string specific;
    std::string generic;
    std::string ontology;
  };

  KnowledgeBase& kb_;
  const PathMap& paths_;
  std::vector<Node> ontology_nodes_;
  std::vector<Node> collection_nodes_;
  Node document_types_;
  std::vector<PendingRef> pending_;
  std::vector<PendingReification> reifications_;
  std::vector<SubtypeEdge> subtype_edges_;
};

KnowledgeBase::KnowledgeBase() {
  OntologyInfo builtin;
  builtin.uri = kBuiltinUri;
  builtin.name = "CKML";
  builtin.prefix = "CKML";
  Entity top;
  top.kind = EntityKind::ObjectType;
  top.name = "Object";
  top.ontology = builtin.uri;
  top.id = builtin.uri + "#Object";
  builtin.names["Object"] = top.id;
  prefixes_["CKML"] = builtin.uri;
  entity_order_.push_back(top.id);
  entities_[top.id] = std::move(top);
  ontologies_.push_back(std::move(builtin));
}

KnowledgeBase KnowledgeBase::load(const std::vector<Document>& docs, const PathMap& paths) {
  KnowledgeBase kb;
  Loader(kb, paths).run(docs);
  return kb;
}

KnowledgeBase KnowledgeBase::load_files(const std::vector<std::filesystem::path>& files, const PathMap& paths) {
  std::vector<Document> docs;
  for (const auto& f : files) docs.push_back(parse_file(f));
  return load(docs, paths);
}

const Entity& KnowledgeBase::entity(const std::string& id) const {
  auto it = entities_.find(id);
  if (it == entities_.end()) throw LoadError("unknown entity '" + id + "'");
  return it->second;
}

namespace {

const OntologyInfo* ontology_by_uri(const std::vector<OntologyInfo>& all, std::string_view uri) {
  for (const auto& o : all) {
    if (o.uri == uri) return &o;
  }
  return nullptr;
}

// `uri` and the ontologies it extends, breadth first.
std::vector<const OntologyInfo*> extends_closure(const std::vector<OntologyInfo>& all, std::string_view uri) {
  std::vector<const OntologyInfo*> out;
  std::deque<std::string> queue{std::string(uri)};
  while (!queue.empty()) {
    std::string u = queue.front();
    queue.pop_front();
    const OntologyInfo* o = ontology_by_uri(all, u);
    if (!o || std::find(out.begin(), out.end(), o) != out.end()) continue;
    out.push_back(o);
    for (const auto& [ext, prefix] : o->extends) queue.push_back(ext);
  }
  return out;
}

}  // namespace

const Entity* KnowledgeBase::find(std::string_view raw, std::string_view ontology) const {
  std::string name = trim(raw);
  if (name.empty()) return nullptr;
  if (auto it = entities_.find(name); it != entities_.end()) return &it->second;
  auto lookup_in = [&](const std::vector<const OntologyInfo*>& scope, const std::string& local) -> const Entity* {
    for (const auto* o : scope) {
      if (auto it = o->names.find(local); it != o->names.end()) return &entities_.at(it->second);
    }
    return nullptr;
  };
  auto attempt = [&](const std::string& n) -> const Entity* {
    if (auto colon = n.find(':'); colon != std::string::npos && n.find("://") == std::string::npos) {
      std::string prefix = n.substr(0, colon), local = n.substr(colon + 1);
      std::string uri;
      if (const auto* o = ontology_by_uri(ontologies_, ontology)) {
        for (const auto& [ext, p] : o->extends) {
          if (p == prefix) uri = ext;
        }
        if (uri.empty() && o->prefix == prefix) uri = o->uri;
      }
      if (uri.empty()) {
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end()) throw LoadError("unknown namespace prefix '" + prefix + "' in '" + n + "'");
        uri = it->second;
      }
      return lookup_in(extends_closure(ontologies_, uri), local);
    }
    if (!ontology.empty()) {
      if (const Entity* e = lookup_in(extends_closure(ontologies_, ontology), n)) return e;
    }
    const Entity* found = nullptr;
    for (const auto& o : ontologies_) {
      if (auto it = o.names.find(n); it != o.names.end()) {
        const Entity* e = &entities_.at(it->second);
        if (found && found != e) {
          throw LoadError("ambiguous name '" + n + "' (declared in '" + found->ontology + "' and '" + e->ontology +
                          "'); qualify it with a prefix");
        }
        found = e;
      }
    }
    return found;
  };
  if (const Entity* e = attempt(name)) return e;
  if (name.find('-') != std::string::npos) {
    std::string spaced = name;
    std::replace(spaced.begin(), spaced.end(), '-', ' ');
    return attempt(spaced);
  }
  return nullptr;
}

const Entity& KnowledgeBase::resolve(std::string_view name, std::string_view ontology) const {
  const Entity* e = find(name, ontology);
  if (!e) throw LoadError("unknown type or relation '" + std::string(name) + "'");
  return *e;
}

bool KnowledgeBase::leq(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  const Entity& top = entities_.at(std::string(kBuiltinUri) + "#Object");
  if (b == top.id) return entity(a).kind == EntityKind::ObjectType;
  std::set<std::string> seen;
  std::vector<std::string> stack{a};
  while (!stack.empty()) {
    std::string t = stack.back();
    stack.pop_back();
    if (t == b) return true;
    if (!seen.insert(t).second) continue;
    for (const auto& p : entity(t).parents) stack.push_back(p);
  }
  return false;
}

bool KnowledgeBase::subtype_leq(std::string_view t1, std::string_view t2) const {
  const Entity& a = resolve(t1);
  const Entity& b = resolve(t2);
  if (a.kind != EntityKind::ObjectType || b.kind != EntityKind::ObjectType) {
    throw LoadError("subtype order is defined on object types only");
  }
  return leq(a.id, b.id);
}

std::vector<std::string> KnowledgeBase::types_below(const std::string& id) const {
  std::vector<std::string> out;
  for (const auto& e : entity_order_) {
    if (entities_.at(e).kind == EntityKind::ObjectType && leq(e, id)) out.push_back(e);
  }
  return out;
}

const RelationFamily* KnowledgeBase::family_of(const std::string& predicate) const {
  auto it = family_index_.find(predicate);
  return it == family_index_.end() ? nullptr : &families_[it->second];
}

const Instance* KnowledgeBase::instance(std::string_view id) const {
  auto it = instance_index_.find(std::string(id));
  return it == instance_index_.end() ? nullptr : &instances_[it->second];
}

std::vector<std::string> KnowledgeBase::values(const std::string& predicate, const std::string& subject) const {
  auto it = fact_index_.find({predicate, subject});
  return it == fact_index_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::pair<std::string, std::string>> KnowledgeBase::pairs(const std::string& predicate) const {
  if (auto it = family_index_.find(predicate); it != family_index_.end()) {
    // Family pairs are in the reified relation's (source role, target role)
    // orientation; swapped members see them reversed.
    const auto& fam = families_[it->second];
    auto out = family_pairs_[it->second];
    for (const auto& [member, swapped] : fam.members) {
      if (member == predicate && swapped) {
        for (auto& p : out) std::swap(p.first, p.second);
      }
    }
    return out;
  }
  auto it = extension_.find(predicate);
  return it == extension_.end() ? std::vector<std::pair<std::string, std::string>>{} : it->second;
}

int KnowledgeBase::compare(const std::string& type, const std::string& a, const std::string& b) const {
  if (a == b) return 0;
  if (auto it = entities_.find(type); it != entities_.end() && it->second.ordered) {
    const auto& vals = it->second.values;
    auto ia = std::find(vals.begin(), vals.end(), a), ib = std::find(vals.begin(), vals.end(), b);
    if (ia != vals.end() && ib != vals.end()) return ia < ib ? -1 : 1;
  }
  return compare_values(a, b);
}

std::vector<Violation> KnowledgeBase::validate() const {
  std::vector<Violation> out;
  auto name_of = [&](const std::string& id) { return entity(id).name; };
  auto check_member = [&](const std::string& value, const std::string& type, const std::string& where) {
    const Entity& t = entity(type);
    if (t.kind == EntityKind::DataType) {
      if (!t.values.empty() && std::find(t.values.begin(), t.values.end(), value) == t.values.end()) {
        out.push_back({"value", where + ": '" + value + "' is not a value of " + t.name});
      }
      return;
    }
    std::string element_type = t.kind == EntityKind::SetType ? t.genus : type;
    if (!instance(value)) {
      out.push_back({"unresolved", where + ": '" + value + "' is not a known instance"});
    } else if (!element_type.empty() && !is_a(value, element_type)) {
      out.push_back({"projection", where + ": '" + value + "' is not classified by " + name_of(element_type)});
    }
  };
  for (const auto& f : facts_) {
    const Entity& p = entity(f.predicate);
    std::string where = p.name + "(" + f.subject + ", " + f.value + ")";
    std::string source = p.kind == EntityKind::Function ? p.owner : p.source_type;
    if (!instance(f.subject)) {
      out.push_back({"unresolved", where + ": '" + f.subject + "' is not a known instance"});
    } else if (!source.empty() && !is_a(f.subject, source)) {
      out.push_back({"projection", where + ": '" + f.subject + "' is not classified by " + name_of(source)});
    }
    if (!p.target_type.empty()) check_member(f.value, p.target_type, where);
  }
  for (const auto& c : collections_) {
    if (c.genus.empty()) continue;
    for (const auto& m : c.members) {
      const Instance* inst = instance(m);
      bool ok = std::any_of(inst->types.begin(), inst->types.end(),
                            [&](const std::string& t) { return entity(t).kind == EntityKind::ObjectType && leq(t, c.genus); });
      if (!ok) {
        out.push_back({"genus", "instance '" + m + "' of " + c.id + " is not below the collection genus " +
                                    name_of(c.genus)});
      }
    }
  }
  return out;
}

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::ObjectType: return "object type";
    case EntityKind::DataType: return "data type";
    case EntityKind::BinaryRelation: return "binary relation";
    case EntityKind::Function: return "function";
    case EntityKind::SetType: return "set type";
    case EntityKind::CollectionType: return "collection type";
  }
  return "?";
}

}  // namespace ckml
