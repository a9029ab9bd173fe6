#pragma once

#include <algorithm>
#include <functional>
#include <tuple>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gtx/error.hpp"
#include "gtx/graph.hpp"
#include "gtx/value.hpp"

namespace gtx {

struct TypeDecl {
  std::string name;
  bool abstract = false;
  std::set<std::string> supertypes;
  std::map<std::string, ValueType> attrs;
  SourceSpan span;
};

struct EdgeDecl {
  std::string src_type;
  std::string label;
  std::string tgt_type;
  SourceSpan span;

  auto operator<=>(const EdgeDecl& o) const {
    return std::tie(src_type, label, tgt_type) <=> std::tie(o.src_type, o.label, o.tgt_type);
  }
  bool operator==(const EdgeDecl& o) const { return (*this <=> o) == 0; }
};

/// Metamodel: node types with inheritance, attribute and edge declarations.
/// Immutable once built; construct through `declare_*`.
class TypeGraph {
 public:
  TypeGraph() = default;
  explicit TypeGraph(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  TypeDecl& declare_type(std::string name, bool abstract = false,
                         std::set<std::string> supertypes = {}) {
    auto& decl = types_[name];
    decl.name = std::move(name);
    decl.abstract = abstract;
    decl.supertypes = std::move(supertypes);
    return decl;
  }

  void declare_attr(const std::string& type, std::string attr, ValueType vt) {
    types_.at(type).attrs[std::move(attr)] = vt;
  }

  void declare_edge(EdgeDecl decl) { edges_.insert(std::move(decl)); }

  bool declares(const std::string& type) const { return types_.count(type) > 0; }
  const TypeDecl* find(const std::string& type) const {
    auto it = types_.find(type);
    return it == types_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, TypeDecl>& types() const { return types_; }
  const std::set<EdgeDecl>& edge_decls() const { return edges_; }

  /// `type` plus all transitive supertypes that are declared. Cycle-safe.
  std::set<std::string> ancestors(const std::string& type) const {
    std::set<std::string> seen;
    std::vector<std::string> stack{type};
    while (!stack.empty()) {
      auto t = std::move(stack.back());
      stack.pop_back();
      if (!seen.insert(t).second) continue;
      if (auto* d = find(t))
        for (const auto& s : d->supertypes) stack.push_back(s);
    }
    return seen;
  }

  /// Attribute declarations visible on `type`, including inherited ones.
  /// When a name is declared on several ancestors the nearest wins.
  std::map<std::string, ValueType> visible_attrs(const std::string& type) const {
    std::map<std::string, ValueType> out;
    for (const auto& t : ancestors(type))
      if (auto* d = find(t))
        for (const auto& [k, v] : d->attrs) out.emplace(k, v);
    if (auto* d = find(type))
      for (const auto& [k, v] : d->attrs) out[k] = v;
    return out;
  }

 private:
  std::string name_;
  std::map<std::string, TypeDecl> types_;
  std::set<EdgeDecl> edges_;
};

/// True iff `a` equals `b` or transitively extends it.
inline bool is_subtype(const TypeGraph& tg, const std::string& a, const std::string& b) {
  if (!tg.declares(a)) throw UnknownTypeError("undeclared type '" + a + "'");
  if (!tg.declares(b)) throw UnknownTypeError("undeclared type '" + b + "'");
  return tg.ancestors(a).count(b) > 0;
}

inline std::vector<Violation> validate_type_graph(const TypeGraph& tg) {
  std::vector<Violation> out;
  const auto& types = tg.types();

  for (const auto& [name, decl] : types)
    for (const auto& s : decl.supertypes)
      if (!tg.declares(s))
        out.push_back({Violation::Kind::unresolved_reference, decl.span,
                       "type '" + name + "' extends undeclared type '" + s + "'"});
  for (const auto& e : tg.edge_decls()) {
    for (const auto* end : {&e.src_type, &e.tgt_type})
      if (!tg.declares(*end))
        out.push_back({Violation::Kind::unresolved_reference, e.span,
                       "edge '" + e.label + "' references undeclared type '" + *end + "'"});
    if (!is_valid_name(e.label))
      out.push_back({Violation::Kind::syntax, e.span, "invalid edge label '" + e.label + "'"});
  }

  // Tarjan's SCC over the inheritance relation; every non-trivial component
  // (or self-extension) is reported once.
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  int counter = 0;
  std::function<void(const std::string&)> strongconnect = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : types.at(v).supertypes) {
      if (!tg.declares(w)) continue;
      if (!index.count(w)) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v]) return;
    std::vector<std::string> component;
    std::string w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack.erase(w);
      component.push_back(w);
    } while (w != v);
    bool self_loop = types.at(v).supertypes.count(v) > 0;
    if (component.size() > 1 || self_loop) {
      std::sort(component.begin(), component.end());
      std::string names;
      for (const auto& c : component) names += (names.empty() ? "" : ", ") + c;
      out.push_back({Violation::Kind::inheritance_cycle, types.at(component.front()).span,
                     "inheritance cycle among types " + names});
    }
  };
  for (const auto& [name, decl] : types)
    if (!index.count(name)) strongconnect(name);

  for (const auto& [name, decl] : types) {
    for (const auto& anc : tg.ancestors(name)) {
      if (anc == name) continue;
      const auto* ad = tg.find(anc);
      if (!ad) continue;
      for (const auto& [attr, vt] : decl.attrs) {
        auto it = ad->attrs.find(attr);
        if (it != ad->attrs.end() && it->second != vt)
          out.push_back({Violation::Kind::attribute_redeclared, decl.span,
                         "attribute '" + name + "." + attr + "' redeclared as " +
                             std::string(value_type_name(vt)) + ", inherited from '" +
                             anc + "' as " + std::string(value_type_name(it->second))});
      }
    }
  }
  sort_violations(out);
  return out;
}

namespace detail {

inline bool licensed_edge(const TypeGraph& tg, const HostNode& src, const std::string& label,
                          const HostNode& tgt) {
  for (const auto& decl : tg.edge_decls()) {
    if (decl.label != label) continue;
    bool src_ok = false, tgt_ok = false;
    for (const auto& t : src.types)
      if (tg.declares(t) && tg.ancestors(t).count(decl.src_type)) src_ok = true;
    for (const auto& t : tgt.types)
      if (tg.declares(t) && tg.ancestors(t).count(decl.tgt_type)) tgt_ok = true;
    if (src_ok && tgt_ok) return true;
  }
  return false;
}

inline std::string node_label(const HostNode& n) {
  return n.name.empty() ? "node #" + std::to_string(n.id.value) : "node '" + n.name + "'";
}

}  // namespace detail

/// Checks `g` against the enabled type graphs. A host element is licensed if
/// any one of them licenses it. Flags are never checked. With no type graph
/// enabled every graph conforms.
inline std::vector<Violation> conforms(std::span<const TypeGraph> tgs, const HostGraph& g) {
  std::vector<Violation> out;
  if (tgs.empty()) return out;
  SourceSpan none;
  for (const auto& [id, node] : g.nodes()) {
    auto add = [&](Violation::Kind k, std::string msg) {
      out.push_back({k, none, std::move(msg), id.value});
    };
    if (node.types.empty()) add(Violation::Kind::untyped_node, detail::node_label(node) + " has no type");
    for (const auto& t : node.types) {
      bool declared = false, concrete = false;
      for (const auto& tg : tgs)
        if (const auto* d = tg.find(t)) {
          declared = true;
          concrete = concrete || !d->abstract;
        }
      if (!declared)
        add(Violation::Kind::undeclared_type, detail::node_label(node) + " has undeclared type '" + t + "'");
      else if (!concrete)
        add(Violation::Kind::abstract_instantiation,
            detail::node_label(node) + " instantiates abstract type '" + t + "'");
    }
    for (const auto& [attr, value] : node.attrs) {
      bool declared = false, typed = false;
      for (const auto& tg : tgs)
        for (const auto& t : node.types) {
          if (!tg.declares(t)) continue;
          auto visible = tg.visible_attrs(t);
          auto it = visible.find(attr);
          if (it == visible.end()) continue;
          declared = true;
          typed = typed || it->second == value.type();
        }
      if (!declared)
        add(Violation::Kind::undeclared_attribute,
            detail::node_label(node) + " has undeclared attribute '" + attr + "'");
      else if (!typed)
        add(Violation::Kind::attribute_type_mismatch,
            detail::node_label(node) + " attribute '" + attr + "' has type " +
                std::string(value_type_name(value.type())));
    }
  }
  for (const auto& e : g.edges()) {
    const auto& src = g.node(e.src);
    const auto& tgt = g.node(e.tgt);
    bool ok = false;
    for (const auto& tg : tgs) ok = ok || detail::licensed_edge(tg, src, e.label, tgt);
    if (!ok)
      out.push_back({Violation::Kind::unlicensed_edge, none,
                     "edge " + detail::node_label(src) + " -" + e.label + "-> " +
                         detail::node_label(tgt) + " is not licensed by any type graph",
                     e.src.value});
  }
  sort_violations(out);
  return out;
}

inline std::vector<Violation> conforms(const TypeGraph& tg, const HostGraph& g) {
  return conforms(std::span<const TypeGraph>(&tg, 1), g);
}

/// Subtype test used by the matcher: host type `have` satisfies rule type
/// `want` if they are equal or some enabled type graph declares both and
/// relates them.
inline bool satisfies_type(std::span<const TypeGraph> tgs, const std::string& have,
                           const std::string& want) {
  if (have == want) return true;
  for (const auto& tg : tgs)
    if (tg.declares(have) && tg.declares(want) && tg.ancestors(have).count(want)) return true;
  return false;
}

}  // namespace gtx
