#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gtx/error.hpp"
#include "gtx/graph.hpp"
#include "gtx/type_graph.hpp"
#include "gtx/value.hpp"

namespace gtx {

enum class Role { reader, eraser, creator, embargo };

inline std::string_view role_name(Role r) {
  switch (r) {
    case Role::reader: return "reader";
    case Role::eraser: return "eraser";
    case Role::creator: return "creator";
    case Role::embargo: return "embargo";
  }
  return "?";
}

inline std::optional<Role> parse_role(std::string_view s) {
  if (s == "reader") return Role::reader;
  if (s == "eraser") return Role::eraser;
  if (s == "creator") return Role::creator;
  if (s == "embargo") return Role::embargo;
  return std::nullopt;
}

/// Matched in the host graph (as opposed to created or forbidden).
inline bool is_positive(Role r) { return r == Role::reader || r == Role::eraser; }

struct RegexAtom {
  std::string label;
  bool inverse = false;
  auto operator<=>(const RegexAtom&) const = default;
};

/// Concatenation of edge labels; an inverse atom walks an edge backwards.
struct RegexPath {
  std::vector<RegexAtom> atoms;

  std::string text() const {
    std::string out;
    for (const auto& a : atoms) {
      if (!out.empty()) out += '.';
      if (a.inverse) out += '-';
      out += a.label;
    }
    return out;
  }
  auto operator<=>(const RegexPath&) const = default;
};

inline const std::string kRootQuantifier = "root";

/// Reference to an attribute of another matched rule node, read from the
/// graph before the rule applies.
struct AttrRef {
  std::string node;
  std::string attr;
  auto operator<=>(const AttrRef&) const = default;
};

using AttrOperand = std::variant<Value, AttrRef>;

struct FlagOp {
  std::string flag;
  Role role = Role::reader;
};

struct RuleNode {
  std::string id;
  Role role = Role::reader;
  std::optional<std::string> type;
  std::vector<FlagOp> flags;
  std::map<std::string, Value> matches;
  std::map<std::string, AttrOperand> assigns;
  std::set<std::string> erases;
  std::string level = kRootQuantifier;
  std::optional<std::string> explicit_group;
  std::optional<std::string> nac_group;
  SourceSpan span;
};

struct RuleEdge {
  std::string src;
  std::variant<std::string, RegexPath> label;
  std::string tgt;
  Role role = Role::reader;
  std::string level = kRootQuantifier;
  std::optional<std::string> explicit_group;
  std::optional<std::string> nac_group;
  SourceSpan span;

  bool is_path() const { return std::holds_alternative<RegexPath>(label); }
  const std::string& plain_label() const { return std::get<std::string>(label); }
  const RegexPath& path() const { return std::get<RegexPath>(label); }
  std::string label_text() const { return is_path() ? path().text() : plain_label(); }
};

enum class QuantKind { root, forall, exists };

struct Quantifier {
  std::string id;
  QuantKind kind = QuantKind::forall;
  std::optional<std::string> parent;
  std::optional<int> count_param;
  /// A forall that must have at least one extension for its parent to match.
  bool nonempty = false;
  SourceSpan span;
};

/// One forbidden pattern: embargo nodes plus embargo edges (by index).
struct NacGroup {
  std::string id;
  std::string level;
  std::vector<std::string> nodes;
  std::vector<std::size_t> edges;
};

struct DisjunctionSet {
  std::vector<std::string> groups;
  SourceSpan span;
};

struct AttrBinding {
  std::string node;
  std::string attr;
};
struct CountOf {
  std::string quantifier;
};

struct Param {
  std::variant<AttrBinding, CountOf> source;
  SourceSpan span;
};

struct Rule {
  std::string name;
  std::vector<RuleNode> nodes;
  std::vector<RuleEdge> edges;
  std::vector<Quantifier> quantifiers{Quantifier{kRootQuantifier, QuantKind::root, {}, {}, false, {}}};
  std::vector<NacGroup> nac_groups;
  std::vector<DisjunctionSet> disjunctions;
  std::set<std::pair<std::string, std::string>> injectivity;
  std::map<int, Param> params;
  std::optional<std::string> print_format;
  SourceSpan span;

  const RuleNode* find_node(std::string_view id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }
  RuleNode* find_node(std::string_view id) {
    return const_cast<RuleNode*>(std::as_const(*this).find_node(id));
  }
  const Quantifier* find_quantifier(std::string_view id) const {
    for (const auto& q : quantifiers)
      if (q.id == id) return &q;
    return nullptr;
  }
  const NacGroup* find_group(std::string_view id) const {
    for (const auto& g : nac_groups)
      if (g.id == id) return &g;
    return nullptr;
  }

  /// Direct children of `q` in declaration order.
  std::vector<const Quantifier*> children(std::string_view q) const {
    std::vector<const Quantifier*> out;
    for (const auto& c : quantifiers)
      if (c.parent && *c.parent == q) out.push_back(&c);
    return out;
  }

  /// Quantifiers in depth-first pre-order starting at the root.
  std::vector<const Quantifier*> preorder() const {
    std::vector<const Quantifier*> out;
    std::set<std::string> seen;
    std::vector<const Quantifier*> stack{find_quantifier(kRootQuantifier)};
    while (!stack.empty()) {
      const auto* q = stack.back();
      stack.pop_back();
      if (!q || !seen.insert(q->id).second) continue;
      out.push_back(q);
      auto kids = children(q->id);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return out;
  }

  /// True iff `anc` lies on the parent chain of `q` (or is `q`).
  bool is_ancestor_or_self(std::string_view anc, std::string_view q) const {
    std::set<std::string> seen;
    const Quantifier* cur = find_quantifier(q);
    while (cur && seen.insert(cur->id).second) {
      if (cur->id == anc) return true;
      cur = cur->parent ? find_quantifier(*cur->parent) : nullptr;
    }
    return false;
  }

  void add_injectivity(const std::string& a, const std::string& b) {
    injectivity.insert(a < b ? std::pair{a, b} : std::pair{b, a});
  }

  bool reader_only() const {
    for (const auto& n : nodes)
      if (n.role == Role::eraser || n.role == Role::creator || !n.assigns.empty() ||
          !n.erases.empty())
        return false;
    for (const auto& n : nodes)
      for (const auto& f : n.flags)
        if (f.role == Role::eraser || f.role == Role::creator) return false;
    for (const auto& e : edges)
      if (e.role == Role::eraser || e.role == Role::creator) return false;
    return true;
  }
};

/// Partitions embargo elements into NAC groups. Elements sharing an explicit
/// group id, and embargo edges with their embargo endpoints, end up in the
/// same group; non-embargo endpoints are anchors and belong to no group.
/// Replaces `r.nac_groups` and the per-element `nac_group` fields. Returns
/// conflicts (two explicit ids joined by connectivity, mixed levels).
inline std::vector<Violation> group_embargoes(Rule& r) {
  std::vector<Violation> out;
  // Union-find over: nodes [0, N), edges [N, N+E), explicit ids after that.
  const std::size_t n_nodes = r.nodes.size(), n_edges = r.edges.size();
  std::map<std::string, std::size_t> explicit_ids;
  auto id_slot = [&](const std::string& gid) {
    auto [it, inserted] = explicit_ids.emplace(gid, n_nodes + n_edges + explicit_ids.size());
    return it->second;
  };
  std::vector<std::size_t> parent(n_nodes + n_edges);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  auto ensure = [&](std::size_t slot) {
    while (parent.size() <= slot) parent.push_back(parent.size());
  };
  std::iota(parent.begin(), parent.end(), 0);
  std::map<std::string, std::size_t> node_index;
  for (std::size_t i = 0; i < n_nodes; ++i) node_index[r.nodes[i].id] = i;

  for (std::size_t i = 0; i < n_nodes; ++i) {
    auto& n = r.nodes[i];
    n.nac_group.reset();
    if (n.role == Role::embargo && n.explicit_group) {
      auto slot = id_slot(*n.explicit_group);
      ensure(slot);
      unite(i, slot);
    }
  }
  for (std::size_t j = 0; j < n_edges; ++j) {
    auto& e = r.edges[j];
    e.nac_group.reset();
    if (e.role != Role::embargo) continue;
    if (e.explicit_group) {
      auto slot = id_slot(*e.explicit_group);
      ensure(slot);
      unite(n_nodes + j, slot);
    }
    for (const auto* end : {&e.src, &e.tgt}) {
      auto it = node_index.find(*end);
      if (it != node_index.end() && r.nodes[it->second].role == Role::embargo)
        unite(n_nodes + j, it->second);
    }
  }

  // Name components: the explicit id if there is exactly one, else generated.
  std::map<std::size_t, std::set<std::string>> component_ids;
  for (const auto& [gid, slot] : explicit_ids) component_ids[find(slot)].insert(gid);
  std::map<std::size_t, std::string> component_name;
  std::map<std::string, NacGroup> groups;
  std::vector<std::string> order;
  int generated = 0;
  auto group_for = [&](std::size_t root, const SourceSpan& span) -> NacGroup& {
    auto it = component_name.find(root);
    if (it == component_name.end()) {
      std::string name;
      const auto& ids = component_ids[root];
      if (ids.empty()) {
        do {
          name = "_nac" + std::to_string(generated++);
        } while (explicit_ids.count(name));
      } else {
        name = *ids.begin();
        if (ids.size() > 1) {
          std::string all;
          for (const auto& g : ids) all += (all.empty() ? "" : ", ") + g;
          out.push_back({Violation::Kind::nac_structure, span,
                         "embargo groups " + all + " are connected and cannot be separated"});
        }
      }
      it = component_name.emplace(root, name).first;
      order.push_back(name);
      groups[name].id = name;
    }
    return groups[it->second];
  };
  auto place = [&](NacGroup& g, const std::string& level, const SourceSpan& span) {
    if (g.level.empty()) {
      g.level = level;
    } else if (g.level != level) {
      out.push_back({Violation::Kind::nac_structure, span,
                     "embargo group '" + g.id + "' spans quantifier levels '" + g.level +
                         "' and '" + level + "'"});
    }
  };
  // Visit elements in declaration order so generated names are stable.
  for (std::size_t i = 0; i < n_nodes; ++i) {
    auto& n = r.nodes[i];
    if (n.role != Role::embargo) continue;
    auto& g = group_for(find(i), n.span);
    n.nac_group = g.id;
    g.nodes.push_back(n.id);
    place(g, n.level, n.span);
  }
  for (std::size_t j = 0; j < n_edges; ++j) {
    auto& e = r.edges[j];
    if (e.role != Role::embargo) continue;
    auto& g = group_for(find(n_nodes + j), e.span);
    e.nac_group = g.id;
    g.edges.push_back(j);
    place(g, e.level, e.span);
  }
  // Explicit ids used only by disjunctions stay undeclared; validation reports them.
  r.nac_groups.clear();
  for (const auto& name : order) r.nac_groups.push_back(std::move(groups[name]));
  return out;
}

struct LevelElements {
  std::vector<const RuleNode*> nodes;
  std::vector<const RuleEdge*> edges;
};

/// Elements whose level is `q`, nodes ordered by id and edges by
/// (src, label, tgt).
inline LevelElements level_elements(const Rule& r, std::string_view q) {
  if (!r.find_quantifier(q))
    throw UnknownQuantifierError("rule '" + r.name + "' has no quantifier '" + std::string(q) + "'");
  LevelElements out;
  for (const auto& n : r.nodes)
    if (n.level == q) out.nodes.push_back(&n);
  for (const auto& e : r.edges)
    if (e.level == q) out.edges.push_back(&e);
  std::sort(out.nodes.begin(), out.nodes.end(),
            [](auto* a, auto* b) { return a->id < b->id; });
  std::stable_sort(out.edges.begin(), out.edges.end(), [](auto* a, auto* b) {
    return std::tuple(a->src, a->label_text(), a->tgt) < std::tuple(b->src, b->label_text(), b->tgt);
  });
  return out;
}

namespace detail {

inline bool type_known(std::span<const TypeGraph> tgs, const std::string& t) {
  for (const auto& tg : tgs)
    if (tg.declares(t)) return true;
  return false;
}

inline bool types_compatible(const TypeGraph& tg, const std::string& a, const std::string& b) {
  return tg.ancestors(a).count(b) || tg.ancestors(b).count(a);
}

inline bool edge_licensable(std::span<const TypeGraph> tgs, const std::optional<std::string>& src,
                            const std::string& label, const std::optional<std::string>& tgt) {
  for (const auto& tg : tgs)
    for (const auto& d : tg.edge_decls()) {
      if (d.label != label) continue;
      bool s = !src || (tg.declares(*src) && types_compatible(tg, *src, d.src_type));
      bool t = !tgt || (tg.declares(*tgt) && types_compatible(tg, *tgt, d.tgt_type));
      if (s && t) return true;
    }
  return false;
}

inline std::optional<ValueType> declared_attr_type(std::span<const TypeGraph> tgs,
                                                   const std::optional<std::string>& type,
                                                   const std::string& attr) {
  for (const auto& tg : tgs) {
    if (type) {
      if (!tg.declares(*type)) continue;
      auto visible = tg.visible_attrs(*type);
      if (auto it = visible.find(attr); it != visible.end()) return it->second;
    } else {
      for (const auto& [name, decl] : tg.types())
        if (auto it = decl.attrs.find(attr); it != decl.attrs.end()) return it->second;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Structural well-formedness of a rule; when type graphs are given, also
/// checks that every typed element could be licensed by one of them.
inline std::vector<Violation> validate_rule(const Rule& r,
                                            std::span<const TypeGraph> tgs = {}) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  auto add = [&](K k, const SourceSpan& s, std::string msg) {
    out.push_back({k, s, std::move(msg)});
  };

  // Quantifier tree.
  int roots = 0;
  std::set<std::string> quant_ids;
  for (const auto& q : r.quantifiers) {
    if (!quant_ids.insert(q.id).second)
      add(K::quantifier_structure, q.span, "quantifier '" + q.id + "' declared twice");
    if (q.nonempty && q.kind != QuantKind::forall)
      add(K::quantifier_structure, q.span, "only universal quantifiers can be nonempty");
    if (q.kind == QuantKind::root) {
      ++roots;
      if (q.parent) add(K::quantifier_structure, q.span, "root quantifier has a parent");
      continue;
    }
    if (!q.parent) {
      add(K::quantifier_structure, q.span, "quantifier '" + q.id + "' has no parent");
      continue;
    }
    if (!r.find_quantifier(*q.parent)) {
      add(K::quantifier_structure, q.span,
          "quantifier '" + q.id + "' refers to undeclared parent '" + *q.parent + "'");
      continue;
    }
    std::set<std::string> seen{q.id};
    const Quantifier* cur = r.find_quantifier(*q.parent);
    while (cur && cur->kind != QuantKind::root) {
      if (!seen.insert(cur->id).second) {
        add(K::quantifier_structure, q.span, "quantifier '" + q.id + "' lies on a parent cycle");
        break;
      }
      cur = cur->parent ? r.find_quantifier(*cur->parent) : nullptr;
    }
    if (q.count_param && q.kind != QuantKind::forall)
      add(K::parameter, q.span, "only universal quantifiers can report a count");
  }
  if (roots != 1 || !r.find_quantifier(kRootQuantifier) ||
      r.find_quantifier(kRootQuantifier)->kind != QuantKind::root)
    add(K::quantifier_structure, r.span, "rule must have exactly one root quantifier");

  auto level_ok = [&](const std::string& level, const SourceSpan& s, const std::string& what) {
    if (r.find_quantifier(level)) return true;
    add(K::quantifier_structure, s, what + " refers to undeclared quantifier '" + level + "'");
    return false;
  };
  // An element at `level` may only mention nodes whose level is on its path.
  auto in_scope = [&](const RuleNode& n, const std::string& level) {
    return r.is_ancestor_or_self(n.level, level);
  };

  std::set<std::string> node_ids;
  for (const auto& n : r.nodes) {
    if (!node_ids.insert(n.id).second)
      add(K::syntax, n.span, "node '" + n.id + "' declared twice");
    level_ok(n.level, n.span, "node '" + n.id + "'");
    if (n.role == Role::creator) {
      if (!n.matches.empty())
        add(K::role_restriction, n.span, "creator node '" + n.id + "' has match constraints");
      if (!n.erases.empty())
        add(K::role_restriction, n.span, "creator node '" + n.id + "' erases attributes");
      for (const auto& f : n.flags)
        if (f.role == Role::eraser || f.role == Role::embargo)
          add(K::role_restriction, n.span,
              "creator node '" + n.id + "' has " + std::string(role_name(f.role)) + " flag '" +
                  f.flag + "'");
    }
    if (n.role == Role::embargo) {
      if (!n.assigns.empty() || !n.erases.empty())
        add(K::role_restriction, n.span, "embargo node '" + n.id + "' modifies attributes");
      for (const auto& f : n.flags)
        if (f.role == Role::eraser || f.role == Role::creator)
          add(K::role_restriction, n.span,
              "embargo node '" + n.id + "' has " + std::string(role_name(f.role)) + " flag '" +
                  f.flag + "'");
    }
    for (const auto& [attr, operand] : n.assigns) {
      if (const auto* ref = std::get_if<AttrRef>(&operand)) {
        const auto* src = r.find_node(ref->node);
        if (!src)
          add(K::unresolved_reference, n.span,
              "assignment to '" + n.id + "." + attr + "' reads undeclared node '" + ref->node + "'");
        else if (!is_positive(src->role) || !in_scope(*src, n.level))
          add(K::scope, n.span,
              "assignment to '" + n.id + "." + attr + "' must read a matched node in scope");
      }
    }
    for (const auto& f : n.flags)
      if (!is_valid_name(f.flag)) add(K::syntax, n.span, "invalid flag '" + f.flag + "'");
    if (n.type && !is_valid_name(*n.type))
      add(K::syntax, n.span, "invalid type '" + *n.type + "'");
  }

  for (const auto& e : r.edges) {
    std::string what = "edge " + e.src + " -" + e.label_text() + "-> " + e.tgt;
    bool lvl = level_ok(e.level, e.span, what);
    if (e.is_path() && (e.role == Role::creator || e.role == Role::eraser))
      add(K::role_restriction, e.span,
          what + ": path expressions can only be readers or embargoes");
    if (e.is_path() && e.path().atoms.empty())
      add(K::syntax, e.span, what + ": empty path expression");
    for (const auto* end : {&e.src, &e.tgt}) {
      const auto* n = r.find_node(*end);
      if (!n) {
        add(K::unresolved_reference, e.span, what + ": undeclared node '" + *end + "'");
        continue;
      }
      if (lvl && r.find_quantifier(n->level) && !in_scope(*n, e.level))
        add(K::scope, e.span, what + ": node '" + *end + "' is not in scope at '" + e.level + "'");
      switch (e.role) {
        case Role::reader:
        case Role::eraser:
          if (!is_positive(n->role))
            add(K::role_restriction, e.span,
                what + ": " + std::string(role_name(e.role)) + " edge cannot attach to " +
                    std::string(role_name(n->role)) + " node '" + n->id + "'");
          break;
        case Role::creator:
          if (n->role == Role::embargo || n->role == Role::eraser)
            add(K::role_restriction, e.span,
                what + ": creator edge cannot attach to " + std::string(role_name(n->role)) +
                    " node '" + n->id + "'");
          break;
        case Role::embargo:
          if (n->role == Role::creator)
            add(K::role_restriction, e.span,
                what + ": embargo edge cannot attach to creator node '" + n->id + "'");
          break;
      }
    }
    if (!e.is_path() && !is_valid_name(e.plain_label()))
      add(K::syntax, e.span, "invalid edge label '" + e.plain_label() + "'");
    if (e.role != Role::embargo && e.explicit_group)
      add(K::nac_structure, e.span, what + ": only embargo elements can have a group");
  }

  // NAC grouping and disjunctions.
  {
    Rule copy = r;
    for (auto& v : group_embargoes(copy)) out.push_back(std::move(v));
    std::map<std::string, int> uses;
    for (const auto& d : r.disjunctions) {
      if (d.groups.size() < 2)
        add(K::nac_structure, d.span, "a disjunction needs at least two groups");
      std::set<std::string> level;
      for (const auto& gid : d.groups) {
        const auto* g = copy.find_group(gid);
        if (!g) {
          add(K::unresolved_reference, d.span, "disjunction refers to unknown group '" + gid + "'");
          continue;
        }
        level.insert(g->level);
        if (++uses[gid] == 2)
          add(K::nac_structure, d.span, "group '" + gid + "' is in more than one disjunction");
      }
      if (level.size() > 1)
        add(K::nac_structure, d.span, "disjoined groups lie on different quantifier levels");
    }
  }

  for (const auto& [a, b] : r.injectivity)
    for (const auto* id : {&a, &b}) {
      const auto* n = r.find_node(*id);
      if (!n)
        add(K::unresolved_reference, r.span, "injectivity constraint names undeclared node '" + *id + "'");
      else if (n->role == Role::creator)
        add(K::role_restriction, n->span,
            "injectivity constraint on creator node '" + *id + "' is meaningless");
    }

  // Parameters: dense indices, counts are ints and bindings live at the root.
  int expected = 0;
  for (const auto& [idx, p] : r.params) {
    if (idx != expected)
      add(K::parameter, p.span,
          "parameter indices must be dense from 0; missing " + std::to_string(expected));
    expected = idx + 1;
    if (const auto* c = std::get_if<CountOf>(&p.source)) {
      const auto* q = r.find_quantifier(c->quantifier);
      if (!q || q->kind != QuantKind::forall || q->count_param != idx)
        add(K::parameter, p.span,
            "parameter " + std::to_string(idx) + " must be the count of a universal quantifier");
    } else {
      const auto& b = std::get<AttrBinding>(p.source);
      const auto* n = r.find_node(b.node);
      if (!n) {
        add(K::unresolved_reference, p.span,
            "parameter " + std::to_string(idx) + " binds undeclared node '" + b.node + "'");
      } else {
        if (n->level != kRootQuantifier)
          add(K::parameter, p.span,
              "parameter " + std::to_string(idx) + " must bind a root-level node");
        if (n->role == Role::embargo)
          add(K::parameter, p.span,
              "parameter " + std::to_string(idx) + " cannot bind an embargo node");
        if (n->role == Role::creator && !n->assigns.count(b.attr))
          add(K::parameter, p.span,
              "parameter " + std::to_string(idx) + " binds unassigned attribute of creator '" +
                  b.node + "'");
      }
    }
  }
  for (const auto& q : r.quantifiers)
    if (q.count_param) {
      auto it = r.params.find(*q.count_param);
      const CountOf* c = it == r.params.end() ? nullptr : std::get_if<CountOf>(&it->second.source);
      if (!c || c->quantifier != q.id)
        add(K::parameter, q.span,
            "count parameter " + std::to_string(*q.count_param) + " of '" + q.id +
                "' is bound to something else");
    }

  if (!tgs.empty()) {
    for (const auto& n : r.nodes) {
      if (n.type) {
        if (!detail::type_known(tgs, *n.type)) {
          add(K::undeclared_type, n.span, "node '" + n.id + "' has undeclared type '" + *n.type + "'");
        } else if (n.role == Role::creator) {
          bool concrete = false;
          for (const auto& tg : tgs)
            if (const auto* d = tg.find(*n.type)) concrete = concrete || !d->abstract;
          if (!concrete)
            add(K::abstract_instantiation, n.span,
                "creator node '" + n.id + "' instantiates abstract type '" + *n.type + "'");
        }
      }
      auto check_attr = [&](const std::string& attr, const std::optional<ValueType>& vt) {
        auto declared = detail::declared_attr_type(tgs, n.type, attr);
        if (!declared)
          add(K::undeclared_attribute, n.span,
              "attribute '" + n.id + "." + attr + "' is not declared for its type");
        else if (vt && *declared != *vt)
          add(K::attribute_type_mismatch, n.span,
              "attribute '" + n.id + "." + attr + "' is declared as " +
                  std::string(value_type_name(*declared)));
      };
      for (const auto& [attr, v] : n.matches) check_attr(attr, v.type());
      for (const auto& [attr, op] : n.assigns) {
        std::optional<ValueType> vt;
        if (const auto* v = std::get_if<Value>(&op)) vt = v->type();
        check_attr(attr, vt);
      }
      for (const auto& attr : n.erases) check_attr(attr, std::nullopt);
    }
    for (const auto& e : r.edges) {
      if (e.is_path()) continue;
      const auto* s = r.find_node(e.src);
      const auto* t = r.find_node(e.tgt);
      if (!s || !t) continue;
      if (!detail::edge_licensable(tgs, s->type, e.plain_label(), t->type))
        add(K::unlicensed_edge, e.span,
            "edge " + e.src + " -" + e.plain_label() + "-> " + e.tgt +
                " is not licensed by any enabled type graph");
    }
  }

  sort_violations(out);
  return out;
}

}  // namespace gtx
