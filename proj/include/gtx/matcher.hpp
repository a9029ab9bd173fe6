#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gtx/graph.hpp"
#include "gtx/rule.hpp"
#include "gtx/type_graph.hpp"

namespace gtx {

struct Match {
  std::map<std::string, NodeId> assignment;
  std::map<int, Value> bound_params;

  auto operator<=>(const Match& o) const { return assignment <=> o.assignment; }
  bool operator==(const Match& o) const { return assignment == o.assignment; }
};

/// One extension of a parent match at a non-root quantifier. `parent` indexes
/// the parent quantifier's extension list; it is empty when the parent is the
/// root. The assignment includes all ancestor levels.
struct Extension {
  Match match;
  std::optional<std::size_t> parent;
};

struct LevelMatchSet {
  std::map<std::string, std::vector<Extension>> extensions;
  std::map<std::string, std::int64_t> counts;
};

/// Nodes reachable from `start` by following the atoms of `p` in order,
/// computed one atom at a time over sets of nodes.
inline std::set<NodeId> evaluate_regex_path(const HostGraph& g, NodeId start, const RegexPath& p) {
  std::set<NodeId> frontier{start};
  for (const auto& atom : p.atoms) {
    std::set<NodeId> next;
    for (NodeId n : frontier)
      for (NodeId m : atom.inverse ? g.predecessors(n, atom.label) : g.successors(n, atom.label))
        next.insert(m);
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return frontier;
}

/// Backtracking matcher for one rule against one host graph. Matching is
/// non-injective except where the rule lists `neq` pairs.
class Matcher {
 public:
  Matcher(const Rule& rule, const HostGraph& graph, std::span<const TypeGraph> tgs = {})
      : rule_(rule), graph_(graph), tgs_(tgs) {
    for (const auto& q : rule_.quantifiers) {
      std::vector<const RuleNode*> nodes;
      std::vector<const RuleEdge*> edges;
      for (const auto& n : rule_.nodes)
        if (n.level == q.id && is_positive(n.role)) nodes.push_back(&n);
      for (const auto& e : rule_.edges)
        if (e.level == q.id && is_positive(e.role)) edges.push_back(&e);
      level_plans_.emplace(q.id, make_plan(std::move(nodes), std::move(edges)));
    }
    for (const auto& g : rule_.nac_groups) {
      std::vector<const RuleNode*> nodes;
      std::vector<const RuleEdge*> edges;
      for (const auto& id : g.nodes) nodes.push_back(rule_.find_node(id));
      for (auto idx : g.edges) edges.push_back(&rule_.edges[idx]);
      group_plans_.emplace(g.id, make_plan(std::move(nodes), std::move(edges)));
    }
    for (const auto& d : rule_.disjunctions)
      for (const auto& gid : d.groups) disjoined_.insert(gid);
  }

  std::vector<Match> root_matches() const {
    std::vector<Match> out;
    Match empty;
    search(level_plans_.at(kRootQuantifier), empty, [&](const Match& m) {
      if (level_valid(m, kRootQuantifier)) out.push_back(with_params(m));
      return true;
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  /// NAC condition at `level`: ungrouped NACs must all be unmatchable; a
  /// disjunction holds when at least one of its groups is unmatchable.
  bool check_nacs(const Match& m, const std::string& level) const {
    for (const auto& g : rule_.nac_groups)
      if (g.level == level && !disjoined_.count(g.id) && group_matchable(g.id, m)) return false;
    for (const auto& d : rule_.disjunctions) {
      const auto* first = rule_.find_group(d.groups.front());
      if (!first || first->level != level) continue;
      bool all = true;
      for (const auto& gid : d.groups)
        if (!group_matchable(gid, m)) {
          all = false;
          break;
        }
      if (all) return false;
    }
    return true;
  }

  /// Extensions of `base` (a valid match at the parent level) at quantifier
  /// `q`, sorted. An existential level yields at most one extension.
  std::vector<Match> extensions(const Match& base, const Quantifier& q) const {
    std::vector<Match> out;
    Match start = base;
    search(level_plans_.at(q.id), start, [&](const Match& m) {
      if (level_valid(m, q.id)) out.push_back(m);
      return true;
    });
    std::sort(out.begin(), out.end());
    if (q.kind == QuantKind::exists && out.size() > 1) out.resize(1);
    return out;
  }

  LevelMatchSet level_matches(const Match& root) const {
    LevelMatchSet out;
    for (const auto* q : rule_.preorder()) {
      if (q->kind == QuantKind::root) continue;
      auto& list = out.extensions[q->id];
      const std::string& parent = *q->parent;
      if (parent == kRootQuantifier) {
        for (auto& m : extensions(root, *q)) list.push_back({std::move(m), std::nullopt});
      } else {
        const auto& parents = out.extensions[parent];
        for (std::size_t i = 0; i < parents.size(); ++i)
          for (auto& m : extensions(parents[i].match, *q)) list.push_back({std::move(m), i});
      }
      out.counts[q->id] = static_cast<std::int64_t>(list.size());
    }
    return out;
  }

 private:
  struct Plan {
    std::vector<const RuleNode*> order;
    // checks[i]: edges whose endpoints are all assigned once order[i] is.
    std::vector<std::vector<const RuleEdge*>> checks;
    std::vector<const RuleEdge*> edges;
  };

  Plan make_plan(std::vector<const RuleNode*> nodes, std::vector<const RuleEdge*> edges) const {
    auto degree = [&](const RuleNode* n) {
      int d = 0;
      for (const auto& e : rule_.edges) d += (e.src == n->id) + (e.tgt == n->id);
      return d;
    };
    // Most constrained first: typed, then attribute constraints, then degree.
    std::sort(nodes.begin(), nodes.end(), [&](const RuleNode* a, const RuleNode* b) {
      auto key = [&](const RuleNode* n) {
        return std::tuple(n->type ? 0 : 1, -static_cast<int>(n->matches.size()), -degree(n));
      };
      auto ka = key(a), kb = key(b);
      if (ka != kb) return ka < kb;
      return a->id < b->id;
    });
    Plan p;
    p.order = std::move(nodes);
    p.edges = std::move(edges);
    p.checks.resize(p.order.size() + 1);
    for (const auto* e : p.edges) {
      std::size_t last = 0;  // 0 = checkable before any assignment
      for (std::size_t i = 0; i < p.order.size(); ++i)
        if (p.order[i]->id == e->src || p.order[i]->id == e->tgt) last = i + 1;
      p.checks[last].push_back(e);
    }
    return p;
  }

  bool node_fits(const RuleNode& rn, NodeId host) const {
    const auto& hn = graph_.node(host);
    if (rn.type) {
      bool ok = false;
      for (const auto& t : hn.types)
        if (satisfies_type(tgs_, t, *rn.type)) {
          ok = true;
          break;
        }
      if (!ok) return false;
    }
    for (const auto& f : rn.flags) {
      if (f.role == Role::creator) continue;
      bool has = hn.has_flag(f.flag);
      bool want = f.role != Role::embargo;
      if (has != want) return false;
    }
    for (const auto& [k, v] : rn.matches) {
      const auto* have = hn.attr(k);
      if (!have || *have != v) return false;
    }
    for (const auto& k : rn.erases)
      if (!hn.attr(k)) return false;
    for (const auto& [idx, p] : rule_.params)
      if (const auto* b = std::get_if<AttrBinding>(&p.source))
        if (b->node == rn.id && !hn.attr(b->attr)) return false;
    return true;
  }

  bool edge_holds(const RuleEdge& e, const Match& m) const {
    NodeId s = m.assignment.at(e.src), t = m.assignment.at(e.tgt);
    if (e.is_path()) return evaluate_regex_path(graph_, s, e.path()).count(t) > 0;
    return graph_.has_edge(s, e.plain_label(), t);
  }

  bool injective_ok(const Match& m, const std::string& just_assigned) const {
    NodeId h = m.assignment.at(just_assigned);
    for (const auto& [a, b] : rule_.injectivity) {
      const std::string* other = a == just_assigned ? &b : b == just_assigned ? &a : nullptr;
      if (!other) continue;
      auto it = m.assignment.find(*other);
      if (it != m.assignment.end() && it->second == h) return false;
    }
    return true;
  }

  // Source-side read references (assign x.a = y.b) require y.b to exist.
  bool references_ok(const Match& m) const {
    for (const auto& n : rule_.nodes)
      for (const auto& [attr, op] : n.assigns)
        if (const auto* ref = std::get_if<AttrRef>(&op)) {
          auto it = m.assignment.find(ref->node);
          if (it != m.assignment.end() && !graph_.attr(it->second, ref->attr)) return false;
        }
    return true;
  }

  /// Candidate hosts for `rn`, ascending. Uses adjacency of an already
  /// assigned neighbour when a plain edge connects them.
  std::vector<NodeId> candidates(const RuleNode& rn, const Plan& p, const Match& m) const {
    for (const auto* e : p.edges) {
      if (e->is_path()) continue;
      if (e->tgt == rn.id && e->src != rn.id) {
        auto it = m.assignment.find(e->src);
        if (it != m.assignment.end()) return graph_.successors(it->second, e->plain_label());
      }
      if (e->src == rn.id && e->tgt != rn.id) {
        auto it = m.assignment.find(e->tgt);
        if (it != m.assignment.end()) return graph_.predecessors(it->second, e->plain_label());
      }
    }
    std::vector<NodeId> all;
    all.reserve(graph_.node_count());
    for (const auto& [id, node] : graph_.nodes()) all.push_back(id);
    return all;
  }

  /// Enumerates assignments of `p.order` extending `m`; `visit` returns false
  /// to stop early. Returns false iff stopped.
  bool search(const Plan& p, Match& m, const std::function<bool(const Match&)>& visit) const {
    for (const auto* e : p.checks[0])
      if (!edge_holds(*e, m)) return true;
    if (!references_ok(m)) return true;
    return extend(p, 0, m, visit);
  }

  bool extend(const Plan& p, std::size_t depth, Match& m,
              const std::function<bool(const Match&)>& visit) const {
    if (depth == p.order.size()) return visit(m);
    const RuleNode& rn = *p.order[depth];
    for (NodeId h : candidates(rn, p, m)) {
      if (!node_fits(rn, h)) continue;
      m.assignment[rn.id] = h;
      bool ok = injective_ok(m, rn.id);
      for (const auto* e : p.checks[depth + 1]) {
        if (!ok) break;
        ok = edge_holds(*e, m);
      }
      if (ok && !extend(p, depth + 1, m, visit)) {
        m.assignment.erase(rn.id);
        return false;
      }
      m.assignment.erase(rn.id);
    }
    return true;
  }

  bool group_matchable(const std::string& gid, const Match& m) const {
    auto it = group_plans_.find(gid);
    if (it == group_plans_.end()) return false;
    Match probe = m;
    bool found = false;
    search(it->second, probe, [&](const Match&) {
      found = true;
      return false;
    });
    return found;
  }

  bool level_valid(const Match& m, const std::string& level) const {
    if (!references_ok(m) || !check_nacs(m, level)) return false;
    for (const auto* child : rule_.children(level))
      if ((child->kind == QuantKind::exists || child->nonempty) && extensions(m, *child).empty())
        return false;
    return true;
  }

  Match with_params(Match m) const {
    for (const auto& [idx, p] : rule_.params)
      if (const auto* b = std::get_if<AttrBinding>(&p.source)) {
        auto it = m.assignment.find(b->node);
        if (it == m.assignment.end()) continue;
        if (const auto* v = graph_.attr(it->second, b->attr)) m.bound_params[idx] = *v;
      }
    return m;
  }

  const Rule& rule_;
  const HostGraph& graph_;
  std::span<const TypeGraph> tgs_;
  std::map<std::string, Plan> level_plans_;
  std::map<std::string, Plan> group_plans_;
  std::set<std::string> disjoined_;
};

inline std::vector<Match> find_root_matches(const Rule& r, const HostGraph& g,
                                            std::span<const TypeGraph> tgs = {}) {
  return Matcher(r, g, tgs).root_matches();
}

inline bool check_nacs(const Rule& r, const HostGraph& g, const Match& m, const std::string& level,
                       std::span<const TypeGraph> tgs = {}) {
  return Matcher(r, g, tgs).check_nacs(m, level);
}

inline LevelMatchSet collect_level_matches(const Rule& r, const HostGraph& g, const Match& root,
                                           std::span<const TypeGraph> tgs = {}) {
  return Matcher(r, g, tgs).level_matches(root);
}

}  // namespace gtx
