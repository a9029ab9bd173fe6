#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gtx/error.hpp"
#include "gtx/graph.hpp"
#include "gtx/matcher.hpp"
#include "gtx/rule.hpp"

namespace gtx {

/// Stand-in for a node that the effect will create.
struct Placeholder {
  std::size_t index = 0;
  auto operator<=>(const Placeholder&) const = default;
};

using Endpoint = std::variant<NodeId, Placeholder>;

struct NodeCreation {
  Placeholder placeholder;
  std::set<std::string> types;
  std::set<std::string> flags;
  std::map<std::string, Value> attrs;
};

struct PlannedEdge {
  Endpoint src;
  std::string label;
  Endpoint tgt;
  auto operator<=>(const PlannedEdge&) const = default;
};

struct FlagChange {
  NodeId node;
  std::string flag;
  bool add = true;
  auto operator<=>(const FlagChange&) const = default;
};

/// Everything one rule application will do, planned against the pre-state.
struct Effect {
  std::set<NodeId> node_deletions;
  std::set<HostEdge> edge_deletions;
  std::vector<NodeCreation> node_creations;
  std::set<PlannedEdge> edge_creations;
  std::map<std::pair<NodeId, std::string>, Value> attr_writes;
  std::set<std::pair<NodeId, std::string>> attr_erasures;
  std::set<FlagChange> flag_changes;
  std::map<int, Value> param_values;
  std::map<std::string, std::int64_t> counts;
};

struct ApplicationResult {
  HostGraph graph;
  std::string output;
  Effect effect;
};

namespace detail {

class Planner {
 public:
  Planner(const Rule& r, const HostGraph& g, Effect& e) : rule_(r), graph_(g), effect_(e) {}

  using Created = std::map<std::string, Placeholder>;

  /// Adds the effect of one level instance. `created` holds placeholders of
  /// creator nodes at ancestor levels and receives this level's ones.
  void level(const std::string& q, const Match& m, Created& created) {
    for (const auto& n : rule_.nodes) {
      if (n.level != q || n.role != Role::creator) continue;
      NodeCreation c;
      c.placeholder = Placeholder{effect_.node_creations.size()};
      if (n.type) c.types.insert(*n.type);
      for (const auto& f : n.flags) c.flags.insert(f.flag);
      for (const auto& [attr, op] : n.assigns) c.attrs[attr] = resolve(op, m);
      created[n.id] = c.placeholder;
      effect_.node_creations.push_back(std::move(c));
    }
    for (const auto& n : rule_.nodes) {
      if (n.level != q || !is_positive(n.role)) continue;
      NodeId h = m.assignment.at(n.id);
      if (n.role == Role::eraser) effect_.node_deletions.insert(h);
      for (const auto& attr : n.erases) effect_.attr_erasures.insert({h, attr});
      for (const auto& [attr, op] : n.assigns) effect_.attr_writes[{h, attr}] = resolve(op, m);
      for (const auto& f : n.flags) {
        if (f.role == Role::eraser) effect_.flag_changes.insert({h, f.flag, false});
        if (f.role == Role::creator) effect_.flag_changes.insert({h, f.flag, true});
      }
    }
    for (const auto& e : rule_.edges) {
      if (e.level != q || e.is_path()) continue;
      if (e.role == Role::eraser) {
        effect_.edge_deletions.insert({m.assignment.at(e.src), e.plain_label(), m.assignment.at(e.tgt)});
      } else if (e.role == Role::creator) {
        effect_.edge_creations.insert({endpoint(e.src, m, created), e.plain_label(),
                                       endpoint(e.tgt, m, created)});
      }
    }
  }

  std::optional<Value> creator_value(const std::string& node, const std::string& attr,
                                     const Match& root) const {
    const auto* n = rule_.find_node(node);
    if (!n) return std::nullopt;
    auto it = n->assigns.find(attr);
    if (it == n->assigns.end()) return std::nullopt;
    return resolve(it->second, root);
  }

 private:
  Value resolve(const AttrOperand& op, const Match& m) const {
    if (const auto* v = std::get_if<Value>(&op)) return *v;
    const auto& ref = std::get<AttrRef>(op);
    const auto* v = graph_.attr(m.assignment.at(ref.node), ref.attr);
    if (!v) throw Error("attribute '" + ref.node + "." + ref.attr + "' vanished during planning");
    return *v;
  }

  Endpoint endpoint(const std::string& id, const Match& m, const Created& created) const {
    if (auto it = created.find(id); it != created.end()) return it->second;
    return m.assignment.at(id);
  }

  const Rule& rule_;
  const HostGraph& graph_;
  Effect& effect_;
};

}  // namespace detail

/// Union of the effects of the root match and every quantified extension,
/// all computed against the unchanged graph `g`.
inline Effect plan_application(const Rule& r, const HostGraph& g, const Match& root,
                               std::span<const TypeGraph> tgs = {}) {
  Effect effect;
  detail::Planner planner(r, g, effect);
  LevelMatchSet lms = collect_level_matches(r, g, root, tgs);

  detail::Planner::Created root_created;
  planner.level(kRootQuantifier, root, root_created);
  std::map<std::string, std::vector<detail::Planner::Created>> created;
  for (const auto* q : r.preorder()) {
    if (q->kind == QuantKind::root) continue;
    auto& mine = created[q->id];
    for (const auto& ext : lms.extensions[q->id]) {
      detail::Planner::Created c =
          ext.parent ? created[*q->parent][*ext.parent] : root_created;
      planner.level(q->id, ext.match, c);
      mine.push_back(std::move(c));
    }
  }
  effect.counts = lms.counts;

  for (const auto& [idx, p] : r.params) {
    if (const auto* c = std::get_if<CountOf>(&p.source)) {
      effect.param_values[idx] = Value(effect.counts[c->quantifier]);
    } else if (auto it = root.bound_params.find(idx); it != root.bound_params.end()) {
      effect.param_values[idx] = it->second;
    } else {
      const auto& b = std::get<AttrBinding>(p.source);
      if (auto v = planner.creator_value(b.node, b.attr, root)) effect.param_values[idx] = *v;
    }
  }

  // Delete precedence: nothing is created on or written to a deleted node.
  auto dead = [&](const Endpoint& ep) {
    const auto* id = std::get_if<NodeId>(&ep);
    return id && effect.node_deletions.count(*id);
  };
  std::erase_if(effect.edge_creations, [&](const PlannedEdge& e) { return dead(e.src) || dead(e.tgt); });
  std::erase_if(effect.attr_writes, [&](const auto& w) { return effect.node_deletions.count(w.first.first) > 0; });
  std::erase_if(effect.attr_erasures, [&](const auto& w) { return effect.node_deletions.count(w.first) > 0; });
  std::erase_if(effect.flag_changes, [&](const FlagChange& f) { return effect.node_deletions.count(f.node) > 0; });
  return effect;
}

/// Applies `e` in a fixed order: edge deletions, node deletions (with their
/// incident edges), node creations, edge creations, then attribute and flag
/// updates on surviving nodes.
inline HostGraph apply_effect(HostGraph g, const Effect& e) {
  for (const auto& edge : e.edge_deletions) g.remove_edge(edge);
  for (NodeId n : e.node_deletions)
    if (g.contains(n)) g.delete_node_spo(n);
  std::map<Placeholder, NodeId> fresh;
  for (const auto& c : e.node_creations) {
    std::set<Label> types, flags;
    for (const auto& t : c.types) types.insert(Label::type(t));
    for (const auto& f : c.flags) flags.insert(Label::flag(f));
    NodeId id = g.add_node(types, flags);
    for (const auto& [k, v] : c.attrs) g.set_attr(id, k, v);
    fresh[c.placeholder] = id;
  }
  auto resolve = [&](const Endpoint& ep) -> std::optional<NodeId> {
    if (const auto* p = std::get_if<Placeholder>(&ep)) return fresh.at(*p);
    NodeId id = std::get<NodeId>(ep);
    if (!g.contains(id)) return std::nullopt;
    return id;
  };
  for (const auto& edge : e.edge_creations) {
    auto s = resolve(edge.src), t = resolve(edge.tgt);
    if (s && t) g.add_edge(*s, edge.label, *t);
  }
  for (const auto& [node, attr] : e.attr_erasures)
    if (g.contains(node)) g.erase_attr(node, attr);
  for (const auto& [key, value] : e.attr_writes)
    if (g.contains(key.first)) g.set_attr(key.first, key.second, value);
  for (const auto& f : e.flag_changes)
    if (g.contains(f.node) && f.add) g.add_flag(f.node, f.flag);
  for (const auto& f : e.flag_changes)
    if (g.contains(f.node) && !f.add) g.remove_flag(f.node, f.flag);
  return g;
}

/// printf-like rendering: `%s` takes the next parameter in index order,
/// `%n` is a newline and `%%` a percent sign.
inline std::string render_output(const Rule& r, const Effect& e) {
  if (!r.print_format) return {};
  const std::string& fmt = *r.print_format;
  std::string out;
  auto next = r.params.begin();
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      out += fmt[i];
      continue;
    }
    if (i + 1 >= fmt.size())
      throw FormatError("rule '" + r.name + "': format ends with a lone '%'");
    char c = fmt[++i];
    if (c == 'n') {
      out += '\n';
    } else if (c == '%') {
      out += '%';
    } else if (c == 's') {
      if (next == r.params.end())
        throw FormatError("rule '" + r.name + "': format has more %s than the rule has parameters");
      auto v = e.param_values.find(next->first);
      if (v == e.param_values.end())
        throw FormatError("rule '" + r.name + "': parameter " + std::to_string(next->first) +
                          " has no value");
      out += display_text(v->second);
      ++next;
    } else {
      throw FormatError("rule '" + r.name + "': unsupported conversion '%" + std::string(1, c) + "'");
    }
  }
  return out;
}

inline ApplicationResult apply_match(const Rule& r, const HostGraph& g, const Match& root,
                                     std::span<const TypeGraph> tgs = {}) {
  ApplicationResult res;
  res.effect = plan_application(r, g, root, tgs);
  res.output = render_output(r, res.effect);
  res.graph = apply_effect(g, res.effect);
  return res;
}

/// One application: the first root match in matcher order, or nullopt when
/// the rule is not applicable.
inline std::optional<ApplicationResult> apply_rule(const Rule& r, const HostGraph& g,
                                                   std::span<const TypeGraph> tgs = {}) {
  auto matches = find_root_matches(r, g, tgs);
  if (matches.empty()) return std::nullopt;
  return apply_match(r, g, matches.front(), tgs);
}

}  // namespace gtx
