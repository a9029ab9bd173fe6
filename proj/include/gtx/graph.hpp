#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gtx/error.hpp"
#include "gtx/value.hpp"

namespace gtx {

enum class LabelKind { node_type, flag, edge_label };

inline std::string_view label_kind_name(LabelKind k) {
  switch (k) {
    case LabelKind::node_type: return "node type";
    case LabelKind::flag: return "flag";
    case LabelKind::edge_label: return "edge label";
  }
  return "?";
}

/// Characters that may not appear in any name. The first six carry meaning
/// in rule notation; the rest are delimiters of the textual formats.
inline constexpr std::string_view kReservedChars = ".-!+=:,\"#~";

inline bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  for (unsigned char c : name) {
    if (c <= ' ' || c == 0x7f) return false;
    if (kReservedChars.find(static_cast<char>(c)) != std::string_view::npos)
      return false;
  }
  return true;
}

class Label {
 public:
  Label(LabelKind kind, std::string name) : kind_(kind), name_(std::move(name)) {
    if (!is_valid_name(name_))
      throw Error("invalid " + std::string(label_kind_name(kind_)) + " '" +
                  name_ + "'");
  }

  static Label type(std::string name) { return {LabelKind::node_type, std::move(name)}; }
  static Label flag(std::string name) { return {LabelKind::flag, std::move(name)}; }
  static Label edge(std::string name) { return {LabelKind::edge_label, std::move(name)}; }

  LabelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  auto operator<=>(const Label&) const = default;

 private:
  LabelKind kind_;
  std::string name_;
};

/// Opaque node identifier, assigned monotonically per graph.
struct NodeId {
  std::uint32_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

struct HostNode {
  NodeId id;
  std::set<std::string> types;
  std::set<std::string> flags;
  std::map<std::string, Value> attrs;
  /// Name from the source file, if any. Not part of graph identity.
  std::string name;

  bool has_type(std::string_view t) const { return types.count(std::string(t)) > 0; }
  bool has_flag(std::string_view f) const { return flags.count(std::string(f)) > 0; }

  const Value* attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? nullptr : &it->second;
  }

  bool same_content(const HostNode& o) const {
    return id == o.id && types == o.types && flags == o.flags && attrs == o.attrs;
  }
};

struct HostEdge {
  NodeId src;
  std::string label;
  NodeId tgt;
  auto operator<=>(const HostEdge&) const = default;
};

/// Simple labelled directed graph. Edges have no identity: a (src, label, tgt)
/// triple is present at most once. Raw equality compares node ids, so two
/// isomorphic graphs with different ids are unequal; use `isomorphic()` from
/// explorer.hpp to compare up to renaming.
class HostGraph {
 public:
  HostGraph() = default;
  explicit HostGraph(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  NodeId add_node(const std::set<Label>& types = {}, const std::set<Label>& flags = {}) {
    HostNode node;
    for (const auto& t : types) {
      if (t.kind() != LabelKind::node_type)
        throw KindMismatchError("label '" + t.name() + "' is a " +
                                std::string(label_kind_name(t.kind())) +
                                ", expected a node type");
      node.types.insert(t.name());
    }
    for (const auto& f : flags) {
      if (f.kind() != LabelKind::flag)
        throw KindMismatchError("label '" + f.name() + "' is a " +
                                std::string(label_kind_name(f.kind())) +
                                ", expected a flag");
      node.flags.insert(f.name());
    }
    node.id = NodeId{next_id_++};
    NodeId id = node.id;
    nodes_.emplace(id, std::move(node));
    return id;
  }

  /// Convenience for programmatic construction; names are validated.
  NodeId add_node(std::initializer_list<std::string_view> types,
                  std::initializer_list<std::string_view> flags = {}) {
    std::set<Label> ts, fs;
    for (auto t : types) ts.insert(Label::type(std::string(t)));
    for (auto f : flags) fs.insert(Label::flag(std::string(f)));
    return add_node(ts, fs);
  }

  bool contains(NodeId n) const { return nodes_.count(n) > 0; }

  const HostNode& node(NodeId n) const {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw_missing(n);
    return it->second;
  }

  void set_node_name(NodeId n, std::string name) { mutable_node(n).name = std::move(name); }

  /// Inserts the edge if absent. Returns false (and changes nothing) when the
  /// triple is already present.
  bool add_edge(NodeId src, const Label& label, NodeId tgt) {
    if (label.kind() != LabelKind::edge_label)
      throw KindMismatchError("label '" + label.name() + "' is a " +
                              std::string(label_kind_name(label.kind())) +
                              ", expected an edge label");
    return insert_edge(src, label.name(), tgt);
  }

  bool add_edge(NodeId src, std::string_view label, NodeId tgt) {
    return add_edge(src, Label::edge(std::string(label)), tgt);
  }

  bool has_edge(NodeId src, const std::string& label, NodeId tgt) const {
    return edges_.count(HostEdge{src, label, tgt}) > 0;
  }

  bool remove_edge(const HostEdge& e) {
    if (edges_.erase(e) == 0) return false;
    out_[e.src].erase({e.label, e.tgt});
    in_[e.tgt].erase({e.label, e.src});
    return true;
  }

  std::optional<Value> set_attr(NodeId n, const std::string& key, Value v) {
    auto& attrs = mutable_node(n).attrs;
    auto it = attrs.find(key);
    if (it == attrs.end()) {
      attrs.emplace(key, std::move(v));
      return std::nullopt;
    }
    Value previous = std::move(it->second);
    it->second = std::move(v);
    return previous;
  }

  std::optional<Value> erase_attr(NodeId n, const std::string& key) {
    auto& attrs = mutable_node(n).attrs;
    auto it = attrs.find(key);
    if (it == attrs.end()) return std::nullopt;
    Value previous = std::move(it->second);
    attrs.erase(it);
    return previous;
  }

  const Value* attr(NodeId n, const std::string& key) const { return node(n).attr(key); }

  void add_flag(NodeId n, const std::string& flag) {
    if (!is_valid_name(flag)) throw Error("invalid flag '" + flag + "'");
    mutable_node(n).flags.insert(flag);
  }
  void remove_flag(NodeId n, const std::string& flag) { mutable_node(n).flags.erase(flag); }

  /// Removes `n` together with every incident edge (single-pushout
  /// semantics). Returns the number of edges removed; a self-loop counts once.
  std::size_t delete_node_spo(NodeId n) {
    if (!contains(n)) throw_missing(n);
    std::vector<HostEdge> incident;
    if (auto it = out_.find(n); it != out_.end())
      for (const auto& [label, tgt] : it->second) incident.push_back({n, label, tgt});
    if (auto it = in_.find(n); it != in_.end())
      for (const auto& [label, src] : it->second)
        if (src != n) incident.push_back({src, label, n});
    for (const auto& e : incident) remove_edge(e);
    out_.erase(n);
    in_.erase(n);
    nodes_.erase(n);
    return incident.size();
  }

  const std::map<NodeId, HostNode>& nodes() const { return nodes_; }
  const std::set<HostEdge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Outgoing (label, target) pairs of `n`, ordered by label then target.
  const std::set<std::pair<std::string, NodeId>>& out_edges(NodeId n) const {
    auto it = out_.find(n);
    return it == out_.end() ? empty_adjacency() : it->second;
  }
  /// Incoming (label, source) pairs of `n`.
  const std::set<std::pair<std::string, NodeId>>& in_edges(NodeId n) const {
    auto it = in_.find(n);
    return it == in_.end() ? empty_adjacency() : it->second;
  }

  std::vector<NodeId> successors(NodeId n, const std::string& label) const {
    return neighbours(out_edges(n), label);
  }
  std::vector<NodeId> predecessors(NodeId n, const std::string& label) const {
    return neighbours(in_edges(n), label);
  }

  /// Full scan for dangling edge endpoints and index consistency.
  bool check_invariants() const {
    std::size_t indexed_out = 0, indexed_in = 0;
    for (const auto& e : edges_) {
      if (!contains(e.src) || !contains(e.tgt)) return false;
      if (!out_edges(e.src).count({e.label, e.tgt})) return false;
      if (!in_edges(e.tgt).count({e.label, e.src})) return false;
    }
    for (const auto& [n, adj] : out_) indexed_out += adj.size();
    for (const auto& [n, adj] : in_) indexed_in += adj.size();
    for (const auto& [id, node] : nodes_)
      if (id != node.id || id.value >= next_id_) return false;
    return indexed_out == edges_.size() && indexed_in == edges_.size();
  }

  bool operator==(const HostGraph& o) const {
    if (edges_ != o.edges_ || nodes_.size() != o.nodes_.size()) return false;
    return std::equal(nodes_.begin(), nodes_.end(), o.nodes_.begin(),
                      [](const auto& a, const auto& b) {
                        return a.second.same_content(b.second);
                      });
  }

 private:
  bool insert_edge(NodeId src, const std::string& label, NodeId tgt) {
    if (!contains(src)) throw_missing(src);
    if (!contains(tgt)) throw_missing(tgt);
    if (!edges_.insert(HostEdge{src, label, tgt}).second) return false;
    out_[src].insert({label, tgt});
    in_[tgt].insert({label, src});
    return true;
  }

  HostNode& mutable_node(NodeId n) {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw_missing(n);
    return it->second;
  }

  [[noreturn]] static void throw_missing(NodeId n) {
    throw MissingNodeError("no node with id " + std::to_string(n.value));
  }

  static std::vector<NodeId> neighbours(const std::set<std::pair<std::string, NodeId>>& adj,
                                        const std::string& label) {
    std::vector<NodeId> out;
    for (auto it = adj.lower_bound({label, NodeId{0}});
         it != adj.end() && it->first == label; ++it)
      out.push_back(it->second);
    return out;
  }

  static const std::set<std::pair<std::string, NodeId>>& empty_adjacency() {
    static const std::set<std::pair<std::string, NodeId>> empty;
    return empty;
  }

  std::string name_ = "graph";
  std::map<NodeId, HostNode> nodes_;
  std::set<HostEdge> edges_;
  std::map<NodeId, std::set<std::pair<std::string, NodeId>>> out_;
  std::map<NodeId, std::set<std::pair<std::string, NodeId>>> in_;
  std::uint32_t next_id_ = 0;
};

}  // namespace gtx
