#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gtx/graph.hpp"
#include "gtx/rewriter.hpp"
#include "gtx/rule.hpp"

namespace gtx {

namespace detail {

/// 64-bit FNV-1a; stable across platforms and runs.
class Hasher {
 public:
  Hasher& bytes(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Hasher& str(std::string_view s) {
    num(s.size());
    return bytes(s);
  }
  Hasher& num(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xff;
      h_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t seed_hash(const HostNode& n) {
  Hasher h;
  h.num(n.types.size());
  for (const auto& t : n.types) h.str(t);
  h.num(n.flags.size());
  for (const auto& f : n.flags) h.str(f);
  h.num(n.attrs.size());
  for (const auto& [k, v] : n.attrs) h.str(k).num(static_cast<std::uint64_t>(v.type())).str(literal_text(v));
  return h.value();
}

/// Iterated neighbourhood refinement; returns the colour of every node after
/// `rounds` rounds.
inline std::map<NodeId, std::uint64_t> refine(const HostGraph& g, std::size_t rounds) {
  std::map<NodeId, std::uint64_t> colour;
  for (const auto& [id, node] : g.nodes()) colour[id] = seed_hash(node);
  for (std::size_t r = 0; r < rounds; ++r) {
    std::map<NodeId, std::uint64_t> next;
    for (const auto& [id, c] : colour) {
      std::vector<std::pair<std::string, std::uint64_t>> out, in;
      for (const auto& [label, m] : g.out_edges(id)) out.emplace_back(label, colour[m]);
      for (const auto& [label, m] : g.in_edges(id)) in.emplace_back(label, colour[m]);
      std::sort(out.begin(), out.end());
      std::sort(in.begin(), in.end());
      Hasher h;
      h.num(c).num(out.size());
      for (const auto& [l, x] : out) h.str(l).num(x);
      h.num(in.size());
      for (const auto& [l, x] : in) h.str(l).num(x);
      next[id] = h.value();
    }
    colour = std::move(next);
  }
  return colour;
}

}  // namespace detail

/// Isomorphism-invariant digest. Equal graphs up to renaming always share a
/// certificate; the converse needs `isomorphic()`.
inline std::uint64_t certificate(const HostGraph& g) {
  auto colour = detail::refine(g, g.node_count());
  std::vector<std::uint64_t> sorted;
  for (const auto& [id, c] : colour) sorted.push_back(c);
  std::sort(sorted.begin(), sorted.end());
  detail::Hasher h;
  h.num(sorted.size());
  for (auto c : sorted) h.num(c);
  h.num(g.edge_count());
  return h.value();
}

inline std::string certificate_hex(std::uint64_t c) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, c >>= 4) out[i] = digits[c & 0xf];
  return out;
}

/// Exact isomorphism test (types, flags, attributes and all edges), by
/// backtracking over refinement-colour classes.
inline bool isomorphic(const HostGraph& a, const HostGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  auto ca = detail::refine(a, a.node_count());
  auto cb = detail::refine(b, b.node_count());
  std::map<std::uint64_t, std::vector<NodeId>> classes_b;
  for (const auto& [id, c] : cb) classes_b[c].push_back(id);
  {
    std::map<std::uint64_t, std::size_t> sizes_a;
    for (const auto& [id, c] : ca) ++sizes_a[c];
    for (const auto& [c, n] : sizes_a) {
      auto it = classes_b.find(c);
      if (it == classes_b.end() || it->second.size() != n) return false;
    }
  }
  // Smallest colour classes first keeps the branching low.
  std::vector<NodeId> order;
  for (const auto& [id, c] : ca) order.push_back(id);
  std::stable_sort(order.begin(), order.end(), [&](NodeId x, NodeId y) {
    return classes_b[ca[x]].size() < classes_b[ca[y]].size();
  });

  std::map<NodeId, NodeId> fwd, back;
  std::function<bool(std::size_t)> step = [&](std::size_t i) {
    if (i == order.size()) return true;
    NodeId u = order[i];
    const auto& un = a.node(u);
    for (NodeId v : classes_b[ca[u]]) {
      if (back.count(v)) continue;
      const auto& vn = b.node(v);
      if (un.types != vn.types || un.flags != vn.flags || un.attrs != vn.attrs) continue;
      fwd[u] = v;
      back[v] = u;
      bool ok = true;
      for (const auto& [label, w] : a.out_edges(u)) {
        auto it = fwd.find(w);
        if (it != fwd.end() && !b.has_edge(v, label, it->second)) ok = false;
      }
      for (const auto& [label, w] : a.in_edges(u)) {
        auto it = fwd.find(w);
        if (it != fwd.end() && !b.has_edge(it->second, label, v)) ok = false;
      }
      for (const auto& [label, w] : b.out_edges(v)) {
        auto it = back.find(w);
        if (it != back.end() && !a.has_edge(u, label, it->second)) ok = false;
      }
      for (const auto& [label, w] : b.in_edges(v)) {
        auto it = back.find(w);
        if (it != back.end() && !a.has_edge(it->second, label, u)) ok = false;
      }
      if (ok && step(i + 1)) return true;
      fwd.erase(u);
      back.erase(v);
    }
    return false;
  };
  return step(0);
}

struct LtsState {
  std::size_t id = 0;
  HostGraph graph;
  std::uint64_t certificate = 0;
  std::size_t depth = 0;
};

struct LtsTransition {
  std::size_t from = 0;
  std::string rule;
  std::size_t to = 0;
  auto operator<=>(const LtsTransition&) const = default;
};

struct Lts {
  std::vector<LtsState> states;
  std::vector<LtsTransition> transitions;
  std::size_t start = 0;
  bool truncated = false;
};

struct ExploreLimits {
  std::size_t max_states = 1000;
  std::size_t max_depth = 100;
};

/// Breadth-first closure under every root match of every rule. Successors
/// are deduplicated up to isomorphism; identical (from, rule, to) triples are
/// recorded once.
inline Lts explore(std::span<const Rule> rules, const HostGraph& start, ExploreLimits limits,
                   std::span<const TypeGraph> tgs = {}) {
  if (limits.max_states < 1 || limits.max_depth < 1)
    throw Error("exploration limits must be at least 1");
  Lts lts;
  std::map<std::uint64_t, std::vector<std::size_t>> buckets;
  auto lookup = [&](const HostGraph& g, std::uint64_t cert) -> std::optional<std::size_t> {
    auto it = buckets.find(cert);
    if (it == buckets.end()) return std::nullopt;
    for (auto id : it->second)
      if (isomorphic(lts.states[id].graph, g)) return id;
    return std::nullopt;
  };
  auto cert0 = certificate(start);
  lts.states.push_back({0, start, cert0, 0});
  buckets[cert0].push_back(0);

  std::set<LtsTransition> seen;
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t sid = frontier.front();
    frontier.pop_front();
    // Copy: lts.states may grow while we iterate.
    HostGraph current = lts.states[sid].graph;
    std::size_t depth = lts.states[sid].depth;
    for (const auto& rule : rules) {
      auto matches = find_root_matches(rule, current, tgs);
      if (matches.empty()) continue;
      if (depth >= limits.max_depth) {
        lts.truncated = true;
        break;
      }
      for (const auto& m : matches) {
        HostGraph next = apply_effect(current, plan_application(rule, current, m, tgs));
        auto cert = certificate(next);
        auto target = lookup(next, cert);
        if (!target) {
          if (lts.states.size() >= limits.max_states) {
            lts.truncated = true;
            continue;
          }
          target = lts.states.size();
          lts.states.push_back({*target, std::move(next), cert, depth + 1});
          buckets[cert].push_back(*target);
          frontier.push_back(*target);
        }
        LtsTransition t{sid, rule.name, *target};
        if (seen.insert(t).second) lts.transitions.push_back(std::move(t));
      }
    }
  }
  return lts;
}

/// Plain-text export: `state S<i> <certificate>` per state, then
/// `trans S<i> -RULE-> S<j>` per transition, in discovery order.
inline void write_lts(std::ostream& os, const Lts& lts) {
  for (const auto& s : lts.states)
    os << "state S" << s.id << ' ' << certificate_hex(s.certificate) << '\n';
  for (const auto& t : lts.transitions)
    os << "trans S" << t.from << " -" << t.rule << "-> S" << t.to << '\n';
}

}  // namespace gtx
