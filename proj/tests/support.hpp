#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <random>
#include <string>
#include <vector>

#include "gtx/gtx.hpp"

namespace gtx::support {

inline std::filesystem::path fixture_root() { return hello::kDefaultFixtureDir; }

inline GrammarDir load_fixture(const std::string& sub) {
  auto res = load_grammar(fixture_root() / sub);
  if (!res.diagnostics.empty()) {
    std::ostringstream os;
    for (const auto& d : res.diagnostics) os << d << '\n';
    throw Error("fixture " + sub + " is invalid:\n" + os.str());
  }
  return std::move(*res.grammar);
}

inline Rule fixture_rule(const std::string& sub, const std::string& name) {
  return load_fixture(sub).rules.at(name);
}

inline NodeId node_named(const HostGraph& g, const std::string& name) {
  for (const auto& [id, n] : g.nodes())
    if (n.name == name) return id;
  throw Error("no node named " + name);
}

/// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("gtx-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    auto p = path_ / name;
    write_file(p, text);
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string content_key(const HostNode& n) {
  std::string k;
  for (const auto& t : n.types) k += t + ",";
  k += "|";
  for (const auto& f : n.flags) k += f + ",";
  k += "|";
  for (const auto& [a, v] : n.attrs) k += a + "=" + literal_text(v) + ",";
  return k;
}

/// Node content plus per-label in/out degrees: preserved by any isomorphism.
inline std::string signature(const HostGraph& g, NodeId n) {
  std::map<std::string, int> out, in;
  for (const auto& e : g.edges()) {
    if (e.src == n) ++out[e.label];
    if (e.tgt == n) ++in[e.label];
  }
  std::string k = content_key(g.node(n)) + "|";
  for (const auto& [l, c] : out) k += l + ">" + std::to_string(c) + ",";
  for (const auto& [l, c] : in) k += l + "<" + std::to_string(c) + ",";
  return k;
}

/// Reference isomorphism test: enumerates bijections between nodes of equal
/// signature, rejecting a partial bijection as soon as an edge among mapped
/// nodes has no image.
inline bool permutation_isomorphic(const HostGraph& a, const HostGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  std::vector<NodeId> an;
  std::map<NodeId, std::string> sa, sb;
  for (const auto& [id, n] : a.nodes()) {
    an.push_back(id);
    sa[id] = signature(a, id);
  }
  for (const auto& [id, n] : b.nodes()) sb[id] = signature(b, id);
  std::multiset<std::string> ka, kb;
  for (const auto& [id, s] : sa) ka.insert(s);
  for (const auto& [id, s] : sb) kb.insert(s);
  if (ka != kb) return false;
  std::map<NodeId, NodeId> m;
  std::set<NodeId> used;
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (i == an.size()) return true;
    for (const auto& [cand, sig] : sb) {
      if (used.count(cand) || sig != sa[an[i]]) continue;
      m[an[i]] = cand;
      bool ok = true;
      for (const auto& e : a.edges()) {
        auto s = m.find(e.src), t = m.find(e.tgt);
        if (s != m.end() && t != m.end() && !b.has_edge(s->second, e.label, t->second)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        used.insert(cand);
        if (rec(i + 1)) return true;
        used.erase(cand);
      }
      m.erase(an[i]);
    }
    return false;
  };
  return rec(0);
}

inline HostGraph random_plain(std::mt19937_64& rng, int max_nodes, int max_edges) {
  HostGraph g("r");
  int k = std::uniform_int_distribution<int>(1, max_nodes)(rng);
  for (int i = 0; i < k; ++i) g.add_node({std::bernoulli_distribution(0.5)(rng) ? "A" : "B"});
  int m = std::uniform_int_distribution<int>(0, max_edges)(rng);
  std::uniform_int_distribution<std::uint32_t> pick(0, k - 1);
  for (int i = 0; i < m; ++i) g.add_edge(NodeId{pick(rng)}, i % 3 ? "x" : "y", NodeId{pick(rng)});
  return g;
}

inline std::string random_rule(std::mt19937_64& rng, int index) {
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto type = [&] { return coin(0.5) ? "A" : "B"; };
  auto label = [&] { return coin(0.5) ? "x" : "y"; };
  std::string r = "rule r" + std::to_string(index) + "\n";
  r += std::string("node a role=") + (coin(0.2) ? "eraser" : "reader") + " : " + type() + "\n";
  r += std::string("node b role=reader : ") + type() + "\n";
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0: r += std::string("edge a -") + label() + "-> b role=creator\n"; break;
    case 1: r += std::string("edge a -") + label() + "-> b role=eraser\n"; break;
    case 2: r += std::string("node c role=creator : ") + type() + "\nedge b -" + label() + "-> c role=creator\n"; break;
    case 3: r += std::string("edge a -") + label() + "-> b role=reader\nedge b -" + label() + "-> a role=creator\n"; break;
    default: r += std::string("edge a -") + label() + "-> b role=embargo\nedge a -" + label() + "-> b role=creator\n"; break;
  }
  if (coin(0.3)) r += "neq a b\n";
  return r;
}

}  // namespace gtx::support
