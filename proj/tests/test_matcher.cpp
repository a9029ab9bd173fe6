#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace gtx;

namespace {

// ---- Reference matcher: exhaustive enumeration, no indexes, no search order.

std::set<NodeId> naive_path(const HostGraph& g, NodeId start, const RegexPath& p) {
  std::set<NodeId> cur{start};
  for (const auto& atom : p.atoms) {
    std::set<NodeId> next;
    for (const auto& e : g.edges()) {
      if (e.label != atom.label) continue;
      if (!atom.inverse && cur.count(e.src)) next.insert(e.tgt);
      if (atom.inverse && cur.count(e.tgt)) next.insert(e.src);
    }
    cur = std::move(next);
  }
  return cur;
}

bool node_ok(const HostGraph& g, const RuleNode& rn, NodeId h) {
  const auto& n = g.node(h);
  if (rn.type && !n.has_type(*rn.type)) return false;
  for (const auto& [k, v] : rn.matches)
    if (!n.attr(k) || *n.attr(k) != v) return false;
  return true;
}

bool edge_ok(const HostGraph& g, const RuleEdge& e, const std::map<std::string, NodeId>& a) {
  NodeId s = a.at(e.src), t = a.at(e.tgt);
  if (e.is_path()) return naive_path(g, s, e.path()).count(t) > 0;
  return g.has_edge(s, e.plain_label(), t);
}

/// Calls `visit` for every assignment of `ids` extending `base`.
void for_each_assignment(const HostGraph& g, const std::vector<std::string>& ids,
                         std::map<std::string, NodeId> base,
                         const std::function<void(const std::map<std::string, NodeId>&)>& visit) {
  std::vector<NodeId> hosts;
  for (const auto& [id, n] : g.nodes()) hosts.push_back(id);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == ids.size()) return visit(base);
    for (NodeId h : hosts) {
      base[ids[i]] = h;
      rec(i + 1);
    }
    base.erase(ids[i]);
  };
  rec(0);
}

bool group_exists(const HostGraph& g, const Rule& r, const NacGroup& grp,
                  const std::map<std::string, NodeId>& a) {
  bool found = false;
  std::vector<std::string> ids(grp.nodes.begin(), grp.nodes.end());
  for_each_assignment(g, ids, a, [&](const std::map<std::string, NodeId>& full) {
    if (found) return;
    for (const auto& id : ids)
      if (!node_ok(g, *r.find_node(id), full.at(id))) return;
    for (auto idx : grp.edges)
      if (!edge_ok(g, r.edges[idx], full)) return;
    found = true;
  });
  return found;
}

/// Number of assignments at forall level `q` (child of the root) for the
/// root assignment `root`.
std::int64_t brute_count(const Rule& r, const HostGraph& g, const std::string& q,
                         const std::map<std::string, NodeId>& root = {}) {
  std::vector<std::string> ids;
  for (const auto& n : r.nodes)
    if (n.level == q && is_positive(n.role)) ids.push_back(n.id);
  std::int64_t count = 0;
  for_each_assignment(g, ids, root, [&](const std::map<std::string, NodeId>& a) {
    for (const auto& id : ids)
      if (!node_ok(g, *r.find_node(id), a.at(id))) return;
    for (const auto& e : r.edges)
      if (e.level == q && is_positive(e.role) && !edge_ok(g, e, a)) return;
    for (const auto& [x, y] : r.injectivity)
      if (a.count(x) && a.count(y) && a.at(x) == a.at(y)) return;
    std::set<std::string> disjoined;
    for (const auto& d : r.disjunctions) {
      bool all = true;
      for (const auto& gid : d.groups) {
        disjoined.insert(gid);
        all = all && group_exists(g, r, *r.find_group(gid), a);
      }
      if (all) return;
    }
    for (const auto& grp : r.nac_groups)
      if (grp.level == q && !disjoined.count(grp.id) && group_exists(g, r, grp, a)) return;
    ++count;
  });
  return count;
}

HostGraph nodified(int nodes, const std::vector<std::pair<int, int>>& links) {
  HostGraph g("t");
  std::vector<NodeId> ns;
  for (int i = 0; i < nodes; ++i) {
    ns.push_back(g.add_node({"Node"}));
    g.set_attr(ns.back(), "name", Value("n" + std::to_string(i + 1)));
  }
  for (auto [s, t] : links) {
    NodeId e = g.add_node({"Edge"});
    if (s >= 0) g.add_edge(e, "src", ns[s]);
    if (t >= 0) g.add_edge(e, "trg", ns[t]);
  }
  return g;
}

std::int64_t engine_count(const Rule& r, const HostGraph& g, const std::string& q = "all") {
  auto roots = find_root_matches(r, g);
  EXPECT_EQ(roots.size(), 1u);
  return collect_level_matches(r, g, roots.at(0)).counts.at(q);
}

const std::vector<std::string> kCounters{"countNodes", "countLoopingEdges", "countIsolatedNodes",
                                          "countCyclesOfThree", "countDanglingEdges"};

}  // namespace

TEST(EvaluateRegexPath, NodifiedEdge) {
  auto g = nodified(2, {{0, 1}});
  NodeId a{0};
  EXPECT_EQ(evaluate_regex_path(g, a, dsl::parse_regex("-src.trg")), std::set<NodeId>{NodeId{1}});
}

TEST(EvaluateRegexPath, TwoStepChain) {
  auto g = nodified(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(evaluate_regex_path(g, NodeId{0}, dsl::parse_regex("-src.trg.-src.trg")),
            std::set<NodeId>{NodeId{2}});
}

TEST(EvaluateRegexPath, NoIncidentEdges) {
  auto g = nodified(3, {{0, 1}});
  EXPECT_TRUE(evaluate_regex_path(g, NodeId{2}, dsl::parse_regex("-src.trg")).empty());
  EXPECT_TRUE(evaluate_regex_path(g, NodeId{2}, dsl::parse_regex("x")).empty());
}

TEST(EvaluateRegexPathProperty, AgreesWithNaiveComposition) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> exprs{"src", "-src", "trg", "-src.trg", "-src.trg.-src.trg", "-trg.src",
                                       "nodes.-src", "src.-src"};
  for (int round = 0; round < 100; ++round) {
    auto g = hello::random_nodified(rng);
    for (const auto& x : exprs) {
      auto p = dsl::parse_regex(x);
      for (const auto& [id, n] : g.nodes()) ASSERT_EQ(evaluate_regex_path(g, id, p), naive_path(g, id, p));
    }
    for (const auto& [id, n] : g.nodes()) {
      auto succ = g.successors(id, "src");
      EXPECT_EQ(evaluate_regex_path(g, id, dsl::parse_regex("src")), std::set<NodeId>(succ.begin(), succ.end()));
    }
  }
}

TEST(FindRootMatches, DeleteRuleFindsN1) {
  auto gd = support::load_fixture("delete");
  const auto& r = gd.rules.at("deleteNodeN1");
  auto ms = find_root_matches(r, gd.start);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(gd.start.node(ms[0].assignment.at("n")).name, "n1");
}

TEST(FindRootMatches, DeleteRuleWithoutN1) {
  auto r = support::fixture_rule("delete", "deleteNodeN1");
  auto g = nodified(3, {{0, 1}});
  g.set_attr(NodeId{0}, "name", Value("m1"));
  EXPECT_TRUE(find_root_matches(r, g).empty());
  EXPECT_TRUE(find_root_matches(r, HostGraph()).empty());
}

TEST(FindRootMatches, NonInjectiveByDefault) {
  auto r = dsl::parse_rule("rule r\nnode a role=reader : Node\nnode b role=reader : Node\n");
  auto g = nodified(1, {});
  auto ms = find_root_matches(r, g);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].assignment.at("a"), ms[0].assignment.at("b"));
  // Brute force: 1 host node, 2 rule nodes, one tuple.
  auto as_forall = dsl::parse_rule("rule r\nquant q forall\nnode a role=reader : Node in q\nnode b role=reader : Node in q\n");
  EXPECT_EQ(brute_count(as_forall, g, "q"), 1);
  r.add_injectivity("a", "b");
  EXPECT_TRUE(find_root_matches(r, g).empty());
}

TEST(FindRootMatches, ResultIsASet) {
  std::mt19937_64 rng(9);
  auto r = dsl::parse_rule(
      "rule r\nnode a role=reader : Node\nnode b role=reader : Node\npath a ~-src.trg~> b role=reader\n");
  for (int i = 0; i < 50; ++i) {
    auto g = hello::random_nodified(rng);
    auto ms = find_root_matches(r, g);
    std::set<std::map<std::string, NodeId>> distinct;
    for (const auto& m : ms) distinct.insert(m.assignment);
    EXPECT_EQ(distinct.size(), ms.size());
    EXPECT_TRUE(std::is_sorted(ms.begin(), ms.end()));
  }
}

TEST(CheckNacs, IsolatedNodeNeedsBothNacsToFail) {
  auto r = support::fixture_rule("counting", "countIsolatedNodes");
  // n1: src only, n2: trg only, n3: untouched.
  auto g = nodified(3, {{0, -1}, {-1, 1}});
  for (int i = 0; i < 3; ++i) {
    Match m;
    m.assignment["n"] = NodeId{static_cast<std::uint32_t>(i)};
    EXPECT_EQ(check_nacs(r, g, m, "all"), i == 2) << i;
  }
}

TEST(CheckNacs, DanglingEdgeDisjunction) {
  auto r = support::fixture_rule("counting", "countDanglingEdges");
  auto g = nodified(2, {{0, 1}, {0, -1}, {-1, 1}, {-1, -1}});
  std::vector<bool> expected{false, true, true, true};
  for (int i = 0; i < 4; ++i) {
    Match m;
    m.assignment["e"] = NodeId{static_cast<std::uint32_t>(2 + i)};
    EXPECT_EQ(check_nacs(r, g, m, "all"), expected[i]) << i;
  }
}

TEST(CheckNacs, NoEmbargoesAlwaysHolds) {
  auto r = support::fixture_rule("counting", "countNodes");
  auto g = nodified(2, {{0, 1}});
  Match m;
  m.assignment["n"] = NodeId{0};
  EXPECT_TRUE(check_nacs(r, g, m, "all"));
  EXPECT_TRUE(check_nacs(r, g, Match{}, kRootQuantifier));
}

TEST(CollectLevelMatches, FiveNodes) {
  auto r = support::fixture_rule("counting", "countNodes");
  auto g = nodified(5, {{0, 1}});
  g.add_node({"Graph"});
  EXPECT_EQ(engine_count(r, g), 5);
}

TEST(CollectLevelMatches, TwoLoops) {
  auto r = support::fixture_rule("counting", "countLoopingEdges");
  auto g = nodified(3, {{0, 0}, {1, 1}, {0, 1}, {2, -1}});
  EXPECT_EQ(engine_count(r, g), 2);
}

TEST(CollectLevelMatches, EmptyGraphCountsZero) {
  for (const auto& name : kCounters) EXPECT_EQ(engine_count(support::fixture_rule("counting", name), HostGraph()), 0) << name;
}

TEST(CollectLevelMatches, ExtensionsKeepParentIndex) {
  auto r = dsl::parse_rule(
      "rule r\nquant outer forall\nquant inner forall in outer count 0\n"
      "node a role=reader : Node in outer\nnode e role=reader : Edge in inner\nedge e -src-> a role=reader in inner\n");
  auto g = nodified(3, {{0, 1}, {0, 2}, {1, 2}});
  auto roots = find_root_matches(r, g);
  ASSERT_EQ(roots.size(), 1u);
  auto lm = collect_level_matches(r, g, roots[0]);
  ASSERT_EQ(lm.extensions.at("outer").size(), 3u);
  EXPECT_EQ(lm.counts.at("inner"), 3);
  std::map<std::size_t, int> per_parent;
  for (const auto& ext : lm.extensions.at("inner")) ++per_parent[*ext.parent];
  EXPECT_EQ(per_parent, (std::map<std::size_t, int>{{0, 2}, {1, 1}}));
}

TEST(Quantifiers, ExistsNeedsAWitnessAndKeepsOne) {
  auto r = dsl::parse_rule(
      "rule r\nquant all forall count 0\nquant some exists in all\n"
      "node a role=reader : Node in all\nnode e role=reader : Edge in some\nedge e -src-> a role=reader in some\n");
  auto g = nodified(3, {{0, 1}, {0, 2}, {1, 2}});
  auto roots = find_root_matches(r, g);
  ASSERT_EQ(roots.size(), 1u);
  auto lm = collect_level_matches(r, g, roots[0]);
  EXPECT_EQ(lm.counts.at("all"), 2);
  EXPECT_EQ(lm.counts.at("some"), 2);
}

TEST(Quantifiers, NonemptyForallBlocksTheRoot) {
  auto r = dsl::parse_rule("rule r\nquant q forall nonempty\nnode a role=reader : Node in q\n");
  EXPECT_TRUE(find_root_matches(r, HostGraph()).empty());
  EXPECT_EQ(find_root_matches(r, nodified(1, {})).size(), 1u);
}

TEST(Matching, SubtypesFlagsAndAttributes) {
  auto tg = dsl::parse_type_graph("typegraph t\ntype GC abstract\ntype Node extends GC\ntype Other\n");
  std::vector<TypeGraph> tgs{tg};
  HostGraph g;
  NodeId a = g.add_node({"Node"}, {"seen"}), b = g.add_node({"Node"}), c = g.add_node({"Other"}, {"seen"});
  g.set_attr(a, "k", Value(1));
  g.set_attr(b, "k", Value("1"));
  (void)c;
  auto count = [&](const std::string& body) {
    auto r = dsl::parse_rule("rule r\nquant q forall count 0\n" + body);
    return collect_level_matches(r, g, find_root_matches(r, g, tgs).at(0), tgs).counts.at("q");
  };
  EXPECT_EQ(count("node x role=reader : GC in q\n"), 2);
  EXPECT_EQ(count("node x role=reader in q\nflag x reader seen\n"), 2);
  EXPECT_EQ(count("node x role=reader : GC in q\nflag x embargo seen\n"), 1);
  EXPECT_EQ(count("node x role=reader in q\nflag x creator seen\n"), 3);
  EXPECT_EQ(count("node x role=reader in q\nmatch x.k == 1\n"), 1);
  EXPECT_EQ(count("node x role=reader in q\nmatch x.k == \"1\"\n"), 1);
  EXPECT_EQ(count("node x role=reader in q\nerase x.k\n"), 2);
}

// Counting rules against the exhaustive reference matcher on random graphs
// of up to 8 Node/Edge nodes and 20 edges.
TEST(MatcherProperty, CountsAgreeWithExhaustiveEnumeration) {
  std::mt19937_64 rng(23);
  std::vector<Rule> rules;
  for (const auto& name : kCounters) rules.push_back(support::fixture_rule("counting", name));
  hello::RandomGraphOptions opt;
  opt.graph_root = false;
  for (int round = 0; round < 200; ++round) {
    opt.max_nodes = std::uniform_int_distribution<int>(1, 4)(rng);
    opt.max_edges = 8 - opt.max_nodes;
    auto g = hello::random_nodified(rng, opt);
    ASSERT_LE(g.node_count(), 8u);
    ASSERT_LE(g.edge_count(), 20u);
    for (const auto& r : rules) EXPECT_EQ(engine_count(r, g), brute_count(r, g, "all")) << r.name << "\n" << dsl::serialize_graph(g);
  }
}

TEST(MatcherProperty, UnrelatedIsolatedNodeKeepsCounts) {
  std::mt19937_64 rng(29);
  std::vector<Rule> rules;
  for (const auto& name : kCounters) rules.push_back(support::fixture_rule("counting", name));
  for (int round = 0; round < 100; ++round) {
    auto g = hello::random_nodified(rng);
    auto h = g;
    h.add_node({"Unrelated"});
    for (const auto& r : rules) EXPECT_EQ(engine_count(r, g), engine_count(r, h)) << r.name;
  }
}

TEST(MatcherProperty, DeterministicOrder) {
  std::mt19937_64 rng(31);
  auto r = support::fixture_rule("transitive", "insertTransitiveEdges");
  for (int round = 0; round < 30; ++round) {
    auto g = hello::random_nodified(rng);
    auto first = find_root_matches(r, g);
    auto again = find_root_matches(r, g);
    ASSERT_EQ(first.size(), again.size());
    for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].assignment, again[i].assignment);
  }
}
