#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace gtx;

namespace {

HostGraph chain(int n) {
  HostGraph g("chain");
  NodeId root = g.add_node({"Graph"});
  std::vector<NodeId> ns;
  for (int i = 0; i < n; ++i) {
    ns.push_back(g.add_node({"Node"}));
    g.set_attr(ns.back(), "name", Value("n" + std::to_string(i + 1)));
    g.add_edge(root, "nodes", ns.back());
  }
  for (int i = 0; i + 1 < n; ++i) {
    NodeId e = g.add_node({"Edge"});
    g.add_edge(root, "edges", e);
    g.add_edge(e, "src", ns[i]);
    g.add_edge(e, "trg", ns[i + 1]);
  }
  return g;
}

Effect plan_first(const Rule& r, const HostGraph& g) {
  auto ms = find_root_matches(r, g);
  EXPECT_FALSE(ms.empty());
  return plan_application(r, g, ms.at(0));
}

}  // namespace

TEST(PlanApplication, ReverseIsPlannedAgainstThePreState) {
  auto r = support::fixture_rule("reverse", "reverse");
  auto g = chain(3);
  auto e = plan_first(r, g);
  std::set<HostEdge> expected_deletions;
  std::set<PlannedEdge> expected_creations;
  for (const auto& edge : g.edges()) {
    if (edge.label != "src" && edge.label != "trg") continue;
    expected_deletions.insert(edge);
    expected_creations.insert({edge.src, edge.label == "src" ? "trg" : "src", edge.tgt});
  }
  EXPECT_EQ(e.edge_deletions, expected_deletions);
  EXPECT_EQ(e.edge_creations, expected_creations);
  EXPECT_TRUE(e.node_deletions.empty());
}

TEST(PlanApplication, LoopEdgeNodeDeletedOnce) {
  auto gd = support::load_fixture("delete");
  auto e = plan_first(gd.rules.at("deleteNodeN1WithEdges"), gd.start);
  NodeId n1 = support::node_named(gd.start, "n1");
  NodeId loop = support::node_named(gd.start, "e1");
  EXPECT_TRUE(e.node_deletions.count(n1));
  EXPECT_TRUE(e.node_deletions.count(loop));
  std::set<std::string> deleted;
  for (NodeId n : e.node_deletions) deleted.insert(gd.start.node(n).name);
  EXPECT_EQ(deleted, (std::set<std::string>{"n1", "e1", "e2", "e3", "e5"}));
}

TEST(PlanApplication, EmptyForallStillApplies) {
  auto r = dsl::parse_rule(
      "rule r\nformat \"%s%n\"\nquant q forall count 0\nnode x role=reader : Node in q\n"
      "node made role=creator : Marker\n");
  auto e = plan_first(r, HostGraph());
  EXPECT_EQ(e.node_creations.size(), 1u);
  EXPECT_EQ(e.counts.at("q"), 0);
  EXPECT_EQ(render_output(r, e), "0\n");
}

TEST(PlanApplication, NestedCreatorsUseTheirOwnPlaceholders) {
  auto r = dsl::parse_rule(
      "rule r\nquant q forall\nnode n role=reader : Node in q\nnode tag role=creator : Tag in q\n"
      "edge tag -on-> n role=creator in q\n");
  auto g = chain(3);
  auto res = apply_rule(r, g);
  ASSERT_TRUE(res);
  int tags = 0;
  for (const auto& [id, n] : res->graph.nodes())
    if (n.has_type("Tag")) {
      ++tags;
      EXPECT_EQ(res->graph.out_edges(id).size(), 1u);
    }
  EXPECT_EQ(tags, 3);
}

TEST(ApplyEffect, DeletePrecedenceOverEdgeCreation) {
  HostGraph g;
  NodeId a = g.add_node({"N"}), b = g.add_node({"N"});
  Effect e;
  e.node_deletions.insert(a);
  e.edge_creations.insert({a, "x", b});
  e.attr_writes[{a, "k"}] = Value(1);
  auto h = apply_effect(g, e);
  EXPECT_FALSE(h.contains(a));
  EXPECT_EQ(h.edge_count(), 0u);
  EXPECT_TRUE(h.check_invariants());
}

TEST(ApplyEffect, SameTripleCreatedTwice) {
  auto r = dsl::parse_rule(
      "rule r\nquant q forall\nnode a role=reader : Node\nnode b role=reader : Node in q\nnode c role=reader : Node\n"
      "edge a -link-> c role=creator in q\n");
  HostGraph g;
  g.add_node({"Node"});
  g.add_node({"Node"});
  auto res = apply_rule(r, g);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->effect.edge_creations.size(), 1u);
  EXPECT_EQ(res->graph.edge_count(), 1u);
  Effect twice;
  twice.edge_creations.insert({NodeId{0}, "x", NodeId{1}});
  twice.edge_creations.insert({NodeId{0}, "x", NodeId{1}});
  EXPECT_EQ(apply_effect(g, twice).edge_count(), 1u);
}

TEST(ApplyEffect, DeleteN1LeavesEdgeNodesDangling) {
  auto gd = support::load_fixture("delete");
  auto res = apply_rule(gd.rules.at("deleteNodeN1"), gd.start);
  ASSERT_TRUE(res);
  NodeId n1 = support::node_named(gd.start, "n1");
  EXPECT_FALSE(res->graph.contains(n1));
  EXPECT_TRUE(res->graph.check_invariants());
  for (const auto& e : res->graph.edges()) EXPECT_TRUE(e.src != n1 && e.tgt != n1);
  for (const auto& [id, n] : gd.start.nodes())
    if (n.has_type("Edge")) {
      EXPECT_TRUE(res->graph.contains(id)) << n.name;
    }
  EXPECT_EQ(res->graph.node_count(), gd.start.node_count() - 1);
}

TEST(RenderOutput, HelloMessage) {
  auto r = support::fixture_rule("greetingmessage", "helloMessage");
  Effect e;
  e.param_values[0] = Value("Hello");
  e.param_values[1] = Value("TTC Participants");
  EXPECT_EQ(render_output(r, e), "The output is Hello TTC Participants \n");
}

TEST(RenderOutput, CountAndEscapes) {
  auto r = support::fixture_rule("counting", "countNodes");
  Effect e;
  e.param_values[0] = Value(4);
  EXPECT_EQ(render_output(r, e), "4\n");
  Rule pct;
  pct.print_format = "100%%";
  EXPECT_EQ(render_output(pct, Effect{}), "100%");
}

TEST(RenderOutput, FormatErrors) {
  Rule r;
  r.name = "r";
  r.print_format = "%s";
  EXPECT_THROW(render_output(r, Effect{}), FormatError);
  r.print_format = "%d";
  EXPECT_THROW(render_output(r, Effect{}), FormatError);
  r.print_format = "tail %";
  EXPECT_THROW(render_output(r, Effect{}), FormatError);
}

TEST(ApplyRule, TransitiveEdgeOnChain) {
  auto r = support::fixture_rule("transitive", "insertTransitiveEdges");
  auto g = chain(3);
  auto res = apply_rule(r, g);
  ASSERT_TRUE(res);
  ASSERT_EQ(res->graph.node_count(), g.node_count() + 1);
  NodeId fresh{static_cast<std::uint32_t>(g.node_count())};
  ASSERT_TRUE(res->graph.node(fresh).has_type("Edge"));
  EXPECT_EQ(res->graph.successors(fresh, "src"), std::vector<NodeId>{NodeId{1}});
  EXPECT_EQ(res->graph.successors(fresh, "trg"), std::vector<NodeId>{NodeId{3}});
}

TEST(ApplyRule, CountersLeaveTheGraphAlone) {
  auto gd = support::load_fixture("counting");
  for (const auto& [name, r] : gd.rules) {
    auto res = apply_rule(r, gd.start);
    ASSERT_TRUE(res) << name;
    EXPECT_EQ(dsl::serialize_graph(res->graph), dsl::serialize_graph(gd.start)) << name;
    EXPECT_FALSE(res->output.empty());
  }
}

TEST(ApplyRule, ReverseTwiceIsIsomorphic) {
  auto gd = support::load_fixture("reverse");
  const auto& r = gd.rules.at("reverse");
  auto once = apply_rule(r, gd.start);
  ASSERT_TRUE(once);
  EXPECT_FALSE(isomorphic(once->graph, gd.start));
  auto twice = apply_rule(r, once->graph);
  ASSERT_TRUE(twice);
  EXPECT_TRUE(isomorphic(twice->graph, gd.start));
}

TEST(ApplyRule, InapplicableRule) {
  EXPECT_FALSE(apply_rule(support::fixture_rule("delete", "deleteNodeN1"), HostGraph()));
}

TEST(ApplyRule, AttributeRenameAndErase) {
  auto gd = support::load_fixture("migration_gc");
  auto res = apply_rule(gd.rules.at("migrateToGraphComponent"), gd.start, gd.type_graphs);
  ASSERT_TRUE(res);
  NodeId n2 = support::node_named(gd.start, "n2");
  EXPECT_EQ(res->graph.attr(n2, "name"), nullptr);
  ASSERT_NE(res->graph.attr(n2, "text"), nullptr);
  EXPECT_EQ(*res->graph.attr(n2, "text"), Value("n2"));
}

TEST(ApplyRule, FlagChanges) {
  auto r = dsl::parse_rule(
      "rule r\nquant q forall\nnode n role=reader : Node in q\nflag n eraser todo\nflag n creator done\n");
  HostGraph g;
  NodeId a = g.add_node({"Node"}, {"todo"}), b = g.add_node({"Node"});
  auto res = apply_rule(r, g);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->graph.node(a).flags, std::set<std::string>{"done"});
  EXPECT_TRUE(res->graph.node(b).flags.empty());
}

// ---- Properties over random nodified graphs.

TEST(RewriterProperty, SpoSoundnessOnFuzz) {
  std::mt19937_64 rng(37);
  auto gd = support::load_fixture("delete");
  auto topo = support::load_fixture("migration_topology");
  std::vector<Rule> rules{gd.rules.at("deleteNodeN1"), gd.rules.at("deleteNodeN1WithEdges"),
                          topo.rules.at("migrateTopologyChange")};
  for (int round = 0; round < 200; ++round) {
    auto g = hello::random_nodified(rng);
    for (const auto& r : rules) {
      auto res = apply_rule(r, g);
      if (!res) continue;
      ASSERT_TRUE(res->graph.check_invariants());
      for (NodeId d : res->effect.node_deletions) {
        EXPECT_FALSE(res->graph.contains(d));
        for (const auto& e : res->graph.edges()) EXPECT_TRUE(e.src != d && e.tgt != d);
      }
    }
  }
}

TEST(RewriterProperty, ReverseMatchesSwapOracle) {
  std::mt19937_64 rng(41);
  auto r = support::fixture_rule("reverse", "reverse");
  for (int round = 0; round < 200; ++round) {
    auto g = hello::random_nodified(rng);
    auto res = apply_rule(r, g);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->graph, hello::swap_oracle(g)) << dsl::serialize_graph(g);
  }
}

TEST(RewriterProperty, ReaderOnlyRulesAreByteIdentical) {
  std::mt19937_64 rng(43);
  auto gd = support::load_fixture("counting");
  for (int round = 0; round < 100; ++round) {
    auto g = hello::random_nodified(rng);
    auto before = dsl::serialize_graph(g);
    for (const auto& [name, r] : gd.rules) EXPECT_EQ(dsl::serialize_graph(apply_rule(r, g)->graph), before);
  }
}

TEST(RewriterProperty, TransitiveFixpointEqualsClosure) {
  std::mt19937_64 rng(47);
  auto r = support::fixture_rule("transitive", "insertTransitiveEdges");
  hello::RandomGraphOptions opt;
  opt.max_nodes = 7;
  opt.max_edges = 8;
  for (int round = 0; round < 100; ++round) {
    auto g = hello::random_nodified(rng, opt);
    auto expected = hello::closure_oracle(hello::links(g));
    int steps = 0;
    while (auto res = apply_rule(r, g)) {
      g = std::move(res->graph);
      ASSERT_LT(++steps, 64);
    }
    EXPECT_EQ(hello::links(g), expected);
  }
}

TEST(RewriterProperty, Deterministic) {
  std::mt19937_64 rng(53);
  auto gd = support::load_fixture("migration_topology");
  const auto& r = gd.rules.at("migrateTopologyChange");
  for (int round = 0; round < 50; ++round) {
    auto g = hello::random_nodified(rng);
    auto a = apply_rule(r, g), b = apply_rule(r, g);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(a->graph, b->graph);
    EXPECT_EQ(a->output, b->output);
  }
}
