#pragma once

// The Hello World case tasks as executable fixtures, each checked by an
// independent oracle that inspects graphs directly rather than through the
// matcher.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gtx/dsl.hpp"
#include "gtx/grammar_dir.hpp"
#include "gtx/graph.hpp"
#include "gtx/rewriter.hpp"
#include "gtx/type_graph.hpp"

namespace gtx::hello {

#ifdef GTX_FIXTURE_DIR
inline const std::filesystem::path kDefaultFixtureDir = GTX_FIXTURE_DIR;
#else
inline const std::filesystem::path kDefaultFixtureDir = "fixtures/helloworld";
#endif

// ---------------------------------------------------------------------------
// Nodified-graph oracle
// ---------------------------------------------------------------------------

struct Counts {
  std::int64_t nodes = 0;
  std::int64_t loops = 0;
  std::int64_t isolated = 0;
  std::int64_t cycles3 = 0;
  std::int64_t dangling = 0;
  bool operator==(const Counts&) const = default;
};

/// src/trg targets of an Edge-typed node, read straight from the edge set.
struct EdgeEnds {
  std::optional<NodeId> src;
  std::optional<NodeId> trg;
};

/// Throws when an Edge node has two src or two trg edges: such a graph is not
/// a valid nodified encoding.
inline std::map<NodeId, EdgeEnds> edge_ends(const HostGraph& g) {
  std::map<NodeId, EdgeEnds> out;
  for (const auto& [id, node] : g.nodes())
    if (node.has_type("Edge")) out[id];
  for (const auto& e : g.edges()) {
    auto it = out.find(e.src);
    if (it == out.end()) continue;
    auto* slot = e.label == "src" ? &it->second.src : e.label == "trg" ? &it->second.trg : nullptr;
    if (!slot) continue;
    if (*slot) throw Error("malformed nodified graph: Edge node has two '" + e.label + "' edges");
    *slot = e.tgt;
  }
  return out;
}

/// Pairs (a, b) of nodes joined by some Edge node with src a and trg b.
inline std::set<std::pair<NodeId, NodeId>> links(const HostGraph& g) {
  std::set<std::pair<NodeId, NodeId>> out;
  for (const auto& [e, ends] : edge_ends(g))
    if (ends.src && ends.trg) out.insert({*ends.src, *ends.trg});
  return out;
}

/// Brute-force reference for the five counting tasks.
inline Counts oracle_counts(const HostGraph& g) {
  Counts c;
  auto ends = edge_ends(g);
  std::vector<NodeId> nodes;
  for (const auto& [id, node] : g.nodes())
    if (node.has_type("Node")) nodes.push_back(id);
  c.nodes = static_cast<std::int64_t>(nodes.size());
  for (const auto& [e, end] : ends) {
    if (end.src && end.trg && *end.src == *end.trg) ++c.loops;
    if (!end.src || !end.trg) ++c.dangling;
  }
  for (NodeId n : nodes) {
    bool incoming = false;
    for (const auto& e : g.edges())
      if (e.tgt == n && (e.label == "src" || e.label == "trg")) incoming = true;
    if (!incoming) ++c.isolated;
  }
  auto linked = [&](NodeId a, NodeId b) {
    for (const auto& [e, end] : ends)
      if (end.src == a && end.trg == b) return true;
    return false;
  };
  for (NodeId a : nodes)
    for (NodeId b : nodes)
      for (NodeId d : nodes)
        if (a != b && b != d && a != d && linked(a, b) && linked(b, d) && linked(d, a)) ++c.cycles3;
  return c;
}

/// Expected result of reversing: src and trg swapped on every Edge node.
inline HostGraph swap_oracle(const HostGraph& g) {
  HostGraph out = g;
  for (const auto& e : g.edges())
    if ((e.label == "src" || e.label == "trg") && g.node(e.src).has_type("Edge")) out.remove_edge(e);
  for (const auto& e : g.edges())
    if ((e.label == "src" || e.label == "trg") && g.node(e.src).has_type("Edge"))
      out.add_edge(e.src, e.label == "src" ? "trg" : "src", e.tgt);
  return out;
}

/// Transitive closure of a relation by repeated reachability search.
inline std::set<std::pair<NodeId, NodeId>> closure_oracle(const std::set<std::pair<NodeId, NodeId>>& rel) {
  std::map<NodeId, std::vector<NodeId>> succ;
  for (const auto& [a, b] : rel) succ[a].push_back(b);
  std::set<std::pair<NodeId, NodeId>> out;
  for (const auto& [start, first] : succ) {
    std::set<NodeId> seen;
    std::vector<NodeId> stack(first.begin(), first.end());
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      if (!seen.insert(n).second) continue;
      out.insert({start, n});
      if (auto it = succ.find(n); it != succ.end())
        for (NodeId m : it->second) stack.push_back(m);
    }
  }
  return out;
}

/// Pairs reachable in exactly two steps that are not already related.
inline std::set<std::pair<NodeId, NodeId>> two_step_gaps(const std::set<std::pair<NodeId, NodeId>>& rel) {
  std::set<std::pair<NodeId, NodeId>> out;
  for (const auto& [a, b] : rel)
    for (const auto& [c, d] : rel)
      if (b == c && !rel.count({a, d})) out.insert({a, d});
  return out;
}

struct RandomGraphOptions {
  int max_nodes = 8;
  int max_edges = 12;
  /// Chance that an Edge node has its src (resp. trg) edge.
  double end_probability = 0.85;
  bool graph_root = true;
};

/// Random well-formed nodified graph: Node and Edge nodes, each Edge with at
/// most one src and one trg, optionally owned by a Graph node.
inline HostGraph random_nodified(std::mt19937_64& rng, const RandomGraphOptions& opt = {}) {
  HostGraph g("random");
  std::uniform_int_distribution<int> n_nodes(0, opt.max_nodes), n_edges(0, opt.max_edges);
  std::bernoulli_distribution has_end(opt.end_probability);
  std::optional<NodeId> root;
  if (opt.graph_root) {
    root = g.add_node({"Graph"});
    g.set_node_name(*root, "g");
  }
  std::vector<NodeId> nodes;
  int k = n_nodes(rng);
  for (int i = 0; i < k; ++i) {
    NodeId n = g.add_node({"Node"});
    std::string name = "n" + std::to_string(i + 1);
    g.set_node_name(n, name);
    g.set_attr(n, "name", Value(name));
    if (root) g.add_edge(*root, "nodes", n);
    nodes.push_back(n);
  }
  int m = nodes.empty() ? 0 : n_edges(rng);
  std::uniform_int_distribution<std::size_t> pick(0, nodes.empty() ? 0 : nodes.size() - 1);
  for (int i = 0; i < m; ++i) {
    NodeId e = g.add_node({"Edge"});
    g.set_node_name(e, "e" + std::to_string(i + 1));
    if (root) g.add_edge(*root, "edges", e);
    if (has_end(rng)) g.add_edge(e, "src", nodes[pick(rng)]);
    if (has_end(rng)) g.add_edge(e, "trg", nodes[pick(rng)]);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

struct FixtureRun {
  const GrammarDir& grammar;
  const HostGraph& before;
  const ApplicationResult& result;
};

struct Fixture {
  std::string name;
  std::string grammar;  // subdirectory of the fixture root
  std::string rule;
  /// Expected printed output, computed from the host graph; empty function
  /// means the fixture does not check output.
  std::function<std::string(const HostGraph&)> expected_output;
  /// Returns a description of every failed check.
  std::function<std::vector<std::string>(const FixtureRun&)> check;
  /// Oracle count for counting fixtures (compared on random graphs too).
  std::function<std::int64_t(const Counts&)> count;
};

namespace detail {

inline std::vector<std::string> unchanged(const FixtureRun& run) {
  if (dsl::serialize_graph(run.result.graph) != dsl::serialize_graph(run.before))
    return {"reader-only rule changed the graph"};
  return {};
}

inline std::vector<std::string> conforms_to(const FixtureRun& run, const std::string& tg_name) {
  std::vector<std::string> out;
  for (const auto& tg : run.grammar.type_graphs) {
    if (tg.name() != tg_name) continue;
    for (const auto& v : conforms(tg, run.result.graph)) out.push_back("conformance: " + v.message);
    return out;
  }
  return {"type graph '" + tg_name + "' not loaded"};
}

inline std::optional<NodeId> named(const HostGraph& g, const std::string& attr, const Value& v) {
  for (const auto& [id, node] : g.nodes())
    if (const auto* a = node.attr(attr); a && *a == v) return id;
  return std::nullopt;
}

inline std::string graph_diff(const HostGraph& expected, const HostGraph& actual) {
  std::string out;
  for (const auto& e : expected.edges())
    if (!actual.edges().count(e))
      out += " missing " + std::to_string(e.src.value) + " -" + e.label + "-> " + std::to_string(e.tgt.value) + ";";
  for (const auto& e : actual.edges())
    if (!expected.edges().count(e))
      out += " unexpected " + std::to_string(e.src.value) + " -" + e.label + "-> " + std::to_string(e.tgt.value) + ";";
  if (expected.node_count() != actual.node_count())
    out += " node count " + std::to_string(actual.node_count()) + " != " + std::to_string(expected.node_count()) + ";";
  return out;
}

inline Fixture counting(std::string name, std::string rule, std::int64_t Counts::*field) {
  Fixture f;
  f.name = std::move(name);
  f.grammar = "counting";
  f.rule = std::move(rule);
  f.count = [field](const Counts& c) { return c.*field; };
  f.expected_output = [field](const HostGraph& g) {
    return std::to_string(oracle_counts(g).*field) + "\n";
  };
  f.check = unchanged;
  return f;
}

}  // namespace detail

inline std::vector<Fixture> fixtures() {
  std::vector<Fixture> out;

  {
    Fixture f{"makeGreeting", "greeting", "makeGreeting", {}, {}, {}};
    f.expected_output = [](const HostGraph&) { return std::string("Hello World\n"); };
    f.check = [](const FixtureRun& run) {
      std::vector<std::string> errs = detail::conforms_to(run, "Greeting");
      const auto& g = run.result.graph;
      int greetings = 0;
      for (const auto& [id, node] : g.nodes())
        if (node.has_type("Greeting")) {
          ++greetings;
          const auto* text = node.attr("text");
          if (!text || *text != Value("Hello World")) errs.push_back("greeting text is not \"Hello World\"");
        }
      if (greetings != 1 || g.node_count() != run.before.node_count() + 1)
        errs.push_back("expected exactly one new Greeting node");
      return errs;
    };
    out.push_back(std::move(f));
  }
  {
    Fixture f{"helloMessage", "greetingmessage", "helloMessage", {}, {}, {}};
    f.expected_output = [](const HostGraph&) {
      return std::string("The output is Hello TTC Participants \n");
    };
    f.check = [](const FixtureRun& run) {
      auto errs = detail::conforms_to(run, "GreetingMessage");
      const auto& g = run.result.graph;
      auto msg = detail::named(g, "text", Value("Hello"));
      auto person = detail::named(g, "name", Value("TTC Participants"));
      if (!msg || !g.node(*msg).has_type("GreetingMessage")) errs.push_back("no GreetingMessage with text \"Hello\"");
      if (!person || !g.node(*person).has_type("Person")) errs.push_back("no Person named \"TTC Participants\"");
      bool linked = false;
      for (const auto& [id, node] : g.nodes())
        if (node.has_type("Greeting") && msg && person && g.has_edge(id, "greetingMessage", *msg) &&
            g.has_edge(id, "person", *person))
          linked = true;
      if (!linked) errs.push_back("Greeting is not linked to its message and person");
      return errs;
    };
    out.push_back(std::move(f));
  }
  out.push_back(detail::counting("countNodes", "countNodes", &Counts::nodes));
  out.push_back(detail::counting("countLoopingEdges", "countLoopingEdges", &Counts::loops));
  out.push_back(detail::counting("countIsolatedNodes", "countIsolatedNodes", &Counts::isolated));
  out.push_back(detail::counting("countCyclesOfThree", "countCyclesOfThree", &Counts::cycles3));
  out.push_back(detail::counting("countDanglingEdges", "countDanglingEdges", &Counts::dangling));
  {
    Fixture f{"reverseEdges", "reverse", "reverse", {}, {}, {}};
    f.check = [](const FixtureRun& run) -> std::vector<std::string> {
      HostGraph expected = swap_oracle(run.before);
      if (run.result.graph == expected) return {};
      return {"result differs from the swapped graph:" + detail::graph_diff(expected, run.result.graph)};
    };
    out.push_back(std::move(f));
  }
  {
    Fixture f{"migrateToGraphComponent", "migration_gc", "migrateToGraphComponent", {}, {}, {}};
    f.check = [](const FixtureRun& run) {
      auto errs = detail::conforms_to(run, "GraphComponent");
      const auto& before = run.before;
      const auto& after = run.result.graph;
      for (const auto& e : before.edges())
        if (e.label == "nodes" || e.label == "edges") {
          if (after.has_edge(e.src, e.label, e.tgt)) errs.push_back("'" + e.label + "' edge survived");
          if (!after.has_edge(e.src, "gcs", e.tgt)) errs.push_back("'" + e.label + "' edge not relabelled to gcs");
        }
      for (const auto& [id, node] : before.nodes()) {
        const auto& now = after.node(id);
        if (node.has_type("Node")) {
          if (now.attr("name")) errs.push_back("Node '" + node.name + "' still has a name attribute");
          const auto* old = node.attr("name");
          const auto* text = now.attr("text");
          if (!old || !text || *old != *text) errs.push_back("Node '" + node.name + "' text differs from former name");
        }
        if (node.has_type("Edge")) {
          const auto* text = now.attr("text");
          if (!text || *text != Value("")) errs.push_back("Edge '" + node.name + "' lacks empty text");
        }
      }
      if (after.node_count() != before.node_count()) errs.push_back("node count changed");
      return errs;
    };
    out.push_back(std::move(f));
  }
  {
    Fixture f{"migrateTopologyChange", "migration_topology", "migrateTopologyChange", {}, {}, {}};
    f.check = [](const FixtureRun& run) {
      auto errs = detail::conforms_to(run, "GraphNoEdge");
      const auto& after = run.result.graph;
      for (const auto& [id, node] : after.nodes())
        if (node.has_type("Edge")) errs.push_back("Edge node '" + node.name + "' survived");
      std::set<std::pair<NodeId, NodeId>> got;
      for (const auto& e : after.edges())
        if (e.label == "linksTo") got.insert({e.src, e.tgt});
      auto want = links(run.before);
      if (got != want) errs.push_back("linksTo edges differ from the nodified relation");
      std::size_t edge_nodes_with_both = 0;
      for (const auto& [e, ends] : edge_ends(run.before))
        if (ends.src && ends.trg) ++edge_nodes_with_both;
      if (edge_nodes_with_both == want.size())
        errs.push_back("fixture host has no parallel nodified edges to collapse");
      return errs;
    };
    out.push_back(std::move(f));
  }
  {
    Fixture f{"deleteNodeN1", "delete", "deleteNodeN1", {}, {}, {}};
    f.check = [](const FixtureRun& run) {
      std::vector<std::string> errs;
      const auto& before = run.before;
      const auto& after = run.result.graph;
      auto n1 = detail::named(before, "name", Value("n1"));
      if (!n1) return std::vector<std::string>{"fixture host has no node named n1"};
      if (detail::named(after, "name", Value("n1"))) errs.push_back("a node named n1 remains");
      if (!after.check_invariants()) errs.push_back("dangling edge references");
      for (const auto& e : before.edges()) {
        bool incident = e.src == *n1 || e.tgt == *n1;
        if (incident == (after.edges().count(e) > 0)) errs.push_back("edge set is not exactly the non-incident edges");
      }
      for (const auto& [id, node] : before.nodes())
        if (id != *n1 && !after.contains(id)) errs.push_back("node '" + node.name + "' was removed");
      return errs;
    };
    out.push_back(std::move(f));
  }
  {
    Fixture f{"deleteNodeN1WithEdges", "delete", "deleteNodeN1WithEdges", {}, {}, {}};
    f.check = [](const FixtureRun& run) {
      std::vector<std::string> errs;
      const auto& before = run.before;
      const auto& after = run.result.graph;
      auto n1 = detail::named(before, "name", Value("n1"));
      if (!n1) return std::vector<std::string>{"fixture host has no node named n1"};
      std::set<NodeId> doomed{*n1};
      for (const auto& [e, ends] : edge_ends(before))
        if (ends.src == *n1 || ends.trg == *n1) doomed.insert(e);
      for (const auto& [id, node] : before.nodes())
        if (doomed.count(id) == after.contains(id)) errs.push_back("node '" + node.name + "' wrongly kept or removed");
      if (!after.check_invariants()) errs.push_back("dangling edge references");
      for (const auto& e : before.edges()) {
        bool gone = doomed.count(e.src) || doomed.count(e.tgt);
        if (gone == (after.edges().count(e) > 0)) errs.push_back("edge set is not exactly the surviving edges");
      }
      return errs;
    };
    out.push_back(std::move(f));
  }
  {
    Fixture f{"insertTransitiveEdges", "transitive", "insertTransitiveEdges", {}, {}, {}};
    f.check = [](const FixtureRun& run) {
      std::vector<std::string> errs;
      auto before = links(run.before);
      auto gaps = two_step_gaps(before);
      auto after = links(run.result.graph);
      auto expected = before;
      expected.insert(gaps.begin(), gaps.end());
      if (after != expected) errs.push_back("relation after one application is not old + two-step gaps");
      std::size_t created = run.result.graph.node_count() - run.before.node_count();
      if (created != gaps.size()) errs.push_back("created " + std::to_string(created) + " Edge nodes, expected " + std::to_string(gaps.size()));
      if (gaps.empty()) errs.push_back("fixture host has no two-step gaps");
      return errs;
    };
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suite runner
// ---------------------------------------------------------------------------

struct FixtureReport {
  std::string name;
  bool passed = false;
  int applications = 0;
  std::vector<std::string> failures;
};

struct SuiteOptions {
  int random_graphs = 200;
  std::uint64_t seed = 20131;
};

/// Counting rule's reported number on `g`, read from the first parameter.
inline std::int64_t engine_count(const Rule& r, const HostGraph& g, std::span<const TypeGraph> tgs = {}) {
  auto res = apply_rule(r, g, tgs);
  if (!res) throw Error("rule '" + r.name + "' is not applicable");
  return res->effect.param_values.at(0).as_int();
}

inline FixtureReport run_fixture(const Fixture& f, const std::filesystem::path& root,
                                 const SuiteOptions& opt = {}) {
  FixtureReport rep;
  rep.name = f.name;
  auto fail = [&](std::string why) { rep.failures.push_back(std::move(why)); };
  try {
    LoadResult loaded = load_grammar(root / f.grammar);
    for (const auto& d : loaded.diagnostics) {
      std::ostringstream os;
      os << d;
      fail("grammar: " + os.str());
    }
    if (!loaded.grammar) return rep;
    const GrammarDir& gd = *loaded.grammar;
    auto it = gd.rules.find(f.rule);
    if (it == gd.rules.end()) {
      fail("rule '" + f.rule + "' not found");
      return rep;
    }
    const Rule& rule = it->second;
    auto result = apply_rule(rule, gd.start, gd.type_graphs);
    ++rep.applications;
    if (!result) {
      fail("rule is not applicable to the start graph");
      return rep;
    }
    if (f.expected_output) {
      std::string want = f.expected_output(gd.start);
      if (result->output != want)
        fail("output " + quote_string(result->output) + " != expected " + quote_string(want));
    }
    if (!result->graph.check_invariants()) fail("result graph has dangling edges");
    if (f.check)
      for (auto& e : f.check(FixtureRun{gd, gd.start, *result})) fail(std::move(e));
    if (f.count) {
      std::mt19937_64 rng(opt.seed);
      for (int i = 0; i < opt.random_graphs; ++i) {
        HostGraph g = random_nodified(rng);
        auto want = f.count(oracle_counts(g));
        auto got = engine_count(rule, g, gd.type_graphs);
        if (got != want) {
          fail("random graph " + std::to_string(i) + ": engine " + std::to_string(got) + " != oracle " +
               std::to_string(want));
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    fail(std::string("error: ") + e.what());
  }
  rep.passed = rep.failures.empty();
  return rep;
}

inline std::vector<FixtureReport> run_suite(const std::filesystem::path& root = kDefaultFixtureDir,
                                            const SuiteOptions& opt = {}) {
  std::vector<FixtureReport> out;
  for (const auto& f : fixtures()) out.push_back(run_fixture(f, root, opt));
  return out;
}

inline bool print_report(std::ostream& os, const std::vector<FixtureReport>& reports) {
  std::size_t passed = 0;
  for (const auto& r : reports) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << '\n';
    for (const auto& f : r.failures) os << "     " << f << '\n';
    passed += r.passed;
  }
  os << passed << '/' << reports.size() << " fixtures passed\n";
  return passed == reports.size();
}

}  // namespace gtx::hello
