#pragma once

// Command-line front end. `run_cli` takes the arguments without the program
// name so it can be driven from tests with string streams.
//
// Exit codes: 0 success, 1 invalid grammar or rule failure, 2 usage or I/O
// error, 3 rule not applicable, 4 exploration truncated.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "gtx/dsl.hpp"
#include "gtx/explorer.hpp"
#include "gtx/grammar_dir.hpp"
#include "gtx/helloworld.hpp"
#include "gtx/matcher.hpp"
#include "gtx/rewriter.hpp"

namespace gtx {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,
  kExitUsage = 2,
  kExitNotApplicable = 3,
  kExitTruncated = 4,
};

namespace detail {

inline bool color_enabled() {
  const char* v = std::getenv("GTX_COLOR");
  return v && std::string(v) == "1";
}

inline void print_diagnostics(std::ostream& err, const std::vector<Violation>& diags) {
  bool color = color_enabled();
  for (const auto& d : diags) {
    if (color)
      err << "\033[1m" << format_span(d.span) << ":\033[0m \033[31m" << d.message << "\033[0m\n";
    else
      err << d << '\n';
  }
}

struct CliContext {
  std::ostream& out;
  std::ostream& err;
};

/// Loads a grammar for a command that needs a valid one. Returns the exit
/// code to stop with, or kExitOk with `gd` filled in.
inline int load_valid(CliContext& cx, const std::string& dir, GrammarDir& gd) {
  try {
    auto res = load_grammar(dir);
    if (!res.diagnostics.empty()) {
      print_diagnostics(cx.err, res.diagnostics);
      return kExitInvalid;
    }
    gd = std::move(*res.grammar);
    return kExitOk;
  } catch (const IoError& e) {
    cx.err << "gtx: " << e.what() << '\n';
    return kExitUsage;
  }
}

inline int cmd_validate(CliContext& cx, const std::string& dir) {
  try {
    auto res = load_grammar(dir);
    print_diagnostics(cx.err, res.diagnostics);
    return res.diagnostics.empty() ? kExitOk : kExitInvalid;
  } catch (const IoError& e) {
    cx.err << "gtx: " << e.what() << '\n';
    return kExitUsage;
  }
}

struct ApplyArgs {
  std::string dir;
  std::string rule;
  std::string graph;
  std::string out;
  bool all_matches = false;
};

inline int cmd_apply(CliContext& cx, const ApplyArgs& a, bool count_only) {
  GrammarDir gd;
  if (int rc = load_valid(cx, a.dir, gd)) return rc;
  auto it = gd.rules.find(a.rule);
  if (it == gd.rules.end()) {
    cx.err << "gtx: no rule named '" << a.rule << "' in " << a.dir << '\n';
    return kExitUsage;
  }
  const Rule& rule = it->second;
  if (count_only && !rule.reader_only()) {
    cx.err << "gtx: rule '" << a.rule << "' modifies the graph; count needs a reader-only rule\n";
    return kExitUsage;
  }

  HostGraph host = gd.start;
  if (!a.graph.empty()) {
    std::filesystem::path p = a.graph;
    try {
      std::string file = p.filename().string();
      host = dsl::parse_graph(read_file(p), file);
    } catch (const IoError& e) {
      cx.err << "gtx: " << e.what() << '\n';
      return kExitUsage;
    } catch (const ParseError& e) {
      print_diagnostics(cx.err, {{Violation::Kind::syntax, e.span(), e.message()}});
      return kExitInvalid;
    }
  }

  std::string output;
  try {
    auto initial = find_root_matches(rule, host, gd.type_graphs);
    if (initial.empty()) {
      cx.err << "gtx: rule '" << a.rule << "' is not applicable\n";
      return kExitNotApplicable;
    }
    if (!a.all_matches) initial.resize(1);
    for (const auto& m : initial) {
      auto current = find_root_matches(rule, host, gd.type_graphs);
      auto hit = std::find_if(current.begin(), current.end(),
                              [&](const Match& c) { return c.assignment == m.assignment; });
      if (hit == current.end()) continue;
      auto res = apply_match(rule, host, *hit, gd.type_graphs);
      output += res.output;
      host = std::move(res.graph);
    }
  } catch (const FormatError& e) {
    cx.err << "gtx: " << e.what() << '\n';
    return kExitInvalid;
  }

  cx.out << output;
  if (count_only) return kExitOk;
  std::string text = dsl::serialize_graph(host);
  if (!a.out.empty()) {
    try {
      write_file(a.out, text);
    } catch (const IoError& e) {
      cx.err << "gtx: " << e.what() << '\n';
      return kExitUsage;
    }
  } else {
    cx.out << "---\n" << text;
  }
  return kExitOk;
}

inline int cmd_explore(CliContext& cx, const std::string& dir, ExploreLimits limits) {
  GrammarDir gd;
  if (int rc = load_valid(cx, dir, gd)) return rc;
  std::vector<Rule> rules;
  for (const auto& [name, r] : gd.rules) rules.push_back(r);
  Lts lts = explore(rules, gd.start, limits, gd.type_graphs);
  write_lts(cx.out, lts);
  if (lts.truncated) {
    cx.err << "gtx: exploration truncated after " << lts.states.size() << " states\n";
    return kExitTruncated;
  }
  return kExitOk;
}

inline int cmd_suite(CliContext& cx, const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) {
    cx.err << "gtx: not a fixture directory: " << dir << '\n';
    return kExitUsage;
  }
  auto reports = hello::run_suite(dir);
  return hello::print_report(cx.out, reports) ? kExitOk : kExitInvalid;
}

}  // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  detail::CliContext cx{out, err};
  CLI::App app{"gtx: graph transformation with nested quantification", "gtx"};
  app.require_subcommand(1);

  std::string dir;
  auto* validate = app.add_subcommand("validate", "Parse and check every file of a grammar directory");
  validate->add_option("dir", dir, "Grammar directory")->required();

  detail::ApplyArgs apply_args;
  auto add_apply_options = [&](CLI::App* sub, bool with_out) {
    sub->add_option("dir", apply_args.dir, "Grammar directory")->required();
    sub->add_option("rule", apply_args.rule, "Rule name")->required();
    sub->add_option("--graph", apply_args.graph, "Host graph file instead of the start graph");
    sub->add_flag("--all-matches", apply_args.all_matches, "Apply at every initial root match still present");
    if (with_out) sub->add_option("--out", apply_args.out, "Write the resulting graph to FILE");
  };
  auto* apply = app.add_subcommand("apply", "Apply a rule once and print its output and the result graph");
  add_apply_options(apply, true);
  auto* count = app.add_subcommand("count", "Apply a reader-only rule and print only its output");
  add_apply_options(count, false);

  ExploreLimits limits;
  auto* explore_cmd = app.add_subcommand("explore", "Explore the state space from the start graph");
  explore_cmd->add_option("dir", dir, "Grammar directory")->required();
  explore_cmd->add_option("--max-states", limits.max_states, "State limit")->check(CLI::PositiveNumber);
  explore_cmd->add_option("--max-depth", limits.max_depth, "Depth limit")->check(CLI::PositiveNumber);

  std::string suite_dir = hello::kDefaultFixtureDir.string();
  auto* suite = app.add_subcommand("suite", "Run the Hello World fixture suite");
  suite->add_option("dir", suite_dir, "Fixture root directory");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*validate) return detail::cmd_validate(cx, dir);
  if (*apply) return detail::cmd_apply(cx, apply_args, false);
  if (*count) return detail::cmd_apply(cx, apply_args, true);
  if (*explore_cmd) return detail::cmd_explore(cx, dir, limits);
  if (*suite) return detail::cmd_suite(cx, suite_dir);
  return kExitUsage;
}

}  // namespace gtx
