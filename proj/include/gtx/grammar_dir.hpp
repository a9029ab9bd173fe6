#pragma once

// A grammar directory holds type graphs (.gty), rules (.gpr) and host graphs
// (.gst), plus an optional `grammar.cfg` with `KEY = VALUE` lines:
//   start = FILE        start graph (default: the only .gst file, if any)
//   typegraph = FILE    enabled type graph, repeatable (default: every .gty)

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gtx/dsl.hpp"
#include "gtx/error.hpp"
#include "gtx/graph.hpp"
#include "gtx/rule.hpp"
#include "gtx/type_graph.hpp"

namespace gtx {

inline constexpr const char* kGrammarConfig = "grammar.cfg";

struct GrammarDir {
  std::filesystem::path path;
  std::vector<TypeGraph> type_graphs;
  std::map<std::string, Rule> rules;
  HostGraph start;
  std::string start_file;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + p.string());
}

struct LoadResult {
  std::optional<GrammarDir> grammar;
  /// Parse and validation problems. Non-empty means the grammar is invalid.
  std::vector<Violation> diagnostics;
};

namespace detail {

struct GrammarConfig {
  std::optional<std::string> start;
  std::vector<std::string> typegraphs;
};

inline GrammarConfig read_config(const std::filesystem::path& file, std::vector<Violation>& diags) {
  GrammarConfig cfg;
  std::string name = file.filename().string();
  std::istringstream in(read_file(file));
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = raw.find('=');
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    SourceSpan span{name, number, static_cast<int>(first) + 1, static_cast<int>(raw.size()) + 1};
    if (eq == std::string::npos) {
      diags.push_back({Violation::Kind::syntax, span, "expected KEY = VALUE"});
      continue;
    }
    std::string key = trim(raw.substr(0, eq)), value = trim(raw.substr(eq + 1));
    if (value.empty()) {
      diags.push_back({Violation::Kind::syntax, span, "missing value for '" + key + "'"});
    } else if (key == "start") {
      if (cfg.start) diags.push_back({Violation::Kind::syntax, span, "start given twice"});
      cfg.start = value;
    } else if (key == "typegraph") {
      cfg.typegraphs.push_back(value);
    } else {
      diags.push_back({Violation::Kind::syntax, span, "unknown key '" + key + "'"});
    }
  }
  return cfg;
}

inline std::vector<std::filesystem::path> files_with(const std::filesystem::path& dir,
                                                     const std::string& ext) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Loads and validates everything in `dir`. Throws IoError when a file
/// cannot be read (including a start graph or type graph named in the
/// config that does not exist); all other problems become diagnostics.
inline LoadResult load_grammar(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a grammar directory: " + dir.string());
  LoadResult res;
  auto& diags = res.diagnostics;
  GrammarDir gd;
  gd.path = dir;

  detail::GrammarConfig cfg;
  if (fs::exists(dir / kGrammarConfig)) cfg = detail::read_config(dir / kGrammarConfig, diags);

  auto parse_into_diags = [&](auto&& fn) {
    try {
      fn();
      return true;
    } catch (const ParseError& e) {
      diags.push_back({Violation::Kind::syntax, e.span(), e.message()});
      return false;
    }
  };

  std::vector<fs::path> tg_files;
  if (cfg.typegraphs.empty()) {
    tg_files = detail::files_with(dir, ".gty");
  } else {
    for (const auto& f : cfg.typegraphs) tg_files.push_back(dir / f);
  }
  for (const auto& f : tg_files) {
    std::string text = read_file(f);
    parse_into_diags([&] {
      gd.type_graphs.push_back(dsl::parse_type_graph(text, f.filename().string()));
      for (auto& v : validate_type_graph(gd.type_graphs.back())) diags.push_back(std::move(v));
    });
  }

  for (const auto& f : detail::files_with(dir, ".gpr")) {
    std::string text = read_file(f);
    parse_into_diags([&] {
      Rule r = dsl::parse_rule(text, f.filename().string());
      for (auto& v : validate_rule(r, gd.type_graphs)) diags.push_back(std::move(v));
      if (gd.rules.count(r.name))
        diags.push_back({Violation::Kind::syntax, r.span, "duplicate rule '" + r.name + "'"});
      else
        gd.rules.emplace(r.name, std::move(r));
    });
  }

  std::optional<fs::path> start;
  if (cfg.start) {
    start = dir / *cfg.start;
  } else {
    auto graphs = detail::files_with(dir, ".gst");
    if (graphs.size() == 1) start = graphs.front();
    else if (graphs.size() > 1)
      diags.push_back({Violation::Kind::syntax, {kGrammarConfig, 1, 1, 2},
                       "several .gst files and no 'start' entry in " + std::string(kGrammarConfig)});
  }
  if (start) {
    gd.start_file = start->filename().string();
    std::string text = read_file(*start);
    parse_into_diags([&] {
      std::map<std::string, SourceSpan> spans;
      gd.start = dsl::parse_graph(text, gd.start_file, &spans);
      for (auto v : conforms(gd.type_graphs, gd.start)) {
        v.span = {gd.start_file, 1, 1, 2};
        if (v.node) {
          const auto& name = gd.start.node(NodeId{*v.node}).name;
          if (auto it = spans.find(name); it != spans.end()) v.span = it->second;
        }
        diags.push_back(std::move(v));
      }
    });
  } else {
    gd.start = HostGraph("start");
  }

  sort_violations(diags);
  res.grammar = std::move(gd);
  return res;
}

}  // namespace gtx
