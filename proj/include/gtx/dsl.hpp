#pragma once

// Line-oriented text formats for host graphs (.gst), type graphs (.gty) and
// rules (.gpr). One declaration per line, `#` starts a comment, tokens are
// separated by whitespace; `:` and `,` are always tokens of their own.

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gtx/error.hpp"
#include "gtx/graph.hpp"
#include "gtx/rule.hpp"
#include "gtx/type_graph.hpp"
#include "gtx/value.hpp"

namespace gtx::dsl {

struct Token {
  std::string text;
  int col_begin = 0;  // 1-based
  int col_end = 0;    // one past the end
  bool quoted = false;
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
};

class Source {
 public:
  Source(std::string_view text, std::string file) : file_(std::move(file)) {
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      ++number;
      auto raw = text.substr(pos, end - pos);
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      Line line{number, tokenize(raw, number)};
      if (!line.tokens.empty()) lines_.push_back(std::move(line));
      pos = end + 1;
    }
  }

  const std::vector<Line>& lines() const { return lines_; }
  const std::string& file() const { return file_; }

  SourceSpan span(const Line& line, const Token& tok) const {
    return {file_, line.number, tok.col_begin, tok.col_end};
  }
  SourceSpan span(const Line& line, const Token& tok, std::size_t offset, std::size_t len) const {
    int b = tok.col_begin + static_cast<int>(offset);
    return {file_, line.number, b, b + static_cast<int>(std::max<std::size_t>(len, 1))};
  }

  [[noreturn]] void fail(const Line& line, const Token& tok, const std::string& msg) const {
    throw ParseError(span(line, tok), msg);
  }
  /// Error positioned just past the last token of the line.
  [[noreturn]] void fail_end(const Line& line, const std::string& msg) const {
    const auto& last = line.tokens.back();
    throw ParseError({file_, line.number, last.col_end, last.col_end + 1}, msg);
  }

 private:
  std::vector<Token> tokenize(std::string_view raw, int number) const {
    std::vector<Token> out;
    std::size_t i = 0;
    auto col = [](std::size_t idx) { return static_cast<int>(idx) + 1; };
    while (i < raw.size()) {
      char c = raw[i];
      if (c == ' ' || c == '\t') {
        ++i;
        continue;
      }
      if (c == '#') break;
      if (c == ':' || c == ',') {
        out.push_back({std::string(1, c), col(i), col(i + 1), false});
        ++i;
        continue;
      }
      if (c == '"') {
        std::size_t start = i++;
        std::string value;
        bool closed = false;
        while (i < raw.size()) {
          char d = raw[i];
          if (d == '"') {
            closed = true;
            ++i;
            break;
          }
          if (d == '\\') {
            if (i + 1 >= raw.size()) break;
            char e = raw[i + 1];
            if (e == '"' || e == '\\') value += e;
            else if (e == 'n') value += '\n';
            else
              throw ParseError({file_, number, col(i), col(i + 2)},
                               std::string("unknown escape '\\") + e + "'");
            i += 2;
            continue;
          }
          value += d;
          ++i;
        }
        if (!closed)
          throw ParseError({file_, number, col(start), col(raw.size())}, "unterminated string");
        out.push_back({std::move(value), col(start), col(i), true});
        continue;
      }
      std::size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != ':' &&
             raw[i] != ',' && raw[i] != '"' && raw[i] != '#')
        ++i;
      out.push_back({std::string(raw.substr(start, i - start)), col(start), col(i), false});
    }
    return out;
  }

  std::string file_;
  std::vector<Line> lines_;
};

namespace detail {

inline const std::string& name_token(const Source& src, const Line& line, const Token& tok,
                                     std::string_view what) {
  if (tok.quoted || !is_valid_name(tok.text))
    src.fail(line, tok, "invalid " + std::string(what) + " '" + tok.text + "'");
  return tok.text;
}

inline const Token& at(const Source& src, const Line& line, std::size_t i, std::string_view what) {
  if (i >= line.tokens.size()) src.fail_end(line, "expected " + std::string(what));
  return line.tokens[i];
}

inline void expect_word(const Source& src, const Line& line, std::size_t i, std::string_view word) {
  const auto& tok = at(src, line, i, "'" + std::string(word) + "'");
  if (tok.quoted || tok.text != word)
    src.fail(line, tok, "expected '" + std::string(word) + "', found '" + tok.text + "'");
}

inline void expect_end(const Source& src, const Line& line, std::size_t i) {
  if (i < line.tokens.size()) src.fail(line, line.tokens[i], "unexpected '" + line.tokens[i].text + "'");
}

/// `ID.NAME` split at the first dot.
inline std::pair<std::string, std::string> dotted(const Source& src, const Line& line,
                                                  const Token& tok) {
  auto dot = tok.text.find('.');
  if (tok.quoted || dot == std::string::npos)
    src.fail(line, tok, "expected ID.NAME, found '" + tok.text + "'");
  std::string head = tok.text.substr(0, dot), tail = tok.text.substr(dot + 1);
  if (!is_valid_name(head))
    src.fail(line, tok, "invalid identifier '" + head + "'");
  if (!is_valid_name(tail))
    throw ParseError(src.span(line, tok, dot + 1, tail.size()), "invalid attribute name '" + tail + "'");
  return {head, tail};
}

inline Value value_token(const Source& src, const Line& line, const Token& tok) {
  if (tok.quoted) return Value(tok.text);
  const auto& t = tok.text;
  if (t == "true") return Value(true);
  if (t == "false") return Value(false);
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (t.find('.') != std::string::npos) {
    double d = 0;
    auto res = std::from_chars(first, last, d);
    if (res.ec != std::errc() || res.ptr != last)
      src.fail(line, tok, "invalid real literal '" + t + "'");
    return Value(d);
  }
  std::int64_t i = 0;
  auto res = std::from_chars(first, last, i);
  if (res.ec == std::errc::result_out_of_range)
    src.fail(line, tok, "integer literal out of range '" + t + "'");
  if (res.ec != std::errc() || res.ptr != last) src.fail(line, tok, "invalid value '" + t + "'");
  return Value(i);
}

/// Comma-separated name list starting at token `i`; returns index after it.
inline std::size_t name_list(const Source& src, const Line& line, std::size_t i,
                             std::string_view what, std::vector<std::string>& out) {
  out.push_back(name_token(src, line, at(src, line, i, what), what));
  ++i;
  while (i < line.tokens.size() && !line.tokens[i].quoted && line.tokens[i].text == ",") {
    out.push_back(name_token(src, line, at(src, line, i + 1, what), what));
    i += 2;
  }
  return i;
}

/// `-LABEL->` or `~REGEX~>`; returns the inner text or nullopt.
inline std::optional<std::string> arrow_body(const Token& tok, char open) {
  const auto& t = tok.text;
  if (tok.quoted || t.size() < 4 || t.front() != open || t.compare(t.size() - 2, 2, std::string{open, '>'}) != 0)
    return std::nullopt;
  return t.substr(1, t.size() - 3);
}

inline std::string header(const Source& src, std::string_view keyword) {
  if (src.lines().empty())
    throw ParseError({src.file(), 1, 1, 2}, "missing '" + std::string(keyword) + " NAME' header");
  const auto& line = src.lines().front();
  expect_word(src, line, 0, keyword);
  const auto& name = name_token(src, line, at(src, line, 1, "a name"), "name");
  expect_end(src, line, 2);
  return name;
}

}  // namespace detail

/// Splits on `.`; an atom with a leading `-` is traversed against the edge
/// direction. `span` locates the expression for error reporting.
inline RegexPath parse_regex(std::string_view text, const SourceSpan& span = {}) {
  RegexPath out;
  auto fail = [&](std::size_t offset, std::size_t len, const std::string& msg) {
    SourceSpan s = span;
    if (s.known()) {
      s.col_begin += static_cast<int>(offset);
      s.col_end = s.col_begin + static_cast<int>(std::max<std::size_t>(len, 1));
    }
    throw ParseError(s, msg);
  };
  if (text.empty()) fail(0, 1, "empty path expression");
  std::size_t pos = 0;
  while (true) {
    auto dot = text.find('.', pos);
    auto atom = text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    RegexAtom a;
    std::size_t off = pos;
    if (!atom.empty() && atom.front() == '-') {
      a.inverse = true;
      atom.remove_prefix(1);
      ++off;
    }
    if (atom.empty()) fail(off, 1, "empty atom in path expression '" + std::string(text) + "'");
    if (!is_valid_name(atom)) fail(off, atom.size(), "invalid label '" + std::string(atom) + "' in path expression");
    a.label = std::string(atom);
    out.atoms.push_back(std::move(a));
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return out;
}

/// `node_spans`, when given, receives the declaration position of each node.
inline HostGraph parse_graph(std::string_view text, const std::string& file = "",
                             std::map<std::string, SourceSpan>* node_spans = nullptr) {
  using namespace detail;
  Source src(text, file);
  HostGraph g(header(src, "graph"));

  std::map<std::string, NodeId> ids;
  const auto& lines = src.lines();
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto& kw = line.tokens[0];
    if (kw.quoted) src.fail(line, kw, "expected a keyword");
    if (kw.text == "node") {
      const auto& id_tok = at(src, line, 1, "a node id");
      const auto& id = name_token(src, line, id_tok, "node id");
      if (ids.count(id)) src.fail(line, id_tok, "duplicate node '" + id + "'");
      std::vector<std::string> types, flags;
      std::size_t i = 2;
      if (i < line.tokens.size() && line.tokens[i].text == ":" && !line.tokens[i].quoted)
        i = name_list(src, line, i + 1, "type", types);
      while (i < line.tokens.size()) {
        expect_word(src, line, i, "flag");
        flags.push_back(name_token(src, line, at(src, line, i + 1, "a flag"), "flag"));
        i += 2;
      }
      std::set<Label> ts, fs;
      for (auto& t : types) ts.insert(Label::type(t));
      for (auto& f : flags) fs.insert(Label::flag(f));
      NodeId n = g.add_node(ts, fs);
      g.set_node_name(n, id);
      ids.emplace(id, n);
      if (node_spans) (*node_spans)[id] = src.span(line, id_tok);
    } else if (kw.text != "attr" && kw.text != "edge") {
      src.fail(line, kw, "unknown declaration '" + kw.text + "'");
    }
  }
  auto lookup = [&](const Line& line, const Token& tok, const std::string& id) {
    auto it = ids.find(id);
    if (it == ids.end()) src.fail(line, tok, "unknown node '" + id + "'");
    return it->second;
  };
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto& kw = line.tokens[0].text;
    if (kw == "attr") {
      const auto& ref = at(src, line, 1, "ID.NAME");
      auto [id, attr] = dotted(src, line, ref);
      expect_word(src, line, 2, "=");
      Value v = value_token(src, line, at(src, line, 3, "a value"));
      expect_end(src, line, 4);
      NodeId n = lookup(line, ref, id);
      if (g.attr(n, attr)) src.fail(line, ref, "attribute '" + id + "." + attr + "' set twice");
      g.set_attr(n, attr, std::move(v));
    } else if (kw == "edge") {
      const auto& s_tok = at(src, line, 1, "a source node");
      const auto& arrow = at(src, line, 2, "-LABEL->");
      const auto& t_tok = at(src, line, 3, "a target node");
      expect_end(src, line, 4);
      auto label = arrow_body(arrow, '-');
      if (!label) src.fail(line, arrow, "expected -LABEL->, found '" + arrow.text + "'");
      if (!is_valid_name(*label))
        throw ParseError(src.span(line, arrow, 1, label->size()), "invalid edge label '" + *label + "'");
      NodeId s = lookup(line, s_tok, s_tok.text);
      NodeId t = lookup(line, t_tok, t_tok.text);
      if (!g.add_edge(s, *label, t))
        src.fail(line, arrow,
                 "duplicate edge " + s_tok.text + " -" + *label + "-> " + t_tok.text +
                     " (parallel edges are not allowed)");
    }
  }
  return g;
}

/// Deterministic names for every node: source names are kept when valid and
/// unique, the rest become `n<id>` (suffixed on collision).
inline std::map<NodeId, std::string> node_names(const HostGraph& g) {
  std::map<NodeId, std::string> out;
  std::set<std::string> taken;
  for (const auto& [id, node] : g.nodes())
    if (is_valid_name(node.name) && taken.insert(node.name).second) out[id] = node.name;
  for (const auto& [id, node] : g.nodes()) {
    if (out.count(id)) continue;
    std::string base = "n" + std::to_string(id.value), name = base;
    for (int k = 1; taken.count(name); ++k) name = base + "_" + std::to_string(k);
    taken.insert(name);
    out[id] = name;
  }
  return out;
}

inline std::string serialize_graph(const HostGraph& g) {
  auto names = node_names(g);
  std::vector<std::pair<std::string, NodeId>> order;
  for (const auto& [id, name] : names) order.emplace_back(name, id);
  std::sort(order.begin(), order.end());

  std::ostringstream os;
  os << "graph " << g.name() << '\n';
  for (const auto& [name, id] : order) {
    const auto& node = g.node(id);
    os << "node " << name;
    if (!node.types.empty()) {
      os << " :";
      bool first = true;
      for (const auto& t : node.types) {
        os << (first ? " " : ",") << t;
        first = false;
      }
    }
    for (const auto& f : node.flags) os << " flag " << f;
    os << '\n';
    for (const auto& [key, value] : node.attrs)
      os << "attr " << name << '.' << key << " = " << literal_text(value) << '\n';
  }
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  for (const auto& e : g.edges()) edges.emplace_back(names[e.src], e.label, names[e.tgt]);
  std::sort(edges.begin(), edges.end());
  for (const auto& [s, l, t] : edges) os << "edge " << s << " -" << l << "-> " << t << '\n';
  return os.str();
}

inline TypeGraph parse_type_graph(std::string_view text, const std::string& file = "") {
  using namespace detail;
  Source src(text, file);
  TypeGraph tg(header(src, "typegraph"));
  const auto& lines = src.lines();
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto& kw = line.tokens[0];
    if (kw.quoted) src.fail(line, kw, "expected a keyword");
    if (kw.text == "type") {
      const auto& name_tok = at(src, line, 1, "a type name");
      const auto& name = name_token(src, line, name_tok, "type name");
      if (tg.declares(name)) src.fail(line, name_tok, "duplicate type '" + name + "'");
      bool abstract = false;
      std::vector<std::string> supers;
      std::size_t i = 2;
      if (i < line.tokens.size() && line.tokens[i].text == "abstract" && !line.tokens[i].quoted) {
        abstract = true;
        ++i;
      }
      if (i < line.tokens.size()) {
        expect_word(src, line, i, "extends");
        i = name_list(src, line, i + 1, "supertype", supers);
      }
      expect_end(src, line, i);
      auto& decl = tg.declare_type(name, abstract, {supers.begin(), supers.end()});
      decl.span = src.span(line, name_tok);
    } else if (kw.text != "attr" && kw.text != "edge") {
      src.fail(line, kw, "unknown declaration '" + kw.text + "'");
    }
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto& kw = line.tokens[0].text;
    if (kw == "attr") {
      const auto& ref = at(src, line, 1, "TYPE.NAME");
      auto [type, attr] = dotted(src, line, ref);
      expect_word(src, line, 2, ":");
      const auto& vt_tok = at(src, line, 3, "a value type");
      auto vt = parse_value_type(vt_tok.text);
      if (!vt || vt_tok.quoted)
        src.fail(line, vt_tok, "unknown value type '" + vt_tok.text + "' (string|int|bool|real)");
      expect_end(src, line, 4);
      if (!tg.declares(type)) src.fail(line, ref, "unknown type '" + type + "'");
      if (tg.find(type)->attrs.count(attr))
        src.fail(line, ref, "attribute '" + type + "." + attr + "' declared twice");
      tg.declare_attr(type, attr, *vt);
    } else if (kw == "edge") {
      const auto& s_tok = at(src, line, 1, "a source type");
      const auto& arrow = at(src, line, 2, "-LABEL->");
      const auto& t_tok = at(src, line, 3, "a target type");
      expect_end(src, line, 4);
      auto label = arrow_body(arrow, '-');
      if (!label) src.fail(line, arrow, "expected -LABEL->, found '" + arrow.text + "'");
      if (!is_valid_name(*label))
        throw ParseError(src.span(line, arrow, 1, label->size()), "invalid edge label '" + *label + "'");
      EdgeDecl decl{name_token(src, line, s_tok, "type name"), *label,
                    name_token(src, line, t_tok, "type name"), src.span(line, arrow)};
      if (tg.edge_decls().count(decl))
        src.fail(line, arrow, "duplicate edge declaration");
      tg.declare_edge(std::move(decl));
    }
  }
  return tg;
}

inline Rule parse_rule(std::string_view text, const std::string& file = "") {
  using namespace detail;
  Source src(text, file);
  Rule r;
  r.name = header(src, "rule");
  r.span = src.span(src.lines().front(), src.lines().front().tokens[1]);
  const auto& lines = src.lines();

  struct Pending {
    const Line* line;
    const Token* tok;
    std::string id;
  };
  std::vector<Pending> quant_refs, node_refs;

  struct Options {
    std::optional<Role> role;
    const Token* role_tok = nullptr;
    std::optional<std::string> type;
    std::optional<std::string> level;
    std::optional<std::string> group;
  };
  auto options = [&](const Line& line, std::size_t i, bool allow_type) {
    Options o;
    while (i < line.tokens.size()) {
      const auto& tok = line.tokens[i];
      if (!tok.quoted && tok.text.rfind("role=", 0) == 0) {
        auto role = parse_role(std::string_view(tok.text).substr(5));
        if (!role) throw ParseError(src.span(line, tok, 5, tok.text.size() - 5), "unknown role '" + tok.text.substr(5) + "'");
        if (o.role) src.fail(line, tok, "role given twice");
        o.role = role;
        o.role_tok = &tok;
        ++i;
      } else if (allow_type && !tok.quoted && tok.text == ":") {
        if (o.type) src.fail(line, tok, "type given twice");
        o.type = name_token(src, line, at(src, line, i + 1, "a type"), "type");
        i += 2;
      } else if (!tok.quoted && tok.text == "in") {
        if (o.level) src.fail(line, tok, "quantifier given twice");
        const auto& q = at(src, line, i + 1, "a quantifier id");
        o.level = name_token(src, line, q, "quantifier id");
        quant_refs.push_back({&line, &q, *o.level});
        i += 2;
      } else if (!tok.quoted && tok.text == "group") {
        if (o.group) src.fail(line, tok, "group given twice");
        o.group = name_token(src, line, at(src, line, i + 1, "a group id"), "group id");
        i += 2;
      } else {
        src.fail(line, tok, "unexpected '" + tok.text + "'");
      }
    }
    if (!o.role) src.fail_end(line, "missing role=ROLE");
    if (o.group && *o.role != Role::embargo) src.fail(line, *o.role_tok, "only embargo elements can have a group");
    return o;
  };
  auto declare_param = [&](const Line& line, const Token& tok, Param p) {
    int idx = 0;
    auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), idx);
    if (tok.quoted || res.ec != std::errc() || res.ptr != tok.text.data() + tok.text.size() || idx < 0)
      src.fail(line, tok, "expected a parameter index, found '" + tok.text + "'");
    if (r.params.count(idx)) src.fail(line, tok, "parameter " + std::to_string(idx) + " declared twice");
    p.span = src.span(line, tok);
    r.params.emplace(idx, std::move(p));
    return idx;
  };
  auto node_ref = [&](const Line& line, const Token& tok) {
    const auto& id = name_token(src, line, tok, "node id");
    node_refs.push_back({&line, &tok, id});
    return id;
  };

  // Pass 1: declarations that others refer to.
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto& kw = line.tokens[0];
    if (kw.quoted) src.fail(line, kw, "expected a keyword");
    if (kw.text == "format") {
      const auto& f = at(src, line, 1, "a quoted format string");
      if (!f.quoted) src.fail(line, f, "format must be a quoted string");
      expect_end(src, line, 2);
      if (r.print_format) src.fail(line, kw, "format given twice");
      r.print_format = f.text;
    } else if (kw.text == "quant") {
      const auto& id_tok = at(src, line, 1, "a quantifier id");
      Quantifier q;
      q.id = name_token(src, line, id_tok, "quantifier id");
      q.span = src.span(line, id_tok);
      if (r.find_quantifier(q.id)) src.fail(line, id_tok, "duplicate quantifier '" + q.id + "'");
      const auto& kind = at(src, line, 2, "forall or exists");
      if (kind.text == "forall") q.kind = QuantKind::forall;
      else if (kind.text == "exists") q.kind = QuantKind::exists;
      else src.fail(line, kind, "expected forall or exists, found '" + kind.text + "'");
      q.parent = kRootQuantifier;
      std::size_t i = 3;
      const Token* count_tok = nullptr;
      while (i < line.tokens.size()) {
        const auto& tok = line.tokens[i];
        if (tok.text == "nonempty" && !tok.quoted) {
          if (q.kind != QuantKind::forall) src.fail(line, tok, "only forall quantifiers can be nonempty");
          q.nonempty = true;
          ++i;
          continue;
        }
        if (tok.text == "in" && !tok.quoted) {
          const auto& p = at(src, line, i + 1, "a quantifier id");
          q.parent = name_token(src, line, p, "quantifier id");
          quant_refs.push_back({&line, &p, *q.parent});
        } else if (tok.text == "count" && !tok.quoted) {
          count_tok = &at(src, line, i + 1, "a parameter index");
        } else {
          src.fail(line, tok, "unexpected '" + tok.text + "'");
        }
        i += 2;
      }
      if (count_tok) {
        if (q.kind != QuantKind::forall) src.fail(line, *count_tok, "only forall quantifiers can count");
        q.count_param = declare_param(line, *count_tok, Param{CountOf{q.id}, {}});
      }
      r.quantifiers.push_back(std::move(q));
    } else if (kw.text == "node") {
      const auto& id_tok = at(src, line, 1, "a node id");
      RuleNode n;
      n.id = name_token(src, line, id_tok, "node id");
      n.span = src.span(line, id_tok);
      if (r.find_node(n.id)) src.fail(line, id_tok, "duplicate node '" + n.id + "'");
      auto o = options(line, 2, true);
      n.role = *o.role;
      n.type = o.type;
      n.level = o.level.value_or(kRootQuantifier);
      n.explicit_group = o.group;
      r.nodes.push_back(std::move(n));
    } else if (kw.text == "rule") {
      src.fail(line, kw, "more than one rule header");
    }
  }

  // Pass 2: everything that refers to nodes.
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto& kw = line.tokens[0];
    const auto& k = kw.text;
    if (k == "format" || k == "quant" || k == "node") continue;
    if (k == "edge" || k == "path") {
      RuleEdge e;
      e.src = node_ref(line, at(src, line, 1, "a source node"));
      const auto& arrow = at(src, line, 2, k == "edge" ? "-LABEL->" : "~REGEX~>");
      e.tgt = node_ref(line, at(src, line, 3, "a target node"));
      e.span = src.span(line, arrow);
      if (k == "edge") {
        auto label = arrow_body(arrow, '-');
        if (!label) src.fail(line, arrow, "expected -LABEL->, found '" + arrow.text + "'");
        if (!is_valid_name(*label))
          throw ParseError(src.span(line, arrow, 1, label->size()),
                           "invalid edge label '" + *label + "' (use a path line for expressions)");
        e.label = *label;
      } else {
        auto body = arrow_body(arrow, '~');
        if (!body) src.fail(line, arrow, "expected ~REGEX~>, found '" + arrow.text + "'");
        e.label = parse_regex(*body, src.span(line, arrow, 1, body->size()));
      }
      auto o = options(line, 4, false);
      e.role = *o.role;
      if (k == "path" && (e.role == Role::creator || e.role == Role::eraser))
        src.fail(line, *o.role_tok, "path expressions can only be readers or embargoes");
      e.level = o.level.value_or(kRootQuantifier);
      e.explicit_group = o.group;
      r.edges.push_back(std::move(e));
    } else if (k == "flag") {
      const auto& id_tok = at(src, line, 1, "a node id");
      std::string id = node_ref(line, id_tok);
      const auto& role_tok = at(src, line, 2, "a role");
      auto role = parse_role(role_tok.text);
      if (!role || role_tok.quoted) src.fail(line, role_tok, "unknown role '" + role_tok.text + "'");
      std::string flag = name_token(src, line, at(src, line, 3, "a flag"), "flag");
      expect_end(src, line, 4);
      if (auto* n = r.find_node(id)) n->flags.push_back({flag, *role});
    } else if (k == "match" || k == "assign") {
      const auto& ref = at(src, line, 1, "ID.NAME");
      auto [id, attr] = dotted(src, line, ref);
      node_refs.push_back({&line, &ref, id});
      expect_word(src, line, 2, k == "match" ? "==" : "=");
      const auto& v_tok = at(src, line, 3, "a value");
      expect_end(src, line, 4);
      auto* n = r.find_node(id);
      if (k == "match") {
        Value v = value_token(src, line, v_tok);
        if (n && !n->matches.emplace(attr, std::move(v)).second)
          src.fail(line, ref, "attribute '" + id + "." + attr + "' matched twice");
      } else {
        AttrOperand op;
        bool is_ref = !v_tok.quoted && !v_tok.text.empty() &&
                      (std::isalpha(static_cast<unsigned char>(v_tok.text[0])) || v_tok.text[0] == '_') &&
                      v_tok.text.find('.') != std::string::npos;
        if (is_ref) {
          auto [rid, rattr] = dotted(src, line, v_tok);
          node_refs.push_back({&line, &v_tok, rid});
          op = AttrRef{rid, rattr};
        } else {
          op = value_token(src, line, v_tok);
        }
        if (n && !n->assigns.emplace(attr, std::move(op)).second)
          src.fail(line, ref, "attribute '" + id + "." + attr + "' assigned twice");
      }
    } else if (k == "erase") {
      const auto& ref = at(src, line, 1, "ID.NAME");
      auto [id, attr] = dotted(src, line, ref);
      node_refs.push_back({&line, &ref, id});
      expect_end(src, line, 2);
      if (auto* n = r.find_node(id)) n->erases.insert(attr);
    } else if (k == "bind") {
      const auto& idx_tok = at(src, line, 1, "a parameter index");
      expect_word(src, line, 2, "=");
      const auto& ref = at(src, line, 3, "ID.NAME");
      expect_end(src, line, 4);
      auto [id, attr] = dotted(src, line, ref);
      node_refs.push_back({&line, &ref, id});
      declare_param(line, idx_tok, Param{AttrBinding{id, attr}, {}});
    } else if (k == "neq") {
      std::vector<std::string> ids;
      for (std::size_t i = 1; i < line.tokens.size(); ++i) ids.push_back(node_ref(line, line.tokens[i]));
      if (ids.size() < 2) src.fail_end(line, "neq needs at least two nodes");
      for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
          if (ids[a] == ids[b]) src.fail(line, line.tokens[b + 1], "node '" + ids[a] + "' cannot differ from itself");
          r.add_injectivity(ids[a], ids[b]);
        }
    } else if (k == "disjoin") {
      DisjunctionSet d;
      d.span = src.span(line, kw);
      for (std::size_t i = 1; i < line.tokens.size(); ++i)
        d.groups.push_back(name_token(src, line, line.tokens[i], "group id"));
      if (d.groups.size() < 2) src.fail_end(line, "disjoin needs at least two groups");
      r.disjunctions.push_back(std::move(d));
    } else {
      src.fail(line, kw, "unknown declaration '" + k + "'");
    }
  }

  for (const auto& p : quant_refs)
    if (!r.find_quantifier(p.id)) src.fail(*p.line, *p.tok, "undeclared quantifier '" + p.id + "'");
  for (const auto& p : node_refs)
    if (!r.find_node(p.id)) src.fail(*p.line, *p.tok, "undeclared node '" + p.id + "'");

  group_embargoes(r);
  for (const auto& d : r.disjunctions)
    for (const auto& gid : d.groups)
      if (!r.find_group(gid)) throw ParseError(d.span, "undeclared group '" + gid + "'");
  return r;
}

}  // namespace gtx::dsl
