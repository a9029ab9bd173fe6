#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace gtx {

/// Location of a token in a DSL source file. Lines and columns are 1-based;
/// `col_end` is one past the last column of the token. A zero line means the
/// element was built programmatically and has no source position.
struct SourceSpan {
  std::string file;
  int line = 0;
  int col_begin = 0;
  int col_end = 0;

  bool known() const { return line > 0; }

  auto operator<=>(const SourceSpan&) const = default;
};

inline std::string format_span(const SourceSpan& span) {
  std::string where = span.file.empty() ? "<input>" : span.file;
  return where + ":" + std::to_string(span.line) + ":" +
         std::to_string(span.col_begin);
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KindMismatchError : public Error {
 public:
  using Error::Error;
};

class MissingNodeError : public Error {
 public:
  using Error::Error;
};

class UnknownTypeError : public Error {
 public:
  using Error::Error;
};

class UnknownQuantifierError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, const std::string& message)
      : Error(format_span(span) + ": " + message),
        span_(std::move(span)),
        message_(message) {}

  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

/// A problem found by one of the validators. Violations are data, not
/// exceptions: validators collect all of them and return the list sorted.
struct Violation {
  enum class Kind {
    inheritance_cycle,
    unresolved_reference,
    attribute_redeclared,
    abstract_instantiation,
    undeclared_type,
    undeclared_attribute,
    attribute_type_mismatch,
    unlicensed_edge,
    untyped_node,
    quantifier_structure,
    role_restriction,
    scope,
    parameter,
    nac_structure,
    syntax,
  };

  Kind kind;
  SourceSpan span;
  std::string message;
  /// Host node the violation is about, when there is one.
  std::optional<std::uint32_t> node = std::nullopt;

  auto operator<=>(const Violation& other) const {
    return std::tie(span, kind, message) <=>
           std::tie(other.span, other.kind, other.message);
  }
  bool operator==(const Violation&) const = default;
};

inline void sort_violations(std::vector<Violation>& violations) {
  std::sort(violations.begin(), violations.end());
  violations.erase(std::unique(violations.begin(), violations.end()),
                   violations.end());
}

inline std::ostream& operator<<(std::ostream& os, const Violation& v) {
  return os << format_span(v.span) << ": " << v.message;
}

}  // namespace gtx
