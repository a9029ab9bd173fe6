#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>

namespace gtx {

enum class ValueType { string, integer, boolean, real };

inline std::string_view value_type_name(ValueType t) {
  switch (t) {
    case ValueType::string: return "string";
    case ValueType::integer: return "int";
    case ValueType::boolean: return "bool";
    case ValueType::real: return "real";
  }
  return "?";
}

inline std::optional<ValueType> parse_value_type(std::string_view name) {
  if (name == "string") return ValueType::string;
  if (name == "int") return ValueType::integer;
  if (name == "bool") return ValueType::boolean;
  if (name == "real") return ValueType::real;
  return std::nullopt;
}

/// Attribute value. Equality is type-strict: int 1 and string "1" differ.
class Value {
 public:
  using Storage = std::variant<std::string, std::int64_t, bool, double>;

  Value() : data_(std::string{}) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(std::int64_t i) : data_(i) {}
  Value(int i) : data_(static_cast<std::int64_t>(i)) {}
  Value(bool b) : data_(b) {}
  Value(double d) : data_(d) {}

  ValueType type() const { return static_cast<ValueType>(data_.index()); }

  bool is_string() const { return type() == ValueType::string; }
  bool is_int() const { return type() == ValueType::integer; }

  const std::string& as_string() const { return std::get<std::string>(data_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  double as_real() const { return std::get<double>(data_); }

  const Storage& storage() const { return data_; }

  bool operator==(const Value&) const = default;
  auto operator<=>(const Value& other) const {
    return data_ <=> other.data_;
  }

 private:
  Storage data_;
};

namespace detail {

inline std::string real_to_text(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string text(buf, res.ptr);
  // Reals always carry a decimal point so they never read back as ints.
  if (text.find_first_of(".ein") == std::string::npos) {
    text += ".0";
  } else if (text.find('.') == std::string::npos &&
             text.find('e') != std::string::npos) {
    text.insert(text.find('e'), ".0");
  }
  return text;
}

}  // namespace detail

/// Textual form used in printed rule output: strings are unquoted.
inline std::string display_text(const Value& v) {
  switch (v.type()) {
    case ValueType::string: return v.as_string();
    case ValueType::integer: return std::to_string(v.as_int());
    case ValueType::boolean: return v.as_bool() ? "true" : "false";
    case ValueType::real: return detail::real_to_text(v.as_real());
  }
  return {};
}

inline std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

/// Literal form used by the DSL serializer; inverse of the DSL value parser.
inline std::string literal_text(const Value& v) {
  if (v.is_string()) return quote_string(v.as_string());
  return display_text(v);
}

}  // namespace gtx
