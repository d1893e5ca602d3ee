#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bearing_forms/errors.hpp"

namespace bearing_forms::minitoml {

/// Parsed value: scalar, array, or table. The grammar is the small TOML
/// subset the scenario files use: `[section]` headers, `key = value`, arrays
/// (nesting and line breaks allowed), inline tables `{k = v, ...}`, strings,
/// booleans, and numbers.
struct Value {
  enum class Kind { Integer, Real, Boolean, String, Array, Table };

  Kind kind = Kind::Integer;
  std::int64_t integer = 0;
  double real = 0.0;
  bool boolean = false;
  std::string string;
  std::vector<Value> array;
  std::map<std::string, Value> table;

  bool is_number() const { return kind == Kind::Integer || kind == Kind::Real; }
  double as_real() const;
  std::int64_t as_integer() const;
  const std::string& as_string() const;
  bool as_boolean() const;
  const std::vector<Value>& as_array() const;
  const std::map<std::string, Value>& as_table() const;
};

/// Document root: top-level keys plus one level of [section] tables.
using Document = std::map<std::string, Value>;

/// Throws ParseError with a 1-based line and column on malformed input.
Document parse(std::string_view text);

}  // namespace bearing_forms::minitoml
