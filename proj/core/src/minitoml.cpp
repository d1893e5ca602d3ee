#include "bearing_forms/minitoml.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace bearing_forms::minitoml {

double Value::as_real() const {
  if (kind == Kind::Real) return real;
  if (kind == Kind::Integer) return static_cast<double>(integer);
  throw Error(ErrorKind::ParseError, "expected a number");
}

std::int64_t Value::as_integer() const {
  if (kind == Kind::Integer) return integer;
  throw Error(ErrorKind::ParseError, "expected an integer");
}

const std::string& Value::as_string() const {
  if (kind == Kind::String) return string;
  throw Error(ErrorKind::ParseError, "expected a string");
}

bool Value::as_boolean() const {
  if (kind == Kind::Boolean) return boolean;
  throw Error(ErrorKind::ParseError, "expected a boolean");
}

const std::vector<Value>& Value::as_array() const {
  if (kind == Kind::Array) return array;
  throw Error(ErrorKind::ParseError, "expected an array");
}

const std::map<std::string, Value>& Value::as_table() const {
  if (kind == Kind::Table) return table;
  throw Error(ErrorKind::ParseError, "expected a table");
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_whitespace_and_comments() {
    while (!eof()) {
      const char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, column_, message);
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_key(Cursor& cursor) {
  cursor.skip_whitespace_and_comments();
  if (cursor.eof()) cursor.fail("expected a key");
  std::string key;
  if (cursor.peek() == '"') {
    cursor.advance();
    while (!cursor.eof() && cursor.peek() != '"') key.push_back(cursor.advance());
    cursor.expect('"');
    return key;
  }
  while (!cursor.eof() && is_bare_key_char(cursor.peek())) key.push_back(cursor.advance());
  if (key.empty()) cursor.fail("expected a key");
  return key;
}

Value parse_value(Cursor& cursor);

Value parse_string(Cursor& cursor) {
  cursor.expect('"');
  Value value;
  value.kind = Value::Kind::String;
  while (!cursor.eof() && cursor.peek() != '"') {
    char c = cursor.advance();
    if (c == '\\') {
      if (cursor.eof()) cursor.fail("unterminated escape");
      const char escaped = cursor.advance();
      switch (escaped) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case '"': c = '"'; break;
        case '\\': c = '\\'; break;
        default: cursor.fail("unknown escape sequence");
      }
    } else if (c == '\n') {
      cursor.fail("unterminated string");
    }
    value.string.push_back(c);
  }
  if (cursor.eof()) cursor.fail("unterminated string");
  cursor.expect('"');
  return value;
}

Value parse_number(Cursor& cursor) {
  std::string token;
  bool real = false;
  while (!cursor.eof()) {
    const char c = cursor.peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
      token.push_back(cursor.advance());
    } else if (c == '.' || c == 'e' || c == 'E') {
      real = true;
      token.push_back(cursor.advance());
    } else {
      break;
    }
  }
  if (token.empty()) cursor.fail("expected a number");

  Value value;
  if (real) {
    value.kind = Value::Kind::Real;
    char* end = nullptr;
    value.real = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) cursor.fail("malformed number '" + token + "'");
  } else {
    value.kind = Value::Kind::Integer;
    const auto result =
        std::from_chars(token.data(), token.data() + token.size(), value.integer);
    if (result.ec != std::errc{} || result.ptr != token.data() + token.size()) {
      cursor.fail("malformed integer '" + token + "'");
    }
  }
  return value;
}

Value parse_array(Cursor& cursor) {
  cursor.expect('[');
  Value value;
  value.kind = Value::Kind::Array;
  cursor.skip_whitespace_and_comments();
  while (!cursor.eof() && cursor.peek() != ']') {
    value.array.push_back(parse_value(cursor));
    cursor.skip_whitespace_and_comments();
    if (!cursor.eof() && cursor.peek() == ',') {
      cursor.advance();
      cursor.skip_whitespace_and_comments();
    }
  }
  cursor.expect(']');
  return value;
}

Value parse_inline_table(Cursor& cursor) {
  cursor.expect('{');
  Value value;
  value.kind = Value::Kind::Table;
  cursor.skip_whitespace_and_comments();
  while (!cursor.eof() && cursor.peek() != '}') {
    const std::string key = parse_key(cursor);
    cursor.skip_whitespace_and_comments();
    cursor.expect('=');
    value.table[key] = parse_value(cursor);
    cursor.skip_whitespace_and_comments();
    if (!cursor.eof() && cursor.peek() == ',') {
      cursor.advance();
      cursor.skip_whitespace_and_comments();
    }
  }
  cursor.expect('}');
  return value;
}

Value parse_value(Cursor& cursor) {
  cursor.skip_whitespace_and_comments();
  if (cursor.eof()) cursor.fail("expected a value");
  const char c = cursor.peek();
  if (c == '"') return parse_string(cursor);
  if (c == '[') return parse_array(cursor);
  if (c == '{') return parse_inline_table(cursor);
  if (std::isalpha(static_cast<unsigned char>(c))) {
    std::string word;
    while (!cursor.eof() && is_bare_key_char(cursor.peek())) word.push_back(cursor.advance());
    Value value;
    value.kind = Value::Kind::Boolean;
    if (word == "true") {
      value.boolean = true;
      return value;
    }
    if (word == "false") {
      value.boolean = false;
      return value;
    }
    cursor.fail("unexpected token '" + word + "'");
  }
  return parse_number(cursor);
}

}  // namespace

Document parse(std::string_view text) {
  Cursor cursor(text);
  Document document;
  Value* section = nullptr;

  cursor.skip_whitespace_and_comments();
  while (!cursor.eof()) {
    if (cursor.peek() == '[') {
      cursor.advance();
      const std::string name = parse_key(cursor);
      cursor.skip_whitespace_and_comments();
      cursor.expect(']');
      if (document.count(name) != 0) cursor.fail("duplicate section [" + name + "]");
      Value table;
      table.kind = Value::Kind::Table;
      section = &(document[name] = table);
    } else {
      const std::string key = parse_key(cursor);
      cursor.skip_whitespace_and_comments();
      cursor.expect('=');
      auto& target = section != nullptr ? section->table : document;
      if (target.count(key) != 0) cursor.fail("duplicate key '" + key + "'");
      target[key] = parse_value(cursor);
    }
    cursor.skip_whitespace_and_comments();
  }
  return document;
}

}  // namespace bearing_forms::minitoml
