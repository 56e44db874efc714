#include "degenwave/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "degenwave/errors.hpp"

namespace degenwave::toml {

double Value::as_double() const {
  if (const auto* i = std::get_if<std::int64_t>(&data)) return double(*i);
  if (const auto* d = std::get_if<double>(&data)) return *d;
  throw Error(ErrorCode::ParseError, "expected a number, found " + type_name());
}

std::string Value::type_name() const {
  switch (data.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    default: return "array";
  }
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Document run() {
    Document doc;
    Table* current = &doc[""];
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_ws();
        const std::string name = bare_key();
        skip_ws();
        expect(']');
        if (doc.count(name) && name.size()) fail("table [" + name + "] defined twice");
        current = &doc[name];
      } else {
        const int line = line_;
        const std::string key = bare_key();
        skip_ws();
        expect('=');
        skip_ws();
        Value v = value();
        v.line = line;
        if (current->count(key)) fail("key '" + key + "' defined twice");
        current->emplace(key, std::move(v));
      }
      end_of_line();
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        newline();
      else
        break;
    }
  }
  // Inside arrays: whitespace, comments and newlines are all insignificant.
  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        newline();
      else
        break;
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n' && peek() != '\r') fail(std::string("unexpected character '") + peek() + "'");
    newline();
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  Value value() {
    const char c = peek();
    if (c == '"') return {basic_string(), line_};
    if (c == '\'') return {literal_string(), line_};
    if (c == '[') return {array(), line_};
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true, line_};
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false, line_};
    }
    return number();
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      switch (s_[pos_++]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: fail("unsupported escape sequence");
      }
    }
    return out;
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  Array array() {
    ++pos_;
    Array out;
    skip_array_space();
    while (peek() != ']') {
      if (eof()) fail("unterminated array");
      const int line = line_;
      Value v = value();
      v.line = line;
      out.push_back(std::move(v));
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
        skip_array_space();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    ++pos_;
    return out;
  }

  Value number() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_'))
      ++pos_;
    std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty()) fail("expected a value");
    std::string clean;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] != '_') {
        clean += tok[i];
        continue;
      }
      if (i == 0 || i + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i - 1])) ||
          !std::isdigit(static_cast<unsigned char>(tok[i + 1])))
        fail("misplaced '_' in number '" + tok + "'");
    }
    std::string body = clean;
    bool negative = false;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body == "inf") return {negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity(), line_};
    if (body == "nan") return {std::numeric_limits<double>::quiet_NaN(), line_};

    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    const char* first = clean.data() + (clean[0] == '+' ? 1 : 0);
    const char* last = clean.data() + clean.size();
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || p != last) fail("invalid number '" + tok + "'");
      return {d, line_};
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec != std::errc() || p != last) fail("invalid value '" + tok + "'");
    return {i, line_};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Document parse(std::string_view text) { return Parser(text).run(); }

Document parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace degenwave::toml
