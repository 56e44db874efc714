#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace degenwave::toml {

/// Subset of TOML: [tables], bare keys, strings, integers, floats, booleans and
/// (possibly multi-line) arrays. Inline tables, dates and dotted keys are not
/// supported.
struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<bool, std::int64_t, double, std::string, Array> data;
  int line = 0;

  bool is_number() const noexcept {
    return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
  }
  double as_double() const;
  std::string type_name() const;
};

using Table = std::map<std::string, Value>;
/// Top-level keys live in the table named "".
using Document = std::map<std::string, Table>;

/// ParseError with the offending line number.
Document parse(std::string_view text);
/// IoError when the file cannot be read.
Document parse_file(const std::filesystem::path& path);

}  // namespace degenwave::toml
