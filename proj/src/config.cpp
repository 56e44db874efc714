#include "degenwave/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "degenwave/decay_fit.hpp"
#include "degenwave/discretization.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/toml_lite.hpp"

namespace degenwave {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(15);
  ss << v;
  return ss.str();
}

[[noreturn]] void range_error(const std::string& key, const toml::Value& v, const std::string& range) {
  std::string shown;
  if (v.is_number())
    shown = fmt(v.as_double());
  else if (const auto* s = std::get_if<std::string>(&v.data))
    shown = "\"" + *s + "\"";
  else
    shown = v.type_name();
  throw Error(ErrorCode::RangeError,
              "key `" + key + "` = " + shown + " (line " + std::to_string(v.line) + ") outside accepted range " + range);
}

[[noreturn]] void type_error(const std::string& key, const toml::Value& v, const std::string& expected) {
  throw Error(ErrorCode::ParseError, "key `" + key + "` (line " + std::to_string(v.line) + ") expects " + expected +
                                         ", found " + v.type_name());
}

double number(const std::string& key, const toml::Value& v) {
  if (!v.is_number()) type_error(key, v, "a number");
  return v.as_double();
}

double real_in(const std::string& key, const toml::Value& v, double lo, bool lo_open, double hi, bool hi_open,
               const std::string& range) {
  const double x = number(key, v);
  const bool ok = std::isfinite(x) && (lo_open ? x > lo : x >= lo) && (hi_open ? x < hi : x <= hi);
  if (!ok) range_error(key, v, range);
  return x;
}

int integer_in(const std::string& key, const toml::Value& v, std::int64_t lo, std::int64_t hi, const std::string& range) {
  const auto* i = std::get_if<std::int64_t>(&v.data);
  if (!i) type_error(key, v, "an integer");
  if (*i < lo || *i > hi) range_error(key, v, range);
  return int(*i);
}

std::string string_of(const std::string& key, const toml::Value& v) {
  const auto* s = std::get_if<std::string>(&v.data);
  if (!s) type_error(key, v, "a string");
  return *s;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxCells = 1 << 20;

using Handler =
    std::function<void(RunConfig&, const std::string&, const toml::Value&, const std::filesystem::path&)>;

const std::map<std::string, std::map<std::string, Handler>>& schema() {
  static const std::map<std::string, std::map<std::string, Handler>> table = {
      {"coefficients",
       {
           {"a_exponent",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.coefficients.a_exponent = real_in(k, v, 0, false, kInf, true, "[0, inf)");
            }},
           {"b_amplitude",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.coefficients.b_amplitude = real_in(k, v, -kInf, true, kInf, true, "(-inf, inf)");
            }},
           {"b_exponent",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.coefficients.b_exponent = real_in(k, v, 0, false, kInf, true, "[0, inf)");
            }},
           {"coefficient_table",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path& base_dir) {
              std::filesystem::path p = string_of(k, v);
              if (p.empty()) range_error(k, v, "non-empty path");
              c.coefficients.coefficient_table = p.is_absolute() ? p : base_dir / p;
            }},
       }},
      {"kernel",
       {
           {"kernel_k",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.kernel.kernel_k = real_in(k, v, 0, true, kInf, true, "(0, inf)");
            }},
           {"history_eps_tail",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.kernel.history_eps_tail = real_in(k, v, 0, true, 1, true, "(0, 1)");
            }},
           {"history_nodes",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.kernel.history_nodes = integer_in(k, v, 8, 100000, "[8, 100000]");
            }},
       }},
      {"discretization",
       {
           {"wave_cells",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.discretization.wave_cells = integer_in(k, v, 4, kMaxCells, "[4, 1048576]");
            }},
           {"wave_grading",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.discretization.wave_grading = real_in(k, v, 1, false, 8, false, "[1, 8]");
            }},
           {"heat_cells",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.discretization.heat_cells = integer_in(k, v, 4, kMaxCells, "[4, 1048576]");
            }},
           {"m",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.discretization.m = real_in(k, v, 0, false, 1, false, "[0, 1]");
            }},
           {"c",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.discretization.c = real_in(k, v, 0, true, kInf, true, "(0, inf)");
            }},
       }},
      {"evolution",
       {
           {"preset",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.evolution.preset = string_of(k, v);
              try {
                parse_preset(c.evolution.preset);
              } catch (const Error&) {
                range_error(k, v, "{zero, pluck, thermal}");
              }
            }},
           {"dt",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.evolution.dt = real_in(k, v, 0, true, kInf, true, "(0, inf)");
            }},
           {"t_final",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.evolution.t_final = real_in(k, v, 0, true, kInf, true, "(0, inf)");
            }},
           {"record_stride",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.evolution.record_stride = integer_in(k, v, 1, std::numeric_limits<int>::max(), "[1, 2147483647]");
            }},
       }},
      {"analysis",
       {
           {"lambda_min",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.analysis.lambda_min = real_in(k, v, 0, true, kInf, true, "(0, inf)");
            }},
           {"lambda_max",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.analysis.lambda_max = real_in(k, v, 100, false, kInf, true, "[100, inf)");
            }},
           {"lambda_points",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.analysis.lambda_points = integer_in(k, v, 12, 100000, "[12, 100000]");
            }},
           {"sweep_m",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              const auto* arr = std::get_if<toml::Array>(&v.data);
              if (!arr) type_error(k, v, "an array of numbers");
              if (arr->empty()) range_error(k, v, "non-empty array of values in [0, 1]");
              c.analysis.sweep_m.clear();
              for (const auto& e : *arr) c.analysis.sweep_m.push_back(real_in(k, e, 0, false, 1, false, "[0, 1]"));
            }},
           {"fit_kind",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.analysis.fit_kind = string_of(k, v);
              if (c.analysis.fit_kind != "polynomial" && c.analysis.fit_kind != "exponential")
                range_error(k, v, "{polynomial, exponential}");
            }},
           {"fit_t_lo",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.analysis.fit_t_lo = real_in(k, v, 0, false, kInf, true, "[0, inf)");
            }},
           {"fit_t_hi",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.analysis.fit_t_hi = real_in(k, v, 0, true, kInf, true, "(0, inf)");
            }},
           {"trace_file",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path& base_dir) {
              std::filesystem::path p = string_of(k, v);
              if (p.empty()) range_error(k, v, "non-empty path");
              c.analysis.trace_file = p.is_absolute() ? p : base_dir / p;
            }},
       }},
      {"output",
       {
           {"out_dir",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              const std::string s = string_of(k, v);
              if (s.empty()) range_error(k, v, "non-empty path");
              c.output.out_dir = s;
            }},
           {"format",
            [](RunConfig& c, const std::string& k, const toml::Value& v, const std::filesystem::path&) {
              c.output.format = string_of(k, v);
              if (c.output.format != "csv" && c.output.format != "json") range_error(k, v, "{csv, json}");
            }},
       }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const toml::Document doc = toml::parse(text);
  const auto& sch = schema();
  RunConfig cfg;
  for (const auto& [section, table] : doc) {
    if (section.empty()) {
      if (!table.empty())
        throw Error(ErrorCode::UnknownKey, "key `" + table.begin()->first +
                                               "` must live in a section ([coefficients], [kernel], [discretization], "
                                               "[evolution], [analysis], [output])");
      continue;
    }
    const auto sec = sch.find(section);
    if (sec == sch.end())
      throw Error(ErrorCode::UnknownKey, "unknown section [" + section +
                                             "] (accepted: coefficients, kernel, discretization, evolution, analysis, "
                                             "output)");
    for (const auto& [key, value] : table) {
      const auto h = sec->second.find(key);
      if (h == sec->second.end()) {
        std::string accepted;
        for (const auto& [name, _] : sec->second) accepted += (accepted.empty() ? "" : ", ") + name;
        throw Error(ErrorCode::UnknownKey, "unknown key `" + section + "." + key + "` (line " +
                                               std::to_string(value.line) + "; accepted: " + accepted + ")");
      }
      h->second(cfg, key, value, base_dir);
    }
  }
  if (cfg.coefficients.coefficient_table) {
    const auto& t = doc.at("coefficients");
    for (const char* k : {"a_exponent", "b_amplitude", "b_exponent"})
      if (t.count(k))
        throw Error(ErrorCode::RangeError,
                    std::string("key `") + k + "` cannot be combined with `coefficient_table` (choose one family)");
  }
  if (!(cfg.analysis.lambda_max > cfg.analysis.lambda_min))
    throw Error(ErrorCode::RangeError, "key `lambda_max` = " + fmt(cfg.analysis.lambda_max) +
                                           " outside accepted range (lambda_min, inf) with lambda_min = " +
                                           fmt(cfg.analysis.lambda_min));
  if (cfg.analysis.fit_t_lo && cfg.analysis.fit_t_hi && !(*cfg.analysis.fit_t_hi > *cfg.analysis.fit_t_lo))
    throw Error(ErrorCode::RangeError, "key `fit_t_hi` = " + fmt(*cfg.analysis.fit_t_hi) +
                                           " outside accepted range (fit_t_lo, inf) with fit_t_lo = " +
                                           fmt(*cfg.analysis.fit_t_lo));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

MeshSize resolve_mesh_size(const RunConfig& config, Workload workload) {
  const bool frequency = workload == Workload::Resolvent || workload == Workload::Sweep;
  return {config.discretization.wave_cells.value_or(frequency ? 4096 : 64),
          config.discretization.heat_cells.value_or(frequency ? 2048 : 64)};
}

nlohmann::json canonical_config(const RunConfig& c) {
  using nlohmann::json;
  auto opt = [](const auto& o) -> json {
    if (o) return json(*o);
    return json("auto");
  };
  auto opt_path = [](const auto& o) -> json {
    if (o) return json(o->generic_string());
    return json(nullptr);
  };
  json j;
  j["coefficients"] = {{"a_exponent", c.coefficients.a_exponent},
                       {"b_amplitude", c.coefficients.b_amplitude},
                       {"b_exponent", c.coefficients.b_exponent},
                       {"coefficient_table", opt_path(c.coefficients.coefficient_table)}};
  j["kernel"] = {{"kernel_k", c.kernel.kernel_k},
                 {"history_eps_tail", c.kernel.history_eps_tail},
                 {"history_nodes", c.kernel.history_nodes}};
  j["discretization"] = {{"wave_cells", opt(c.discretization.wave_cells)},
                         {"wave_grading", opt(c.discretization.wave_grading)},
                         {"heat_cells", opt(c.discretization.heat_cells)},
                         {"m", c.discretization.m},
                         {"c", c.discretization.c}};
  j["evolution"] = {{"preset", c.evolution.preset},
                    {"dt", opt(c.evolution.dt)},
                    {"t_final", c.evolution.t_final},
                    {"record_stride", c.evolution.record_stride}};
  j["analysis"] = {{"lambda_min", c.analysis.lambda_min},
                   {"lambda_max", c.analysis.lambda_max},
                   {"lambda_points", c.analysis.lambda_points},
                   {"sweep_m", c.analysis.sweep_m},
                   {"fit_kind", c.analysis.fit_kind},
                   {"fit_t_lo", opt(c.analysis.fit_t_lo)},
                   {"fit_t_hi", opt(c.analysis.fit_t_hi)},
                   {"trace_file", opt_path(c.analysis.trace_file)}};
  j["output"] = {{"out_dir", c.output.out_dir.generic_string()}, {"format", c.output.format}};
  return j;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string config_hash(const RunConfig& config) { return sha256_hex(canonical_config(config).dump()).substr(0, 16); }

}  // namespace degenwave
