#include "degenwave/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "degenwave/errors.hpp"

namespace degenwave {

namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::filesystem::path resolve_out_dir(const RunConfig& config) {
  if (const char* env = std::getenv("DEGENWAVE_OUT"); env && *env) return env;
  return config.output.out_dir;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(contents.data(), std::streamsize(contents.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_file(path, value.dump(2) + "\n");
}

std::string trace_csv(const SimulationTrace& t) {
  std::string out = "t,energy,dissipation,y_interface,flux_interface\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += format_number(t.times[i]) + ',' + format_number(t.energy[i]) + ',' + format_number(t.dissipation[i]) + ',' +
           format_number(t.y_interface[i]) + ',' + format_number(t.flux_interface[i]) + '\n';
  }
  return out;
}

nlohmann::json trace_json(const SimulationTrace& t) {
  return {{"t", t.times},
          {"energy", t.energy},
          {"dissipation", t.dissipation},
          {"y_interface", t.y_interface},
          {"flux_interface", t.flux_interface},
          {"config_hash", t.config_hash}};
}

SimulationTrace parse_trace_csv(std::string_view text) {
  SimulationTrace t;
  std::size_t pos = 0;
  int line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (header) {
      header = false;
      if (cells.size() < 2 || cells[0] != "t" || cells[1] != "energy")
        throw Error(ErrorCode::ParseError, "trace CSV must start with a `t,energy,...` header");
      continue;
    }
    if (cells.size() != 5)
      throw Error(ErrorCode::ParseError, "trace CSV line " + std::to_string(line_no) + ": expected 5 columns");
    double v[5];
    for (int c = 0; c < 5; ++c) {
      char* endp = nullptr;
      v[c] = std::strtod(cells[std::size_t(c)].c_str(), &endp);
      if (cells[std::size_t(c)].empty() || *endp != '\0')
        throw Error(ErrorCode::ParseError, "trace CSV line " + std::to_string(line_no) + ": non-numeric cell");
    }
    t.times.push_back(v[0]);
    t.energy.push_back(v[1]);
    t.dissipation.push_back(v[2]);
    t.y_interface.push_back(v[3]);
    t.flux_interface.push_back(v[4]);
  }
  if (header) throw Error(ErrorCode::ParseError, "empty trace CSV");
  return t;
}

SimulationTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read trace " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_csv(ss.str());
}

std::string eigenvalues_csv(const Spectrum& s) {
  std::string out = "re,im\n";
  for (const auto& z : s.eigenvalues) out += format_number(z.real()) + ',' + format_number(z.imag()) + '\n';
  return out;
}

std::string resolvent_csv(const ResolventSweep& sweep) {
  std::string out = "lambda,resolvent_norm\n";
  for (std::size_t i = 0; i < sweep.lambdas.size(); ++i)
    out += format_number(sweep.lambdas[i]) + ',' + format_number(sweep.norms[i]) + '\n';
  return out;
}

nlohmann::json to_json(const CoefficientReport& r) {
  nlohmann::json j = {{"K_a", finite_or_null(r.K_a)},
                      {"class", std::string(to_string(r.degeneracy))},
                      {"M1", finite_or_null(r.M1)},
                      {"M2", finite_or_null(r.M2)},
                      {"b_over_a_integrable", r.b_over_a_integrable},
                      {"condition1_holds", r.condition1_holds},
                      {"C_HP", finite_or_null(r.C_HP)},
                      {"beta_used", finite_or_null(r.beta_used)},
                      {"stability_hypotheses_hold", r.stability_hypotheses_hold}};
  j["example_criterion"] = r.example_criterion ? nlohmann::json(*r.example_criterion) : nlohmann::json(nullptr);
  j["example_consistent"] = r.example_consistent ? nlohmann::json(*r.example_consistent) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const MemoryKernel& k, const HistoryGrid& g) {
  double sum = 0.0;
  for (double w : g.weights) sum += w;
  return {{"family", "exponential"},
          {"k", k.decay_rate()},
          {"mu0", k.mu0()},
          {"g0", k.g0()},
          {"K_mu", k.dafermos_constant()},
          {"first_moment", k.first_moment()},
          {"history",
           {{"S_max", g.s_max},
            {"ds", g.ds},
            {"intervals", g.intervals()},
            {"tail_mass", g.tail_mass},
            {"weight_sum", sum}}}};
}

nlohmann::json to_json(const DecayFit& f) {
  nlohmann::json j = {{"kind", std::string(to_string(f.kind))},
                      {"window", {f.t_lo, f.t_hi}},
                      {"r2", finite_or_null(f.r_squared)},
                      {"residual", finite_or_null(f.residual)},
                      {"intercept", finite_or_null(f.intercept)},
                      {"points", f.points}};
  j[f.kind == DecayKind::Polynomial ? "exponent" : "rate"] = finite_or_null(f.value);
  return j;
}

nlohmann::json to_json(const ResolventSweep& s) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& p : s.samples)
    samples.push_back({{"lambda", p.lambda},
                       {"norm", p.norm},
                       {"nearest_eigenvalue", {p.nearest.real(), p.nearest.imag()}},
                       {"peak_lambda", p.peak_lambda},
                       {"peak_norm", p.peak_norm},
                       {"envelope_lambda", p.envelope_lambda},
                       {"envelope", p.envelope}});
  return {{"exponent", s.fitted_exponent}, {"C", s.fitted_C}, {"fit_points", s.fit_points}, {"samples", samples}};
}

nlohmann::json artifact_meta(const std::string& artifact, const RunConfig& config) {
  return {{"artifact", artifact}, {"config_hash", config_hash(config)}, {"config", canonical_config(config)}};
}

}  // namespace degenwave
