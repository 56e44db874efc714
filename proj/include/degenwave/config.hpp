#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace degenwave {

struct CoefficientSection {
  double a_exponent = 0.5;
  double b_amplitude = 0.2;
  double b_exponent = 0.5;
  std::optional<std::filesystem::path> coefficient_table;  // resolved against the config directory
};

struct KernelSection {
  double kernel_k = 1.0;
  double history_eps_tail = 1e-8;
  int history_nodes = 16;
};

struct DiscretizationSection {
  std::optional<int> wave_cells;       // default depends on the workload
  std::optional<double> wave_grading;  // default min(2, 2/(2 - K_a)), 1 if non-degenerate
  std::optional<int> heat_cells;       // default depends on the workload
  double m = 0.5;
  double c = 1.0;
};

struct EvolutionSection {
  std::string preset = "pluck";
  std::optional<double> dt;  // default min(h_min / sqrt(max a), 0.25 / k)
  double t_final = 20.0;
  int record_stride = 10;
};

struct AnalysisSection {
  double lambda_min = 1.0;
  double lambda_max = 1000.0;
  int lambda_points = 24;
  std::vector<double> sweep_m{0.0, 0.5, 1.0};
  std::string fit_kind = "exponential";
  std::optional<double> fit_t_lo;  // default t_final / 2
  std::optional<double> fit_t_hi;  // default t_final
  std::optional<std::filesystem::path> trace_file;
};

struct OutputSection {
  std::filesystem::path out_dir = "out";
  std::string format = "csv";
};

struct RunConfig {
  CoefficientSection coefficients;
  KernelSection kernel;
  DiscretizationSection discretization;
  EvolutionSection evolution;
  AnalysisSection analysis;
  OutputSection output;
};

/// UnknownKey, RangeError or ParseError naming the key and its accepted range.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

enum class Workload { Check, Simulate, Spectrum, Resolvent, Fit, Sweep };

struct MeshSize {
  int wave_cells;
  int heat_cells;
};

/// 64 x 64 cells for time stepping and dense spectra, 4096 x 2048 for
/// resolvent sweeps, unless set in the config.
MeshSize resolve_mesh_size(const RunConfig& config, Workload workload);

/// Every key with defaults filled in; unresolved automatic values are "auto".
nlohmann::json canonical_config(const RunConfig& config);
/// First 16 hex digits of SHA-256 over the compact canonical JSON.
std::string config_hash(const RunConfig& config);

std::string sha256_hex(std::string_view data);

}  // namespace degenwave
