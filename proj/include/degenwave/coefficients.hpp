#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace degenwave {

/// Classical Poincaré constant for zero-boundary functions on (0,1).
inline constexpr double kPoincareConstant = 1.0 / (3.14159265358979323846 * 3.14159265358979323846);

/// a(x) = x^a_exponent, b(x) = b_amplitude * x^b_exponent.
struct PowerLawFamily {
  double a_exponent = 0.0;
  double b_amplitude = 0.0;
  double b_exponent = 0.0;
};

/// Tabulated coefficients on a reference grid 0 = x_0 < ... < x_n = 1.
struct SampledFamily {
  std::vector<double> x;
  std::vector<double> a;
  std::vector<double> b;
};

enum class DegeneracyClass { NonDegenerate, WeaklyDegenerate, StronglyDegenerate, Unsupported };

std::string_view to_string(DegeneracyClass c) noexcept;

/// Assign the class from the degeneracy measure K_a.
DegeneracyClass classify_degeneracy(double K_a) noexcept;

struct PointWeights {
  double a;
  double b;
  double eta;
  double sigma;
};

struct CoefficientReport {
  double K_a = 0.0;
  DegeneracyClass degeneracy = DegeneracyClass::NonDegenerate;
  double M1 = 0.0;
  double M2 = 0.0;
  bool b_over_a_integrable = true;
  bool condition1_holds = false;
  // Only filled by check_hypotheses (NaN after characterize).
  double C_HP;
  double beta_used;
  // Power-law only: mu1 - mu2 < 1 and |c_b| < 1 - mu1/2, and whether it agrees with condition1.
  std::optional<bool> example_criterion;
  std::optional<bool> example_consistent;
  // Integrable drift, (WD) or (SD), and condition1 together.
  bool stability_hypotheses_hold = false;
};

/// Degenerate wave coefficients a, b on (0,1] with the derived Feller weight
/// eta(x) = exp(int_{1/2}^x b/a) and sigma = a / eta.
///
/// Immutable after construction. Sampled tables are interpolated log-log in a
/// (power-law extension on the first cell when a(0) = 0) and linearly in b.
class CoefficientModel {
 public:
  static CoefficientModel power_law(double a_exponent, double b_amplitude, double b_exponent);
  static CoefficientModel sampled(std::vector<double> x, std::vector<double> a, std::vector<double> b);
  /// Two-column (x,a) or three-column (x,a,b) CSV; an optional header row is skipped.
  static CoefficientModel from_csv(const std::filesystem::path& path);

  bool is_power_law() const noexcept { return std::holds_alternative<PowerLawFamily>(family_); }
  const PowerLawFamily* power_law_family() const noexcept { return std::get_if<PowerLawFamily>(&family_); }
  const SampledFamily* sampled_family() const noexcept;

  double a(double x) const;
  double b(double x) const;
  double a_prime(double x) const;

  bool b_over_a_integrable() const noexcept { return integrable_; }

  /// Throws NonIntegrableDrift when b/a is not integrable near 0.
  double eta(double x) const;
  double sigma(double x) const { return a(x) / eta(x); }

  /// max of eta over [0,1].
  double eta_max() const;

  /// Smallest table abscissa > 0 (power law: 0).
  double first_positive_node() const noexcept;

 private:
  struct Sampled {
    SampledFamily data;
    std::vector<double> a_elasticity;  // x a'/a at the nodes (centered differences in log-log)
    std::vector<double> log_ratio;   // int_{1/2}^{x_i} b/a at the nodes
    double kappa_a = 0.0;            // power-law exponent of a on the first cell
    double kappa_b = 0.0;            // power-law exponent of b on the first cell
    bool a_power_head = false;       // a(x) = a_1 (x/x_1)^kappa_a on [0, x_1]
    bool b_power_head = false;       // b(x) = b_1 (x/x_1)^kappa_b on [0, x_1]
  };

  explicit CoefficientModel(PowerLawFamily f);
  explicit CoefficientModel(Sampled s);

  std::size_t cell_of(double x) const;
  double sampled_ratio_integral(std::size_t cell, double from, double to) const;

  std::variant<PowerLawFamily, Sampled> family_;
  bool integrable_ = true;
};

/// Pointwise a, b, eta, sigma. DomainError for x outside (0,1].
PointWeights eval_weights(const CoefficientModel& model, double x);

/// K_a, class, M1, M2 and the condition-1 flag (C_HP fields left NaN).
CoefficientReport characterize(const CoefficientModel& model);

/// Full report: characterize + integrability + Hardy-Poincaré constant at the best beta.
CoefficientReport check_hypotheses(const CoefficientModel& model);

/// (4/a(1) + max_{[beta,1]} (1/a) * C_P) * max_{[0,1]} eta.
double hardy_poincare_constant(const CoefficientModel& model, double beta);

struct HardyPoincareBound {
  double C_HP;
  double beta;
};

/// Minimizes the constant over a 32-point logarithmic beta grid in (0,1).
HardyPoincareBound hardy_poincare_constant(const CoefficientModel& model);

/// Grading exponent for the wave mesh: min(2, 2/(2 - K_a)), 1 for non-degenerate a.
double default_wave_grading(double K_a) noexcept;

}  // namespace degenwave
