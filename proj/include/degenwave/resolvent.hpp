#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "degenwave/discretization.hpp"

namespace degenwave {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexSparse = Eigen::SparseMatrix<Complex>;

/// Factorized shift zI - A.
class ShiftedSolver {
 public:
  virtual ~ShiftedSolver() = default;
  /// (zI - A)^{-1} F
  virtual ComplexVector solve(const ComplexVector& F) const = 0;
  /// (zI - A)^{-H} T (Euclidean adjoint)
  virtual ComplexVector solve_adjoint(const ComplexVector& T) const = 0;
};

/// Generator A paired with an SPD metric M; the resolvent is measured in the
/// norm |x|_M = sqrt(x^H M x).
class ResolventProblem {
 public:
  virtual ~ResolventProblem() = default;
  virtual Index dim() const = 0;
  /// NearSingular when the shift cannot be factorized.
  virtual std::unique_ptr<ShiftedSolver> factor(Complex z) const = 0;
  virtual ComplexVector metric_apply(const ComplexVector& x) const = 0;
  virtual ComplexVector metric_solve(const ComplexVector& x) const = 0;
  virtual Eigen::MatrixXcd dense_generator() const = 0;
  virtual Eigen::MatrixXd dense_metric() const = 0;
};

/// Shared pieces for problems with an explicit sparse metric.
class SparseMetricProblem : public ResolventProblem {
 public:
  explicit SparseMetricProblem(SparseMatrix metric);
  Index dim() const override { return metric_.rows(); }
  ComplexVector metric_apply(const ComplexVector& x) const override;
  ComplexVector metric_solve(const ComplexVector& x) const override;
  Eigen::MatrixXd dense_metric() const override { return Eigen::MatrixXd(metric_); }

 private:
  SparseMatrix metric_;
  std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>> factor_;
};

/// GeneratorSystem with the history block eliminated in every shifted solve:
/// upwind transport in s is a two-term recurrence, so only the (u, w) system
/// is factorized.
class GeneratorResolvent final : public ResolventProblem {
 public:
  explicit GeneratorResolvent(const GeneratorSystem& system);
  Index dim() const override { return system_->dim(); }
  std::unique_ptr<ShiftedSolver> factor(Complex z) const override;
  ComplexVector metric_apply(const ComplexVector& x) const override;
  ComplexVector metric_solve(const ComplexVector& x) const override;
  Eigen::MatrixXcd dense_generator() const override;
  Eigen::MatrixXd dense_metric() const override { return Eigen::MatrixXd(system_->gram()); }

 private:
  const GeneratorSystem* system_;
  SparseMatrix coupling_;  // P_u^T K_w, w-rows by u-cols
  SparseMatrix heat_form_; // P_y^T K_h P_y on w
  SparseMatrix heat_flux_; // P_y^T K_h, w-rows by heat nodes
};

/// Sparse LU of the full shifted matrix zI - A.
class SparseResolvent final : public SparseMetricProblem {
 public:
  SparseResolvent(ComplexSparse generator, SparseMatrix metric);
  SparseResolvent(const SparseMatrix& generator, SparseMatrix metric);
  std::unique_ptr<ShiftedSolver> factor(Complex z) const override;
  Eigen::MatrixXcd dense_generator() const override { return Eigen::MatrixXcd(generator_); }

 private:
  ComplexSparse generator_;
};

/// Diagonal generator with the identity metric.
SparseResolvent diagonal_resolvent(const ComplexVector& eigenvalues);

enum class ResolventMethod { Auto, Dense, Iterative };

struct ResolventOptions {
  ResolventMethod method = ResolventMethod::Auto;
  Index dense_cap = 4000;
  double tolerance = 1e-6;
  int max_iterations = 1000;
  unsigned threads = 0;  // 0: hardware concurrency
  int ritz_count = 8;      // eigenvalues tracked per sweep sample
  int ritz_iterations = 40;
};

/// ||(i lambda - A)^{-1}||_M. Dense SVD at or below dense_cap under Auto,
/// power iteration on R^* R otherwise. NearSingular when the estimated
/// condition number exceeds 1e14.
double resolvent_norm(const ResolventProblem& problem, double lambda, const ResolventOptions& options = {});
double resolvent_norm(const GeneratorSystem& system, double lambda, const ResolventOptions& options = {});

/// The `count` eigenvalues of A nearest to z (nearest first) by orthogonal
/// iteration on (zI - A)^{-1} with Rayleigh-Ritz extraction.
std::vector<Complex> nearest_eigenvalues(const ResolventProblem& problem, Complex z, int count = 1,
                                         int iterations = 60);

struct ResolventSample {
  double lambda = 0.0;
  double norm = 0.0;         // ||R(i lambda)||_M
  Complex nearest;           // eigenvalue nearest to i lambda
  double peak_lambda = 0.0;  // resonance in the sample's log cell with the largest norm (0: none found)
  double peak_norm = 0.0;    // ||R(i peak_lambda)||_M
  double envelope = 0.0;     // max(norm, peak_norm): local sup of the norm over the cell
  double envelope_lambda = 0.0;
};

struct ResolventSweep {
  std::vector<double> lambdas;
  std::vector<double> norms;
  std::vector<ResolventSample> samples;
  double fitted_exponent = 0.0;
  double fitted_C = 0.0;  // envelope ~ fitted_C * lambda^fitted_exponent
  std::size_t fit_points = 0;
};

std::vector<double> log_spaced(double lo, double hi, int points);

/// Samples the resolvent on a log-spaced grid (>= 12 points, max >= 100). Each
/// sample also evaluates the norm at the resonances i*Im(mu) of the tracked
/// eigenvalues mu whose frequency falls in the sample's log cell, so the
/// envelope follows the peaks rather than the troughs between modes. Fits
/// log(envelope) against log(envelope_lambda) on the upper half of the grid.
/// DomainError for a bad grid.
ResolventSweep resolvent_growth(const ResolventProblem& problem, const std::vector<double>& lambdas,
                                const ResolventOptions& options = {});

}  // namespace degenwave
