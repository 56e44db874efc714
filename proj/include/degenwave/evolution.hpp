#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "degenwave/discretization.hpp"

namespace degenwave {

struct SimulationTrace {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> dissipation;
  std::vector<double> y_interface;     // y(1, t_n)
  std::vector<double> flux_interface;  // eta(1) u_x(1, t_n)
  std::string config_hash;

  std::size_t size() const noexcept { return times.size(); }
};

/// Crank-Nicolson propagator for U' = A_h U with the factorization of
/// (I - dt/2 A_h) held for the lifetime of the object.
class CrankNicolson {
 public:
  /// DomainError for dt <= 0; SingularSystem if the factorization fails.
  CrankNicolson(const GeneratorSystem& system, double dt);

  double dt() const noexcept { return dt_; }
  Eigen::VectorXd step(const Eigen::VectorXd& U) const;

 private:
  const GeneratorSystem* system_;
  double dt_;
  SparseMatrix explicit_part_;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix>> implicit_;
};

/// One step on a block state. Factorizes on every call; use CrankNicolson for
/// repeated steps.
DiscreteState step(const GeneratorSystem& system, const DiscreteState& state, double dt);

/// min(h_min / sqrt(max a), 0.25 / k).
double default_time_step(const GeneratorSystem& system);

struct SimulationSettings {
  double dt = 0.0;  // <= 0 selects default_time_step
  double t_final = 1.0;
  int record_stride = 1;
};

/// Steps U0 to t_final. The step count is ceil(t_final / dt) and dt is shrunk
/// to land exactly on t_final. Records t = 0, every record_stride-th step and
/// the final step.
SimulationTrace simulate(const GeneratorSystem& system, const Eigen::VectorXd& U0, const SimulationSettings& settings);

}  // namespace degenwave
