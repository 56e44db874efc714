#include "degenwave/evolution.hpp"

#include <cmath>

#include "degenwave/errors.hpp"

namespace degenwave {

CrankNicolson::CrankNicolson(const GeneratorSystem& system, double dt) : system_(&system), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::DomainError, "dt must be > 0");
  const Index n = system.dim();
  SparseMatrix I(n, n);
  I.setIdentity();
  explicit_part_ = I + (0.5 * dt) * system.generator();
  SparseMatrix implicit = I - (0.5 * dt) * system.generator();
  implicit.makeCompressed();
  auto lu = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
  lu->compute(implicit);
  if (lu->info() != Eigen::Success)
    throw Error(ErrorCode::SingularSystem, "factorization of I - dt/2 A failed: " + lu->lastErrorMessage());
  implicit_ = std::move(lu);
}

Eigen::VectorXd CrankNicolson::step(const Eigen::VectorXd& U) const {
  if (U.size() != system_->dim()) throw Error(ErrorCode::DomainError, "state vector has the wrong size");
  Eigen::VectorXd next = implicit_->solve(explicit_part_ * U);
  if (implicit_->info() != Eigen::Success || !next.allFinite())
    throw Error(ErrorCode::SingularSystem, "Crank-Nicolson solve failed");
  return next;
}

DiscreteState step(const GeneratorSystem& system, const DiscreteState& state, double dt) {
  CrankNicolson cn(system, dt);
  return system.unflatten(cn.step(system.flatten(state)));
}

double default_time_step(const GeneratorSystem& system) {
  const auto& x = system.mesh().wave_nodes;
  double a_max = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) a_max = std::max(a_max, system.model().a(x[j]));
  const double wave = system.mesh().min_wave_spacing() / std::sqrt(a_max);
  return std::min(wave, 0.25 / system.kernel().decay_rate());
}

SimulationTrace simulate(const GeneratorSystem& system, const Eigen::VectorXd& U0, const SimulationSettings& settings) {
  if (!(settings.t_final > 0.0) || !std::isfinite(settings.t_final))
    throw Error(ErrorCode::DomainError, "t_final must be > 0");
  if (settings.record_stride < 1) throw Error(ErrorCode::DomainError, "record_stride must be >= 1");
  const double dt_req = settings.dt > 0.0 ? settings.dt : default_time_step(system);
  const long long steps = std::max(1LL, static_cast<long long>(std::ceil(settings.t_final / dt_req - 1e-9)));
  const double dt = settings.t_final / double(steps);
  const CrankNicolson cn(system, dt);

  SimulationTrace trace;
  auto record = [&](double t, const Eigen::VectorXd& U) {
    const auto ed = system.energy_and_dissipation(U);
    trace.times.push_back(t);
    trace.energy.push_back(ed.energy);
    trace.dissipation.push_back(ed.dissipation);
    trace.y_interface.push_back(system.interface_temperature(U));
    trace.flux_interface.push_back(system.wave_interface_flux(U));
  };
  Eigen::VectorXd U = U0;
  record(0.0, U);
  for (long long n = 1; n <= steps; ++n) {
    U = cn.step(U);
    if (n % settings.record_stride == 0 || n == steps) record(n == steps ? settings.t_final : double(n) * dt, U);
  }
  return trace;
}

}  // namespace degenwave
