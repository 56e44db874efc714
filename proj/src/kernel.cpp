#include "degenwave/kernel.hpp"

#include <cmath>
#include <string>

#include "degenwave/errors.hpp"

namespace degenwave {

MemoryKernel MemoryKernel::exponential(double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw Error(ErrorCode::DomainError, "kernel decay rate k must be > 0, got " + std::to_string(k));
  return MemoryKernel(k, k * k);
}

double MemoryKernel::mu(double s) const {
  if (s < 0.0) throw Error(ErrorCode::DomainError, "history age s must be >= 0");
  return mu0_ * std::exp(-k_ * s);
}

double MemoryKernel::mu_prime(double s) const { return -k_ * mu(s); }

double MemoryKernel::g(double s) const { return mu(s) / k_; }

double MemoryKernel::mu_mass(double lo, double hi) const {
  // expm1 keeps small cells accurate
  return mu0_ / k_ * std::exp(-k_ * lo) * -std::expm1(-k_ * (hi - lo));
}

KernelValues eval_kernel(const MemoryKernel& kernel, double s) { return {kernel.mu(s), kernel.g(s)}; }

double kernel_gap(const MemoryKernel& kernel, double lambda) noexcept {
  const double k = kernel.decay_rate();
  const double l2 = lambda * lambda;
  return 2.0 * kernel.mu0() / k * l2 / (k * k + l2);
}

HistoryGrid truncate_history(const MemoryKernel& kernel, double eps_tail, int intervals) {
  if (!(eps_tail > 0.0 && eps_tail < 1.0))
    throw Error(ErrorCode::DomainError, "history_eps_tail must lie in (0,1)");
  if (intervals < 8) throw Error(ErrorCode::DomainError, "history_nodes must be >= 8");
  const double k = kernel.decay_rate();
  HistoryGrid grid;
  grid.s_max = std::max(std::log(kernel.mu0() / (k * eps_tail)) / k, 5.0 / k);
  grid.ds = grid.s_max / intervals;
  grid.nodes.resize(std::size_t(intervals) + 1);
  grid.weights.resize(grid.nodes.size());
  for (int j = 0; j <= intervals; ++j) grid.nodes[j] = grid.ds * j;
  grid.nodes.back() = grid.s_max;
  for (int j = 0; j <= intervals; ++j) {
    const double lo = j == 0 ? 0.0 : grid.nodes[j] - 0.5 * grid.ds;
    const double hi = j == intervals ? grid.s_max : grid.nodes[j] + 0.5 * grid.ds;
    grid.weights[j] = kernel.mu_mass(lo, hi);
  }
  grid.tail_mass = kernel.mu0() / k * std::exp(-k * grid.s_max);
  return grid;
}

}  // namespace degenwave
