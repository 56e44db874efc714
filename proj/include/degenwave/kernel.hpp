#pragma once

#include <vector>

namespace degenwave {

/// Exponential memory kernel mu(s) = mu0 * exp(-k s), normalized so that the
/// relaxation kernel g(s) = int_s^inf mu has unit total mass (int s mu = 1).
class MemoryKernel {
 public:
  /// DomainError for k <= 0.
  static MemoryKernel exponential(double k);

  double decay_rate() const noexcept { return k_; }
  double mu0() const noexcept { return mu0_; }
  /// g(0) = int mu.
  double g0() const noexcept { return mu0_ / k_; }
  /// Dafermos constant: mu' <= -K_mu mu holds with equality.
  double dafermos_constant() const noexcept { return k_; }
  double first_moment() const noexcept { return mu0_ / (k_ * k_); }

  /// DomainError for s < 0.
  double mu(double s) const;
  double mu_prime(double s) const;
  double g(double s) const;
  /// int_lo^hi mu(s) ds in closed form.
  double mu_mass(double lo, double hi) const;

 private:
  MemoryKernel(double k, double mu0) : k_(k), mu0_(mu0) {}
  double k_;
  double mu0_;
};

inline MemoryKernel make_exponential_kernel(double k) { return MemoryKernel::exponential(k); }

struct KernelValues {
  double mu;
  double g;
};

KernelValues eval_kernel(const MemoryKernel& kernel, double s);

/// N(lambda) = int mu(s) |1 - exp(-i lambda s)|^2 ds = 2 k lambda^2 / (k^2 + lambda^2) * (mu0/k^2).
double kernel_gap(const MemoryKernel& kernel, double lambda) noexcept;

/// Truncated, uniformly sampled history axis 0 = s_0 < ... < s_Ns = S_max.
///
/// `weights[j]` is the exact mu-mass of the trapezoid dual cell of node j, so
/// sum(weights) = int_0^S_max mu and the upwind transport on this grid is
/// dissipative in the induced norm (weights non-increasing for j >= 1).
struct HistoryGrid {
  double s_max = 0.0;
  double ds = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  double tail_mass = 0.0;

  std::size_t intervals() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// S_max = ln(mu0 / (k eps_tail)) / k, floored at 5/k; Ns uniform intervals.
/// DomainError for eps_tail outside (0,1) or Ns < 8.
HistoryGrid truncate_history(const MemoryKernel& kernel, double eps_tail, int intervals);

}  // namespace degenwave
