#pragma once

#include <random>

#include "degenwave/discretization.hpp"
#include "degenwave/kernel.hpp"

namespace testing {

using namespace degenwave;

// a = x^0.5, b = 0.2 x^0.5
inline CoefficientModel wd_model() { return CoefficientModel::power_law(0.5, 0.2, 0.5); }
// a = x^1.5, b = 0.2 x
inline CoefficientModel sd_model() { return CoefficientModel::power_law(1.5, 0.2, 1.0); }

inline GeneratorSystem small_system(const CoefficientModel& model, double m, int wave = 32, int heat = 32,
                                    int history = 16, double c = 1.0, double k = 1.0) {
  const MemoryKernel kernel = MemoryKernel::exponential(k);
  const double grading = default_wave_grading(characterize(model).K_a);
  const Mesh mesh = build_mesh(wave, grading, heat, truncate_history(kernel, 1e-8, history));
  return assemble_system(model, kernel, mesh, m, c);
}

inline Eigen::VectorXd random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline double m_norm(const GeneratorSystem& s, const Eigen::VectorXd& U) { return std::sqrt(U.dot(s.gram() * U)); }

}  // namespace testing
