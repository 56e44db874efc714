// One line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "degenwave/config.hpp"
#include "degenwave/decay_fit.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/evolution.hpp"
#include "degenwave/pipeline.hpp"
#include "degenwave/resolvent.hpp"
#include "degenwave/spectrum.hpp"

using namespace degenwave;

namespace {

// Pinned tolerances.
constexpr double kCheckRuntime = 1.0;
constexpr double kDissipativityTol = 1e-10;
constexpr double kDissipativityRuntime = 10.0;
constexpr double kEnergyOrder = 1.8;
constexpr double kMonotoneTol = 1e-12;
constexpr double kImagAxisGap = 1e-8;
constexpr Index kSpectrumDofCap = 2000;
constexpr double kSpectrumRuntime = 60.0;
constexpr double kPolyLo = 0.35, kPolyHi = 0.65, kPolyDrift = 0.1;
constexpr double kPolyRuntime = 300.0;
constexpr double kExpBound = 0.1, kExpSupRatio = 3.0;
constexpr double kGapTol = 1e-8;
constexpr double kFitTol = 1e-9, kFitR2 = 0.99;
constexpr double kDiagExponent = 1.0, kDiagTol = 0.05;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

RunConfig wd_config() { return RunConfig{}; }

RunConfig sd_config() {
  RunConfig c;
  c.coefficients.a_exponent = 1.5;
  c.coefficients.b_amplitude = 0.2;
  c.coefficients.b_exponent = 1.0;
  return c;
}

// Criterion 1: condition1 holds iff |c_b| < 1 - mu1/2 with mu1 = 0.5.
void hypothesis_oracle() {
  Stopwatch sw;
  int mismatches = 0;
  for (int i = 0; i <= 20; ++i) {
    RunConfig cfg;
    cfg.coefficients.b_amplitude = i / 20.0;
    const auto j = run_check(cfg);
    const bool expected = std::abs(cfg.coefficients.b_amplitude) < 0.75;
    if (j["coefficients"]["condition1_holds"].get<bool>() != expected) ++mismatches;
  }
  const double t = sw.seconds();
  report(1, "hypothesis oracle", mismatches == 0 && t < kCheckRuntime,
         fmt("%d/21 mismatches, %.3f s", mismatches, t));
}

// Criterion 2.
void dissipativity() {
  Stopwatch sw;
  double worst = -1e300;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (const RunConfig& base : {wd_config(), sd_config()})
    for (double m : {0.0, 0.5, 1.0}) {
      const auto sys = make_system(base, Workload::Check, m);
      for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd U(sys.dim());
        for (Index k = 0; k < U.size(); ++k) U[k] = g(rng);
        U /= std::sqrt(U.dot(sys.gram() * U));
        worst = std::max(worst, U.dot(sys.gram_generator() * U));
      }
    }
  const double t = sw.seconds();
  report(2, "dissipativity", worst <= kDissipativityTol && t < kDissipativityRuntime,
         fmt("max Re<AU,U>_M = %.3e over 600 states, %.2f s", worst, t));
}

// Criterion 3.
void energy_identity() {
  RunConfig cfg;
  cfg.discretization.wave_cells = 64;
  cfg.discretization.heat_cells = 64;
  cfg.kernel.history_nodes = 128;
  cfg.discretization.m = 0.5;
  const auto sys = make_system(cfg, Workload::Simulate);
  const Eigen::VectorXd U0 = sys.flatten(project_initial_data(Preset::Pluck, sys));
  std::vector<double> residual;
  bool monotone = true;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const auto tr = simulate(sys, U0, {dt, 1.0, 1});
    double r = 0.0;
    for (std::size_t n = 1; n < tr.size(); ++n) {
      const double h = tr.times[n] - tr.times[n - 1];
      r = std::max(r, std::abs((tr.energy[n] - tr.energy[n - 1]) / h -
                               0.5 * (tr.dissipation[n] + tr.dissipation[n - 1])));
      if (tr.energy[n] > tr.energy[n - 1] * (1 + kMonotoneTol)) monotone = false;
    }
    residual.push_back(r);
  }
  const double order = std::log2(residual[0] / residual[2]) / 2.0;
  report(3, "energy identity", order >= kEnergyOrder && monotone,
         fmt("residuals %.3e %.3e %.3e, order %.3f, monotone %s", residual[0], residual[1], residual[2], order,
             monotone ? "yes" : "no"));
}

// Criterion 4.
void strong_stability() {
  Stopwatch sw;
  double worst = -1e300;
  Index max_dof = 0;
  for (const RunConfig& base : {wd_config(), sd_config()})
    for (double m : {0.0, 0.5, 1.0}) {
      const auto sys = make_system(base, Workload::Spectrum, m);
      max_dof = std::max(max_dof, sys.dim());
      worst = std::max(worst, spectral_abscissa(sys, kSpectrumDofCap).abscissa);
    }
  const double t = sw.seconds();
  report(4, "strong stability", worst < -kImagAxisGap && max_dof <= kSpectrumDofCap && t < kSpectrumRuntime,
         fmt("max abscissa %.3e, dof %lld, %.1f s", worst, (long long)max_dof, t));
}

// Criterion 5.
void polynomial_regime() {
  Stopwatch sw;
  RunConfig cfg;
  cfg.discretization.m = 0.5;
  const double p = run_resolvent(cfg).fitted_exponent;
  cfg.analysis.lambda_max = 2.0 * cfg.analysis.lambda_max;
  const double p2 = run_resolvent(cfg).fitted_exponent;
  const double t = sw.seconds();
  const bool ok = p >= kPolyLo && p <= kPolyHi && std::abs(p2 - p) < kPolyDrift && t < kPolyRuntime;
  report(5, "polynomial regime", ok, fmt("exponent %.4f, %.4f with lambda_max doubled, %.1f s", p, p2, t));
}

// Criterion 6.
void exponential_regime() {
  RunConfig cfg;
  cfg.discretization.m = 1.0;
  const ResolventSweep sw = run_resolvent(cfg);
  double low = 0.0, high = 0.0;
  for (std::size_t i = 0; i < sw.lambdas.size(); ++i) {
    if (sw.lambdas[i] >= 1.0 && sw.lambdas[i] <= 10.0) low = std::max(low, sw.norms[i]);
    if (sw.lambdas[i] >= 100.0 && sw.lambdas[i] <= 1000.0) high = std::max(high, sw.norms[i]);
  }
  const bool ok = std::abs(sw.fitted_exponent) <= kExpBound && high <= kExpSupRatio * low;
  report(6, "exponential regime", ok,
         fmt("exponent %.4f, sup[100,1000] %.4g vs sup[1,10] %.4g", sw.fitted_exponent, high, low));
}

// Criterion 7: N(lambda) = 2 int mu (1 - cos(lambda s)) ds by quadrature.
void kernel_gap_oracle() {
  double worst = 0.0;
  for (double k : {0.5, 1.0, 2.0})
    for (double lambda : {0.1, 1.0, 10.0}) {
      const auto K = MemoryKernel::exponential(k);
      const double S = 40.0 * std::log(10.0) / k;
      auto f = [&](double s) { return 2.0 * K.mu(s) * (1.0 - std::cos(lambda * s)); };
      const int pieces = std::max(1, int(std::ceil(S * lambda / (2.0 * M_PI))));
      double q = 0.0;
      for (int i = 0; i < pieces; ++i)
        q += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, S * i / pieces, S * (i + 1) / pieces,
                                                                            10, 1e-14);
      const double closed = 2.0 * k * lambda * lambda / (k * k + lambda * lambda);
      worst = std::max({worst, std::abs(q - closed), std::abs(kernel_gap(K, lambda) - q)});
    }
  report(7, "kernel gap", worst <= kGapTol, fmt("max deviation %.3e over 9 (k, lambda) pairs", worst));
}

// Criterion 8.
void fit_correctness() {
  std::vector<double> t, poly, expo;
  for (int i = 1; i <= 200; ++i) {
    t.push_back(0.05 * i);
    poly.push_back(7.0 * std::pow(t.back(), -4.0));
    expo.push_back(0.3 * std::exp(-2.0 * t.back()));
  }
  const double p = fit_decay(t, poly, 0.5, 10.0, DecayKind::Polynomial).value;
  const double r = fit_decay(t, expo, 0.5, 10.0, DecayKind::Exponential).value;

  RunConfig cfg;
  cfg.discretization.m = 1.0;
  const auto trace = run_simulation(cfg);
  const double T = trace.times.back();
  const DecayFit f = fit_decay(trace.times, trace.energy, T / 2, T, DecayKind::Exponential);
  const bool ok = std::abs(p + 4.0) <= kFitTol && std::abs(r - 2.0) <= kFitTol && f.r_squared >= kFitR2;
  report(8, "fit correctness", ok,
         fmt("exponent %.12f, rate %.12f, m=1 pluck r2 %.5f over [%g, %g]", p, r, f.r_squared, T / 2, T));
}

// Criterion 9.
void hardy_poincare() {
  double worst_margin = -1e300;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  for (const RunConfig& cfg : {wd_config(), sd_config()}) {
    const auto model = make_model(cfg);
    const auto kernel = make_kernel(cfg);
    const Mesh mesh = make_mesh(cfg, Workload::Check, model, kernel);
    const double C = hardy_poincare_constant(model).C_HP;
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd u(mesh.wave_cells());
      for (Index k = 0; k < u.size(); ++k) u[k] = g(rng);
      worst_margin = std::max(worst_margin, hardy_poincare_ratio(model, mesh, u) / C);
    }
  }
  report(9, "Hardy-Poincare", worst_margin <= 1.0, fmt("max ratio / C_HP = %.4f", worst_margin));
}

// Criterion 10.
void diagonal_oracle() {
  ComplexVector eigs(2000);
  for (int n = 1; n <= 2000; ++n) eigs[n - 1] = Complex(-1.0 / n, double(n));
  ResolventOptions opts;
  opts.method = ResolventMethod::Iterative;
  const auto sw = resolvent_growth(diagonal_resolvent(eigs), log_spaced(1.0, 1000.0, 24), opts);
  report(10, "synthetic resolvent", std::abs(sw.fitted_exponent - kDiagExponent) <= kDiagTol,
         fmt("exponent %.4f", sw.fitted_exponent));
}

template <class F>
void guarded(int id, const char* name, F f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("threw ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "hypothesis oracle", hypothesis_oracle);
  guarded(2, "dissipativity", dissipativity);
  guarded(3, "energy identity", energy_identity);
  guarded(4, "strong stability", strong_stability);
  guarded(5, "polynomial regime", polynomial_regime);
  guarded(6, "exponential regime", exponential_regime);
  guarded(7, "kernel gap", kernel_gap_oracle);
  guarded(8, "fit correctness", fit_correctness);
  guarded(9, "Hardy-Poincare", hardy_poincare);
  guarded(10, "synthetic resolvent", diagonal_oracle);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
