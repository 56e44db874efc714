#include <doctest.h>

#include <cmath>
#include <random>

#include "degenwave/decay_fit.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/resolvent.hpp"
#include "degenwave/spectrum.hpp"
#include "support.hpp"

using namespace degenwave;
using doctest::Approx;

namespace {

ComplexVector random_complex(Index n, std::mt19937_64& rng) {
  return testing::random_vector(n, rng).cast<Complex>() + Complex(0, 1) * testing::random_vector(n, rng).cast<Complex>();
}

ResolventOptions dense_only() {
  ResolventOptions o;
  o.method = ResolventMethod::Dense;
  return o;
}

ResolventOptions iterative_only() {
  ResolventOptions o;
  o.method = ResolventMethod::Iterative;
  o.tolerance = 1e-10;
  o.max_iterations = 5000;
  return o;
}

}  // namespace

TEST_CASE("dense spectrum of a small matrix") {
  Eigen::MatrixXd R(3, 3);
  R << 0, 1, 0, -1, 0, 0, 0, 0, -2;
  const Spectrum s = dense_spectrum(R);
  REQUIRE(s.eigenvalues.size() == 3);
  CHECK(s.abscissa == Approx(0.0).scale(1));
  CHECK(std::abs(s.eigenvalues[2] - Complex(-2, 0)) < 1e-14);
  CHECK(std::abs(std::abs(s.eigenvalues[0].imag()) - 1.0) < 1e-14);
  CHECK(s.max_residual < 1e-14);
  CHECK(distance_to_spectrum(s, Complex(0, 2)) == Approx(1.0));
  CHECK(band_min_damping(s, 1.5) == Approx(0.0).scale(1));
  CHECK(band_min_damping(s, 0.5) == Approx(2.0));
}

TEST_CASE("discrete spectrum lies in the open left half plane") {
  for (const auto& model : {testing::wd_model(), testing::sd_model()})
    for (double m : {0.0, 0.5, 1.0}) {
      const auto sys = testing::small_system(model, m, 16, 16, 8);
      const Spectrum s = spectral_abscissa(sys);
      CHECK(s.eigenvalues.size() == sys.dim());
      CHECK(s.max_residual <= 1e-8);
      CHECK(s.abscissa < 0.0);
    }
  const auto sys = testing::small_system(testing::wd_model(), 0.5, 16, 16, 8);
  try {
    (void)spectral_abscissa(sys, 10);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("memory-only damping stays bounded away from zero under refinement") {
  std::vector<double> damping;
  for (int n : {16, 24, 32}) {
    const auto sys = testing::small_system(testing::wd_model(), 1.0, n, n, 16);
    damping.push_back(band_min_damping(spectral_abscissa(sys), 40.0));
  }
  for (double d : damping) CHECK(d > 1e-2);
  CHECK(damping.back() >= 0.5 * damping.front());
}

TEST_CASE("shifted solvers agree") {
  const auto sys = testing::small_system(testing::sd_model(), 0.5, 16, 16, 8);
  const GeneratorResolvent schur(sys);
  const SparseResolvent full(sys.generator(), sys.gram());
  std::mt19937_64 rng(29);
  for (Complex z : {Complex(0, 0), Complex(0, 3.5), Complex(0.1, -20), Complex(0, 250)}) {
    const auto a = schur.factor(z);
    const auto b = full.factor(z);
    const Eigen::MatrixXcd shifted = z * Eigen::MatrixXcd::Identity(sys.dim(), sys.dim()) - schur.dense_generator();
    for (int i = 0; i < 3; ++i) {
      const ComplexVector F = random_complex(sys.dim(), rng);
      const ComplexVector x = a->solve(F);
      CHECK((x - b->solve(F)).norm() <= 1e-10 * x.norm());
      CHECK((shifted * x - F).norm() <= 1e-10 * F.norm());
      // adjoint: <R F, G> = <F, R^H G>
      const ComplexVector G = random_complex(sys.dim(), rng);
      const Complex lhs = G.dot(x);
      const Complex rhs = a->solve_adjoint(G).dot(F);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
      CHECK((a->solve_adjoint(G) - b->solve_adjoint(G)).norm() <= 1e-10 * G.norm() * x.norm() / F.norm() * 10);
    }
  }
}

TEST_CASE("resolvent norm: dense and iterative routes agree") {
  const auto sys = testing::small_system(testing::wd_model(), 0.5, 16, 16, 8);
  const GeneratorResolvent schur(sys);
  const SparseResolvent full(sys.generator(), sys.gram());
  for (double lambda : {0.0, 1.0, 7.3, 60.0}) {
    const double d = resolvent_norm(schur, lambda, dense_only());
    CHECK(std::isfinite(d));
    CHECK(resolvent_norm(schur, lambda, iterative_only()) == Approx(d).epsilon(1e-6));
    CHECK(resolvent_norm(full, lambda, iterative_only()) == Approx(d).epsilon(1e-6));
    CHECK(resolvent_norm(sys, lambda) == Approx(d).epsilon(1e-6));
  }
}

TEST_CASE("resolvent norm bounds and symmetry") {
  const auto sys = testing::small_system(testing::sd_model(), 1.0, 16, 16, 8);
  const Spectrum s = spectral_abscissa(sys);
  const GeneratorResolvent problem(sys);
  for (double lambda : log_spaced(0.5, 200.0, 20)) {
    const double r = resolvent_norm(problem, lambda, dense_only());
    CHECK(r >= (1.0 - 1e-9) / distance_to_spectrum(s, Complex(0, lambda)));
    CHECK(resolvent_norm(problem, -lambda, dense_only()) == Approx(r).epsilon(1e-9));
  }
  // Real shift x > 0: |R(x)|_M <= 1/x for an M-dissipative generator.
  const auto f = problem.factor(Complex(2.0, 0.0));
  std::mt19937_64 rng(31);
  for (int i = 0; i < 5; ++i) {
    const ComplexVector F = random_complex(sys.dim(), rng);
    const ComplexVector x = f->solve(F);
    const double nx = std::sqrt(std::real(x.dot(problem.metric_apply(x))));
    const double nF = std::sqrt(std::real(F.dot(problem.metric_apply(F))));
    CHECK(nx <= nF / 2.0 * (1 + 1e-12));
  }
}

TEST_CASE("nearest eigenvalues") {
  ComplexVector eigs(50);
  for (int n = 1; n <= 50; ++n) eigs[n - 1] = Complex(-1.0 / n, double(n));
  const SparseResolvent diag = diagonal_resolvent(eigs);
  const auto near = nearest_eigenvalues(diag, Complex(0, 10.2), 3);
  REQUIRE(near.size() == 3);
  CHECK(std::abs(near[0] - eigs[9]) < 1e-10);
  CHECK(std::abs(near[1] - eigs[10]) < 1e-10);
  CHECK(std::abs(near[2] - eigs[8]) < 1e-8);
}

TEST_CASE("diagonal oracle: resolvent grows linearly") {
  // mu_n = -1/n + i n: |R(i n)| = n exactly, so the peak envelope grows like lambda.
  ComplexVector eigs(2000);
  for (int n = 1; n <= 2000; ++n) eigs[n - 1] = Complex(-1.0 / n, double(n));
  const SparseResolvent diag = diagonal_resolvent(eigs);
  CHECK(resolvent_norm(diag, 10.0, iterative_only()) == Approx(10.0).epsilon(1e-6));
  ResolventOptions opts;
  opts.method = ResolventMethod::Iterative;
  const ResolventSweep sw = resolvent_growth(diag, log_spaced(1.0, 1000.0, 24), opts);
  CHECK(sw.samples.size() == 24);
  CHECK(sw.fit_points == 12);
  CHECK(sw.fitted_exponent == Approx(1.0).epsilon(0.05));
  for (const auto& s : sw.samples) CHECK(s.envelope >= s.norm);
}

TEST_CASE("resolvent_growth grid validation") {
  const SparseResolvent diag = diagonal_resolvent(ComplexVector::Constant(4, Complex(-1, 0)));
  CHECK_THROWS_AS(resolvent_growth(diag, log_spaced(1, 1000, 11)), Error);
  CHECK_THROWS_AS(resolvent_growth(diag, log_spaced(1, 50, 16)), Error);
  auto bad = log_spaced(1, 1000, 16);
  std::swap(bad[3], bad[4]);
  CHECK_THROWS_AS(resolvent_growth(diag, bad), Error);
  auto neg = log_spaced(1, 1000, 16);
  neg[0] = -1;
  CHECK_THROWS_AS(resolvent_growth(diag, neg), Error);
  const auto g = log_spaced(1, 1000, 4);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == Approx(10.0));
  CHECK(g[3] == 1000.0);
}

TEST_CASE("near-singular shift is reported") {
  ComplexVector eigs(3);
  eigs << Complex(0, 5), Complex(-1, 0), Complex(-2, 1);
  const SparseResolvent diag = diagonal_resolvent(eigs);
  try {
    (void)resolvent_norm(diag, 5.0);
    FAIL("expected NearSingular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearSingular);
  }
}

TEST_CASE("fit_decay") {
  std::vector<double> t, poly, expo;
  for (int i = 0; i <= 100; ++i) {
    const double ti = 0.1 * i;
    t.push_back(ti);
    poly.push_back(ti > 0 ? 3.0 * std::pow(ti, -4.0) : 1e300);
    expo.push_back(5.0 * std::exp(-2.0 * ti));
  }
  const DecayFit p = fit_decay(t, poly, 1.0, 10.0, DecayKind::Polynomial);
  CHECK(p.value == Approx(-4.0).epsilon(1e-12));
  CHECK(p.intercept == Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(p.r_squared == Approx(1.0).epsilon(1e-12));
  CHECK(p.points == 91);
  const DecayFit e = fit_decay(t, expo, 0.0, 10.0, DecayKind::Exponential);
  CHECK(e.value == Approx(2.0).epsilon(1e-12));
  CHECK(e.points == 101);
  CHECK(e.residual < 1e-10);

  try {
    (void)fit_decay(t, expo, 5.0, 5.0, DecayKind::Exponential);
    FAIL("expected EmptyWindow");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::EmptyWindow);
  }
  try {
    (void)fit_decay(t, expo, 5.01, 5.09, DecayKind::Exponential);
    FAIL("expected EmptyWindow");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::EmptyWindow);
  }
  auto with_zero = expo;
  with_zero[50] = 0.0;
  try {
    (void)fit_decay(t, with_zero, 1.0, 9.0, DecayKind::Exponential);
    FAIL("expected NonPositiveEnergy");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NonPositiveEnergy);
  }
  CHECK(parse_decay_kind("polynomial") == DecayKind::Polynomial);
  CHECK(to_string(DecayKind::Exponential) == "exponential");
  CHECK_THROWS_AS(parse_decay_kind("power"), Error);
}
