#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "degenwave/errors.hpp"
#include "degenwave/kernel.hpp"

using namespace degenwave;
using doctest::Approx;

namespace {

// N(lambda) = 2 int_0^S mu(s) (1 - cos(lambda s)) ds, four periods per panel.
double gap_quadrature(const MemoryKernel& k, double lambda) {
  const double S = 20.0 * std::log(10.0) / k.decay_rate();
  auto f = [&](double s) { return 2.0 * k.mu(s) * (1.0 - std::cos(lambda * s)); };
  const double period = lambda > 0 ? 8.0 * M_PI / lambda : S;
  const int pieces = std::max(1, int(std::ceil(S / period)));
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double lo = S * i / pieces, hi = S * (i + 1) / pieces;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-14);
  }
  return total;
}

}  // namespace

TEST_CASE("exponential kernel normalization") {
  const auto k1 = MemoryKernel::exponential(1.0);
  CHECK(k1.mu(0.0) == 1.0);
  CHECK(k1.g0() == 1.0);
  CHECK(k1.first_moment() == Approx(1.0).epsilon(1e-12));
  const auto k2 = MemoryKernel::exponential(2.0);
  CHECK(k2.mu0() == 4.0);
  CHECK(k2.g0() == 2.0);
  CHECK(k2.dafermos_constant() == 2.0);
  for (double k : {0.1, 0.5, 1.0, 3.0, 17.0}) {
    const auto K = MemoryKernel::exponential(k);
    CHECK(K.first_moment() == Approx(1.0).epsilon(1e-12));
    auto s_mu = [&](double s) { return s * K.mu(s); };
    CHECK(boost::math::quadrature::exp_sinh<double>().integrate(s_mu) == Approx(1.0).epsilon(1e-10));
  }
  for (double bad : {0.0, -1.0, std::nan("")}) {
    try {
      (void)MemoryKernel::exponential(bad);
      FAIL("expected DomainError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DomainError);
    }
  }
}

TEST_CASE("eval_kernel") {
  const auto k = MemoryKernel::exponential(1.0);
  auto v = eval_kernel(k, 0.0);
  CHECK(v.mu == 1.0);
  CHECK(v.g == 1.0);
  v = eval_kernel(k, std::log(2.0));
  CHECK(v.mu == Approx(0.5).epsilon(1e-15));
  CHECK(v.g == Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(eval_kernel(k, -0.1), Error);

  auto g = [&](double s) { return k.g(s); };
  CHECK(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 40.0, 15, 1e-14) ==
        Approx(1.0 - std::exp(-40.0)).epsilon(1e-12));
  CHECK(std::abs(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 40.0, 15, 1e-14) - 1.0) <= 1e-10);
}

TEST_CASE("Dafermos condition holds with equality") {
  for (double kk : {0.5, 1.0, 2.0}) {
    const auto k = MemoryKernel::exponential(kk);
    for (double s : {0.0, 0.3, 2.0, 11.0}) CHECK(k.mu_prime(s) + k.dafermos_constant() * k.mu(s) == Approx(0.0).scale(1.0));
  }
}

TEST_CASE("kernel gap") {
  const auto k = MemoryKernel::exponential(1.0);
  CHECK(kernel_gap(k, 1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(kernel_gap(k, 0.0) == 0.0);
  CHECK(std::abs(gap_quadrature(k, 1.0) - 1.0) <= 1e-8);
  CHECK(std::abs(gap_quadrature(k, 1e3) - 2.0) <= 1e-3);
  CHECK(kernel_gap(k, 1e12) == Approx(2.0 * k.g0()));

  for (double kk : {0.5, 1.0, 2.0}) {
    const auto K = MemoryKernel::exponential(kk);
    double prev = 0.0;
    for (double lam = 0.05; lam < 200.0; lam *= 1.3) {
      const double n = kernel_gap(K, lam);
      CHECK(n == kernel_gap(K, -lam));
      CHECK(n > prev);
      CHECK(n <= 2.0 * K.g0());
      prev = n;
    }
  }
}

TEST_CASE("history truncation") {
  const auto k = MemoryKernel::exponential(1.0);
  SUBCASE("horizon from the tail tolerance") {
    const auto g = truncate_history(k, 1e-8, 64);
    CHECK(g.s_max == Approx(std::log(1e8)).epsilon(1e-14));
    CHECK(g.tail_mass <= 1e-8 * (1 + 1e-12));
  }
  SUBCASE("floor") { CHECK(truncate_history(k, 0.5, 8).s_max == 5.0); }
  SUBCASE("weights") {
    const auto g = truncate_history(k, 1e-8, 256);
    double sum = 0.0;
    for (double w : g.weights) sum += w;
    CHECK(std::abs(sum - (k.g0() - g.tail_mass)) <= 1e-12);
    CHECK(sum >= k.g0() - 1e-8 - 1e-4);
    CHECK(sum <= k.g0() + 1e-4);
    for (std::size_t j = 1; j < g.nodes.size(); ++j) {
      CHECK(g.nodes[j] > g.nodes[j - 1]);
      CHECK(g.weights[j] > 0.0);
      if (j >= 2) CHECK(g.weights[j] <= g.weights[j - 1]);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(truncate_history(k, 0.0, 16), Error);
    CHECK_THROWS_AS(truncate_history(k, 1.0, 16), Error);
    CHECK_THROWS_AS(truncate_history(k, 1e-6, 7), Error);
  }
}
