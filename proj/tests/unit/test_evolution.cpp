#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/SparseLU>

#include "degenwave/errors.hpp"
#include "degenwave/evolution.hpp"
#include "support.hpp"

using namespace degenwave;
using doctest::Approx;

namespace {

Eigen::VectorXd pluck(const GeneratorSystem& sys) { return sys.flatten(project_initial_data(Preset::Pluck, sys)); }

// |E(T) - E(0) - int_0^T D| with the trapezoid rule on the recorded trace.
double energy_identity_residual(const SimulationTrace& tr) {
  double integral = 0.0;
  for (std::size_t n = 1; n < tr.size(); ++n)
    integral += 0.5 * (tr.times[n] - tr.times[n - 1]) * (tr.dissipation[n] + tr.dissipation[n - 1]);
  return std::abs(tr.energy.back() - tr.energy.front() - integral);
}

}  // namespace

TEST_CASE("zero state stays zero") {
  const auto sys = testing::small_system(testing::wd_model(), 0.5, 16, 16, 8);
  const Eigen::VectorXd U0 = Eigen::VectorXd::Zero(sys.dim());
  const auto tr = simulate(sys, U0, {0.05, 1.0, 1});
  for (double e : tr.energy) CHECK(e == 0.0);
  for (double y : tr.y_interface) CHECK(y == 0.0);
}

TEST_CASE("time grid lands on t_final") {
  const auto sys = testing::small_system(testing::wd_model(), 0.5, 16, 16, 8);
  const auto tr = simulate(sys, pluck(sys), {0.3, 1.0, 2});
  // 4 steps of 0.25: t = 0, 0.5, 1.0
  REQUIRE(tr.size() == 3);
  CHECK(tr.times.back() == Approx(1.0).epsilon(1e-15));
  CHECK(tr.times[1] == Approx(0.5));
  const auto tr3 = simulate(sys, pluck(sys), {0.25, 0.75, 2});
  CHECK(tr3.size() == 3);  // t = 0, 0.5 and the final 0.75
  CHECK(default_time_step(sys) > 0.0);
  CHECK(default_time_step(sys) <= 0.25);
  CHECK_THROWS_AS(CrankNicolson(sys, 0.0), Error);
  CHECK_THROWS_AS(CrankNicolson(sys, -0.1), Error);
}

TEST_CASE("Crank-Nicolson is an M-contraction") {
  std::mt19937_64 rng(17);
  for (const auto& model : {testing::wd_model(), testing::sd_model()})
    for (double m : {0.0, 0.5, 1.0}) {
      const auto sys = testing::small_system(model, m, 16, 16, 8);
      const CrankNicolson cn(sys, 0.05);
      Eigen::VectorXd U = testing::random_vector(sys.dim(), rng);
      double E = sys.energy(U);
      for (int n = 0; n < 50; ++n) {
        U = cn.step(U);
        const double next = sys.energy(U);
        CHECK(next <= E * (1 + 1e-12));
        E = next;
      }
    }
}

TEST_CASE("block step agrees with the propagator") {
  const auto sys = testing::small_system(testing::sd_model(), 0.5, 16, 16, 8);
  const auto s0 = project_initial_data(Preset::Pluck, sys);
  const auto s1 = step(sys, s0, 0.01);
  const Eigen::VectorXd U1 = CrankNicolson(sys, 0.01).step(sys.flatten(s0));
  CHECK((sys.flatten(s1) - U1).norm() <= 1e-13 * U1.norm());
}

TEST_CASE("reverse step does not contract") {
  const auto sys = testing::small_system(testing::wd_model(), 0.5, 16, 16, 8);
  const double dt = 0.05;
  const SparseMatrix I = [&] {
    SparseMatrix e(sys.dim(), sys.dim());
    e.setIdentity();
    return e;
  }();
  // Inverse of a Crank-Nicolson step: (I + dt/2 A) U_prev = (I - dt/2 A) U.
  Eigen::SparseLU<SparseMatrix> lu(SparseMatrix(I + 0.5 * dt * sys.generator()));
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd U = testing::random_vector(sys.dim(), rng);
    const Eigen::VectorXd back = lu.solve(SparseMatrix(I - 0.5 * dt * sys.generator()) * U);
    CHECK(sys.energy(back) >= sys.energy(U) * (1 - 1e-12));
  }
}

TEST_CASE("local error is third order") {
  const auto sys = testing::small_system(testing::wd_model(), 0.5, 16, 16, 8);
  const Eigen::VectorXd U0 = pluck(sys);
  std::vector<double> err;
  for (double dt : {1e-3, 5e-4, 2.5e-4}) {
    const Eigen::VectorXd one = CrankNicolson(sys, dt).step(U0);
    const CrankNicolson half(sys, dt / 2);
    const Eigen::VectorXd two = half.step(half.step(U0));
    err.push_back(testing::m_norm(sys, one - two));
  }
  CHECK(std::log2(err[0] / err[1]) >= 2.7);
  CHECK(std::log2(err[1] / err[2]) >= 2.7);
}

TEST_CASE("energy identity converges at second order") {
  const auto sys = testing::small_system(testing::wd_model(), 0.5, 64, 64, 128);
  const Eigen::VectorXd U0 = pluck(sys);
  std::vector<double> r;
  for (double dt : {4e-3, 2e-3, 1e-3}) r.push_back(energy_identity_residual(simulate(sys, U0, {dt, 1.0, 1})));
  CHECK(std::log2(r[0] / r[1]) >= 1.8);
  CHECK(std::log2(r[1] / r[2]) >= 1.8);
}

TEST_CASE("energy scales quadratically with the data") {
  const auto sys = testing::small_system(testing::sd_model(), 0.5, 16, 16, 8);
  const Eigen::VectorXd U0 = pluck(sys);
  const auto a = simulate(sys, U0, {0.05, 2.0, 5});
  const auto b = simulate(sys, 3.0 * U0, {0.05, 2.0, 5});
  REQUIRE(a.size() == b.size());
  for (std::size_t n = 0; n < a.size(); ++n) CHECK(b.energy[n] == Approx(9.0 * a.energy[n]).epsilon(1e-12));
}

TEST_CASE("pluck energy decays monotonically") {
  const auto sys = testing::small_system(testing::wd_model(), 0.5, 32, 32, 16);
  const auto tr = simulate(sys, pluck(sys), {0.0, 50.0, 10});
  CHECK(tr.energy.front() > 0.0);
  for (std::size_t n = 1; n < tr.size(); ++n) CHECK(tr.energy[n] <= tr.energy[n - 1] * (1 + 1e-12));
  CHECK(tr.energy.back() < tr.energy.front());
  for (double d : tr.dissipation) CHECK(d <= 1e-12);
}

TEST_CASE("memory-only and mixed heat laws differ") {
  const auto model = testing::wd_model();
  const auto gp = testing::small_system(model, 1.0, 32, 32, 16);
  const auto mixed = testing::small_system(model, 0.5, 32, 32, 16);
  const Eigen::VectorXd thermal_gp = gp.flatten(project_initial_data(Preset::Thermal, gp));
  const Eigen::VectorXd thermal_mixed = mixed.flatten(project_initial_data(Preset::Thermal, mixed));
  const auto a = simulate(gp, thermal_gp, {0.02, 2.0, 10});
  const auto b = simulate(mixed, thermal_mixed, {0.02, 2.0, 10});
  CHECK(a.energy.front() == Approx(b.energy.front()));
  CHECK(std::abs(a.energy.back() - b.energy.back()) > 1e-3 * a.energy.front());
}
