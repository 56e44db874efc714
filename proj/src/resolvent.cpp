#include "degenwave/resolvent.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "degenwave/errors.hpp"

namespace degenwave {

namespace {

using ComplexLU = Eigen::SparseLU<ComplexSparse, Eigen::COLAMDOrdering<int>>;

constexpr double kConditionLimit = 1e14;

std::shared_ptr<ComplexLU> factorize(ComplexSparse S, Complex z) {
  S.makeCompressed();
  auto lu = std::make_shared<ComplexLU>();
  lu->analyzePattern(S);
  lu->factorize(S);
  if (lu->info() != Eigen::Success)
    throw Error(ErrorCode::NearSingular, "shifted matrix is singular at z = " + std::to_string(z.real()) + " + " +
                                             std::to_string(z.imag()) + "i");
  return lu;
}

ComplexVector checked(ComplexVector x, Complex z) {
  if (!x.allFinite())
    throw Error(ErrorCode::NearSingular, "non-finite shifted solve at z = " + std::to_string(z.real()) + " + " +
                                             std::to_string(z.imag()) + "i");
  return x;
}

ComplexVector real_solve(const Eigen::SimplicialLLT<SparseMatrix>& llt, const ComplexVector& x) {
  const Eigen::VectorXd re = llt.solve(Eigen::VectorXd(x.real()));
  const Eigen::VectorXd im = llt.solve(Eigen::VectorXd(x.imag()));
  ComplexVector out(x.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

ComplexVector real_apply(const SparseMatrix& M, const ComplexVector& x) {
  ComplexVector out(M.rows());
  out.real() = M * Eigen::VectorXd(x.real());
  out.imag() = M * Eigen::VectorXd(x.imag());
  return out;
}

double metric_norm(const ResolventProblem& p, const ComplexVector& x) {
  return std::sqrt(std::max(0.0, x.dot(p.metric_apply(x)).real()));
}

ComplexVector start_vector(Index n) {
  std::mt19937_64 rng(20240611ULL);
  std::normal_distribution<double> gauss;
  ComplexVector x(n);
  for (Index i = 0; i < n; ++i) x[i] = Complex(gauss(rng), gauss(rng));
  return x;
}

// -- full sparse LU --------------------------------------------------------

class SparseShifted final : public ShiftedSolver {
 public:
  SparseShifted(std::shared_ptr<ComplexLU> lu, Complex z) : lu_(std::move(lu)), z_(z) {}
  ComplexVector solve(const ComplexVector& F) const override { return checked(lu_->solve(F), z_); }
  ComplexVector solve_adjoint(const ComplexVector& T) const override { return checked(lu_->adjoint().solve(T), z_); }

 private:
  std::shared_ptr<ComplexLU> lu_;
  Complex z_;
};

// -- history-eliminated route ------------------------------------------------

class ReducedShifted final : public ShiftedSolver {
 public:
  ReducedShifted(const GeneratorSystem& sys, const SparseMatrix& heat_flux, std::shared_ptr<ComplexLU> lu, Complex z,
                 Complex rho, Complex tau, ComplexVector c)
      : sys_(&sys), heat_flux_(&heat_flux), lu_(std::move(lu)), z_(z), rho_(rho), tau_(tau), c_(std::move(c)) {}

  ComplexVector solve(const ComplexVector& F) const override {
    const auto& L = sys_->layout();
    const Index Nw = L.wave, nw = L.shared(), Nh = L.heat, Ns = L.history_levels;
    const double cm = sys_->c() * sys_->m();
    const auto& beta = sys_->history_weights();

    Eigen::MatrixXcd g(Nh, Ns);
    ComplexVector G = ComplexVector::Zero(Nh);
    ComplexVector prev = ComplexVector::Zero(Nh);
    for (Index k = 1; k <= Ns; ++k) {
      prev = rho_ * prev + tau_ * F.segment(L.gamma(k, 0), Nh);
      g.col(k - 1) = prev;
      G += beta[k - 1] * prev;
    }
    ComplexVector rhs(Nw + nw);
    rhs.head(Nw) = F.head(Nw);
    rhs.tail(nw) = sys_->shared_mass().cwiseProduct(F.segment(Nw, nw));
    if (Ns > 0) rhs.tail(nw) -= cm * real_apply(*heat_flux_, G);
    const ComplexVector uw = checked(lu_->solve(rhs), z_);

    ComplexVector out(L.total());
    out.head(Nw + nw) = uw;
    const ComplexVector Pyw = uw.segment(Nw + L.interface(), Nh);
    for (Index k = 1; k <= Ns; ++k) out.segment(L.gamma(k, 0), Nh) = c_[k - 1] * Pyw + g.col(k - 1);
    return out;
  }

  ComplexVector solve_adjoint(const ComplexVector& T) const override {
    const auto& L = sys_->layout();
    const Index Nw = L.wave, nw = L.shared(), Nh = L.heat, Ns = L.history_levels;
    const double cm = sys_->c() * sys_->m();
    const auto& beta = sys_->history_weights();

    ComplexVector rhs = T.head(Nw + nw);
    for (Index k = 1; k <= Ns; ++k)
      rhs.segment(Nw + L.interface(), Nh) += std::conj(c_[k - 1]) * T.segment(L.gamma(k, 0), Nh);
    const ComplexVector a = checked(lu_->adjoint().solve(rhs), z_);

    ComplexVector out(L.total());
    out.head(Nw) = a.head(Nw);
    out.segment(Nw, nw) = sys_->shared_mass().cwiseProduct(a.tail(nw));
    if (Ns > 0) {
      const ComplexVector Gadj = -cm * real_apply(SparseMatrix(heat_flux_->transpose()), a.tail(nw));
      ComplexVector q = ComplexVector::Zero(Nh);
      for (Index k = Ns; k >= 1; --k) {
        q = T.segment(L.gamma(k, 0), Nh) + beta[k - 1] * Gadj + std::conj(rho_) * q;
        out.segment(L.gamma(k, 0), Nh) = std::conj(tau_) * q;
      }
    }
    return out;
  }

 private:
  const GeneratorSystem* sys_;
  const SparseMatrix* heat_flux_;
  std::shared_ptr<ComplexLU> lu_;
  Complex z_, rho_, tau_;
  ComplexVector c_;
};

// -- norms -------------------------------------------------------------------

struct NormResult {
  double value;
  int iterations;
};

NormResult power_norm(const ResolventProblem& p, const ShiftedSolver& solver, const ResolventOptions& opt) {
  ComplexVector x = start_vector(p.dim());
  x /= metric_norm(p, x);
  double value = 0.0;
  int it = 0;
  for (it = 1; it <= opt.max_iterations; ++it) {
    const ComplexVector y = solver.solve(x);
    const ComplexVector My = p.metric_apply(y);
    const double v = std::sqrt(std::max(0.0, y.dot(My).real()));
    ComplexVector next = p.metric_solve(solver.solve_adjoint(My));
    const double nn = metric_norm(p, next);
    if (!(nn > 0.0) || !std::isfinite(nn)) {
      value = v;
      break;
    }
    x = next / nn;
    const bool done = std::abs(v - value) <= opt.tolerance * v;
    value = v;
    if (done) break;
  }
  return {value, it};
}

double dense_norm(const ResolventProblem& p, Complex z) {
  const Eigen::MatrixXd M = p.dense_metric();
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "metric is not positive definite");
  const Eigen::MatrixXcd Lc = Eigen::MatrixXd(llt.matrixL()).cast<Complex>();
  Eigen::MatrixXcd X = -p.dense_generator();
  X.diagonal().array() += z;
  // B = L^T (zI - A) L^{-T}
  Lc.transpose().triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(X);
  const Eigen::MatrixXcd B = Lc.transpose().triangularView<Eigen::Upper>() * X;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
  const double smin = svd.singularValues().minCoeff();
  if (!(smin > 0.0)) throw Error(ErrorCode::NearSingular, "shifted matrix is singular");
  return 1.0 / smin;
}

bool use_dense(const ResolventProblem& p, const ResolventOptions& opt) {
  return opt.method == ResolventMethod::Dense || (opt.method == ResolventMethod::Auto && p.dim() <= opt.dense_cap);
}

double guarded(double value, Complex z) {
  if (!std::isfinite(value) || value * std::max(1.0, std::abs(z)) > kConditionLimit)
    throw Error(ErrorCode::NearSingular, "resolvent norm exceeds 1e14 at lambda = " + std::to_string(z.imag()));
  return value;
}

double norm_at(const ResolventProblem& p, const ShiftedSolver* solver, Complex z, const ResolventOptions& opt) {
  if (use_dense(p, opt)) return guarded(dense_norm(p, z), z);
  if (solver) return guarded(power_norm(p, *solver, opt).value, z);
  const auto s = p.factor(z);
  return guarded(power_norm(p, *s, opt).value, z);
}

// Orthogonal iteration on (zI - A)^{-1} with a Rayleigh-Ritz step; returns the
// `count` eigenvalues of A nearest to z, nearest first.
std::vector<Complex> subspace_iteration(const ShiftedSolver& solver, Index n, Complex z, int count, int iterations) {
  const Index p = std::min<Index>(count, n);
  std::mt19937_64 rng(20240611ULL);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd X(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = Complex(gauss(rng), gauss(rng));
  auto orthonormalize = [&](const Eigen::MatrixXcd& Y) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Y);
    return Eigen::MatrixXcd(qr.householderQ() * Eigen::MatrixXcd::Identity(n, p));
  };
  X = orthonormalize(X);
  Eigen::VectorXcd last = Eigen::VectorXcd::Zero(p);
  std::vector<Complex> mu(static_cast<std::size_t>(p), z);
  for (int it = 0; it < iterations; ++it) {
    Eigen::MatrixXcd Y(n, p);
    for (Index j = 0; j < p; ++j) Y.col(j) = solver.solve(X.col(j));
    const Eigen::MatrixXcd H = X.adjoint() * Y;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H, false);
    Eigen::VectorXcd theta = es.eigenvalues();
    std::sort(theta.data(), theta.data() + p, [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
    X = orthonormalize(Y);
    const bool done = it > 0 && (theta - last).norm() <= 1e-10 * theta.norm();
    last = theta;
    if (done) break;
  }
  for (Index j = 0; j < p; ++j)
    if (std::abs(last[j]) > 0.0) mu[std::size_t(j)] = z - 1.0 / last[j];
  std::sort(mu.begin(), mu.end(), [z](Complex a, Complex b) { return std::abs(a - z) < std::abs(b - z); });
  return mu;
}

}  // namespace

// ---------------------------------------------------------------------------

SparseMetricProblem::SparseMetricProblem(SparseMatrix metric) : metric_(std::move(metric)) {
  factor_ = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(metric_);
  if (factor_->info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "metric is not positive definite");
}

ComplexVector SparseMetricProblem::metric_apply(const ComplexVector& x) const { return real_apply(metric_, x); }
ComplexVector SparseMetricProblem::metric_solve(const ComplexVector& x) const { return real_solve(*factor_, x); }

SparseResolvent::SparseResolvent(ComplexSparse generator, SparseMatrix metric)
    : SparseMetricProblem(std::move(metric)), generator_(std::move(generator)) {
  if (generator_.rows() != dim() || generator_.cols() != dim())
    throw Error(ErrorCode::DomainError, "generator and metric sizes differ");
}

SparseResolvent::SparseResolvent(const SparseMatrix& generator, SparseMatrix metric)
    : SparseResolvent(ComplexSparse(generator.cast<Complex>()), std::move(metric)) {}

std::unique_ptr<ShiftedSolver> SparseResolvent::factor(Complex z) const {
  ComplexSparse I(dim(), dim());
  I.setIdentity();
  ComplexSparse S = z * I - generator_;
  return std::make_unique<SparseShifted>(factorize(std::move(S), z), z);
}

SparseResolvent diagonal_resolvent(const ComplexVector& eigenvalues) {
  const Index n = eigenvalues.size();
  ComplexSparse A(n, n);
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, eigenvalues[i]);
  A.setFromTriplets(t.begin(), t.end());
  SparseMatrix I(n, n);
  I.setIdentity();
  return SparseResolvent(std::move(A), std::move(I));
}

GeneratorResolvent::GeneratorResolvent(const GeneratorSystem& system) : system_(&system) {
  const auto& L = system.layout();
  const Index Nw = L.wave, nw = L.shared(), Nh = L.heat;
  SparseMatrix Pu(Nw, nw), Py(Nh, nw);
  std::vector<Eigen::Triplet<double>> tu, ty;
  for (Index j = 1; j <= Nw; ++j) tu.emplace_back(j - 1, L.velocity(j), 1.0);
  for (Index l = 0; l < Nh; ++l) ty.emplace_back(l, L.temperature(l), 1.0);
  Pu.setFromTriplets(tu.begin(), tu.end());
  Py.setFromTriplets(ty.begin(), ty.end());
  coupling_ = SparseMatrix(Pu.transpose()) * system.wave_stiffness();
  heat_flux_ = SparseMatrix(Py.transpose()) * system.heat_stiffness();
  heat_form_ = heat_flux_ * Py;
}

std::unique_ptr<ShiftedSolver> GeneratorResolvent::factor(Complex z) const {
  const auto& sys = *system_;
  const auto& L = sys.layout();
  const Index Nw = L.wave, nw = L.shared(), Ns = L.history_levels;
  const double ds = sys.history_step();
  const Complex rho = 1.0 / (1.0 + z * ds);
  const Complex tau = ds / (1.0 + z * ds);
  ComplexVector c(Ns);
  Complex kappa = sys.c() * (1.0 - sys.m());
  Complex ck = 0.0;
  for (Index k = 0; k < Ns; ++k) {
    ck = rho * ck + tau;
    c[k] = ck;
    kappa += sys.c() * sys.m() * sys.history_weights()[k] * ck;
  }

  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(std::size_t(2 * Nw + coupling_.nonZeros() + nw + heat_form_.nonZeros()));
  for (Index j = 0; j < Nw; ++j) {
    t.emplace_back(j, j, z);
    t.emplace_back(j, Nw + j, -1.0);
  }
  for (Index col = 0; col < coupling_.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(coupling_, col); it; ++it) t.emplace_back(Nw + it.row(), it.col(), it.value());
  for (Index i = 0; i < nw; ++i) t.emplace_back(Nw + i, Nw + i, z * sys.shared_mass()[i]);
  for (Index col = 0; col < heat_form_.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(heat_form_, col); it; ++it)
      t.emplace_back(Nw + it.row(), Nw + it.col(), kappa * it.value());
  ComplexSparse S(Nw + nw, Nw + nw);
  S.setFromTriplets(t.begin(), t.end());
  return std::make_unique<ReducedShifted>(sys, heat_flux_, factorize(std::move(S), z), z, rho, tau, std::move(c));
}

ComplexVector GeneratorResolvent::metric_apply(const ComplexVector& x) const { return real_apply(system_->gram(), x); }
ComplexVector GeneratorResolvent::metric_solve(const ComplexVector& x) const {
  return real_solve(system_->gram_factor(), x);
}
Eigen::MatrixXcd GeneratorResolvent::dense_generator() const {
  return Eigen::MatrixXd(system_->generator()).cast<Complex>();
}

// ---------------------------------------------------------------------------

double resolvent_norm(const ResolventProblem& problem, double lambda, const ResolventOptions& options) {
  return norm_at(problem, nullptr, Complex(0.0, lambda), options);
}

double resolvent_norm(const GeneratorSystem& system, double lambda, const ResolventOptions& options) {
  return resolvent_norm(GeneratorResolvent(system), lambda, options);
}

std::vector<Complex> nearest_eigenvalues(const ResolventProblem& problem, Complex z, int count, int iterations) {
  if (count < 1) throw Error(ErrorCode::DomainError, "count must be >= 1");
  const auto solver = problem.factor(z);
  return subspace_iteration(*solver, problem.dim(), z, count, iterations);
}

std::vector<double> log_spaced(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw Error(ErrorCode::DomainError, "log-spaced grid needs 0 < lo < hi and >= 2 points");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) out[std::size_t(i)] = std::exp(a + (b - a) * i / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ResolventSweep resolvent_growth(const ResolventProblem& problem, const std::vector<double>& lambdas,
                                const ResolventOptions& options) {
  if (lambdas.size() < 12) throw Error(ErrorCode::DomainError, "resolvent sweep needs at least 12 frequencies");
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (!(lambdas[i] > 0.0) || (i > 0 && !(lambdas[i] > lambdas[i - 1])))
      throw Error(ErrorCode::DomainError, "resolvent frequencies must be positive and increasing");
  if (lambdas.back() < 100.0) throw Error(ErrorCode::DomainError, "resolvent sweep needs max lambda >= 100");

  const std::size_t n = lambdas.size();
  std::vector<ResolventSample> samples(n);
  std::vector<std::exception_ptr> errors(n);

  auto evaluate = [&](std::size_t i) {
    ResolventSample s;
    s.lambda = lambdas[i];
    const Complex z(0.0, s.lambda);
    const auto solver = problem.factor(z);
    s.norm = norm_at(problem, solver.get(), z, options);
    const auto ritz = subspace_iteration(*solver, problem.dim(), z, options.ritz_count, options.ritz_iterations);
    s.nearest = ritz.front();
    s.envelope = s.norm;
    s.envelope_lambda = s.lambda;
    // Resonances inside this sample's log cell.
    const double lo = i > 0 ? std::sqrt(lambdas[i - 1] * lambdas[i]) : s.lambda / std::sqrt(lambdas[1] / lambdas[0]);
    const double hi = i + 1 < n ? std::sqrt(lambdas[i] * lambdas[i + 1])
                                : s.lambda * std::sqrt(lambdas[n - 1] / lambdas[n - 2]);
    for (const Complex& mu : ritz) {
      const double w = std::abs(mu.imag());
      if (w < lo || w > hi) continue;
      const double peak = std::abs(w - s.lambda) > 1e-12 * s.lambda
                              ? norm_at(problem, nullptr, Complex(0.0, w), options)
                              : s.norm;
      if (peak > s.peak_norm) {
        s.peak_norm = peak;
        s.peak_lambda = w;
      }
    }
    if (s.peak_norm > s.envelope) {
      s.envelope = s.peak_norm;
      s.envelope_lambda = s.peak_lambda;
    }
    samples[i] = s;
  };

  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, unsigned(n));
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        evaluate(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ResolventSweep sweep;
  sweep.lambdas = lambdas;
  sweep.samples = samples;
  for (const auto& s : samples) sweep.norms.push_back(s.norm);

  const std::size_t first = n / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = double(n - first);
  for (std::size_t i = first; i < n; ++i) {
    const double x = std::log(samples[i].envelope_lambda), y = std::log(samples[i].envelope);
    sx += x;
    sy += y;
  }
  const double mx = sx / cnt, my = sy / cnt;
  for (std::size_t i = first; i < n; ++i) {
    const double x = std::log(samples[i].envelope_lambda) - mx, y = std::log(samples[i].envelope) - my;
    sxx += x * x;
    sxy += x * y;
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DomainError, "resolvent fit window has no frequency spread");
  sweep.fitted_exponent = sxy / sxx;
  sweep.fitted_C = std::exp(my - sweep.fitted_exponent * mx);
  sweep.fit_points = n - first;
  return sweep;
}

}  // namespace degenwave
