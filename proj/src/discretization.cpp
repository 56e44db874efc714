#include "degenwave/discretization.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "degenwave/errors.hpp"

namespace degenwave {

using Triplet = Eigen::Triplet<double>;

double Mesh::min_wave_spacing() const noexcept {
  double h = 1.0;
  for (std::size_t j = 1; j < wave_nodes.size(); ++j) h = std::min(h, wave_nodes[j] - wave_nodes[j - 1]);
  return h;
}

Mesh build_mesh(int wave_cells, double grading, int heat_cells, HistoryGrid history) {
  if (wave_cells < 4) throw Error(ErrorCode::DomainError, "wave_cells must be >= 4");
  if (heat_cells < 4) throw Error(ErrorCode::DomainError, "heat_cells must be >= 4");
  if (!(grading >= 1.0) || !std::isfinite(grading)) throw Error(ErrorCode::DomainError, "wave_grading must be >= 1");
  Mesh mesh;
  mesh.grading = grading;
  mesh.history = std::move(history);
  mesh.wave_nodes.resize(std::size_t(wave_cells) + 1);
  for (int j = 0; j <= wave_cells; ++j) mesh.wave_nodes[j] = std::pow(double(j) / wave_cells, grading);
  mesh.wave_nodes.front() = 0.0;
  mesh.wave_nodes.back() = 1.0;
  mesh.heat_nodes.resize(std::size_t(heat_cells) + 1);
  for (int l = 0; l <= heat_cells; ++l) mesh.heat_nodes[l] = 1.0 + double(l) / heat_cells;
  mesh.heat_nodes.back() = 2.0;
  return mesh;
}

namespace {

// Face-weighted stiffness sum_f k_f (u_f - u_{f-1})^2 over faces 1..N with the
// left Dirichlet node eliminated (wave) or the right one (heat).
SparseMatrix tridiagonal_stiffness(const std::vector<double>& face_weight, bool eliminate_left) {
  const Index n = Index(face_weight.size());
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (Index f = 0; f < n; ++f) {
    // face f joins unknowns (f-1, f) when the left end is eliminated, (f, f+1) otherwise.
    const Index lo = eliminate_left ? f - 1 : f;
    const Index hi = eliminate_left ? f : f + 1;
    const double w = face_weight[f];
    if (lo >= 0) t.emplace_back(lo, lo, w);
    if (hi < n) t.emplace_back(hi, hi, w);
    if (lo >= 0 && hi < n) {
      t.emplace_back(lo, hi, -w);
      t.emplace_back(hi, lo, -w);
    }
  }
  SparseMatrix K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

std::vector<double> wave_face_weights(const CoefficientModel& model, const Mesh& mesh) {
  const auto& x = mesh.wave_nodes;
  std::vector<double> w(x.size() - 1);
  for (std::size_t f = 0; f + 1 < x.size(); ++f) {
    const double mid = 0.5 * (x[f] + x[f + 1]);
    w[f] = model.eta(mid) / (x[f + 1] - x[f]);
  }
  return w;
}

// Lumped 1/sigma mass at wave nodes 1..N from cell-midpoint values of sigma.
Eigen::VectorXd wave_lumped_mass(const CoefficientModel& model, const Mesh& mesh) {
  const auto& x = mesh.wave_nodes;
  const Index n = Index(x.size()) - 1;
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
  for (Index cell = 0; cell < n; ++cell) {
    const double h = x[cell + 1] - x[cell];
    const double share = 0.5 * h / model.sigma(0.5 * (x[cell] + x[cell + 1]));
    if (cell >= 1) mass[cell - 1] += share;
    mass[cell] += share;
  }
  return mass;
}

}  // namespace

GeneratorSystem assemble_system(const CoefficientModel& model, const MemoryKernel& kernel, const Mesh& mesh,
                                double m, double c) {
  if (!(m >= 0.0 && m <= 1.0)) throw Error(ErrorCode::DomainError, "m must lie in [0,1]");
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::DomainError, "c must be > 0");
  if (!model.b_over_a_integrable())
    throw Error(ErrorCode::HypothesisViolation, "b/a is not integrable near 0; the Feller weight is undefined");

  GeneratorSystem sys(model, kernel, mesh);
  sys.m_ = m;
  sys.c_ = c;

  const Index Nw = mesh.wave_cells();
  const Index Nh = mesh.heat_cells();
  const Index Ns = m > 0.0 ? Index(mesh.history.intervals()) : 0;
  DofLayout L{Nw, Nh, Ns};
  sys.layout_ = L;
  const Index nw = L.shared();
  const double hz = mesh.heat_step();
  const double ds = mesh.history.ds;

  const auto face_w = wave_face_weights(model, mesh);
  sys.interface_eta_ = face_w.back() * (mesh.wave_nodes[Nw] - mesh.wave_nodes[Nw - 1]);
  sys.wave_stiffness_ = tridiagonal_stiffness(face_w, true);
  sys.wave_mass_ = wave_lumped_mass(model, mesh);
  sys.heat_stiffness_ = tridiagonal_stiffness(std::vector<double>(std::size_t(Nh), 1.0 / hz), false);

  Eigen::VectorXd& Mw = sys.shared_mass_;
  Mw = Eigen::VectorXd::Zero(nw);
  for (Index j = 1; j <= Nw; ++j) Mw[L.velocity(j)] += sys.wave_mass_[j - 1];
  for (Index l = 0; l < Nh; ++l) Mw[L.temperature(l)] += l == 0 ? 0.5 * hz : hz;

  sys.history_weights_.resize(Ns);
  for (Index k = 1; k <= Ns; ++k) sys.history_weights_[k - 1] = mesh.history.weights[std::size_t(k)];

  const auto& Kw = sys.wave_stiffness_;
  const auto& Kh = sys.heat_stiffness_;
  const double kappa = c * (1.0 - m);
  const Index w0 = L.w_offset();

  std::vector<Triplet> tA, tDiff, tHist;
  tA.reserve(std::size_t(4 * Nw + 3 * Nh + Ns * Nh * 6));

  // u' = v
  for (Index j = 1; j <= Nw; ++j) tA.emplace_back(j - 1, w0 + L.velocity(j), 1.0);

  // v' = -(1/m_j) (K u)_j
  for (Index col = 0; col < Kw.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(Kw, col); it; ++it) {
      const Index row = L.velocity(it.row() + 1);
      tA.emplace_back(w0 + row, L.u_offset() + it.col(), -it.value() / Mw[row]);
    }

  // y' = zeta_xx, zeta = c(1-m) y + c m sum_k beta_k gamma_k
  for (Index col = 0; col < Kh.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(Kh, col); it; ++it) {
      const Index row = L.temperature(it.row());
      if (kappa > 0.0) {
        const double v = -kappa * it.value() / Mw[row];
        tA.emplace_back(w0 + row, w0 + L.temperature(it.col()), v);
        tDiff.emplace_back(row, L.temperature(it.col()), v);
      }
      for (Index k = 1; k <= Ns; ++k) {
        const double v = -c * m * sys.history_weights_[k - 1] * it.value() / Mw[row];
        tA.emplace_back(w0 + row, L.gamma(k, it.col()), v);
        tHist.emplace_back(row, L.gamma(k, it.col()) - L.gamma_offset(), v);
      }
    }

  // gamma_t = -gamma_s + y, first-order upwind with inflow gamma(., 0) = 0
  for (Index k = 1; k <= Ns; ++k)
    for (Index l = 0; l < Nh; ++l) {
      const Index row = L.gamma(k, l);
      tA.emplace_back(row, w0 + L.temperature(l), 1.0);
      tA.emplace_back(row, row, -1.0 / ds);
      if (k > 1) tA.emplace_back(row, L.gamma(k - 1, l), 1.0 / ds);
    }

  const Index n = L.total();
  sys.A_.resize(n, n);
  sys.A_.setFromTriplets(tA.begin(), tA.end());
  sys.diffusion_block_.resize(nw, nw);
  sys.diffusion_block_.setFromTriplets(tDiff.begin(), tDiff.end());
  sys.history_block_.resize(nw, Nh * Ns);
  sys.history_block_.setFromTriplets(tHist.begin(), tHist.end());

  // Gram: blockdiag(K_eta, diag(M_w), c m beta_k K_h)
  std::vector<Triplet> tM;
  tM.reserve(std::size_t(3 * Nw + nw + Ns * 3 * Nh));
  for (Index col = 0; col < Kw.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(Kw, col); it; ++it) tM.emplace_back(it.row(), it.col(), it.value());
  for (Index i = 0; i < nw; ++i) tM.emplace_back(w0 + i, w0 + i, Mw[i]);
  for (Index k = 1; k <= Ns; ++k) {
    const double s = c * m * sys.history_weights_[k - 1];
    for (Index col = 0; col < Kh.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(Kh, col); it; ++it)
        tM.emplace_back(L.gamma(k, it.row()), L.gamma(k, it.col()), s * it.value());
  }
  sys.M_.resize(n, n);
  sys.M_.setFromTriplets(tM.begin(), tM.end());
  sys.MA_ = (sys.M_ * sys.A_).pruned();

  auto factor = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(sys.M_);
  if (factor->info() != Eigen::Success)
    throw Error(ErrorCode::SingularSystem, "energy Gram matrix is not positive definite");
  sys.gram_factor_ = std::move(factor);
  return sys;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd GeneratorSystem::flatten(const DiscreteState& s) const {
  const auto& L = layout_;
  if (s.u.size() != L.wave || s.v.size() != L.wave || s.y.size() != L.heat ||
      (L.history_levels > 0 && (s.gamma.rows() != L.heat || s.gamma.cols() != L.history_levels)))
    throw Error(ErrorCode::DomainError, "state blocks do not match the mesh");
  const double iface_v = s.v[L.wave - 1], iface_y = s.y[0];
  if (std::abs(iface_v - iface_y) > 1e-12 * (1.0 + std::abs(iface_v) + std::abs(iface_y)))
    throw Error(ErrorCode::DomainError, "interface values v(1) and y(1) must coincide");
  Eigen::VectorXd U(L.total());
  U.segment(L.u_offset(), L.wave) = s.u;
  for (Index j = 1; j <= L.wave; ++j) U[L.w_offset() + L.velocity(j)] = s.v[j - 1];
  for (Index l = 1; l < L.heat; ++l) U[L.w_offset() + L.temperature(l)] = s.y[l];
  for (Index k = 1; k <= L.history_levels; ++k)
    for (Index l = 0; l < L.heat; ++l) U[L.gamma(k, l)] = s.gamma(l, k - 1);
  return U;
}

DiscreteState GeneratorSystem::unflatten(const Eigen::VectorXd& U) const {
  const auto& L = layout_;
  if (U.size() != L.total()) throw Error(ErrorCode::DomainError, "state vector has the wrong size");
  DiscreteState s;
  s.u = U.segment(L.u_offset(), L.wave);
  s.v.resize(L.wave);
  s.y.resize(L.heat);
  for (Index j = 1; j <= L.wave; ++j) s.v[j - 1] = U[L.w_offset() + L.velocity(j)];
  for (Index l = 0; l < L.heat; ++l) s.y[l] = U[L.w_offset() + L.temperature(l)];
  s.gamma.resize(L.heat, L.history_levels);
  for (Index k = 1; k <= L.history_levels; ++k)
    for (Index l = 0; l < L.heat; ++l) s.gamma(l, k - 1) = U[L.gamma(k, l)];
  return s;
}

double GeneratorSystem::energy(const Eigen::VectorXd& U) const { return 0.5 * U.dot(M_ * U); }

EnergyDissipation GeneratorSystem::energy_and_dissipation(const Eigen::VectorXd& U) const {
  EnergyDissipation r;
  r.energy = energy(U);
  r.dissipation = U.dot(MA_ * U);
  Eigen::VectorXd y(layout_.heat);
  for (Index l = 0; l < layout_.heat; ++l) y[l] = U[layout_.w_offset() + layout_.temperature(l)];
  r.diffusion_part = -c_ * (1.0 - m_) * y.dot(heat_stiffness_ * y);
  r.memory_part = r.dissipation - r.diffusion_part;
  return r;
}

double GeneratorSystem::interface_temperature(const Eigen::VectorXd& U) const {
  return U[layout_.w_offset() + layout_.interface()];
}

double GeneratorSystem::wave_interface_flux(const Eigen::VectorXd& U) const {
  const Index N = layout_.wave;
  const double h = mesh_.wave_nodes[N] - mesh_.wave_nodes[N - 1];
  return interface_eta_ * (U[N - 1] - U[N - 2]) / h;
}

double GeneratorSystem::heat_interface_flux(const Eigen::VectorXd& U) const {
  const auto& L = layout_;
  auto zeta = [&](Index l) {
    if (l >= L.heat) return 0.0;
    double z = c_ * (1.0 - m_) * U[L.w_offset() + L.temperature(l)];
    for (Index k = 1; k <= L.history_levels; ++k) z += c_ * m_ * history_weights_[k - 1] * U[L.gamma(k, l)];
    return z;
  };
  return (zeta(1) - zeta(0)) / mesh_.heat_step();
}

// ---------------------------------------------------------------------------

Preset parse_preset(std::string_view name) {
  if (name == "zero") return Preset::Zero;
  if (name == "pluck") return Preset::Pluck;
  if (name == "thermal") return Preset::Thermal;
  throw Error(ErrorCode::UnknownPreset, "unknown preset '" + std::string(name) + "' (expected zero, pluck, thermal)");
}

std::string_view to_string(Preset preset) noexcept {
  switch (preset) {
    case Preset::Zero: return "zero";
    case Preset::Pluck: return "pluck";
    case Preset::Thermal: return "thermal";
  }
  return "zero";
}

DiscreteState project_initial_data(Preset preset, const GeneratorSystem& system, double thermal_amplitude) {
  const auto& L = system.layout();
  const auto& mesh = system.mesh();
  constexpr double pi = std::numbers::pi;
  DiscreteState s;
  s.u = Eigen::VectorXd::Zero(L.wave);
  s.v = Eigen::VectorXd::Zero(L.wave);
  s.y = Eigen::VectorXd::Zero(L.heat);
  s.gamma = Eigen::MatrixXd::Zero(L.heat, L.history_levels);
  if (preset == Preset::Zero) return s;

  auto heat_profile = [&](double amplitude) {
    for (Index l = 1; l < L.heat; ++l) s.y[l] = amplitude * std::sin(pi * (mesh.heat_nodes[l] - 1.0));
  };
  if (preset == Preset::Thermal) {
    heat_profile(thermal_amplitude);
    return s;
  }

  const double m = system.m();
  for (Index j = 1; j <= L.wave; ++j) {
    const double x = mesh.wave_nodes[j];
    s.u[j - 1] = m < 1.0 ? std::sin(pi * x) : 0.5 * (1.0 - std::cos(2.0 * pi * x));
  }
  s.u[L.wave - 1] = 0.0;
  if (m < 1.0) {
    // zeta_0 = c(1-m) y_0, so match the one-sided traces on the mesh.
    const double h = mesh.wave_nodes[L.wave] - mesh.wave_nodes[L.wave - 1];
    const double wave_flux = system.interface_eta() * (s.u[L.wave - 1] - s.u[L.wave - 2]) / h;
    const double hz = mesh.heat_step();
    const double unit_heat_flux = system.c() * (1.0 - m) * std::sin(pi * hz) / hz;
    heat_profile(wave_flux / unit_heat_flux);
  } else {
    heat_profile(thermal_amplitude);
  }
  return s;
}

Eigen::VectorXd wave_dirichlet_eigenvalues(const CoefficientModel& model, const Mesh& mesh) {
  const auto face_w = wave_face_weights(model, mesh);
  const SparseMatrix K = tridiagonal_stiffness(face_w, true);
  const Eigen::VectorXd mass = wave_lumped_mass(model, mesh);
  const Index n = K.rows() - 1;  // drop u(1)
  Eigen::MatrixXd S = Eigen::MatrixXd(K).topLeftCorner(n, n);
  const Eigen::VectorXd d = mass.head(n).cwiseSqrt().cwiseInverse();
  S = d.asDiagonal() * S * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double hardy_poincare_ratio(const CoefficientModel& model, const Mesh& mesh, const Eigen::VectorXd& u) {
  const auto& x = mesh.wave_nodes;
  if (u.size() != Index(x.size()) - 1) throw Error(ErrorCode::DomainError, "u must hold values at wave nodes 1..N");
  const Eigen::VectorXd mass = wave_lumped_mass(model, mesh);
  const double weighted = (mass.array() * u.array().square()).sum();
  double grad = 0.0;
  for (std::size_t f = 0; f + 1 < x.size(); ++f) {
    const double left = f == 0 ? 0.0 : u[Index(f) - 1];
    const double d = u[Index(f)] - left;
    grad += d * d / (x[f + 1] - x[f]);
  }
  return weighted / grad;
}

}  // namespace degenwave
