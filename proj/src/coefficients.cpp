#include "degenwave/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "degenwave/errors.hpp"

namespace degenwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// |e| below this is treated as the logarithmic case of int x^(e-1).
constexpr double kExponentZero = 1e-14;

// int_{from}^{to} scale * x^power dx, for 0 <= from <= to.
double power_integral(double scale, double power, double from, double to) {
  if (scale == 0.0) return 0.0;
  const double e = power + 1.0;
  if (std::abs(e) < kExponentZero) return scale * std::log(to / from);
  return scale * (std::pow(to, e) - std::pow(from, e)) / e;
}

double quad(auto&& f, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, lo, hi, 12, 1e-13);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(l0 + (l1 - l0) * double(i) / double(n - 1));
  g.back() = hi;
  return g;
}

struct Suprema {
  double K_a = 0.0, M1 = 0.0, M2 = 0.0;
};

Suprema suprema_on(const CoefficientModel& model, const std::vector<double>& xs) {
  Suprema s;
  for (double x : xs) {
    const double a = model.a(x);
    const double ratio_a = x * model.a_prime(x) / a;
    const double ratio_b = x * model.b(x) / a;
    s.K_a = std::max(s.K_a, std::abs(ratio_a));
    s.M1 = std::max(s.M1, std::abs(ratio_a - ratio_b));
    s.M2 = std::max(s.M2, std::abs(ratio_b));
  }
  return s;
}

}  // namespace

std::string_view to_string(DegeneracyClass c) noexcept {
  switch (c) {
    case DegeneracyClass::NonDegenerate: return "NonDegenerate";
    case DegeneracyClass::WeaklyDegenerate: return "WeaklyDegenerate";
    case DegeneracyClass::StronglyDegenerate: return "StronglyDegenerate";
    case DegeneracyClass::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

DegeneracyClass classify_degeneracy(double K_a) noexcept {
  if (K_a >= 2.0) return DegeneracyClass::Unsupported;
  if (K_a >= 1.0) return DegeneracyClass::StronglyDegenerate;
  if (K_a > 1e-12) return DegeneracyClass::WeaklyDegenerate;
  return DegeneracyClass::NonDegenerate;
}

double default_wave_grading(double K_a) noexcept {
  if (K_a <= 1e-12) return 1.0;
  if (K_a >= 1.0) return 2.0;
  return std::min(2.0, 2.0 / (2.0 - K_a));
}

// ---------------------------------------------------------------------------
// construction

CoefficientModel::CoefficientModel(PowerLawFamily f) : family_(f) {
  const double e = f.b_exponent - f.a_exponent + 1.0;
  integrable_ = f.b_amplitude == 0.0 || e > kExponentZero;
}

CoefficientModel::CoefficientModel(Sampled s) : family_(std::move(s)) {}

CoefficientModel CoefficientModel::power_law(double a_exponent, double b_amplitude, double b_exponent) {
  if (!std::isfinite(a_exponent) || !std::isfinite(b_amplitude) || !std::isfinite(b_exponent))
    throw Error(ErrorCode::DomainError, "power-law coefficients must be finite");
  if (a_exponent < 0.0 || b_exponent < 0.0)
    throw Error(ErrorCode::DomainError, "power-law exponents must be >= 0");
  return CoefficientModel(PowerLawFamily{a_exponent, b_amplitude, b_exponent});
}

CoefficientModel CoefficientModel::sampled(std::vector<double> x, std::vector<double> a, std::vector<double> b) {
  const std::size_t n = x.size();
  if (a.size() != n || b.size() != n)
    throw Error(ErrorCode::DomainError, "coefficient table columns have different lengths");
  if (n < 8) throw Error(ErrorCode::NonDifferentiable, "coefficient table needs at least 8 points to estimate a'");
  if (x.front() != 0.0 || x.back() != 1.0)
    throw Error(ErrorCode::DomainError, "coefficient table must span [0, 1] with x_0 = 0 and x_n = 1");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x[i] > x[i - 1])) throw Error(ErrorCode::DomainError, "coefficient table abscissae must increase");
    if (!(a[i] > 0.0)) throw Error(ErrorCode::DomainError, "a must be positive on (0,1]");
  }
  if (a[0] < 0.0) throw Error(ErrorCode::DomainError, "a(0) must be >= 0");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw Error(ErrorCode::DomainError, "coefficient table contains non-finite values");

  Sampled s;
  s.data = SampledFamily{std::move(x), std::move(a), std::move(b)};
  const auto& X = s.data.x;
  const auto& A = s.data.a;
  const auto& B = s.data.b;

  s.a_power_head = A[0] == 0.0;
  if (s.a_power_head) s.kappa_a = std::log(A[2] / A[1]) / std::log(X[2] / X[1]);
  s.b_power_head = s.a_power_head && B[0] == 0.0 && B[1] != 0.0 && B[2] != 0.0 && (B[1] > 0.0) == (B[2] > 0.0);
  if (s.b_power_head) s.kappa_b = std::log(B[2] / B[1]) / std::log(X[2] / X[1]);

  // Nodal elasticities x a'/a: three-point centered differences of log a in
  // log x inside, one-sided at x = 1; exact for power laws.
  s.a_elasticity.resize(n);
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double hm = std::log(X[i] / X[i - 1]), hp = std::log(X[i + 1] / X[i]);
    const double fm = std::log(A[i - 1]), f0 = std::log(A[i]), fp = std::log(A[i + 1]);
    s.a_elasticity[i] = (hm * hm * fp - hp * hp * fm - (hm * hm - hp * hp) * f0) / (hm * hp * (hm + hp));
  }
  s.a_elasticity[n - 1] = std::log(A[n - 1] / A[n - 2]) / std::log(X[n - 1] / X[n - 2]);
  if (s.a_power_head) {
    s.a_elasticity[1] = s.kappa_a;
  } else {
    const double hm = X[1] - X[0], hp = X[2] - X[1];
    const double slope = (hm * hm * A[2] - hp * hp * A[0] - (hm * hm - hp * hp) * A[1]) / (hm * hp * (hm + hp));
    s.a_elasticity[1] = slope * X[1] / A[1];
  }
  s.a_elasticity[0] = s.a_power_head ? s.kappa_a : 0.0;

  bool integrable = true;
  if (s.a_power_head) {
    if (s.b_power_head) {
      integrable = s.kappa_b - s.kappa_a > -1.0;
    } else if (B[0] != 0.0) {
      integrable = s.kappa_a < 1.0;
    } else if (B[1] != 0.0) {
      integrable = s.kappa_a < 2.0;
    }
  }

  CoefficientModel model(std::move(s));
  model.integrable_ = integrable;

  // Cumulative int_{x_1}^{x_i} b/a over the regular cells, then shift to the 1/2 anchor.
  auto& S = std::get<Sampled>(model.family_);
  const auto& XS = S.data.x;
  S.log_ratio.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i)
    S.log_ratio[i + 1] = S.log_ratio[i] + model.sampled_ratio_integral(i, XS[i], XS[i + 1]);
  if (integrable) S.log_ratio[0] = -model.sampled_ratio_integral(0, 0.0, XS[1]);
  else S.log_ratio[0] = kNaN;
  const std::size_t half = model.cell_of(0.5);
  const double anchor = half == 0 ? S.log_ratio[1] - model.sampled_ratio_integral(0, 0.5, XS[1])
                                  : S.log_ratio[half] + model.sampled_ratio_integral(half, XS[half], 0.5);
  for (double& v : S.log_ratio) v -= anchor;
  return model;
}

CoefficientModel CoefficientModel::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open coefficient table " + path.string());
  std::vector<double> x, a, b;
  std::string line;
  std::size_t line_no = 0;
  int columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (x.empty() && columns == 0) continue;  // header
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    if (row.size() != 2 && row.size() != 3)
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected 2 or 3 columns");
    if (columns == 0) columns = int(row.size());
    if (int(row.size()) != columns)
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
    x.push_back(row[0]);
    a.push_back(row[1]);
    b.push_back(columns == 3 ? row[2] : 0.0);
  }
  return sampled(std::move(x), std::move(a), std::move(b));
}

const SampledFamily* CoefficientModel::sampled_family() const noexcept {
  const auto* s = std::get_if<Sampled>(&family_);
  return s ? &s->data : nullptr;
}

double CoefficientModel::first_positive_node() const noexcept {
  const auto* s = std::get_if<Sampled>(&family_);
  return s ? s->data.x[1] : 0.0;
}

// ---------------------------------------------------------------------------
// evaluation

std::size_t CoefficientModel::cell_of(double x) const {
  const auto& X = std::get<Sampled>(family_).data.x;
  auto it = std::upper_bound(X.begin(), X.end(), x);
  std::size_t i = it == X.begin() ? 0 : std::size_t(it - X.begin()) - 1;
  return std::min(i, X.size() - 2);
}

double CoefficientModel::a(double x) const {
  if (const auto* p = std::get_if<PowerLawFamily>(&family_)) return std::pow(x, p->a_exponent);
  const auto& s = std::get<Sampled>(family_);
  const auto& X = s.data.x;
  const auto& A = s.data.a;
  const std::size_t i = cell_of(x);
  if (i == 0) {
    if (s.a_power_head) return x <= 0.0 ? 0.0 : A[1] * std::pow(x / X[1], s.kappa_a);
    return A[0] + (A[1] - A[0]) * (x - X[0]) / (X[1] - X[0]);
  }
  const double t = std::log(x / X[i]) / std::log(X[i + 1] / X[i]);
  return A[i] * std::exp(std::log(A[i + 1] / A[i]) * t);
}

double CoefficientModel::b(double x) const {
  if (const auto* p = std::get_if<PowerLawFamily>(&family_)) return p->b_amplitude * std::pow(x, p->b_exponent);
  const auto& s = std::get<Sampled>(family_);
  const auto& X = s.data.x;
  const auto& B = s.data.b;
  const std::size_t i = cell_of(x);
  if (i == 0 && s.b_power_head) return x <= 0.0 ? 0.0 : B[1] * std::pow(x / X[1], s.kappa_b);
  return B[i] + (B[i + 1] - B[i]) * (x - X[i]) / (X[i + 1] - X[i]);
}

double CoefficientModel::a_prime(double x) const {
  if (const auto* p = std::get_if<PowerLawFamily>(&family_)) {
    if (p->a_exponent == 0.0) return 0.0;
    return p->a_exponent * std::pow(x, p->a_exponent - 1.0);
  }
  const auto& s = std::get<Sampled>(family_);
  const auto& X = s.data.x;
  const auto& A = s.data.a;
  const std::size_t i = cell_of(x);
  if (i == 0) {
    if (!s.a_power_head) return (A[1] - A[0]) / (X[1] - X[0]);
    if (x > 0.0) return s.kappa_a * a(x) / x;
    return s.kappa_a > 1.0 ? 0.0 : (s.kappa_a == 1.0 ? A[1] / X[1] : kInf);
  }
  const double t = std::log(x / X[i]) / std::log(X[i + 1] / X[i]);
  return (s.a_elasticity[i] + (s.a_elasticity[i + 1] - s.a_elasticity[i]) * t) * a(x) / x;
}

double CoefficientModel::sampled_ratio_integral(std::size_t cell, double from, double to) const {
  const auto& s = std::get<Sampled>(family_);
  const auto& X = s.data.x;
  const auto& A = s.data.a;
  const auto& B = s.data.b;
  if (cell == 0 && s.a_power_head) {
    // a = A1 (x/X1)^ka ; b either B1 (x/X1)^kb or linear B0 + slope x.
    const double scale = std::pow(X[1], s.kappa_a) / A[1];
    if (s.b_power_head)
      return power_integral(scale * B[1] * std::pow(X[1], -s.kappa_b), s.kappa_b - s.kappa_a, from, to);
    const double slope = (B[1] - B[0]) / (X[1] - X[0]);
    return power_integral(scale * B[0], -s.kappa_a, from, to) +
           power_integral(scale * slope, 1.0 - s.kappa_a, from, to);
  }
  if (cell == 0) return quad([this](double x) { return b(x) / a(x); }, from, to);
  // a = A_i (x/X_i)^p and b = c0 + slope x on the cell.
  const double p = std::log(A[cell + 1] / A[cell]) / std::log(X[cell + 1] / X[cell]);
  const double slope = (B[cell + 1] - B[cell]) / (X[cell + 1] - X[cell]);
  const double c0 = B[cell] - slope * X[cell];
  const double scale = std::pow(X[cell], p) / A[cell];
  return power_integral(scale * c0, -p, from, to) + power_integral(scale * slope, 1.0 - p, from, to);
}

double CoefficientModel::eta(double x) const {
  if (!integrable_) throw Error(ErrorCode::NonIntegrableDrift, "b/a is not integrable near x = 0");
  if (const auto* p = std::get_if<PowerLawFamily>(&family_)) {
    if (p->b_amplitude == 0.0) return 1.0;
    const double e = p->b_exponent - p->a_exponent + 1.0;
    return std::exp(p->b_amplitude * (std::pow(x, e) - std::pow(0.5, e)) / e);
  }
  const auto& s = std::get<Sampled>(family_);
  const std::size_t i = cell_of(x);
  if (i == 0) return std::exp(s.log_ratio[1] - sampled_ratio_integral(0, x, s.data.x[1]));
  return std::exp(s.log_ratio[i] + sampled_ratio_integral(i, s.data.x[i], x));
}

double CoefficientModel::eta_max() const {
  if (const auto* p = std::get_if<PowerLawFamily>(&family_)) {
    if (p->b_amplitude == 0.0) return 1.0;
    return std::max(eta(0.0), eta(1.0));
  }
  const auto& X = std::get<Sampled>(family_).data.x;
  double best = eta(0.0);
  for (std::size_t i = 0; i + 1 < X.size(); ++i)
    for (int k = 0; k < 16; ++k) best = std::max(best, eta(X[i] + (X[i + 1] - X[i]) * (k + 1) / 16.0));
  return best;
}

PointWeights eval_weights(const CoefficientModel& model, double x) {
  if (!(x > 0.0 && x <= 1.0)) throw Error(ErrorCode::DomainError, "x must lie in (0,1], got " + std::to_string(x));
  const double a = model.a(x);
  const double eta = model.eta(x);
  return {a, model.b(x), eta, a / eta};
}

// ---------------------------------------------------------------------------
// hypotheses

CoefficientReport characterize(const CoefficientModel& model) {
  CoefficientReport r;
  r.C_HP = kNaN;
  r.beta_used = kNaN;
  r.b_over_a_integrable = model.b_over_a_integrable();

  if (const auto* p = model.power_law_family()) {
    const double cb = p->b_amplitude;
    const double e = p->b_exponent - p->a_exponent + 1.0;
    r.K_a = p->a_exponent;
    if (cb == 0.0) {
      r.M1 = p->a_exponent;
      r.M2 = 0.0;
    } else if (e > kExponentZero) {
      // x b/a = cb x^e sweeps (0, cb]
      r.M1 = std::max(std::abs(p->a_exponent), std::abs(p->a_exponent - cb));
      r.M2 = std::abs(cb);
    } else if (e > -kExponentZero) {
      r.M1 = std::abs(p->a_exponent - cb);
      r.M2 = std::abs(cb);
    } else {
      r.M1 = kInf;
      r.M2 = kInf;
    }
  } else {
    // Table nodes, a log grid clustered at 0 and evenly spaced points in every
    // cell, doubled until the suprema settle.
    const auto& X = model.sampled_family()->x;
    const double lo = std::min(1e-12, X[1] * 1e-6);
    Suprema prev = suprema_on(model, std::vector<double>(X.begin() + 1, X.end()));
    for (std::size_t n = 4096, per_cell = 8; n <= (std::size_t(1) << 16); n *= 2, per_cell *= 2) {
      std::vector<double> grid = log_grid(lo, 1.0, n);
      for (std::size_t i = 1; i + 1 < X.size(); ++i)
        for (std::size_t k = 1; k < per_cell; ++k) grid.push_back(X[i] + (X[i + 1] - X[i]) * double(k) / double(per_cell));
      Suprema cur = suprema_on(model, grid);
      cur.K_a = std::max(cur.K_a, prev.K_a);
      cur.M1 = std::max(cur.M1, prev.M1);
      cur.M2 = std::max(cur.M2, prev.M2);
      const double change = std::max({std::abs(cur.K_a - prev.K_a) / std::max(1.0, cur.K_a),
                                      std::abs(cur.M1 - prev.M1) / std::max(1.0, cur.M1),
                                      std::abs(cur.M2 - prev.M2) / std::max(1.0, cur.M2)});
      prev = cur;
      if (n > 4096 && change < 1e-6) break;
    }
    r.K_a = prev.K_a;
    r.M1 = prev.M1;
    r.M2 = prev.M2;
  }

  r.degeneracy = classify_degeneracy(r.K_a);
  r.condition1_holds = (r.M1 < 1.0 + r.K_a / 2.0) && (r.M2 < 1.0 - r.K_a / 2.0);
  r.stability_hypotheses_hold = r.b_over_a_integrable && r.condition1_holds &&
                                (r.degeneracy == DegeneracyClass::WeaklyDegenerate ||
                                 r.degeneracy == DegeneracyClass::StronglyDegenerate);

  if (const auto* p = model.power_law_family()) {
    const double mu1 = p->a_exponent, mu2 = p->b_exponent, cb = p->b_amplitude;
    const bool example = (cb == 0.0 || mu1 - mu2 < 1.0) && std::abs(cb) < 1.0 - mu1 / 2.0;
    r.example_criterion = example;
    r.example_consistent = example == (r.condition1_holds && r.b_over_a_integrable);
  }
  return r;
}

double hardy_poincare_constant(const CoefficientModel& model, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::DomainError, "beta must lie in (0,1)");
  double inv_a_max = 0.0;
  if (const auto* p = model.power_law_family()) {
    inv_a_max = std::pow(beta, -p->a_exponent);
  } else {
    for (double x : log_grid(beta, 1.0, 512)) inv_a_max = std::max(inv_a_max, 1.0 / model.a(x));
    for (double x : model.sampled_family()->x)
      if (x >= beta) inv_a_max = std::max(inv_a_max, 1.0 / model.a(x));
  }
  return (4.0 / model.a(1.0) + inv_a_max * kPoincareConstant) * model.eta_max();
}

HardyPoincareBound hardy_poincare_constant(const CoefficientModel& model) {
  HardyPoincareBound best{kInf, kNaN};
  for (int i = 0; i < 32; ++i) {
    const double beta = std::pow(10.0, -3.0 * (1.0 - i / 32.0));
    const double c = hardy_poincare_constant(model, beta);
    if (c < best.C_HP) best = {c, beta};
  }
  return best;
}

CoefficientReport check_hypotheses(const CoefficientModel& model) {
  CoefficientReport r = characterize(model);
  if (r.b_over_a_integrable) {
    const auto hp = hardy_poincare_constant(model);
    r.C_HP = hp.C_HP;
    r.beta_used = hp.beta;
  }
  return r;
}

}  // namespace degenwave
