#include "degenwave/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "degenwave/errors.hpp"

namespace degenwave {

DecayKind parse_decay_kind(std::string_view name) {
  if (name == "polynomial") return DecayKind::Polynomial;
  if (name == "exponential") return DecayKind::Exponential;
  throw Error(ErrorCode::ParseError, "unknown fit kind '" + std::string(name) + "' (expected polynomial, exponential)");
}

std::string_view to_string(DecayKind kind) noexcept {
  return kind == DecayKind::Polynomial ? "polynomial" : "exponential";
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& energy, double t_lo, double t_hi,
                   DecayKind kind) {
  if (times.size() != energy.size()) throw Error(ErrorCode::DomainError, "times and energy differ in length");
  if (!(t_lo < t_hi)) throw Error(ErrorCode::EmptyWindow, "fit window needs t_lo < t_hi");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < t_lo || t > t_hi) continue;
    if (kind == DecayKind::Polynomial && !(t > 0.0)) continue;
    if (!(energy[i] > 0.0))
      throw Error(ErrorCode::NonPositiveEnergy, "energy " + std::to_string(energy[i]) + " at t = " + std::to_string(t) +
                                                    " is not positive");
    xs.push_back(kind == DecayKind::Polynomial ? std::log(t) : t);
    ys.push_back(std::log(energy[i]));
  }
  if (xs.size() < 2) throw Error(ErrorCode::EmptyWindow, "fewer than two samples in the fit window");

  const double n = double(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::EmptyWindow, "fit window has no time spread");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }

  DecayFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.kind = kind;
  fit.value = kind == DecayKind::Polynomial ? slope : -slope;
  fit.intercept = intercept;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.residual = std::sqrt(ss_res / n);
  fit.points = xs.size();
  return fit;
}

}  // namespace degenwave
