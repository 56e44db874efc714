#pragma once

#include <string_view>
#include <vector>

namespace degenwave {

enum class DecayKind { Polynomial, Exponential };

/// ParseError for names other than polynomial, exponential.
DecayKind parse_decay_kind(std::string_view name);
std::string_view to_string(DecayKind kind) noexcept;

struct DecayFit {
  double t_lo = 0.0;
  double t_hi = 0.0;
  DecayKind kind = DecayKind::Polynomial;
  /// Polynomial: slope of log E against log t (E ~ t^value).
  /// Exponential: decay rate, E ~ exp(-value t).
  double value = 0.0;
  double intercept = 0.0;  // log-space intercept
  double r_squared = 0.0;
  double residual = 0.0;   // RMS residual in log space
  std::size_t points = 0;
};

/// Least-squares fit over samples with t_lo <= t <= t_hi. EmptyWindow when
/// the window is inverted or holds fewer than two samples (or t <= 0 for the
/// polynomial kind); NonPositiveEnergy when an energy in the window is <= 0.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& energy, double t_lo, double t_hi,
                   DecayKind kind);

}  // namespace degenwave
