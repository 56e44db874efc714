#pragma once

#include <complex>

#include <Eigen/Dense>

#include "degenwave/discretization.hpp"

namespace degenwave {

inline constexpr Index kDenseDofCap = 4000;

struct Spectrum {
  Eigen::VectorXcd eigenvalues;  // sorted by decreasing real part
  Eigen::VectorXd residuals;     // ||A U - lambda U|| / ||U|| per eigenpair
  double abscissa = 0.0;         // max Re lambda
  double max_residual = 0.0;
};

/// Dense eigendecomposition of A_h. TooLarge above max_dof.
Spectrum spectral_abscissa(const GeneratorSystem& system, Index max_dof = kDenseDofCap);

/// Same for an arbitrary real matrix.
Spectrum dense_spectrum(const Eigen::MatrixXd& A);

/// min |Re lambda| over eigenvalues with |Im lambda| <= band.
double band_min_damping(const Spectrum& spectrum, double band);

/// Distance from z to the nearest computed eigenvalue.
double distance_to_spectrum(const Spectrum& spectrum, std::complex<double> z);

}  // namespace degenwave
