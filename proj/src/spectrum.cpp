#include "degenwave/spectrum.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include <lapacke.h>

#include "degenwave/errors.hpp"

namespace degenwave {

Spectrum dense_spectrum(const Eigen::MatrixXd& A) {
  const Index n = A.rows();
  if (A.cols() != n) throw Error(ErrorCode::DomainError, "matrix must be square");
  Eigen::MatrixXd work = A;
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd VR(n, n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', lapack_int(n), work.data(), lapack_int(n),
                                        wr.data(), wi.data(), nullptr, 1, VR.data(), lapack_int(n));
  if (info != 0) throw Error(ErrorCode::SingularSystem, "dense eigensolver did not converge (dgeev info " +
                                                            std::to_string(info) + ")");
  Eigen::VectorXcd lam(n);
  Eigen::MatrixXcd V(n, n);
  for (Index j = 0; j < n; ++j) {
    lam[j] = {wr[j], wi[j]};
    if (wi[j] > 0.0 && j + 1 < n) {
      V.col(j).real() = VR.col(j);
      V.col(j).imag() = VR.col(j + 1);
      V.col(j + 1) = V.col(j).conjugate();
      lam[j + 1] = {wr[j + 1], wi[j + 1]};
      ++j;
    } else {
      V.col(j) = VR.col(j).cast<std::complex<double>>();
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (lam[i].real() != lam[j].real()) return lam[i].real() > lam[j].real();
    return lam[i].imag() > lam[j].imag();
  });

  Spectrum s;
  s.eigenvalues.resize(n);
  s.residuals.resize(n);
  Eigen::MatrixXcd AV(n, n);
  AV.real() = A * V.real();
  AV.imag() = A * V.imag();
  for (Index r = 0; r < n; ++r) {
    const Index i = order[std::size_t(r)];
    s.eigenvalues[r] = lam[i];
    const double vn = V.col(i).norm();
    s.residuals[r] = (AV.col(i) - lam[i] * V.col(i)).norm() / vn;
  }
  s.abscissa = n > 0 ? s.eigenvalues[0].real() : -std::numeric_limits<double>::infinity();
  s.max_residual = n > 0 ? s.residuals.maxCoeff() : 0.0;
  return s;
}

Spectrum spectral_abscissa(const GeneratorSystem& system, Index max_dof) {
  if (system.dim() > max_dof)
    throw Error(ErrorCode::TooLarge, "system has " + std::to_string(system.dim()) +
                                         " dof; the dense eigensolver is capped at " + std::to_string(max_dof));
  return dense_spectrum(Eigen::MatrixXd(system.generator()));
}

double band_min_damping(const Spectrum& spectrum, double band) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : spectrum.eigenvalues)
    if (std::abs(z.imag()) <= band) best = std::min(best, std::abs(z.real()));
  return best;
}

double distance_to_spectrum(const Spectrum& spectrum, std::complex<double> z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& mu : spectrum.eigenvalues) best = std::min(best, std::abs(z - mu));
  return best;
}

}  // namespace degenwave
