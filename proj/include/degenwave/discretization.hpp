#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "degenwave/coefficients.hpp"
#include "degenwave/kernel.hpp"

namespace degenwave {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Graded wave grid x_j = (j/N_w)^grading on [0,1], uniform heat grid on [1,2]
/// sharing the interface node x = 1, and the truncated history axis.
struct Mesh {
  std::vector<double> wave_nodes;
  std::vector<double> heat_nodes;
  HistoryGrid history;
  double grading = 1.0;

  Index wave_cells() const noexcept { return Index(wave_nodes.size()) - 1; }
  Index heat_cells() const noexcept { return Index(heat_nodes.size()) - 1; }
  double heat_step() const noexcept { return 1.0 / double(heat_cells()); }
  double min_wave_spacing() const noexcept;
};

/// DomainError when wave_cells or heat_cells < 4 or grading < 1.
Mesh build_mesh(int wave_cells, double grading, int heat_cells, HistoryGrid history);

/// Position of every unknown in the flat state vector U = (u | w | gamma).
///
/// w carries the wave velocity at nodes 1..N_w and the temperature at heat
/// nodes 1..N_h-1; the interface value v(1) = y(1) is the single entry
/// w[N_w - 1]. Dirichlet values u(0), y(2) and gamma(., 0) are eliminated.
struct DofLayout {
  Index wave = 0;            // N_w
  Index heat = 0;            // N_h heat nodes 0..N_h-1
  Index history_levels = 0;  // Ns, or 0 when the memory term is absent

  Index shared() const noexcept { return wave + heat - 1; }
  Index u_offset() const noexcept { return 0; }
  Index w_offset() const noexcept { return wave; }
  Index gamma_offset() const noexcept { return wave + shared(); }
  Index total() const noexcept { return gamma_offset() + heat * history_levels; }

  /// Index into w of the velocity at wave node j in 1..N_w.
  Index velocity(Index j) const noexcept { return j - 1; }
  /// Index into w of the temperature at heat node l in 0..N_h-1.
  Index temperature(Index l) const noexcept { return wave - 1 + l; }
  Index interface() const noexcept { return wave - 1; }
  /// Flat index of gamma at level k in 1..Ns, heat node l.
  Index gamma(Index k, Index l) const noexcept { return gamma_offset() + (k - 1) * heat + l; }
};

/// State U = (u, v, y, gamma) in block form. v.tail(1) and y.head(1) are the
/// same interface unknown.
struct DiscreteState {
  Eigen::VectorXd u;      // wave nodes 1..N_w
  Eigen::VectorXd v;      // wave nodes 1..N_w
  Eigen::VectorXd y;      // heat nodes 0..N_h-1
  Eigen::MatrixXd gamma;  // N_h x Ns, column k-1 is level s_k
};

struct EnergyDissipation {
  double energy = 0.0;
  double dissipation = 0.0;
  double diffusion_part = 0.0;  // -c(1-m) |y_x|^2
  double memory_part = 0.0;     // upwind history transport contribution
};

/// Discrete generator A_h with its energy Gram matrix M (M A_h has
/// non-positive symmetric part). Immutable once assembled.
class GeneratorSystem {
 public:
  const SparseMatrix& generator() const noexcept { return A_; }
  const SparseMatrix& gram() const noexcept { return M_; }
  const SparseMatrix& gram_generator() const noexcept { return MA_; }
  const DofLayout& layout() const noexcept { return layout_; }
  Index dim() const noexcept { return layout_.total(); }

  double m() const noexcept { return m_; }
  double c() const noexcept { return c_; }
  const CoefficientModel& model() const noexcept { return model_; }
  const MemoryKernel& kernel() const noexcept { return kernel_; }
  const Mesh& mesh() const noexcept { return mesh_; }

  // Building blocks shared with the shifted solvers.
  const SparseMatrix& wave_stiffness() const noexcept { return wave_stiffness_; }
  const Eigen::VectorXd& wave_mass() const noexcept { return wave_mass_; }
  const Eigen::VectorXd& shared_mass() const noexcept { return shared_mass_; }
  const SparseMatrix& heat_stiffness() const noexcept { return heat_stiffness_; }
  /// beta_k = mu-mass of history cell k, k = 1..Ns (index k-1).
  const Eigen::VectorXd& history_weights() const noexcept { return history_weights_; }
  double history_step() const noexcept { return mesh_.history.ds; }
  double interface_eta() const noexcept { return interface_eta_; }

  /// w-rows <- w-cols block of the instantaneous diffusion c(1-m) y_xx.
  const SparseMatrix& instantaneous_diffusion_block() const noexcept { return diffusion_block_; }
  /// w-rows <- gamma-cols block of the memory flux c m int mu gamma_xx.
  const SparseMatrix& history_coupling_block() const noexcept { return history_block_; }

  /// Cholesky factor of the Gram matrix: M = L L^T.
  const Eigen::SimplicialLLT<SparseMatrix>& gram_factor() const noexcept { return *gram_factor_; }

  Eigen::VectorXd flatten(const DiscreteState& state) const;
  DiscreteState unflatten(const Eigen::VectorXd& U) const;

  EnergyDissipation energy_and_dissipation(const Eigen::VectorXd& U) const;
  double energy(const Eigen::VectorXd& U) const;

  /// Temperature at the interface, y(1).
  double interface_temperature(const Eigen::VectorXd& U) const;
  /// eta(1) u_x(1) from the last wave face.
  double wave_interface_flux(const Eigen::VectorXd& U) const;
  /// zeta_x(1) from the first heat face.
  double heat_interface_flux(const Eigen::VectorXd& U) const;

 private:
  friend GeneratorSystem assemble_system(const CoefficientModel&, const MemoryKernel&, const Mesh&, double, double);
  GeneratorSystem(CoefficientModel model, MemoryKernel kernel, Mesh mesh)
      : model_(std::move(model)), kernel_(kernel), mesh_(std::move(mesh)) {}

  CoefficientModel model_;
  MemoryKernel kernel_;
  Mesh mesh_;
  double m_ = 0.0;
  double c_ = 1.0;
  DofLayout layout_;
  SparseMatrix A_, M_, MA_;
  SparseMatrix wave_stiffness_, heat_stiffness_;
  SparseMatrix diffusion_block_, history_block_;
  Eigen::VectorXd wave_mass_, shared_mass_, history_weights_;
  double interface_eta_ = 1.0;
  std::shared_ptr<const Eigen::SimplicialLLT<SparseMatrix>> gram_factor_;
};

/// HypothesisViolation if b/a is not integrable; DomainError for m outside
/// [0,1] or c <= 0.
GeneratorSystem assemble_system(const CoefficientModel& model, const MemoryKernel& kernel, const Mesh& mesh,
                                double m, double c);

enum class Preset { Zero, Pluck, Thermal };

/// UnknownPreset for names other than zero, pluck, thermal.
Preset parse_preset(std::string_view name);
std::string_view to_string(Preset preset) noexcept;

/// Initial data satisfying v(1) = y(1), the eliminated Dirichlet values and,
/// for pluck with m < 1, the discrete flux compatibility eta(1)u_x(1) = zeta_x(1).
DiscreteState project_initial_data(Preset preset, const GeneratorSystem& system, double thermal_amplitude = 1.0);

/// Eigenvalues of the wave block -sigma(eta u_x)_x with u(0) = u(1) = 0,
/// ascending. Mesh-only test operator; dense.
Eigen::VectorXd wave_dirichlet_eigenvalues(const CoefficientModel& model, const Mesh& mesh);

/// (sum u^2/sigma w) / (sum u_x^2 w) for wave-node values u(x_1..x_N), u(0) = 0.
double hardy_poincare_ratio(const CoefficientModel& model, const Mesh& mesh, const Eigen::VectorXd& u);

}  // namespace degenwave
