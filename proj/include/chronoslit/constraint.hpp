#pragma once

#include <variant>
#include <vector>

#include "chronoslit/grids.hpp"
#include "chronoslit/top_algebra.hpp"

namespace chronoslit {

struct FreeParticle {
  double mass;
};

struct HarmonicOscillator {
  double mass;
  double omega;
};

using HamiltonianKind = std::variant<FreeParticle, HarmonicOscillator>;

/// H(q-hat, p-hat) on a periodic position grid, with its eigendecomposition.
class Hamiltonian {
 public:
  Hamiltonian(HamiltonianKind kind, LinearOperator op, double hbar);

  const GridSpec& grid_q() const { return op_.grid(); }
  const HamiltonianKind& kind() const { return kind_; }
  const LinearOperator& op() const { return op_; }
  double hbar() const { return hbar_; }

  /// Ascending eigenvalues and matching orthonormal (unweighted) eigenvectors.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }

  /// The k-th eigenstate as a normalized StateVector.
  StateVector eigenstate(std::size_t k) const;

 private:
  HamiltonianKind kind_;
  LinearOperator op_;
  double hbar_;
  Eigen::VectorXd eigenvalues_;
  CMatrix eigenvectors_;
};

/// p^2 / (2m).
Hamiltonian hamiltonian_free(const GridSpec& grid_q, double mass, double hbar);

/// p^2 / (2m) + m omega^2 q^2 / 2. The grid must hold the ground-state
/// Gaussian with boundary amplitude below 1e-12 of its peak.
Hamiltonian hamiltonian_harmonic(const GridSpec& grid_q, double mass, double omega, double hbar);

/// Propagates `initial` across every sample of grid_t with the Cayley
/// (Crank-Nicolson) step (1 + i H dt/2hbar)^-1 (1 - i H dt/2hbar), where
/// dt = grid_t.step() / substeps. Column k of the result is psi(q, t_k).
SpaceTimeState solve_constraint(const Hamiltonian& h, const GridSpec& grid_t,
                                const StateVector& initial, int substeps = 1);

/// Relative residual ||(1 (x) s-hat) psi - (H (x) 1) psi|| / ||psi||.
/// `spectral` uses the spectral i hbar d/dt on the whole periodic time grid;
/// `interior` uses a fourth-order central difference on the central half of
/// the time samples, so wrap-around of non-periodic solutions does not count.
struct ConstraintResidual {
  double spectral;
  double interior;
};

double constraint_residual_spectral(const SpaceTimeState& state, const Hamiltonian& h);
double constraint_residual_interior(const SpaceTimeState& state, const Hamiltonian& h);
ConstraintResidual constraint_residual(const SpaceTimeState& state, const Hamiltonian& h);

/// Largest deviation of a time-slice norm from 1.
double norm_drift(const SpaceTimeState& state);

enum class SpectralWindow {
  rectangular,  // plain DFT; exact for time-periodic states
  gaussian,     // Gaussian taper of RMS width L/12 for non-periodic solutions
};

/// Normalized spectral weight of psi over the s-hat eigenvalues
/// E_k = 2 pi hbar k / L, k = -n/2 .. n/2-1 (ascending). `resolution` is the
/// energy half-width inside which leakage from a single line is confined
/// (one bin for the rectangular window, eight bins for the Gaussian one).
struct EnergySupport {
  std::vector<double> energy;
  std::vector<double> weight;
  double resolution;

  /// Total weight at energies strictly below -resolution.
  double negative_weight() const;
  /// Total weight within `half_width` of `center`.
  double weight_near(double center, double half_width) const;
};

EnergySupport energy_support(const SpaceTimeState& state, double hbar,
                             SpectralWindow window = SpectralWindow::rectangular);

}  // namespace chronoslit
