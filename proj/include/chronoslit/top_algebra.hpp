#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "chronoslit/grids.hpp"

namespace chronoslit {

/// Dense complex matrix acting on states of one grid.
class LinearOperator {
 public:
  LinearOperator(GridSpec grid, CMatrix mat, bool hermitian_hint);

  const GridSpec& grid() const { return grid_; }
  const CMatrix& matrix() const { return mat_; }
  bool hermitian_hint() const { return hermitian_; }

  StateVector apply(const StateVector& psi) const;

  /// max |M - M^dagger|
  double hermiticity_residual() const;

  LinearOperator operator*(const LinearOperator& rhs) const;
  LinearOperator operator+(const LinearOperator& rhs) const;
  LinearOperator operator-(const LinearOperator& rhs) const;
  LinearOperator scaled(Complex factor) const;

 private:
  GridSpec grid_;
  CMatrix mat_;
  bool hermitian_;
};

LinearOperator identity_operator(const GridSpec& grid);

/// Multiplication by the grid coordinate: t-hat on a time grid, q-hat on a
/// position grid.
LinearOperator time_operator(const GridSpec& grid_t);
LinearOperator position_operator(const GridSpec& grid_q);

/// Spectral i*hbar d/dt on a periodic time grid. Its eigenvectors are the
/// sampled plane waves exp(-i E t / hbar) with E = 2 pi hbar k / (hi - lo),
/// k = -n/2 .. n/2-1.
LinearOperator energy_operator(const GridSpec& grid_t, double hbar);

/// Spectral -i*hbar d/dq on a periodic position grid; eigenvalues
/// p = 2 pi hbar k / (hi - lo), k = -n/2 .. n/2-1.
LinearOperator momentum_operator(const GridSpec& grid_q, double hbar);

/// Hermitian operator diagonal in the discrete Fourier basis. `eigenvalue(j)`
/// gives the value attached to the plane wave exp(i 2 pi j x / L), for
/// j = -n/2 .. n/2-1. The matrix is circulant.
template <class Fn>
LinearOperator fourier_multiplier(const GridSpec& grid, Fn&& eigenvalue);

/// A B - B A
LinearOperator commutator(const LinearOperator& a, const LinearOperator& b);

/// True when the top third of the probe's discrete Fourier coefficients are
/// below 1e-10 of the peak coefficient.
bool is_band_limited(const StateVector& probe);

/// || ((1/(i hbar)) [A, B] - sign * I) probe ||. Emits a warning (but still
/// computes) when the probe is not band-limited.
double canonical_residual(const LinearOperator& a, const LinearOperator& b, int sign,
                          const StateVector& probe, double hbar);

/// Energy value nearest E on the grid's discrete spectrum 2 pi hbar k / L.
double snap_energy(const GridSpec& grid_t, double energy, double hbar);

/// Normalized sampled exp(E t / (i hbar)). An incommensurate E is snapped to
/// the nearest grid energy with a warning.
StateVector energy_eigenvector(const GridSpec& grid_t, double energy, double hbar);

/// Sorted grid energies 2 pi hbar k / L for k = -n/2 .. n/2-1.
std::vector<double> grid_energies(const GridSpec& grid_t, double hbar);

/// Periodic grid used for the refinement study: n samples over a centred
/// interval of length sqrt(n / 64), so both the sample spacing and the
/// interval grow towards the continuum as n increases.
GridSpec refinement_grid(std::size_t n);

/// Fixed band-limited, interior-supported Gaussian probe number `probe_id`:
/// centre within +-0.03, RMS width parameter in [0.044, 0.05], carrier of at
/// most two cycles per unit length and a random global phase. The parameters
/// depend only on probe_id, so the same physical function is sampled on every
/// grid.
StateVector band_limited_probe(const GridSpec& grid, std::size_t probe_id);

struct OperatorCheckRow {
  std::string relation;  // "time_energy" (sign -1) or "position_momentum" (sign +1)
  std::size_t n;
  std::size_t probe_id;
  double residual;
};

/// canonical_residual of both conjugate pairs (hbar = 1) for every grid size
/// and probe, in (n, relation, probe) order.
std::vector<OperatorCheckRow> run_operator_checks(const std::vector<std::size_t>& sizes,
                                                  std::size_t probes);

// --- implementation ---------------------------------------------------------

template <class Fn>
LinearOperator fourier_multiplier(const GridSpec& grid, Fn&& eigenvalue) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const long half = static_cast<long>(n / 2);
  const double two_pi = 2.0 * std::numbers::pi;
  // First column of the circulant matrix: c_m = (1/n) sum_j lambda_j exp(2 pi i j m / n).
  CVector column(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    Complex acc{};
    for (long j = -half; j < static_cast<long>(n) - half; ++j) {
      const long phase_index = (j * static_cast<long>(m)) % static_cast<long>(n);
      const double angle = two_pi * static_cast<double>(phase_index) / static_cast<double>(n);
      acc += eigenvalue(j) * std::polar(1.0, angle);
    }
    column(m) = acc / static_cast<double>(n);
  }
  // Enforce exact conjugate symmetry so the result is Hermitian to the last bit.
  for (Eigen::Index m = 1; m < n; ++m) {
    if (m < n - m) {
      const Complex avg = 0.5 * (column(m) + std::conj(column(n - m)));
      column(m) = avg;
      column(n - m) = std::conj(avg);
    }
  }
  column(0) = column(0).real();
  if (n % 2 == 0) column(n / 2) = column(n / 2).real();

  CMatrix mat(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) mat(a, b) = column((a - b + n) % n);
  }
  return LinearOperator(grid, std::move(mat), true);
}

}  // namespace chronoslit
