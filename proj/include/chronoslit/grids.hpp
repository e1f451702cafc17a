#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace chronoslit {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Reduced Planck constant in J*s.
inline constexpr double kHbarSI = 1.054571817e-34;

/// Raised for invalid user-supplied parameters (bad grid, negative mass, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when two objects that must share a grid do not.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform 1-D sampling of a continuous coordinate (a position q or a time t).
///
/// Periodic grids sample the half-open interval [lo, hi) and are the ones on
/// which spectral derivatives are defined; non-periodic grids sample the
/// closed interval [lo, hi].
class GridSpec {
 public:
  GridSpec(double lo, double hi, std::size_t n, bool periodic);

  std::size_t size() const { return n_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool periodic() const { return periodic_; }
  double step() const { return step_; }
  double length() const { return hi_ - lo_; }

  double point(std::size_t k) const { return lo_ + static_cast<double>(k) * step_; }

  /// Index of the sample nearest to x. Throws if x lies outside [lo, hi].
  std::size_t nearest_index(double x) const;

  bool operator==(const GridSpec& other) const = default;

 private:
  std::size_t n_;
  double lo_;
  double hi_;
  bool periodic_;
  double step_;
};

GridSpec make_grid(double lo, double hi, std::size_t n, bool periodic);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

/// Discretized ket on a grid. Amplitudes are the sampled wavefunction, so the
/// norm is the step-weighted sum of |amp|^2.
class StateVector {
 public:
  StateVector(GridSpec grid, CVector amp);
  explicit StateVector(GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  const CVector& amp() const { return amp_; }
  CVector& amp() { return amp_; }
  Complex operator[](std::size_t k) const { return amp_(static_cast<Eigen::Index>(k)); }

  double norm_squared() const;
  double norm() const;
  bool is_normalized() const;
  StateVector normalized() const;

 private:
  GridSpec grid_;
  CVector amp_;
};

/// psi(q, t) on H_q (x) H_t; rows index q samples, columns index t samples.
class SpaceTimeState {
 public:
  SpaceTimeState(GridSpec grid_q, GridSpec grid_t, CMatrix amp);

  const GridSpec& grid_q() const { return grid_q_; }
  const GridSpec& grid_t() const { return grid_t_; }
  const CMatrix& amp() const { return amp_; }

  /// The q-space state at time sample k.
  StateVector slice(std::size_t k) const;

  /// Step-weighted Frobenius norm over both grids.
  double norm() const;

 private:
  GridSpec grid_q_;
  GridSpec grid_t_;
  CMatrix amp_;
};

/// <a|b> = sum conj(a_k) b_k * step.
Complex inner_product(const StateVector& a, const StateVector& b);

/// Grid-delta ket |t0>: 1/sqrt(step) at the sample nearest t0, zero elsewhere.
StateVector time_eigenstate(const GridSpec& grid, double t0);

/// Normalized cA|tA> + cB|tB>. With cB == 0 the result is the pure |tA> state
/// (and symmetrically for cA == 0).
StateVector temporal_superposition(const GridSpec& grid, Complex c_a, double t_a, Complex c_b,
                                   double t_b);

}  // namespace chronoslit
