#include "chronoslit/grids.hpp"

#include <cmath>
#include <sstream>

namespace chronoslit {

GridSpec::GridSpec(double lo, double hi, std::size_t n, bool periodic)
    : n_(n), lo_(lo), hi_(hi), periodic_(periodic), step_(0.0) {
  if (n < 8) {
    throw ConfigError("grid needs at least 8 samples, got " + std::to_string(n));
  }
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(hi > lo)) {
    std::ostringstream msg;
    msg << "grid interval must satisfy hi > lo, got [" << lo << ", " << hi << "]";
    throw ConfigError(msg.str());
  }
  step_ = (hi - lo) / static_cast<double>(periodic ? n : n - 1);
  if (!(step_ > 0.0)) throw ConfigError("grid step underflows to zero");
}

std::size_t GridSpec::nearest_index(double x) const {
  if (!(x >= lo_ && x <= hi_)) {
    std::ostringstream msg;
    msg << "coordinate " << x << " lies outside the grid [" << lo_ << ", " << hi_ << "]";
    throw ConfigError(msg.str());
  }
  auto k = static_cast<std::size_t>(std::llround((x - lo_) / step_));
  if (k >= n_) k = periodic_ ? 0 : n_ - 1;  // hi wraps onto lo for periodic grids
  return k;
}

GridSpec make_grid(double lo, double hi, std::size_t n, bool periodic) {
  return GridSpec(lo, hi, n, periodic);
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": operands live on different grids");
}

StateVector::StateVector(GridSpec grid, CVector amp) : grid_(grid), amp_(std::move(amp)) {
  if (static_cast<std::size_t>(amp_.size()) != grid_.size()) {
    throw GridMismatch("amplitude count does not match grid size");
  }
}

StateVector::StateVector(GridSpec grid)
    : grid_(grid), amp_(CVector::Zero(static_cast<Eigen::Index>(grid.size()))) {}

double StateVector::norm_squared() const { return amp_.squaredNorm() * grid_.step(); }

double StateVector::norm() const { return std::sqrt(norm_squared()); }

bool StateVector::is_normalized() const { return std::abs(norm_squared() - 1.0) <= 1e-12; }

StateVector StateVector::normalized() const {
  const double nrm = norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ConfigError("cannot normalize a zero state");
  return StateVector(grid_, amp_ / nrm);
}

SpaceTimeState::SpaceTimeState(GridSpec grid_q, GridSpec grid_t, CMatrix amp)
    : grid_q_(grid_q), grid_t_(grid_t), amp_(std::move(amp)) {
  if (static_cast<std::size_t>(amp_.rows()) != grid_q_.size() ||
      static_cast<std::size_t>(amp_.cols()) != grid_t_.size()) {
    throw GridMismatch("space-time amplitude matrix does not match its grids");
  }
}

StateVector SpaceTimeState::slice(std::size_t k) const {
  return StateVector(grid_q_, amp_.col(static_cast<Eigen::Index>(k)));
}

double SpaceTimeState::norm() const {
  return std::sqrt(amp_.squaredNorm() * grid_q_.step() * grid_t_.step());
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  require_same_grid(a.grid(), b.grid(), "inner_product");
  return a.amp().dot(b.amp()) * a.grid().step();  // Eigen's dot conjugates the left operand
}

StateVector time_eigenstate(const GridSpec& grid, double t0) {
  StateVector ket(grid);
  ket.amp()(static_cast<Eigen::Index>(grid.nearest_index(t0))) = 1.0 / std::sqrt(grid.step());
  return ket;
}

StateVector temporal_superposition(const GridSpec& grid, Complex c_a, double t_a, Complex c_b,
                                   double t_b) {
  const double weight = std::norm(c_a) + std::norm(c_b);
  if (!(weight > 0.0)) throw ConfigError("temporal superposition needs a nonzero coefficient");
  if (c_b == Complex{}) return time_eigenstate(grid, t_a);
  if (c_a == Complex{}) return time_eigenstate(grid, t_b);

  const std::size_t ia = grid.nearest_index(t_a);
  const std::size_t ib = grid.nearest_index(t_b);
  if (ia == ib) {
    throw ConfigError("emission moments snap to the same grid sample; superposition degenerates");
  }
  StateVector psi(grid);
  const double scale = 1.0 / std::sqrt(grid.step() * weight);
  psi.amp()(static_cast<Eigen::Index>(ia)) = c_a * scale;
  psi.amp()(static_cast<Eigen::Index>(ib)) = c_b * scale;
  return psi;
}

}  // namespace chronoslit
