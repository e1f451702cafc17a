#include "chronoslit/top_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "chronoslit/diagnostics.hpp"
#include "chronoslit/rng.hpp"

namespace chronoslit {

LinearOperator::LinearOperator(GridSpec grid, CMatrix mat, bool hermitian_hint)
    : grid_(grid), mat_(std::move(mat)), hermitian_(hermitian_hint) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (mat_.rows() != n || mat_.cols() != n) {
    throw GridMismatch("operator matrix does not match grid size");
  }
  if (hermitian_ && hermiticity_residual() > 1e-10) {
    throw ConfigError("operator flagged Hermitian fails the Hermiticity check");
  }
}

StateVector LinearOperator::apply(const StateVector& psi) const {
  require_same_grid(grid_, psi.grid(), "LinearOperator::apply");
  return StateVector(grid_, mat_ * psi.amp());
}

double LinearOperator::hermiticity_residual() const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

LinearOperator LinearOperator::operator*(const LinearOperator& rhs) const {
  require_same_grid(grid_, rhs.grid_, "operator product");
  return LinearOperator(grid_, mat_ * rhs.mat_, false);
}

LinearOperator LinearOperator::operator+(const LinearOperator& rhs) const {
  require_same_grid(grid_, rhs.grid_, "operator sum");
  return LinearOperator(grid_, mat_ + rhs.mat_, false);
}

LinearOperator LinearOperator::operator-(const LinearOperator& rhs) const {
  require_same_grid(grid_, rhs.grid_, "operator difference");
  return LinearOperator(grid_, mat_ - rhs.mat_, false);
}

LinearOperator LinearOperator::scaled(Complex factor) const {
  return LinearOperator(grid_, mat_ * factor, false);
}

LinearOperator identity_operator(const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return LinearOperator(grid, CMatrix::Identity(n, n), true);
}

namespace {

LinearOperator coordinate_operator(const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  CMatrix mat = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) mat(k, k) = grid.point(static_cast<std::size_t>(k));
  return LinearOperator(grid, std::move(mat), true);
}

void require_periodic(const GridSpec& grid, const char* what) {
  if (!grid.periodic()) {
    throw ConfigError(std::string(what) + " needs a periodic grid (spectral derivative)");
  }
}

}  // namespace

LinearOperator time_operator(const GridSpec& grid_t) { return coordinate_operator(grid_t); }

LinearOperator position_operator(const GridSpec& grid_q) { return coordinate_operator(grid_q); }

LinearOperator energy_operator(const GridSpec& grid_t, double hbar) {
  require_periodic(grid_t, "energy operator");
  const long n = static_cast<long>(grid_t.size());
  const double quantum = 2.0 * std::numbers::pi * hbar / grid_t.length();
  // i hbar d/dt maps exp(i 2 pi j t / L) to -2 pi hbar j / L. The Nyquist mode
  // is aliased to j = +n/2 so the spectrum is {2 pi hbar k / L : k = -n/2 .. n/2-1}.
  return fourier_multiplier(grid_t, [&](long j) {
    const long jj = (n % 2 == 0 && j == -n / 2) ? n / 2 : j;
    return -quantum * static_cast<double>(jj);
  });
}

LinearOperator momentum_operator(const GridSpec& grid_q, double hbar) {
  require_periodic(grid_q, "momentum operator");
  const double quantum = 2.0 * std::numbers::pi * hbar / grid_q.length();
  return fourier_multiplier(grid_q, [&](long j) { return quantum * static_cast<double>(j); });
}

LinearOperator commutator(const LinearOperator& a, const LinearOperator& b) {
  require_same_grid(a.grid(), b.grid(), "commutator");
  return LinearOperator(a.grid(), a.matrix() * b.matrix() - b.matrix() * a.matrix(), false);
}

bool is_band_limited(const StateVector& probe) {
  const auto n = static_cast<std::size_t>(probe.amp().size());
  std::vector<Complex> in(probe.amp().data(), probe.amp().data() + n);
  std::vector<Complex> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);

  double peak = 0.0;
  for (const auto& c : spectrum) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return true;
  // Index j in FFT order corresponds to frequency min(j, n - j); the top third
  // of |frequency| is everything at or above n/3.
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t freq = std::min(j, n - j);
    if (3 * freq >= n && std::abs(spectrum[j]) > 1e-10 * peak) return false;
  }
  return true;
}

double canonical_residual(const LinearOperator& a, const LinearOperator& b, int sign,
                          const StateVector& probe, double hbar) {
  require_same_grid(a.grid(), b.grid(), "canonical_residual");
  require_same_grid(a.grid(), probe.grid(), "canonical_residual");
  if (sign != 1 && sign != -1) throw ConfigError("canonical_residual sign must be +1 or -1");
  if (!is_band_limited(probe)) {
    warn("canonical_residual: probe is not band-limited; residual reflects truncation error");
  }
  const CVector& psi = probe.amp();
  const CVector ab = a.matrix() * (b.matrix() * psi);
  const CVector ba = b.matrix() * (a.matrix() * psi);
  const Complex inv_ih = 1.0 / Complex(0.0, hbar);
  const CVector r = (ab - ba) * inv_ih - static_cast<double>(sign) * psi;
  return std::sqrt(r.squaredNorm() * probe.grid().step());
}

double snap_energy(const GridSpec& grid_t, double energy, double hbar) {
  const long n = static_cast<long>(grid_t.size());
  const double quantum = 2.0 * std::numbers::pi * hbar / grid_t.length();
  long k = std::lround(energy / quantum);
  k = std::clamp(k, -n / 2, n - n / 2 - 1);
  return quantum * static_cast<double>(k);
}

StateVector energy_eigenvector(const GridSpec& grid_t, double energy, double hbar) {
  require_periodic(grid_t, "energy eigenvector");
  const double snapped = snap_energy(grid_t, energy, hbar);
  const double quantum = 2.0 * std::numbers::pi * hbar / grid_t.length();
  if (std::abs(snapped - energy) > 1e-9 * quantum) {
    std::ostringstream msg;
    msg << "energy " << energy << " is not commensurate with the time grid; snapped to "
        << snapped;
    warn(msg.str());
  }
  const auto n = static_cast<Eigen::Index>(grid_t.size());
  CVector amp(n);
  const double scale = 1.0 / std::sqrt(grid_t.length());
  for (Eigen::Index k = 0; k < n; ++k) {
    // Phase measured from lo keeps the argument small on grids far from t = 0.
    const double t = static_cast<double>(k) * grid_t.step();
    amp(k) = std::polar(scale, -snapped * t / hbar);
  }
  return StateVector(grid_t, std::move(amp));
}

std::vector<double> grid_energies(const GridSpec& grid_t, double hbar) {
  const long n = static_cast<long>(grid_t.size());
  const double quantum = 2.0 * std::numbers::pi * hbar / grid_t.length();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long k = -n / 2; k < n - n / 2; ++k) out.push_back(quantum * static_cast<double>(k));
  return out;
}

GridSpec refinement_grid(std::size_t n) {
  const double half = 0.5 * std::sqrt(static_cast<double>(n) / 64.0);
  return make_grid(-half, half, n, true);
}

StateVector band_limited_probe(const GridSpec& grid, std::size_t probe_id) {
  CounterRng rng(0x7469'6d65ULL, probe_id);
  const double centre = -0.03 + 0.06 * rng.uniform();
  const double width = 0.044 + 0.006 * rng.uniform();
  const double cycles = static_cast<double>(static_cast<int>(rng.next() % 5) - 2);
  const double phase = 2.0 * std::numbers::pi * rng.uniform();

  const auto n = static_cast<Eigen::Index>(grid.size());
  CVector amp(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double u = grid.point(static_cast<std::size_t>(k)) - centre;
    amp(k) = std::polar(std::exp(-u * u / (4.0 * width * width)),
                        2.0 * std::numbers::pi * cycles * (u + centre) + phase);
  }
  return StateVector(grid, std::move(amp)).normalized();
}

std::vector<OperatorCheckRow> run_operator_checks(const std::vector<std::size_t>& sizes,
                                                  std::size_t probes) {
  std::vector<OperatorCheckRow> rows;
  for (std::size_t n : sizes) {
    const GridSpec grid = refinement_grid(n);
    const LinearOperator t_hat = time_operator(grid);
    const LinearOperator s_hat = energy_operator(grid, 1.0);
    const LinearOperator q_hat = position_operator(grid);
    const LinearOperator p_hat = momentum_operator(grid, 1.0);
    for (std::size_t id = 0; id < probes; ++id) {
      const StateVector probe = band_limited_probe(grid, id);
      rows.push_back({"time_energy", n, id, canonical_residual(t_hat, s_hat, -1, probe, 1.0)});
    }
    for (std::size_t id = 0; id < probes; ++id) {
      const StateVector probe = band_limited_probe(grid, id);
      rows.push_back(
          {"position_momentum", n, id, canonical_residual(q_hat, p_hat, 1, probe, 1.0)});
    }
  }
  return rows;
}

}  // namespace chronoslit
