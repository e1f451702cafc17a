#include "chronoslit/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace chronoslit {

Hamiltonian::Hamiltonian(HamiltonianKind kind, LinearOperator op, double hbar)
    : kind_(kind), op_(std::move(op)), hbar_(hbar) {
  if (op_.hermiticity_residual() > 1e-10) throw ConfigError("Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(op_.matrix());
  if (solver.info() != Eigen::Success) throw ConfigError("Hamiltonian eigensolver failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  const double scale = std::max(1.0, eigenvalues_.cwiseAbs().maxCoeff());
  if (eigenvalues_(0) < -1e-9 * scale) {
    std::ostringstream msg;
    msg << "Hamiltonian spectrum is not bounded below by zero (min eigenvalue "
        << eigenvalues_(0) << ")";
    throw ConfigError(msg.str());
  }
}

StateVector Hamiltonian::eigenstate(std::size_t k) const {
  if (k >= static_cast<std::size_t>(eigenvalues_.size())) {
    throw ConfigError("eigenstate index out of range");
  }
  return StateVector(grid_q(), eigenvectors_.col(static_cast<Eigen::Index>(k)) /
                                   std::sqrt(grid_q().step()));
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be positive and finite");
  }
}

LinearOperator kinetic_operator(const GridSpec& grid_q, double mass, double hbar) {
  if (!grid_q.periodic()) throw ConfigError("Hamiltonian needs a periodic position grid");
  const double quantum = 2.0 * std::numbers::pi * hbar / grid_q.length();
  return fourier_multiplier(grid_q, [&](long j) {
    const double p = quantum * static_cast<double>(j);
    return p * p / (2.0 * mass);
  });
}

}  // namespace

Hamiltonian hamiltonian_free(const GridSpec& grid_q, double mass, double hbar) {
  require_positive(mass, "mass");
  require_positive(hbar, "hbar");
  return Hamiltonian(FreeParticle{mass}, kinetic_operator(grid_q, mass, hbar), hbar);
}

Hamiltonian hamiltonian_harmonic(const GridSpec& grid_q, double mass, double omega, double hbar) {
  require_positive(mass, "mass");
  require_positive(omega, "omega");
  require_positive(hbar, "hbar");
  // The ground state is exp(-m omega q^2 / 2 hbar) up to normalization.
  const double reach = std::min(-grid_q.lo(), grid_q.hi());
  const double edge = reach > 0.0 ? std::exp(-mass * omega * reach * reach / (2.0 * hbar)) : 1.0;
  if (edge >= 1e-12) {
    std::ostringstream msg;
    msg << "position grid too narrow for the oscillator ground state (edge amplitude " << edge
        << " >= 1e-12)";
    throw ConfigError(msg.str());
  }
  CMatrix mat = kinetic_operator(grid_q, mass, hbar).matrix();
  for (std::size_t k = 0; k < grid_q.size(); ++k) {
    const double q = grid_q.point(k);
    const auto i = static_cast<Eigen::Index>(k);
    mat(i, i) += 0.5 * mass * omega * omega * q * q;
  }
  return Hamiltonian(HarmonicOscillator{mass, omega}, LinearOperator(grid_q, std::move(mat), true),
                     hbar);
}

SpaceTimeState solve_constraint(const Hamiltonian& h, const GridSpec& grid_t,
                                const StateVector& initial, int substeps) {
  require_same_grid(h.grid_q(), initial.grid(), "solve_constraint");
  if (substeps < 1) throw ConfigError("substeps must be at least 1");
  if (!initial.is_normalized()) throw ConfigError("initial state must be normalized");

  const auto nq = static_cast<Eigen::Index>(h.grid_q().size());
  const auto nt = static_cast<Eigen::Index>(grid_t.size());
  const double dt = grid_t.step() / substeps;
  const Complex half_step(0.0, dt / (2.0 * h.hbar()));

  const CMatrix id = CMatrix::Identity(nq, nq);
  const CMatrix implicit_part = id + half_step * h.op().matrix();
  const CMatrix explicit_part = id - half_step * h.op().matrix();
  const CMatrix cayley = implicit_part.partialPivLu().solve(explicit_part);
  CMatrix step = cayley;
  for (int s = 1; s < substeps; ++s) step = cayley * step;

  CMatrix psi(nq, nt);
  psi.col(0) = initial.amp();
  for (Eigen::Index k = 1; k < nt; ++k) psi.col(k) = step * psi.col(k - 1);
  return SpaceTimeState(h.grid_q(), grid_t, std::move(psi));
}

namespace {

void require_matching(const SpaceTimeState& state, const Hamiltonian& h) {
  require_same_grid(state.grid_q(), h.grid_q(), "constraint_residual");
}

}  // namespace

double constraint_residual_spectral(const SpaceTimeState& state, const Hamiltonian& h) {
  require_matching(state, h);
  const LinearOperator s_hat = energy_operator(state.grid_t(), h.hbar());
  const CMatrix& psi = state.amp();
  const CMatrix r = psi * s_hat.matrix().transpose() - h.op().matrix() * psi;
  return r.norm() / psi.norm();
}

double constraint_residual_interior(const SpaceTimeState& state, const Hamiltonian& h) {
  require_matching(state, h);
  const auto nt = static_cast<Eigen::Index>(state.grid_t().size());
  const Eigen::Index first = std::max<Eigen::Index>(2, nt / 4);
  const Eigen::Index last = std::min<Eigen::Index>(nt - 3, first + nt / 2 - 1);
  const double dt = state.grid_t().step();
  const Complex ih(0.0, h.hbar());
  const CMatrix& psi = state.amp();

  double residual_sq = 0.0;
  double norm_sq = 0.0;
  for (Eigen::Index a = first; a <= last; ++a) {
    const CVector deriv =
        (-psi.col(a + 2) + 8.0 * psi.col(a + 1) - 8.0 * psi.col(a - 1) + psi.col(a - 2)) /
        (12.0 * dt);
    const CVector r = ih * deriv - h.op().matrix() * psi.col(a);
    residual_sq += r.squaredNorm();
    norm_sq += psi.col(a).squaredNorm();
  }
  return std::sqrt(residual_sq / norm_sq);
}

ConstraintResidual constraint_residual(const SpaceTimeState& state, const Hamiltonian& h) {
  return {constraint_residual_spectral(state, h), constraint_residual_interior(state, h)};
}

double norm_drift(const SpaceTimeState& state) {
  double drift = 0.0;
  const double step = state.grid_q().step();
  for (Eigen::Index k = 0; k < state.amp().cols(); ++k) {
    drift = std::max(drift, std::abs(std::sqrt(state.amp().col(k).squaredNorm() * step) - 1.0));
  }
  return drift;
}

double EnergySupport::negative_weight() const {
  double total = 0.0;
  for (std::size_t k = 0; k < energy.size(); ++k) {
    if (energy[k] < -resolution) total += weight[k];
  }
  return total;
}

double EnergySupport::weight_near(double center, double half_width) const {
  double total = 0.0;
  for (std::size_t k = 0; k < energy.size(); ++k) {
    if (std::abs(energy[k] - center) <= half_width) total += weight[k];
  }
  return total;
}

EnergySupport energy_support(const SpaceTimeState& state, double hbar, SpectralWindow window) {
  const GridSpec& grid_t = state.grid_t();
  if (!grid_t.periodic()) throw ConfigError("energy_support needs a periodic time grid");
  const auto n = static_cast<long>(grid_t.size());
  const double quantum = 2.0 * std::numbers::pi * hbar / grid_t.length();

  std::vector<double> taper(static_cast<std::size_t>(n), 1.0);
  double resolution = quantum;
  if (window == SpectralWindow::gaussian) {
    const double width = grid_t.length() / 12.0;
    const double center = grid_t.step() * static_cast<double>(n / 2);
    for (long a = 0; a < n; ++a) {
      const double u = (grid_t.step() * static_cast<double>(a) - center) / width;
      taper[static_cast<std::size_t>(a)] = std::exp(-0.5 * u * u);
    }
    resolution = 8.0 * quantum;
  }

  // Weight per FFT index j; the mode exp(2 pi i j t / L) has energy -2 pi hbar j / L,
  // with the Nyquist index read as energy k = -n/2.
  std::vector<double> by_index(static_cast<std::size_t>(n), 0.0);
  Eigen::FFT<double> fft;
  std::vector<Complex> row(static_cast<std::size_t>(n));
  std::vector<Complex> spectrum;
  for (Eigen::Index q = 0; q < state.amp().rows(); ++q) {
    for (long a = 0; a < n; ++a) {
      row[static_cast<std::size_t>(a)] = state.amp()(q, a) * taper[static_cast<std::size_t>(a)];
    }
    fft.fwd(spectrum, row);
    for (long j = 0; j < n; ++j) by_index[static_cast<std::size_t>(j)] += std::norm(spectrum[static_cast<std::size_t>(j)]);
  }

  double total = 0.0;
  for (double w : by_index) total += w;
  if (!(total > 0.0)) throw ConfigError("energy_support of a zero state");

  EnergySupport out;
  out.resolution = resolution;
  out.energy.reserve(static_cast<std::size_t>(n));
  out.weight.reserve(static_cast<std::size_t>(n));
  for (long k = -n / 2; k < n - n / 2; ++k) {
    const long j = ((-k) % n + n) % n;
    out.energy.push_back(quantum * static_cast<double>(k));
    out.weight.push_back(by_index[static_cast<std::size_t>(j)] / total);
  }
  return out;
}

}  // namespace chronoslit
