#include <doctest.h>

#include <random>

#include "chronoslit/top_algebra.hpp"
#include "test_support.hpp"

using namespace chronoslit;
using testing_support::kPi;
using testing_support::random_state;
using testing_support::WarningCapture;

namespace {

StateVector plane_wave(const GridSpec& g, double wavenumber) {
  CVector amp(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index k = 0; k < amp.size(); ++k) {
    amp(k) = std::polar(1.0, wavenumber * g.point(static_cast<std::size_t>(k)));
  }
  return StateVector(g, amp).normalized();
}

double distance(const StateVector& a, const CVector& b) { return (a.amp() - b).norm(); }

}  // namespace

TEST_CASE("time operator is diagonal with the sample times") {
  const GridSpec g = make_grid(0.0, 1.0, 16, true);
  const LinearOperator t_hat = time_operator(g);
  CHECK(t_hat.hermiticity_residual() == 0.0);
  for (std::size_t k = 0; k < 16; ++k) {
    const StateVector ket = time_eigenstate(g, g.point(k));
    const StateVector out = t_hat.apply(ket);
    CHECK(distance(out, g.point(k) * ket.amp()) == 0.0);
  }
}

TEST_CASE("time expectation on an equal-weight superposition is the mean time") {
  const GridSpec g = make_grid(0.0, 1.0, 16, true);
  const double t_a = 0.25;
  const double t_b = 0.6875;
  const StateVector psi = temporal_superposition(g, 1.0 / std::sqrt(2.0), t_a, 1.0 / std::sqrt(2.0), t_b);
  const Complex mean = inner_product(psi, time_operator(g).apply(psi));
  CHECK(mean.real() == doctest::Approx(0.5 * (t_a + t_b)).epsilon(1e-14));
  CHECK(std::abs(mean.imag()) < 1e-15);
}

TEST_CASE("energy operator on commensurate plane waves") {
  const double hbar = 1.0;
  const GridSpec g = make_grid(0.0, 2.0, 64, true);
  const LinearOperator s_hat = energy_operator(g, hbar);
  for (int k = -31; k <= 31; ++k) {
    const double energy = 2.0 * kPi * hbar * k / g.length();
    const StateVector e = plane_wave(g, -energy / hbar);
    CHECK(distance(s_hat.apply(e), energy * e.amp()) < 1e-8);
  }
}

TEST_CASE("energy operator annihilates a constant") {
  const GridSpec g = make_grid(-1.0, 1.0, 32, true);
  const CVector ones = CVector::Ones(32);
  CHECK(energy_operator(g, 1.0).matrix().operator*(ones).norm() < 1e-12);
}

TEST_CASE("energy operator spectrum equals 2 pi hbar k / L") {
  const double hbar = 0.7;
  const GridSpec g = make_grid(0.0, 3.0, 48, true);
  const LinearOperator s_hat = energy_operator(g, hbar);
  CHECK(s_hat.hermiticity_residual() < 1e-10);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(s_hat.matrix());
  const std::vector<double> expected = grid_energies(g, hbar);
  REQUIRE(expected.size() == 48);
  for (std::size_t k = 0; k < 48; ++k) {
    CHECK(solver.eigenvalues()(static_cast<Eigen::Index>(k)) ==
          doctest::Approx(expected[k]).epsilon(1e-9).scale(1.0));
    if (k > 0) CHECK(expected[k] - expected[k - 1] == doctest::Approx(2.0 * kPi * hbar / 3.0));
  }
  CHECK(expected.front() == doctest::Approx(-24.0 * 2.0 * kPi * hbar / 3.0));
}

TEST_CASE("spectral operators need periodic grids") {
  const GridSpec g = make_grid(0.0, 1.0, 16, false);
  CHECK_THROWS_AS(energy_operator(g, 1.0), ConfigError);
  CHECK_THROWS_AS(momentum_operator(g, 1.0), ConfigError);
  CHECK_NOTHROW(time_operator(g));
  CHECK_NOTHROW(position_operator(g));
}

TEST_CASE("position and momentum operators") {
  const double hbar = 1.3;
  const GridSpec g = make_grid(-2.0, 2.0, 64, true);
  const LinearOperator q_hat = position_operator(g);
  const LinearOperator p_hat = momentum_operator(g, hbar);
  CHECK(q_hat.hermiticity_residual() < 1e-10);
  CHECK(p_hat.hermiticity_residual() < 1e-10);
  const StateVector ket = time_eigenstate(g, 0.5);
  CHECK(distance(q_hat.apply(ket), 0.5 * ket.amp()) == 0.0);
  for (int k = -20; k <= 20; k += 5) {
    const double p0 = 2.0 * kPi * hbar * k / g.length();
    const StateVector wave = plane_wave(g, p0 / hbar);
    CHECK(distance(p_hat.apply(wave), p0 * wave.amp()) < 1e-9);
  }
}

TEST_CASE("operators are bound to their grid") {
  const GridSpec a = make_grid(0.0, 1.0, 16, true);
  const GridSpec b = make_grid(0.0, 2.0, 16, true);
  CHECK_THROWS_AS(commutator(time_operator(a), time_operator(b)), GridMismatch);
  CHECK_THROWS_AS(time_operator(a).apply(StateVector(b)), GridMismatch);
  CHECK_THROWS_AS(LinearOperator(a, CMatrix::Zero(3, 3), false), GridMismatch);
  CMatrix skew = CMatrix::Zero(16, 16);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(LinearOperator(a, skew, true), ConfigError);
}

TEST_CASE("self-commutator vanishes") {
  const GridSpec g = make_grid(0.0, 1.0, 32, true);
  const LinearOperator s_hat = energy_operator(g, 1.0);
  CHECK(commutator(s_hat, s_hat).matrix().cwiseAbs().maxCoeff() < 1e-12);
  const StateVector probe = band_limited_probe(refinement_grid(64), 0);
  const LinearOperator t_hat = time_operator(probe.grid());
  CHECK(canonical_residual(t_hat, t_hat, 1, probe, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("canonical relations on band-limited probes") {
  for (std::size_t n : {64u, 128u, 256u}) {
    const GridSpec g = refinement_grid(n);
    for (std::size_t id = 0; id < 20; ++id) {
      const StateVector probe = band_limited_probe(g, id);
      CHECK(probe.is_normalized());
      CHECK(is_band_limited(probe));
      const double time_pair = canonical_residual(time_operator(g), energy_operator(g, 1.0), -1, probe, 1.0);
      const double space_pair =
          canonical_residual(position_operator(g), momentum_operator(g, 1.0), 1, probe, 1.0);
      CHECK(time_pair < 1e-6);
      CHECK(space_pair < 1e-6);
      // The wrong sign misses by twice the probe norm.
      CHECK(canonical_residual(time_operator(g), energy_operator(g, 1.0), 1, probe, 1.0) ==
            doctest::Approx(2.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("canonical residual matches a dense-matrix evaluation") {
  const GridSpec g = refinement_grid(64);
  const StateVector probe = band_limited_probe(g, 3);
  const double hbar = 1.0;
  const CMatrix c = commutator(time_operator(g), energy_operator(g, hbar)).matrix();
  const CMatrix lhs = c / Complex(0.0, hbar) + CMatrix::Identity(64, 64);
  const double dense = std::sqrt((lhs * probe.amp()).squaredNorm() * g.step());
  const double matvec = canonical_residual(time_operator(g), energy_operator(g, hbar), -1, probe, hbar);
  // The two evaluation orders differ only by rounding at the 1e-14 level.
  CHECK(std::abs(matvec - dense) < 1e-13);
}

TEST_CASE("canonical residual does not grow under refinement") {
  for (std::size_t id = 0; id < 20; ++id) {
    const auto residual = [&](std::size_t n) {
      const GridSpec g = refinement_grid(n);
      return canonical_residual(time_operator(g), energy_operator(g, 1.0), -1,
                                band_limited_probe(g, id), 1.0);
    };
    CHECK(residual(256) <= residual(64));
  }
}

TEST_CASE("non band-limited probe warns but still computes") {
  WarningCapture capture;
  const GridSpec g = make_grid(0.0, 1.0, 32, true);
  const StateVector spike = time_eigenstate(g, 0.5);
  CHECK_FALSE(is_band_limited(spike));
  const double r = canonical_residual(time_operator(g), energy_operator(g, 1.0), -1, spike, 1.0);
  CHECK(std::isfinite(r));
  CHECK(capture.messages.size() == 1);
}

TEST_CASE("operators on different tensor slots commute") {
  std::mt19937_64 gen(17);
  const GridSpec gq = make_grid(-2.0, 2.0, 24, true);
  const GridSpec gt = make_grid(0.0, 1.0, 20, true);
  const CMatrix q = position_operator(gq).matrix();
  const CMatrix p = momentum_operator(gq, 1.0).matrix();
  const CMatrix t = time_operator(gt).matrix();
  const CMatrix s = energy_operator(gt, 1.0).matrix();
  for (int trial = 0; trial < 10; ++trial) {
    const CVector f = random_state(gq, gen).amp();
    const CVector g = random_state(gt, gen).amp();
    const CMatrix psi = f * g.transpose();  // rows q, columns t
    // (A (x) 1) psi = A psi, (1 (x) B) psi = psi B^T.
    for (const CMatrix* a : {&q, &p}) {
      for (const CMatrix* b : {&t, &s}) {
        const CMatrix ab = (*a) * (psi * b->transpose());
        const CMatrix ba = ((*a) * psi) * b->transpose();
        CHECK((ab - ba).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("energy eigenvectors") {
  const double hbar = 1.0;
  const GridSpec g = make_grid(0.0, 4.0, 64, true);
  const StateVector zero = energy_eigenvector(g, 0.0, hbar);
  CHECK(zero.is_normalized());
  CHECK((zero.amp().array() - zero[0]).abs().maxCoeff() < 1e-15);

  const double quantum = 2.0 * kPi * hbar / g.length();
  const StateVector e = energy_eigenvector(g, 5.0 * quantum, hbar);
  const double modulus = std::abs(inner_product(time_eigenstate(g, g.point(0)), e));
  for (std::size_t k = 0; k < 64; ++k) {
    CHECK(std::abs(inner_product(time_eigenstate(g, g.point(k)), e)) ==
          doctest::Approx(modulus).epsilon(1e-13));
  }
  const LinearOperator s_hat = energy_operator(g, hbar);
  CHECK(distance(s_hat.apply(e), 5.0 * quantum * e.amp()) < 1e-8);
}

TEST_CASE("energy eigenvectors are orthonormal (direct summation)") {
  const double hbar = 1.0;
  const GridSpec g = make_grid(-1.0, 1.0, 32, true);
  const std::vector<double> energies = grid_energies(g, hbar);
  for (std::size_t a = 0; a < energies.size(); a += 3) {
    for (std::size_t b = 0; b < energies.size(); b += 3) {
      const StateVector ea = energy_eigenvector(g, energies[a], hbar);
      const StateVector eb = energy_eigenvector(g, energies[b], hbar);
      Complex sum{};
      for (std::size_t k = 0; k < g.size(); ++k) sum += std::conj(ea[k]) * eb[k] * g.step();
      CHECK(std::abs(sum - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("incommensurate energies snap with a warning") {
  WarningCapture capture;
  const GridSpec g = make_grid(0.0, 1.0, 16, true);
  const double quantum = 2.0 * kPi;
  CHECK(snap_energy(g, 2.4 * quantum, 1.0) == doctest::Approx(2.0 * quantum));
  const StateVector e = energy_eigenvector(g, 2.4 * quantum, 1.0);
  CHECK(capture.messages.size() == 1);
  const StateVector exact = energy_eigenvector(g, 2.0 * quantum, 1.0);
  CHECK(capture.messages.size() == 1);
  CHECK((e.amp() - exact.amp()).norm() < 1e-14);
}

TEST_CASE("operator checks table covers both relations") {
  const auto rows = run_operator_checks({64}, 4);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].relation == "time_energy");
  CHECK(rows[4].relation == "position_momentum");
  for (const auto& row : rows) CHECK(row.residual < 1e-6);
}
