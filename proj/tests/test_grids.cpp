#include <doctest.h>

#include <random>

#include "chronoslit/grids.hpp"
#include "test_support.hpp"

using namespace chronoslit;
using testing_support::random_state;

TEST_CASE("make_grid periodic spacing and points") {
  const GridSpec g = make_grid(0.0, 1.0, 8, true);
  CHECK(g.step() == doctest::Approx(0.125).epsilon(1e-15));
  for (std::size_t k = 0; k < 8; ++k) CHECK(g.point(k) == 0.125 * static_cast<double>(k));
}

TEST_CASE("make_grid closed interval spacing") {
  const GridSpec g = make_grid(-1.0, 1.0, 16, false);
  CHECK(g.step() == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
  CHECK(g.point(15) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_grid rejects degenerate input") {
  CHECK_THROWS_AS(make_grid(0.0, 0.0, 8, true), ConfigError);
  CHECK_THROWS_AS(make_grid(1.0, 0.0, 8, true), ConfigError);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 7, true), ConfigError);
}

TEST_CASE("nearest_index snaps and rejects points off the grid") {
  const GridSpec g = make_grid(0.0, 1.0, 8, true);
  CHECK(g.nearest_index(0.26) == 2);
  CHECK(g.nearest_index(0.0) == 0);
  CHECK_THROWS_AS(g.nearest_index(1.5), ConfigError);
  CHECK_THROWS_AS(g.nearest_index(-0.1), ConfigError);
}

TEST_CASE("inner product of a normalized state with itself is one") {
  std::mt19937_64 gen(11);
  const GridSpec g = make_grid(-3.0, 3.0, 64, true);
  const StateVector a = random_state(g, gen);
  CHECK(a.is_normalized());
  CHECK(std::abs(inner_product(a, a) - 1.0) < 1e-12);
}

TEST_CASE("distinct grid-delta kets are orthogonal") {
  const GridSpec g = make_grid(0.0, 1.0, 8, true);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      const Complex ip = inner_product(time_eigenstate(g, g.point(i)), time_eigenstate(g, g.point(j)));
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-14);
    }
  }
}

TEST_CASE("commensurate plane waves are orthogonal (direct summation)") {
  const GridSpec g = make_grid(0.0, 2.0, 32, true);
  const auto wave = [&](int k) {
    CVector amp(32);
    for (Eigen::Index m = 0; m < 32; ++m) {
      amp(m) = std::polar(1.0, -2.0 * testing_support::kPi * k * g.point(static_cast<std::size_t>(m)) / 2.0);
    }
    return StateVector(g, amp);
  };
  for (int a = -4; a <= 4; ++a) {
    for (int b = -4; b <= 4; ++b) {
      if (a != b) CHECK(std::abs(inner_product(wave(a), wave(b))) < 1e-10);
    }
  }
}

TEST_CASE("inner product requires matching grids") {
  const StateVector a(make_grid(0.0, 1.0, 8, true));
  const StateVector b(make_grid(0.0, 1.0, 8, false));
  CHECK_THROWS_AS(inner_product(a, b), GridMismatch);
}

TEST_CASE("inner product is sesquilinear and conjugate symmetric") {
  std::mt19937_64 gen(5);
  const GridSpec g = make_grid(-1.0, 1.0, 40, false);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector a = random_state(g, gen);
    const StateVector b = random_state(g, gen);
    const StateVector c = random_state(g, gen);
    const Complex alpha(0.3, -1.7);
    const Complex beta(-0.8, 0.4);
    CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) < 1e-12);
    const StateVector mix(g, alpha * b.amp() + beta * c.amp());
    const Complex linear = alpha * inner_product(a, b) + beta * inner_product(a, c);
    CHECK(std::abs(inner_product(a, mix) - linear) < 1e-12);
    const StateVector left(g, alpha * a.amp());
    CHECK(std::abs(inner_product(left, b) - std::conj(alpha) * inner_product(a, b)) < 1e-12);
  }
}

TEST_CASE("time eigenstate is a scaled grid delta") {
  const GridSpec g = make_grid(0.0, 1.0, 8, true);
  const StateVector t = time_eigenstate(g, 0.25);
  for (std::size_t k = 0; k < 8; ++k) {
    if (k == 2) {
      CHECK(t[k].real() == doctest::Approx(1.0 / std::sqrt(0.125)).epsilon(1e-15));
    } else {
      CHECK(t[k] == Complex(0.0, 0.0));
    }
  }
  CHECK(std::abs(inner_product(t, t) - 1.0) < 1e-12);
  CHECK_THROWS_AS(time_eigenstate(g, 2.0), ConfigError);
}

TEST_CASE("temporal superposition with equal weights") {
  const GridSpec g = make_grid(0.0, 1.0, 16, true);
  const double c = 1.0 / std::sqrt(2.0);
  const double t_a = 0.25;
  const double t_b = t_a + 0.5;
  const StateVector psi = temporal_superposition(g, c, t_a, c, t_b);
  int nonzero = 0;
  for (std::size_t k = 0; k < 16; ++k) nonzero += std::abs(psi[k]) > 0.0 ? 1 : 0;
  CHECK(nonzero == 2);
  CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("temporal superposition with cB = 0 is the pure |tA>") {
  const GridSpec g = make_grid(0.0, 1.0, 16, true);
  const StateVector psi = temporal_superposition(g, 1.0, 0.25, 0.0, 0.5);
  const StateVector pure = time_eigenstate(g, 0.25);
  CHECK((psi.amp() - pure.amp()).cwiseAbs().maxCoeff() < 1e-15);
  const StateVector other = temporal_superposition(g, 0.0, 0.25, Complex(0.0, 2.0), 0.5);
  CHECK(std::abs(std::abs(inner_product(time_eigenstate(g, 0.5), other)) - 1.0) < 1e-12);
}

TEST_CASE("temporal superposition keeps the relative phase") {
  const GridSpec g = make_grid(0.0, 1.0, 16, true);
  const StateVector psi = temporal_superposition(g, 1.0, 0.25, Complex(0.0, 1.0), 0.5);
  CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  const Complex a = inner_product(time_eigenstate(g, 0.25), psi);
  const Complex b = inner_product(time_eigenstate(g, 0.5), psi);
  CHECK(std::arg(b / a) == doctest::Approx(testing_support::kPi / 2.0).epsilon(1e-14));
}

TEST_CASE("temporal superposition errors") {
  const GridSpec g = make_grid(0.0, 1.0, 16, true);
  CHECK_THROWS_AS(temporal_superposition(g, 1.0, 0.25, 1.0, 0.26), ConfigError);
  CHECK_THROWS_AS(temporal_superposition(g, 0.0, 0.25, 0.0, 0.5), ConfigError);
}

TEST_CASE("temporal superposition probabilities sum to one") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  const GridSpec g = make_grid(0.0, 1.0, 64, true);
  for (int trial = 0; trial < 50; ++trial) {
    const Complex ca(normal(gen), normal(gen));
    const Complex cb(normal(gen), normal(gen));
    const StateVector psi = temporal_superposition(g, ca, 0.1, cb, 0.6);
    const double pa = std::norm(inner_product(time_eigenstate(g, 0.1), psi));
    const double pb = std::norm(inner_product(time_eigenstate(g, 0.6), psi));
    CHECK(std::abs(pa + pb - 1.0) < 1e-12);
  }
}

TEST_CASE("space-time state checks its shape and slices columns") {
  const GridSpec q = make_grid(-1.0, 1.0, 8, true);
  const GridSpec t = make_grid(0.0, 1.0, 10, true);
  CHECK_THROWS_AS(SpaceTimeState(q, t, CMatrix::Zero(8, 9)), GridMismatch);
  CMatrix m = CMatrix::Zero(8, 10);
  m(3, 4) = Complex(2.0, 0.0);
  const SpaceTimeState s(q, t, m);
  CHECK(s.slice(4)[3] == Complex(2.0, 0.0));
  CHECK(s.norm() == doctest::Approx(2.0 * std::sqrt(q.step() * t.step())));
}
