#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chronoslit/diagnostics.hpp"
#include "chronoslit/grids.hpp"

namespace testing_support {

using chronoslit::CMatrix;
using chronoslit::Complex;
using chronoslit::CVector;
using chronoslit::GridSpec;
using chronoslit::StateVector;

constexpr double kPi = std::numbers::pi;

inline StateVector gaussian(const GridSpec& grid, double centre, double sigma, double k0) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  CVector amp(n);
  const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.25);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double u = grid.point(static_cast<std::size_t>(k)) - centre;
    amp(k) = norm * std::exp(Complex(-u * u / (4.0 * sigma * sigma), k0 * u));
  }
  return StateVector(grid, amp);
}

/// Closed-form free evolution of the Gaussian above (hbar = mass = 1).
inline Complex free_gaussian(double q, double t, double centre, double sigma, double k0) {
  const Complex spread(1.0, t / (2.0 * sigma * sigma));
  const double u = q - centre;
  const double drift = u - k0 * t;
  const Complex expo = -drift * drift / (4.0 * sigma * sigma * spread) +
                       Complex(0.0, k0 * u - 0.5 * k0 * k0 * t);
  return std::pow(2.0 * kPi * sigma * sigma, -0.25) / std::sqrt(spread) * std::exp(expo);
}

/// Strang split-step propagator with an O(n^2) textbook DFT, written without
/// any library code: half potential kick, exact kinetic drift in Fourier
/// space, half kick. Returns psi(q, t_k) for k = 0 .. steps.
class SplitStepOracle {
 public:
  SplitStepOracle(const GridSpec& grid_q, double mass, double hbar,
                  std::function<double(double)> potential)
      : grid_(grid_q), mass_(mass), hbar_(hbar), n_(grid_q.size()) {
    twiddle_.resize(n_);
    for (std::size_t m = 0; m < n_; ++m) {
      twiddle_[m] = std::polar(1.0, -2.0 * kPi * static_cast<double>(m) / static_cast<double>(n_));
    }
    potential_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) potential_[k] = potential(grid_.point(k));
  }

  std::vector<std::vector<Complex>> run(const std::vector<Complex>& initial, double dt,
                                        std::size_t steps, std::size_t substeps) const {
    const double h = dt / static_cast<double>(substeps);
    std::vector<Complex> kick(n_);
    std::vector<Complex> drift(n_);
    const double length = grid_.length();
    for (std::size_t k = 0; k < n_; ++k) {
      kick[k] = std::polar(1.0, -potential_[k] * h / (2.0 * hbar_));
      const long j = k < n_ / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n_);
      const double wave = 2.0 * kPi * static_cast<double>(j) / length;
      drift[k] = std::polar(1.0, -hbar_ * wave * wave * h / (2.0 * mass_));
    }
    std::vector<std::vector<Complex>> out{initial};
    std::vector<Complex> psi = initial;
    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t sub = 0; sub < substeps; ++sub) {
        for (std::size_t k = 0; k < n_; ++k) psi[k] *= kick[k];
        std::vector<Complex> spec = dft(psi, false);
        for (std::size_t k = 0; k < n_; ++k) spec[k] *= drift[k];
        psi = dft(spec, true);
        for (std::size_t k = 0; k < n_; ++k) psi[k] *= kick[k];
      }
      out.push_back(psi);
    }
    return out;
  }

 private:
  std::vector<Complex> dft(const std::vector<Complex>& in, bool inverse) const {
    std::vector<Complex> out(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      Complex acc{};
      for (std::size_t m = 0; m < n_; ++m) {
        const Complex w = twiddle_[(j * m) % n_];
        acc += in[m] * (inverse ? std::conj(w) : w);
      }
      out[j] = inverse ? acc / static_cast<double>(n_) : acc;
    }
    return out;
  }

  GridSpec grid_;
  double mass_;
  double hbar_;
  std::size_t n_;
  std::vector<Complex> twiddle_;
  std::vector<double> potential_;
};

/// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() {
    previous_ = chronoslit::set_warning_sink([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { chronoslit::set_warning_sink(previous_); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  std::vector<std::string> messages;

 private:
  chronoslit::WarningSink previous_;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 gen(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("chronoslit_" + tag + "_" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline StateVector random_state(const GridSpec& grid, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  CVector amp(static_cast<Eigen::Index>(grid.size()));
  for (auto& a : amp) a = Complex(normal(gen), normal(gen));
  return StateVector(grid, amp).normalized();
}

}  // namespace testing_support
