#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chronoslit/grids.hpp"

namespace chronoslit {

/// Geometry, timing and carrier parameters of the rotating-source two-path
/// apparatus. SI units throughout. Slit A (reached by the long route) sits at
/// x = +d/2, slit B at x = -d/2.
struct ExperimentConfig {
  double wavelength = 0.0;       // m
  double v_group = 0.0;          // m/s, envelope speed
  double v_phase = 0.0;          // m/s
  double slit_separation = 0.0;  // d, m
  double screen_distance = 0.0;  // D, m
  double extra_long_path = 0.0;  // pre-slit excess of the long route, m
  double delta_T = 0.0;          // container half-turn time, s
  double pulse_sigma = 0.0;      // envelope RMS width, s
  double t1 = 0.0;               // first opening alignment, s
  GridSpec screen{-1.0, 1.0, 8, false};
  double hbar = kHbarSI;

  /// lambda D / d
  double nominal_fringe_spacing() const { return wavelength * screen_distance / slit_separation; }
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& cfg);

enum class Path { A, B };

struct CoherentEmission {
  Complex c_a;
  Complex c_b;
};
struct SingleEmission {
  Path which;
};
struct IncoherentEmission {
  double p_a;
  double p_b;
};

using EmissionModel = std::variant<CoherentEmission, SingleEmission, IncoherentEmission>;

/// cA = sqrt(u), cB = sqrt(1-u) exp(-i phase), so arg(cA conj(cB)) = phase.
EmissionModel coherent_emission(double weight_a, double relative_phase = 0.0);
EmissionModel incoherent_emission(double p_a);
void validate(const EmissionModel& emission);
std::string describe(const EmissionModel& emission);

struct IntensityPattern {
  GridSpec screen;
  std::vector<double> intensity;
  std::vector<double> path_a;  // single-path intensity |cA|^2 a_A^2 (or its analogue)
  std::vector<double> path_b;
  std::vector<double> gamma;
  std::vector<double> phase;
  double normalization = 0.0;  // integral of intensity over the screen
  double nominal_fringe_spacing = 0.0;
  bool empty = false;
};

struct PathLengths {
  double long_path;   // L_A
  double short_path;  // L_B
};

PathLengths path_lengths(const ExperimentConfig& cfg, double x);

/// delta(x) = (L_A - L_B) / v_group - Delta T; zero when the two envelopes
/// reach x together.
double synchrony_mismatch(const ExperimentConfig& cfg, double x);

/// Normalized overlap of two unit-peak Gaussian envelopes of RMS width sigma
/// offset by delta, by composite Simpson quadrature.
double envelope_overlap(double sigma, double delta);
double envelope_overlap(const ExperimentConfig& cfg, double delta);

struct PatternOptions {
  bool cross_term = true;
};

IntensityPattern intensity_pattern(const ExperimentConfig& cfg, const EmissionModel& emission,
                                   PatternOptions options = {});

class VisibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (I_max - I_min) / (I_max + I_min) over a window of the given width centred
/// at x = 0, with parabolic refinement of sampled extrema. The window must
/// span at least three nominal fringe periods.
double visibility(const IntensityPattern& pattern, double window);

/// Same estimator on raw samples (used for count histograms).
double visibility(const GridSpec& screen, const std::vector<double>& values, double window,
                  double nominal_fringe_spacing);

/// Mean peak-to-peak distance of the intensity maxima inside the window.
double fringe_spacing(const IntensityPattern& pattern, double window);

enum class ScanParameter { delta_T, pulse_sigma, weight_split };

ScanParameter parse_scan_parameter(const std::string& name);
std::string to_string(ScanParameter parameter);

struct ScanPoint {
  double value;
  double visibility;
};

/// Visibility for each value, in input order. Points are evaluated in parallel.
std::vector<ScanPoint> visibility_scan(const ExperimentConfig& cfg, const EmissionModel& emission,
                                       ScanParameter parameter, const std::vector<double>& values,
                                       double window);

/// Gaussian opening weights of the container towards the long (A) and short
/// (B) routes at emission time t_emit; gate width equals the pulse sigma.
std::pair<double, double> emission_gate(const ExperimentConfig& cfg, double t_emit);

}  // namespace chronoslit
