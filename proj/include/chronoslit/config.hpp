#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "chronoslit/experiment.hpp"
#include "chronoslit/output.hpp"

namespace chronoslit {

/// Hamiltonian, grids and initial Gaussian packet for the constraint demo.
/// Natural units by default (hbar = mass = 1).
struct ConstraintSetup {
  std::string hamiltonian = "free";  // free | harmonic
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 1.0;
  GridSpec grid_q{-20.0, 20.0, 128, true};
  GridSpec grid_t{0.0, 1.5, 256, true};
  int substeps = 1;
  double packet_center = 0.0;
  double packet_sigma = 1.0;
  double packet_wavenumber = 0.0;
  std::string spectral_window = "gaussian";  // gaussian | rectangular
};

struct RunConfig {
  std::optional<ExperimentConfig> experiment;
  EmissionModel emission = CoherentEmission{Complex(std::sqrt(0.5), 0.0),
                                            Complex(std::sqrt(0.5), 0.0)};
  double emission_weight_a = 0.5;
  double emission_phase = 0.0;
  std::optional<double> window;
  std::uint64_t events = 0;
  std::uint64_t seed = 1;
  std::optional<ConstraintSetup> constraint;
  /// Fully resolved configuration, defaults included, for the run manifest.
  Json echo = Json::object();

  /// Visibility window: the configured one or four nominal fringe periods.
  double resolved_window() const;
};

/// Reads a `key = value` file with `[section]` headers. '#' starts a comment.
/// Sections: experiment, screen, emission, analysis, constraint. Unknown
/// sections or keys, duplicates, malformed values and invariant violations
/// raise ConfigError naming the source line or key.
/// A file whose first non-blank character is '{' is read as JSON instead: a
/// run manifest (its "config_echo" member) or a bare configuration echo.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& source_name = "<config>");

/// Rebuilds a configuration from the "config_echo" object of a run manifest.
/// Members other than the five config sections are ignored.
RunConfig config_from_echo(const Json& echo, const std::string& source_name = "<echo>");

/// coherent | single:A | single:B | incoherent; the weight and phase apply to
/// the coherent and incoherent models.
EmissionModel parse_emission(const std::string& spec, double weight_a, double relative_phase);

/// Human-readable grammar, printed by `--help`.
std::string config_grammar();

}  // namespace chronoslit
