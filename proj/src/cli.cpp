#include "chronoslit/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "chronoslit/config.hpp"
#include "chronoslit/constraint.hpp"
#include "chronoslit/detection.hpp"
#include "chronoslit/diagnostics.hpp"
#include "chronoslit/experiment.hpp"
#include "chronoslit/output.hpp"
#include "chronoslit/top_algebra.hpp"

namespace chronoslit {
namespace {

namespace fs = std::filesystem;

class PhaseTimer {
 public:
  void mark(const std::string& phase) {
    const auto now = std::chrono::steady_clock::now();
    timing_[phase] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const Json& json() const { return timing_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  Json timing_ = Json::object();
};

constexpr const char* kRngDescription =
    "counter-based SplitMix64: output i of stream s is mix(key + (i + 1) * 0x9e3779b97f4a7c15) "
    "with key = mix(seed ^ mix(s + 0x9e3779b97f4a7c15)); detection shard j (65536 events each) "
    "uses stream j, bootstrap resample r uses stream 2^62 + r";

// Used by constraint-demo when no --config is given.
constexpr const char* kDefaultConstraint =
    "[constraint]\n"
    "hamiltonian = free\n"
    "q_lo = -20\n"
    "q_hi = 20\n"
    "q_n = 128\n"
    "t_hi = 1.5\n"
    "t_n = 256\n";

struct Manifest {
  explicit Manifest(std::string name) : subcommand(std::move(name)) {}

  std::string subcommand;
  Json config_echo = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};

void write_output(const fs::path& path, const std::string& contents, Manifest& manifest) {
  write_atomically(path, contents);
  manifest.outputs.push_back(path.string());
}

void write_manifest(const fs::path& dir, Manifest& manifest, const PhaseTimer& timer) {
  const fs::path path = dir / "manifest.json";
  manifest.outputs.push_back(path.string());
  const Json doc = {{"tool_version", kToolVersion},
                    {"subcommand", manifest.subcommand},
                    {"seed", manifest.seed},
                    {"rng", kRngDescription},
                    {"config_echo", manifest.config_echo},
                    {"outputs", manifest.outputs},
                    {"timing", timer.json()}};
  write_atomically(path, dump_json(doc, RealFormat::round_trip));
}

// Options shared by the subcommands; each subcommand registers the subset it uses.
struct Options {
  std::string config;
  std::string emission;
  std::optional<std::uint64_t> events;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string scan_param;
  double scan_from = 0.0;
  double scan_to = 0.0;
  int scan_steps = 0;
  std::optional<std::size_t> n;
};

RunConfig load_experiment_config(const Options& opt) {
  RunConfig cfg = parse_config(opt.config);
  if (!cfg.experiment) {
    throw ConfigError(opt.config + ": this subcommand needs [experiment] and [screen] sections");
  }
  if (!opt.emission.empty()) {
    cfg.emission = parse_emission(opt.emission, cfg.emission_weight_a, cfg.emission_phase);
    cfg.echo["emission"]["model"] = opt.emission;
  }
  if (opt.events) {
    cfg.events = *opt.events;
    cfg.echo["analysis"]["events"] = cfg.events;
  }
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.echo["analysis"]["seed"] = cfg.seed;
  }
  return cfg;
}

int cmd_check_operators(const Options& opt) {
  PhaseTimer timer;
  const std::vector<std::size_t> sizes =
      opt.n ? std::vector<std::size_t>{*opt.n} : std::vector<std::size_t>{64, 128, 256};
  constexpr std::size_t probes = 20;
  constexpr double tolerance = 1e-6;
  const auto rows = run_operator_checks(sizes, probes);
  timer.mark("residuals");

  CsvTable table("relation [-], n [samples], probe_id [-], residual [dimensionless, hbar = 1]",
                 {"relation", "n", "probe_id", "residual"});
  bool pass = true;
  for (const auto& row : rows) {
    table.add_row({row.relation, std::to_string(row.n), std::to_string(row.probe_id),
                   format_real(row.residual)});
    pass = pass && row.residual < tolerance;
  }
  const std::string csv = table.str();
  std::cout << csv;

  Manifest manifest("check-operators");
  manifest.config_echo = {{"sizes", sizes}, {"probes", probes}, {"tolerance", tolerance}};
  const fs::path dir(opt.out);
  write_output(dir / "operators.csv", csv, manifest);
  timer.mark("write");
  write_manifest(dir, manifest, timer);
  if (!pass) {
    std::cerr << "check-operators: a canonical residual reached the " << tolerance
              << " tolerance\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

StateVector gaussian_packet(const GridSpec& grid, double centre, double sigma, double wavenumber) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  CVector amp(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double u = grid.point(static_cast<std::size_t>(k)) - centre;
    amp(k) = std::polar(std::exp(-u * u / (4.0 * sigma * sigma)), wavenumber * u);
  }
  return StateVector(grid, std::move(amp)).normalized();
}

int cmd_constraint_demo(const Options& opt) {
  PhaseTimer timer;
  const RunConfig cfg = opt.config.empty()
                            ? parse_config_text(kDefaultConstraint, "<built-in constraint setup>")
                            : parse_config(opt.config);
  if (!cfg.constraint) throw ConfigError(opt.config + ": constraint-demo needs a [constraint] section");
  const ConstraintSetup& setup = *cfg.constraint;

  const Hamiltonian h = setup.hamiltonian == "harmonic"
                            ? hamiltonian_harmonic(setup.grid_q, setup.mass, setup.omega, setup.hbar)
                            : hamiltonian_free(setup.grid_q, setup.mass, setup.hbar);
  const StateVector initial = gaussian_packet(setup.grid_q, setup.packet_center,
                                              setup.packet_sigma, setup.packet_wavenumber);
  timer.mark("setup");
  const SpaceTimeState psi = solve_constraint(h, setup.grid_t, initial, setup.substeps);
  timer.mark("propagate");
  const ConstraintResidual residual = constraint_residual(psi, h);
  const SpectralWindow window = setup.spectral_window == "rectangular"
                                    ? SpectralWindow::rectangular
                                    : SpectralWindow::gaussian;
  const EnergySupport support = energy_support(psi, setup.hbar, window);
  const double drift = norm_drift(psi);
  timer.mark("analyse");

  std::vector<std::string> columns{"q"};
  for (std::size_t k = 0; k < setup.grid_t.size(); ++k) {
    columns.push_back("t=" + format_real(setup.grid_t.point(k)));
  }
  CsvTable magnitude("|psi(q,t)| [length^-1/2]; rows: q samples, columns: t samples", columns);
  for (std::size_t q = 0; q < setup.grid_q.size(); ++q) {
    std::vector<std::string> row{format_real(setup.grid_q.point(q))};
    for (std::size_t k = 0; k < setup.grid_t.size(); ++k) {
      row.push_back(format_real(std::abs(psi.amp()(static_cast<Eigen::Index>(q),
                                                   static_cast<Eigen::Index>(k)))));
    }
    magnitude.add_row(std::move(row));
  }
  CsvTable spectrum("energy [hbar units], weight [fraction]", {"energy", "weight"});
  for (std::size_t k = 0; k < support.energy.size(); ++k) {
    spectrum.add_row({format_real(support.energy[k]), format_real(support.weight[k])});
  }
  const double negative = support.negative_weight();
  const Json summary = {{"residual_interior", residual.interior},
                        {"residual_spectral", residual.spectral},
                        {"negative_energy_weight", negative},
                        {"norm_drift", drift}};

  Manifest manifest("constraint-demo");
  manifest.config_echo = cfg.echo;
  const fs::path dir(opt.out);
  write_output(dir / "psi_magnitude.csv", magnitude.str(), manifest);
  write_output(dir / "energy_support.csv", spectrum.str(), manifest);
  write_output(dir / "constraint_summary.json", dump_json(summary), manifest);
  timer.mark("write");
  write_manifest(dir, manifest, timer);
  std::cout << dump_json(summary);

  if (drift > 1e-10 || negative >= 1e-6) {
    std::cerr << "constraint-demo: norm drift or negative-energy weight above tolerance\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_run(const Options& opt) {
  PhaseTimer timer;
  const RunConfig cfg = load_experiment_config(opt);
  const ExperimentConfig& exp = *cfg.experiment;
  const double window = cfg.resolved_window();
  const IntensityPattern pattern = intensity_pattern(exp, cfg.emission);
  timer.mark("pattern");

  Json summary = {{"visibility", visibility(pattern, window)},
                  {"fringe_spacing_m", nullptr},
                  {"synchrony_mismatch_center_s", synchrony_mismatch(exp, 0.0)},
                  {"emission_model", describe(cfg.emission)}};
  try {
    summary["fringe_spacing_m"] = fringe_spacing(pattern, window);
  } catch (const VisibilityError&) {
    // No resolvable maxima (single-path or incoherent patterns): leave null.
  }

  summary["n_events"] = cfg.events;
  summary["seed"] = cfg.seed;
  summary["chi2"] = nullptr;
  summary["p_value"] = nullptr;
  summary["visibility_mc"] = nullptr;
  summary["visibility_mc_stderr"] = nullptr;
  std::optional<DetectionHistogram> hist;
  if (cfg.events > 0) {
    hist = sample_detections(pattern, cfg.events, cfg.seed);
    timer.mark("detections");
    try {
      const GofResult gof = histogram_gof(*hist, pattern);
      summary["chi2"] = gof.chi2;
      summary["p_value"] = gof.p_value;
    } catch (const DetectionError& err) {
      warn(std::string("goodness of fit skipped: ") + err.what());
    }
    try {
      const VisibilityEstimate v = visibility_from_histogram(*hist, window);
      summary["visibility_mc"] = v.visibility;
      summary["visibility_mc_stderr"] = v.standard_error;
    } catch (const DetectionError& err) {
      warn(std::string("histogram visibility skipped: ") + err.what());
    } catch (const VisibilityError& err) {
      warn(std::string("histogram visibility skipped: ") + err.what());
    }
    timer.mark("statistics");
  }

  std::vector<std::string> columns{"x_m",     "intensity", "path_A_intensity", "path_B_intensity",
                                   "gamma", "phase_rad"};
  std::string units =
      "x_m [m], intensity [m^-2], path_A_intensity [m^-2], path_B_intensity [m^-2], gamma [1], "
      "phase_rad [rad]";
  if (hist) {
    columns.push_back("counts");
    units += ", counts [events]";
  }
  CsvTable table(units, columns);
  for (std::size_t k = 0; k < pattern.intensity.size(); ++k) {
    std::vector<std::string> row{format_real(pattern.screen.point(k)),
                                 format_real(pattern.intensity[k]), format_real(pattern.path_a[k]),
                                 format_real(pattern.path_b[k]),    format_real(pattern.gamma[k]),
                                 format_real(pattern.phase[k])};
    if (hist) row.push_back(std::to_string(hist->counts[k]));
    table.add_row(std::move(row));
  }

  Manifest manifest("run");
  manifest.config_echo = cfg.echo;
  manifest.seed = cfg.seed;
  const fs::path dir(opt.out);
  write_output(dir / "pattern.csv", table.str(), manifest);
  write_output(dir / "summary.json", dump_json(summary), manifest);
  timer.mark("write");
  write_manifest(dir, manifest, timer);
  std::cout << dump_json(summary);

  for (double v : pattern.intensity) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      std::cerr << "run: intensity pattern contains negative or non-finite values\n";
      return kExitCheckFailed;
    }
  }
  return kExitOk;
}

int cmd_scan(const Options& opt) {
  PhaseTimer timer;
  const RunConfig cfg = load_experiment_config(opt);
  const ScanParameter parameter = parse_scan_parameter(opt.scan_param);
  if (opt.scan_steps < 1) throw ConfigError("--scan-steps must be at least 1");
  std::vector<double> values;
  for (int k = 0; k < opt.scan_steps; ++k) {
    const double frac = opt.scan_steps == 1 ? 0.0 : static_cast<double>(k) / (opt.scan_steps - 1);
    values.push_back(opt.scan_from + frac * (opt.scan_to - opt.scan_from));
  }
  const auto points =
      visibility_scan(*cfg.experiment, cfg.emission, parameter, values, cfg.resolved_window());
  timer.mark("scan");

  const std::string unit = parameter == ScanParameter::weight_split ? "1" : "s";
  CsvTable table("param_value [" + unit + "] (" + to_string(parameter) + "), visibility [1]",
                 {"param_value", "visibility"});
  for (const auto& p : points) table.add_row({format_real(p.value), format_real(p.visibility)});

  Manifest manifest("scan");
  manifest.config_echo = cfg.echo;
  manifest.config_echo["scan"] = {{"param", to_string(parameter)},
                                  {"from", opt.scan_from},
                                  {"to", opt.scan_to},
                                  {"steps", opt.scan_steps}};
  manifest.seed = cfg.seed;
  const fs::path dir(opt.out);
  write_output(dir / "scan.csv", table.str(), manifest);
  timer.mark("write");
  write_manifest(dir, manifest, timer);
  std::cout << table.str();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"chronoslit: operator-of-time checks and temporal double-slit simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  app.footer(config_grammar() +
             "\nEnvironment: CHRONOSLIT_THREADS caps the worker count.\n"
             "Exit codes: 0 success, 1 validation error, 2 numerical check failed.");
  Options opt;

  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory (created if missing)")
        ->capture_default_str();
  };
  const auto add_experiment = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Experiment config file")->required();
    sub->add_option("--emission", opt.emission,
                    "Emission model override: coherent|single:A|single:B|incoherent");
  };

  auto* check = app.add_subcommand(
      "check-operators", "Canonical commutator residuals of (t, s) and (q, p) as CSV");
  check->add_option("--n", opt.n, "Single grid size (default: 64, 128 and 256)")
      ->check(CLI::Range(8, 4096));
  add_out(check);

  auto* demo = app.add_subcommand(
      "constraint-demo", "Solve the constraint equation and report residuals and energy support");
  demo->add_option("--config", opt.config, "Config file with a [constraint] section (optional)");
  add_out(demo);

  auto* run = app.add_subcommand("run", "Screen intensity pattern, visibility and detections");
  add_experiment(run);
  run->add_option("--events", opt.events, "Monte Carlo detection events (0 disables)");
  run->add_option("--seed", opt.seed, "Seed of the detection generator");
  add_out(run);

  auto* scan = app.add_subcommand("scan", "Visibility as a function of one parameter");
  add_experiment(scan);
  scan->add_option("--scan-param", opt.scan_param, "delta_T|pulse_sigma|weight_split")
      ->required();
  scan->add_option("--scan-from", opt.scan_from, "First parameter value")->required();
  scan->add_option("--scan-to", opt.scan_to, "Last parameter value")->required();
  scan->add_option("--scan-steps", opt.scan_steps, "Number of evenly spaced values")->required();
  add_out(scan);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*check) return cmd_check_operators(opt);
    if (*demo) return cmd_constraint_demo(opt);
    if (*run) return cmd_run(opt);
    if (*scan) return cmd_scan(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const GridMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const VisibilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DetectionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace chronoslit
