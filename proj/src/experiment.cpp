#include "chronoslit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chronoslit/parallel.hpp"

namespace chronoslit {
namespace {

void require_positive(double value, const char* key) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(key) + " must be strictly positive, got " +
                      std::to_string(value));
  }
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  require_positive(cfg.wavelength, "wavelength");
  require_positive(cfg.v_group, "v_group");
  require_positive(cfg.v_phase, "v_phase");
  require_positive(cfg.slit_separation, "slit_separation");
  require_positive(cfg.screen_distance, "screen_distance");
  require_positive(cfg.extra_long_path, "extra_long_path");
  require_positive(cfg.delta_T, "delta_T");
  require_positive(cfg.pulse_sigma, "pulse_sigma");
  require_positive(cfg.hbar, "hbar");
  if (!std::isfinite(cfg.t1)) throw ConfigError("t1 must be finite");
  if (!(cfg.slit_separation < cfg.screen_distance / 5.0)) {
    throw ConfigError("slit_separation must be below screen_distance/5 (paraxial geometry)");
  }
  if (cfg.pulse_sigma > cfg.delta_T / 10.0) {
    std::ostringstream msg;
    msg << "pulse_sigma = " << cfg.pulse_sigma << " exceeds delta_T/10 = " << cfg.delta_T / 10.0
        << ": the pulse must be much shorter than the container half-turn time";
    throw ConfigError(msg.str());
  }
}

EmissionModel coherent_emission(double weight_a, double relative_phase) {
  if (!(weight_a >= 0.0 && weight_a <= 1.0)) throw ConfigError("weight_a must lie in [0, 1]");
  return CoherentEmission{Complex(std::sqrt(weight_a), 0.0),
                          std::polar(std::sqrt(1.0 - weight_a), -relative_phase)};
}

EmissionModel incoherent_emission(double p_a) {
  if (!(p_a >= 0.0 && p_a <= 1.0)) throw ConfigError("weight_a must lie in [0, 1]");
  return IncoherentEmission{p_a, 1.0 - p_a};
}

void validate(const EmissionModel& emission) {
  if (const auto* c = std::get_if<CoherentEmission>(&emission)) {
    if (std::abs(std::norm(c->c_a) + std::norm(c->c_b) - 1.0) > 1e-12) {
      throw ConfigError("coherent emission needs |cA|^2 + |cB|^2 = 1");
    }
  } else if (const auto* m = std::get_if<IncoherentEmission>(&emission)) {
    if (m->p_a < 0.0 || m->p_b < 0.0 || std::abs(m->p_a + m->p_b - 1.0) > 1e-12) {
      throw ConfigError("incoherent emission needs non-negative pA + pB = 1");
    }
  }
}

std::string describe(const EmissionModel& emission) {
  if (std::holds_alternative<CoherentEmission>(emission)) return "coherent";
  if (const auto* s = std::get_if<SingleEmission>(&emission)) {
    return s->which == Path::A ? "single:A" : "single:B";
  }
  return "incoherent";
}

PathLengths path_lengths(const ExperimentConfig& cfg, double x) {
  const double half = 0.5 * cfg.slit_separation;
  const double dd = cfg.screen_distance * cfg.screen_distance;
  const double to_a = std::sqrt(dd + (x - half) * (x - half));
  const double to_b = std::sqrt(dd + (x + half) * (x + half));
  return {cfg.extra_long_path + to_a, to_b};
}

namespace {

// L_A - L_B without cancellation: to_a - to_b = -2 x d / (to_a + to_b).
double path_difference(const ExperimentConfig& cfg, double x) {
  const PathLengths lengths = path_lengths(cfg, x);
  const double to_a = lengths.long_path - cfg.extra_long_path;
  const double geometric = -2.0 * x * cfg.slit_separation / (to_a + lengths.short_path);
  return cfg.extra_long_path + geometric;
}

}  // namespace

double synchrony_mismatch(const ExperimentConfig& cfg, double x) {
  return path_difference(cfg, x) / cfg.v_group - cfg.delta_T;
}

namespace {

// The product g(tau) g(tau - delta) is a Gaussian centred on delta/2 with RMS
// width sigma/sqrt(2); composite Simpson over +-12 sigma of its centre.
double overlap_integral(double sigma, double delta) {
  constexpr int intervals = 480;
  const double a = 0.5 * delta - 12.0 * sigma;
  const double h = 24.0 * sigma / intervals;
  const auto f = [&](double tau) {
    const double u = tau / sigma;
    const double v = (tau - delta) / sigma;
    return std::exp(-0.5 * (u * u + v * v));
  };
  double acc = f(a) + f(a + 24.0 * sigma);
  for (int k = 1; k < intervals; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return acc * h / 3.0;
}

double overlap_ratio(double sigma, double delta, double self) {
  return std::min(1.0, std::abs(overlap_integral(sigma, delta)) / self);
}

}  // namespace

double envelope_overlap(double sigma, double delta) {
  if (!(sigma > 0.0)) throw ConfigError("pulse_sigma must be positive");
  return overlap_ratio(sigma, delta, overlap_integral(sigma, 0.0));
}

double envelope_overlap(const ExperimentConfig& cfg, double delta) {
  return envelope_overlap(cfg.pulse_sigma, delta);
}

IntensityPattern intensity_pattern(const ExperimentConfig& cfg, const EmissionModel& emission,
                                   PatternOptions options) {
  validate(cfg);
  validate(emission);
  const std::size_t n = cfg.screen.size();
  IntensityPattern out{cfg.screen, std::vector<double>(n), std::vector<double>(n),
                       std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                       0.0, cfg.nominal_fringe_spacing(), false};

  const double two_pi = 2.0 * std::numbers::pi;
  // Carrier phase phi = (2 pi / lambda)(L_A - L_B) - omega Delta T with
  // omega = 2 pi v_phase / lambda; the constant parts are combined first.
  const double constant_path = cfg.extra_long_path - cfg.v_phase * cfg.delta_T;
  const double self_overlap = overlap_integral(cfg.pulse_sigma, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    const double x = cfg.screen.point(k);
    const PathLengths lengths = path_lengths(cfg, x);
    const double amp_a = 1.0 / lengths.long_path;
    const double amp_b = 1.0 / lengths.short_path;
    const double delta = synchrony_mismatch(cfg, x);
    const double gamma = overlap_ratio(cfg.pulse_sigma, delta, self_overlap);
    const double geometric = path_difference(cfg, x) - cfg.extra_long_path;
    const double phase = two_pi * (constant_path + geometric) / cfg.wavelength;

    double pa = 0.0;
    double pb = 0.0;
    double cross = 0.0;
    if (const auto* c = std::get_if<CoherentEmission>(&emission)) {
      pa = std::norm(c->c_a) * amp_a * amp_a;
      pb = std::norm(c->c_b) * amp_b * amp_b;
      if (options.cross_term) {
        cross = 2.0 * gamma *
                std::real(c->c_a * std::conj(c->c_b) * amp_a * amp_b * std::polar(1.0, phase));
      }
    } else if (const auto* s = std::get_if<SingleEmission>(&emission)) {
      if (s->which == Path::A) {
        pa = amp_a * amp_a;
      } else {
        pb = amp_b * amp_b;
      }
    } else {
      const auto& m = std::get<IncoherentEmission>(emission);
      pa = m.p_a * amp_a * amp_a;
      pb = m.p_b * amp_b * amp_b;
    }
    out.intensity[k] = std::max(0.0, pa + pb + cross);
    out.path_a[k] = pa;
    out.path_b[k] = pb;
    out.gamma[k] = gamma;
    out.phase[k] = phase;
  }

  const double step = cfg.screen.step();
  double integral = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const bool edge = !cfg.screen.periodic() && (k == 0 || k + 1 == n);
    integral += (edge ? 0.5 : 1.0) * out.intensity[k] * step;
  }
  out.normalization = integral;
  out.empty = !(integral > 0.0);
  return out;
}

namespace {

struct Window {
  std::size_t first;
  std::size_t last;  // inclusive
};

Window select_window(const GridSpec& screen, double window, double spacing) {
  if (!(window > 0.0)) throw VisibilityError("visibility window must be positive");
  if (spacing > 0.0 && window < 3.0 * spacing) {
    std::ostringstream msg;
    msg << "visibility window " << window << " m spans fewer than 3 fringe periods ("
        << 3.0 * spacing << " m needed)";
    throw VisibilityError(msg.str());
  }
  const double half = 0.5 * window;
  if (-half < screen.lo() || half > screen.hi()) {
    throw VisibilityError("visibility window extends beyond the screen");
  }
  const double step = screen.step();
  const auto first = static_cast<std::size_t>(std::ceil((-half - screen.lo()) / step - 1e-9));
  const auto last = static_cast<std::size_t>(std::floor((half - screen.lo()) / step + 1e-9));
  if (last >= screen.size() || last < first + 2) {
    throw VisibilityError("visibility window holds too few screen samples");
  }
  return {first, last};
}

// Vertex of the parabola through (k-1, k, k+1); returns false when flat.
bool parabolic_vertex(const std::vector<double>& v, std::size_t k, double& offset,
                      double& value) {
  const double curvature = v[k - 1] - 2.0 * v[k] + v[k + 1];
  if (curvature == 0.0) return false;
  offset = 0.5 * (v[k - 1] - v[k + 1]) / curvature;
  if (std::abs(offset) > 1.0) return false;
  value = v[k] - 0.125 * (v[k + 1] - v[k - 1]) * (v[k + 1] - v[k - 1]) / curvature;
  return true;
}

}  // namespace

double visibility(const GridSpec& screen, const std::vector<double>& values, double window,
                  double nominal_fringe_spacing) {
  if (values.size() != screen.size()) throw GridMismatch("values do not match the screen grid");
  const Window w = select_window(screen, window, nominal_fringe_spacing);

  double hi = values[w.first];
  double lo = values[w.first];
  for (std::size_t k = w.first; k <= w.last; ++k) {
    hi = std::max(hi, values[k]);
    lo = std::min(lo, values[k]);
    if (k == 0 || k + 1 >= values.size()) continue;
    const bool peak = values[k] >= values[k - 1] && values[k] >= values[k + 1];
    const bool trough = values[k] <= values[k - 1] && values[k] <= values[k + 1];
    double offset = 0.0;
    double value = 0.0;
    if ((peak || trough) && parabolic_vertex(values, k, offset, value)) {
      if (peak) hi = std::max(hi, value);
      if (trough) lo = std::min(lo, std::max(0.0, value));
    }
  }
  if (hi + lo <= 0.0) throw VisibilityError("flat zero pattern has undefined visibility");
  return std::clamp((hi - lo) / (hi + lo), 0.0, 1.0);
}

double visibility(const IntensityPattern& pattern, double window) {
  return visibility(pattern.screen, pattern.intensity, window, pattern.nominal_fringe_spacing);
}

double fringe_spacing(const IntensityPattern& pattern, double window) {
  const Window w = select_window(pattern.screen, window, pattern.nominal_fringe_spacing);
  const auto& v = pattern.intensity;
  std::vector<double> peaks;
  for (std::size_t k = std::max<std::size_t>(w.first, 1); k <= w.last && k + 1 < v.size(); ++k) {
    if (v[k] > v[k - 1] && v[k] >= v[k + 1]) {
      double offset = 0.0;
      double value = 0.0;
      if (!parabolic_vertex(v, k, offset, value)) offset = 0.0;
      peaks.push_back(pattern.screen.point(k) + offset * pattern.screen.step());
    }
  }
  if (peaks.size() < 2) throw VisibilityError("fewer than two fringe maxima inside the window");
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

ScanParameter parse_scan_parameter(const std::string& name) {
  if (name == "delta_T") return ScanParameter::delta_T;
  if (name == "pulse_sigma") return ScanParameter::pulse_sigma;
  if (name == "weight_split") return ScanParameter::weight_split;
  throw ConfigError("unknown scan parameter '" + name +
                    "' (expected delta_T, pulse_sigma or weight_split)");
}

std::string to_string(ScanParameter parameter) {
  switch (parameter) {
    case ScanParameter::delta_T:
      return "delta_T";
    case ScanParameter::pulse_sigma:
      return "pulse_sigma";
    case ScanParameter::weight_split:
      return "weight_split";
  }
  return "unknown";
}

std::vector<ScanPoint> visibility_scan(const ExperimentConfig& cfg, const EmissionModel& emission,
                                       ScanParameter parameter, const std::vector<double>& values,
                                       double window) {
  if (parameter == ScanParameter::weight_split &&
      std::holds_alternative<SingleEmission>(emission)) {
    throw ConfigError("weight_split scan needs a coherent or incoherent emission model");
  }
  // Validate every point up front so a bad value fails before any work is done.
  std::vector<std::pair<ExperimentConfig, EmissionModel>> jobs;
  jobs.reserve(values.size());
  for (double value : values) {
    ExperimentConfig point_cfg = cfg;
    EmissionModel point_emission = emission;
    switch (parameter) {
      case ScanParameter::delta_T:
        point_cfg.delta_T = value;
        break;
      case ScanParameter::pulse_sigma:
        point_cfg.pulse_sigma = value;
        break;
      case ScanParameter::weight_split:
        if (const auto* c = std::get_if<CoherentEmission>(&emission)) {
          point_emission = coherent_emission(value, std::arg(c->c_a * std::conj(c->c_b)));
        } else {
          point_emission = incoherent_emission(value);
        }
        break;
    }
    validate(point_cfg);
    validate(point_emission);
    jobs.emplace_back(point_cfg, point_emission);
  }

  std::vector<ScanPoint> out(values.size());
  parallel_for(values.size(), [&](std::size_t i) {
    const IntensityPattern pattern = intensity_pattern(jobs[i].first, jobs[i].second);
    out[i] = {values[i], visibility(pattern, window)};
  });
  return out;
}

std::pair<double, double> emission_gate(const ExperimentConfig& cfg, double t_emit) {
  if (!(cfg.pulse_sigma > 0.0)) throw ConfigError("pulse_sigma must be positive");
  const double s2 = 2.0 * cfg.pulse_sigma * cfg.pulse_sigma;
  const double da = t_emit - cfg.t1;
  const double db = t_emit - cfg.t1 - cfg.delta_T;
  return {std::exp(-da * da / s2), std::exp(-db * db / s2)};
}

}  // namespace chronoslit
