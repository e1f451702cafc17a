#include "chronoslit/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/binomial_distribution.hpp>

#include "chronoslit/parallel.hpp"

namespace chronoslit {

namespace {
constexpr std::uint64_t kBootstrapStreamBase = 1ULL << 62;
constexpr int kBootstrapResamples = 200;

std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    cdf[k] = acc;
  }
  return cdf;
}

std::size_t draw_bin(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

void fill_shard(const std::vector<double>& cdf, std::uint64_t seed, std::uint64_t shard,
                std::uint64_t events, std::vector<std::uint64_t>& counts) {
  CounterRng rng(seed, shard);
  for (std::uint64_t e = 0; e < events; ++e) ++counts[draw_bin(cdf, rng.uniform())];
}

// Lets boost::random distributions draw from a CounterRng stream.
struct RngEngine {
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return rng.next(); }
  CounterRng& rng;
};

// Multinomial resample of `draws` events over the observed bin weights, as a
// chain of conditional binomials.
std::vector<double> multinomial_resample(const std::vector<double>& observed, double total,
                                         std::uint64_t draws, CounterRng& rng) {
  RngEngine engine{rng};
  std::vector<double> out(observed.size(), 0.0);
  std::uint64_t remaining = draws;
  double remaining_mass = total;
  for (std::size_t k = 0; k < observed.size() && remaining > 0; ++k) {
    if (observed[k] <= 0.0) continue;
    const double p = std::clamp(observed[k] / remaining_mass, 0.0, 1.0);
    boost::random::binomial_distribution<std::int64_t, double> binomial(
        static_cast<std::int64_t>(remaining), p);
    const std::uint64_t x = p >= 1.0 ? remaining : static_cast<std::uint64_t>(binomial(engine));
    out[k] = static_cast<double>(x);
    remaining -= x;
    remaining_mass -= observed[k];
  }
  return out;
}

}  // namespace

DetectionHistogram sample_detections(const IntensityPattern& pattern, std::uint64_t n_events,
                                     std::uint64_t seed) {
  if (pattern.empty || !(pattern.normalization > 0.0)) {
    throw DetectionError("cannot sample detections from an empty pattern");
  }
  if (n_events < 1) throw DetectionError("need at least one event");
  const std::vector<double> cdf = cumulative(pattern.intensity);
  if (!(cdf.back() > 0.0)) throw DetectionError("cannot sample detections from an empty pattern");

  const std::size_t bins = pattern.intensity.size();
  const std::uint64_t shards = (n_events + kEventsPerShard - 1) / kEventsPerShard;
  std::vector<std::vector<std::uint64_t>> partial(shards, std::vector<std::uint64_t>(bins, 0));
  parallel_for(static_cast<std::size_t>(shards), [&](std::size_t s) {
    const std::uint64_t begin = s * kEventsPerShard;
    const std::uint64_t events = std::min(kEventsPerShard, n_events - begin);
    fill_shard(cdf, seed, s, events, partial[s]);
  });

  DetectionHistogram hist{pattern.screen, std::vector<std::uint64_t>(bins, 0), n_events, seed,
                          pattern.nominal_fringe_spacing};
  for (const auto& part : partial) {
    for (std::size_t k = 0; k < bins; ++k) hist.counts[k] += part[k];
  }
  return hist;
}

GofResult histogram_gof(const DetectionHistogram& hist, const IntensityPattern& pattern) {
  require_same_grid(hist.screen, pattern.screen, "histogram_gof");
  if (hist.total == 0) throw DetectionError("histogram holds no events");
  const double mass = std::accumulate(pattern.intensity.begin(), pattern.intensity.end(), 0.0);
  if (!(mass > 0.0)) throw DetectionError("reference pattern is empty");

  struct Group {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Group> groups;
  Group current;
  const double total = static_cast<double>(hist.total);
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    current.expected += total * pattern.intensity[k] / mass;
    current.observed += static_cast<double>(hist.counts[k]);
    if (current.expected >= 5.0) {
      groups.push_back(current);
      current = Group{};
    }
  }
  if (current.expected > 0.0 || current.observed > 0.0) {
    if (groups.empty()) {
      groups.push_back(current);
    } else {
      groups.back().expected += current.expected;
      groups.back().observed += current.observed;
    }
  }
  if (groups.size() < 2) throw DetectionError("too few events for a chi-square test");

  double chi2 = 0.0;
  for (const auto& g : groups) {
    if (g.expected <= 0.0) {
      chi2 = std::numeric_limits<double>::infinity();
      break;
    }
    const double diff = g.observed - g.expected;
    chi2 += diff * diff / g.expected;
  }
  const int dof = static_cast<int>(groups.size()) - 1;
  const double p = std::isfinite(chi2) ? boost::math::gamma_q(0.5 * dof, 0.5 * chi2) : 0.0;
  return {chi2, dof, p};
}

namespace {

struct WindowRange {
  std::size_t first;
  std::size_t last;  // inclusive
};

WindowRange fit_window(const GridSpec& screen, double window, double spacing) {
  if (!(spacing > 0.0)) throw VisibilityError("histogram carries no nominal fringe spacing");
  if (!(window >= 3.0 * spacing)) {
    throw VisibilityError("visibility window spans fewer than 3 fringe periods");
  }
  const double half = 0.5 * window;
  if (-half < screen.lo() || half > screen.hi()) {
    throw VisibilityError("visibility window extends beyond the screen");
  }
  const double step = screen.step();
  const auto first = static_cast<std::size_t>(std::ceil((-half - screen.lo()) / step - 1e-9));
  const auto last = static_cast<std::size_t>(std::floor((half - screen.lo()) / step + 1e-9));
  if (last >= screen.size() || last < first + 4) {
    throw VisibilityError("visibility window holds too few screen samples");
  }
  return {first, last};
}

// Least-squares fringe fit on values[first..last]; xs are the sample positions.
double fit_fringes(const std::vector<double>& xs, const double* values, std::size_t count,
                   double wavenumber) {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(count), 4);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    design(i, 0) = 1.0;
    design(i, 1) = xs[k];
    design(i, 2) = std::cos(wavenumber * xs[k]);
    design(i, 3) = std::sin(wavenumber * xs[k]);
    rhs(i) = values[k];
  }
  const Eigen::Vector4d coef = design.colPivHouseholderQr().solve(rhs);
  if (!(coef(0) > 0.0)) throw VisibilityError("fitted mean intensity is not positive");
  return std::min(1.0, std::hypot(coef(2), coef(3)) / coef(0));
}

}  // namespace

double fitted_visibility(const GridSpec& screen, const std::vector<double>& values, double window,
                         double nominal_fringe_spacing) {
  if (values.size() != screen.size()) throw GridMismatch("values do not match the screen grid");
  const WindowRange w = fit_window(screen, window, nominal_fringe_spacing);
  std::vector<double> xs;
  for (std::size_t k = w.first; k <= w.last; ++k) xs.push_back(screen.point(k));
  return fit_fringes(xs, values.data() + w.first, xs.size(),
                     2.0 * std::numbers::pi / nominal_fringe_spacing);
}

VisibilityEstimate visibility_from_histogram(const DetectionHistogram& hist, double window) {
  const WindowRange w = fit_window(hist.screen, window, hist.nominal_fringe_spacing);
  const std::size_t bins = w.last - w.first + 1;
  std::vector<double> xs(bins);
  std::vector<double> observed(bins);
  double in_window = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    xs[k] = hist.screen.point(w.first + k);
    observed[k] = static_cast<double>(hist.counts[w.first + k]);
    in_window += observed[k];
  }
  // At least ten events per eighth of a fringe period on average.
  const double required = 80.0 * window / hist.nominal_fringe_spacing;
  if (in_window < required) {
    std::ostringstream msg;
    msg << "insufficient counts for a visibility estimate: " << in_window
        << " events in the window, " << std::ceil(required) << " needed";
    throw DetectionError(msg.str());
  }

  const double wavenumber = 2.0 * std::numbers::pi / hist.nominal_fringe_spacing;
  const double estimate = fit_fringes(xs, observed.data(), bins, wavenumber);

  const auto draws = static_cast<std::uint64_t>(in_window);
  std::vector<double> replicas(kBootstrapResamples);
  parallel_for(replicas.size(), [&](std::size_t r) {
    CounterRng rng(hist.seed, kBootstrapStreamBase + r);
    const std::vector<double> resample = multinomial_resample(observed, in_window, draws, rng);
    replicas[r] = fit_fringes(xs, resample.data(), bins, wavenumber);
  });
  const double mean =
      std::accumulate(replicas.begin(), replicas.end(), 0.0) / static_cast<double>(replicas.size());
  double var = 0.0;
  for (double v : replicas) var += (v - mean) * (v - mean);
  var /= static_cast<double>(replicas.size() - 1);
  return {estimate, std::sqrt(var)};
}

}  // namespace chronoslit
