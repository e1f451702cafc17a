#pragma once

#include <cstdint>
#include <vector>

#include "chronoslit/experiment.hpp"
#include "chronoslit/grids.hpp"
#include "chronoslit/rng.hpp"

namespace chronoslit {

/// Events per shard; shard s draws from stream s of the run seed.
inline constexpr std::uint64_t kEventsPerShard = 1u << 16;

struct DetectionHistogram {
  GridSpec screen;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t seed = 0;
  double nominal_fringe_spacing = 0.0;
};

class DetectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n_events i.i.d. screen hits drawn by inverse CDF over the pattern bins.
DetectionHistogram sample_detections(const IntensityPattern& pattern, std::uint64_t n_events,
                                     std::uint64_t seed);

struct GofResult {
  double chi2;
  int dof;
  double p_value;
};

/// Pearson chi-square of the histogram against total * p_k from the pattern.
/// Adjacent bins are merged until every group expects at least 5 counts.
GofResult histogram_gof(const DetectionHistogram& hist, const IntensityPattern& pattern);

struct VisibilityEstimate {
  double visibility;
  double standard_error;
};

/// Fringe visibility of the count histogram inside a centred window, from a
/// least-squares fit of A0 + A1 x + C cos(kx) + S sin(kx) with k = 2 pi /
/// nominal spacing (V = sqrt(C^2 + S^2) / A0). The standard error comes from
/// 200 multinomial bootstrap resamples drawn from the run seed.
VisibilityEstimate visibility_from_histogram(const DetectionHistogram& hist, double window);

/// The point estimate alone, on arbitrary non-negative bin values.
double fitted_visibility(const GridSpec& screen, const std::vector<double>& values, double window,
                         double nominal_fringe_spacing);

}  // namespace chronoslit
