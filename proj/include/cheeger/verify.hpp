#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cheeger/deformation.hpp"
#include "cheeger/tensor.hpp"

namespace cheeger::verify {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Thresholds applied by the suites. Defaults are the acceptance values.
struct Tolerances {
  double c0_slope_min = 1.9, c0_slope_max = 2.1;
  double c1_slope_min = 1.8, c1_slope_max = 2.2;
  double t_slope_min = 1.8, t_slope_max = 2.2;
  double large_l_slope_min = -2.2, large_l_slope_max = -1.8;
  double gap_ratio_max = 3.0;          // max/min of gap_residual / l^2
  double geodesic_drift_max = 1e-6;    // limit metric
  double geodesic_discrimination_min = 1e-3;  // g_M, when orbits are not totally geodesic
  double invariance_max = 1e-8;
  double horizontal_identity_max = 1e-10;
  double kappa_max = 1e-10;
  double oracle_max = 1e-10;
  double t_exclusion = 1e-8;           // samples with |T^{g_M}| below this are skipped
  double noise_floor = 1e-15;          // rate_fit ignores norms at or below this
};

struct GeodesicParams {
  std::vector<Point> starts;  // empty: scenario defaults
  double length = 3.0;
  double step = 1e-3;
};

struct SweepConfig {
  std::shared_ptr<const manifold::Scenario> scenario;
  std::vector<double> l_grid{0.2, 0.1, 0.05, 0.025};
  tensor::SamplePlan plan;
  Tolerances tolerances;
  GeodesicParams geodesic;
  tensor::FdOptions fd;
  manifold::NumericOptions numeric;

  // Throws ConfigError: missing scenario, empty plan, l_grid not strictly
  // decreasing, any l < 1e-3, fewer than 4 grid values.
  void validate() const;
};

enum class FitStatus { kFitted, kExact, kInsufficient };

std::string to_string(FitStatus status);

// Least squares line through (log l, log norm).
struct RateFit {
  double slope = kNaN;
  double intercept = kNaN;
  double residual = kNaN;  // max |log norm - fitted line|
  FitStatus status = FitStatus::kInsufficient;
  int excluded = 0;        // points at or below the noise floor
};

// Norms <= noise_floor are excluded; an all-zero series is kExact; fewer
// than two usable points is kInsufficient.
RateFit rate_fit(const std::vector<std::pair<double, double>>& series,
                 double noise_floor = 1e-15);

struct Verdict {
  std::string criterion;  // suite id, e.g. "convergence"
  std::string check;      // e.g. "c0_slope"
  bool passed = false;
  double measured = kNaN;
  std::string threshold;  // human-readable, e.g. "[1.9, 2.1]"
  std::string note;       // "vacuous", "exact", ...
};

struct SweepRow {
  double l = kNaN;
  double c0_diff = kNaN;
  double c1_diff = kNaN;
  double t_ratio_max = kNaN;
  double gap_residual = kNaN;
  double invariance_residual = kNaN;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  RateFit c0_fit;
  RateFit c1_fit;
  RateFit gap_fit;
  double gap_ratio = kNaN;  // max/min over the grid of gap_residual / l^2
  std::vector<Verdict> verdicts;
};

// |g~_l - g~|_{C^0}, |g~_l - g~|_{C^1} and the orbit gap
// max |(Phi_x)^*(g~_l) - g_bi| for every l, plus fits and verdicts.
SweepReport convergence_sweep(const SweepConfig& config);

struct TScalingResult {
  std::vector<std::pair<double, double>> ratios;  // (l, max ratio)
  RateFit fit;
  int excluded_samples = 0;
  bool vacuous = false;  // |T^{g_M}| vanishes on every sample
  std::vector<Verdict> verdicts;
};

// max_x |T^{g~_l}|(x) / |T^{g_M}|(x) per l, and its fitted slope.
TScalingResult t_tensor_scaling_test(const SweepConfig& config);

struct GeodesicTestResult {
  double max_drift = 0.0;
  std::vector<double> drifts;  // per start
  int inconclusive = 0;        // starts that left the chart early
  bool vacuous = false;        // transitive action: no orbit coordinates
};

// Geodesics of `variant` from vertical initial velocities; drift is the max
// coordinate deviation of scenario.orbit_coordinates from its start value.
GeodesicTestResult totally_geodesic_test(const manifold::Scenario& scenario,
                                         const deformation::MetricVariant& variant,
                                         const std::vector<tensor::GeodesicState>& starts,
                                         double length, double step,
                                         const tensor::FdOptions& fd = {},
                                         const manifold::NumericOptions& numeric = {});

// Starts at the given points with velocity K m_1 (first orbit direction).
std::vector<tensor::GeodesicState> vertical_starts(const manifold::Scenario& scenario,
                                                   const std::vector<Point>& points,
                                                   const manifold::NumericOptions& numeric = {});

struct InvarianceResult {
  double original = 0.0;
  double cheeger = 0.0;
  double rescaled = 0.0;
  double limit = 0.0;
  double horizontal_identity = 0.0;
  double kappa_horizontality = 0.0;
  double kappa_isotropy = 0.0;
  int group_elements = 0;  // per point
  int points = 0;

  double max_metric_residual() const;
};

InvarianceResult invariance_suite(const manifold::Scenario& scenario,
                                  const std::vector<double>& l_list,
                                  const std::vector<Point>& points, int group_elements,
                                  std::uint64_t seed,
                                  const manifold::NumericOptions& numeric = {});

struct LargeLResult {
  std::vector<std::pair<double, double>> deviations;  // (l, |g_l - g_M|_{C^0})
  RateFit fit;
};

// Requires an increasing grid of at least two values.
LargeLResult large_l_limit_test(const manifold::Scenario& scenario,
                                const std::vector<double>& l_grid_large,
                                const tensor::SamplePlan& plan,
                                const manifold::NumericOptions& numeric = {});

// max elementwise |g_l (Ch_l route) - g_l (closed form)| over seeded
// (x, l) with x uniform in the sample region and l uniform in [0.05, 5].
double oracle_equivalence_test(const manifold::Scenario& scenario, int samples,
                               std::uint64_t seed,
                               const manifold::NumericOptions& numeric = {});

}  // namespace cheeger::verify
