#include "cheeger/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cheeger/errors.hpp"
#include "cheeger/random.hpp"

namespace cheeger::verify {

using deformation::MetricVariant;
using manifold::Scenario;

namespace {

std::string window(double lo, double hi) {
  std::ostringstream os;
  os << '[' << lo << ", " << hi << ']';
  return os.str();
}

std::string below(double x) {
  std::ostringstream os;
  os << "< " << x;
  return os.str();
}

Verdict slope_verdict(const std::string& criterion, const std::string& check,
                      const RateFit& fit, double lo, double hi) {
  Verdict v{criterion, check, false, fit.slope, window(lo, hi), ""};
  switch (fit.status) {
    case FitStatus::kExact:
      v.passed = true;
      v.note = "exact (series identically zero)";
      break;
    case FitStatus::kInsufficient:
      v.note = "fewer than two points above the noise floor";
      break;
    case FitStatus::kFitted:
      v.passed = fit.slope >= lo && fit.slope <= hi;
      if (fit.excluded > 0) v.note = std::to_string(fit.excluded) + " point(s) below noise floor";
      break;
  }
  return v;
}

tensor::TensorField variant_field(const Scenario& scenario, const MetricVariant& variant,
                                  const manifold::NumericOptions& numeric) {
  tensor::TensorField f;
  f.value = deformation::field(scenario, variant, numeric);
  f.chart = &scenario.chart();
  if (variant.tag == deformation::MetricTag::kOriginal &&
      scenario.metric_derivatives(scenario.default_geodesic_starts().front())) {
    f.derivatives = [&scenario](const Point& x) { return *scenario.metric_derivatives(x); };
  }
  return f;
}

tensor::TensorField difference_field(const Scenario& scenario, const MetricVariant& a,
                                     const MetricVariant& b,
                                     const manifold::NumericOptions& numeric) {
  tensor::TensorField f;
  f.chart = &scenario.chart();
  f.value = [&scenario, a, b, numeric](const Point& x) -> Matrix {
    const Matrix g = scenario.metric(x);
    if (a.tag == deformation::MetricTag::kOriginal && b.tag == deformation::MetricTag::kOriginal) {
      return Matrix::Zero(g.rows(), g.cols());
    }
    const auto data = manifold::killing_data(scenario, x, numeric);
    auto eval = [&](const MetricVariant& v) -> Matrix {
      switch (v.tag) {
        case deformation::MetricTag::kOriginal: return g;
        case deformation::MetricTag::kCheeger: return deformation::cheeger_metric(data, g, v.l);
        case deformation::MetricTag::kRescaled: return deformation::rescaled_metric(data, g, v.l);
        case deformation::MetricTag::kLimit: return deformation::limit_metric(data, g);
      }
      return g;
    };
    return eval(a) - eval(b);
  };
  return f;
}

}  // namespace

void SweepConfig::validate() const {
  if (!scenario) throw ConfigError("sweep: no scenario");
  if (plan.points.empty()) throw ConfigError("sweep: empty sample plan");
  if (l_grid.size() < 4) {
    throw ConfigError("sweep.l_grid needs at least 4 values for slope fitting (got " +
                      std::to_string(l_grid.size()) + ")");
  }
  for (std::size_t i = 0; i < l_grid.size(); ++i) {
    if (!(l_grid[i] >= 1e-3) || !std::isfinite(l_grid[i])) {
      throw ConfigError("sweep.l_grid values must be finite and >= 1e-3");
    }
    if (i > 0 && !(l_grid[i] < l_grid[i - 1])) {
      throw ConfigError("sweep.l_grid must be strictly decreasing");
    }
  }
}

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::kFitted: return "fitted";
    case FitStatus::kExact: return "exact";
    case FitStatus::kInsufficient: return "insufficient";
  }
  return "unknown";
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& series, double noise_floor) {
  RateFit fit;
  std::vector<std::pair<double, double>> logs;
  bool all_zero = !series.empty();
  for (const auto& [l, norm] : series) {
    if (!(l > 0.0)) throw std::invalid_argument("rate_fit: l must be positive");
    if (norm != 0.0) all_zero = false;
    if (!(norm > noise_floor)) {
      ++fit.excluded;
      continue;
    }
    logs.emplace_back(std::log(l), std::log(norm));
  }
  if (all_zero) {
    fit.status = FitStatus::kExact;
    return fit;
  }
  if (logs.size() < 2) return fit;

  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= logs.size();
  my /= logs.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) return fit;  // all l equal
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residual = 0.0;
  for (const auto& [x, y] : logs) {
    fit.residual = std::max(fit.residual, std::abs(y - (fit.intercept + fit.slope * x)));
  }
  fit.status = FitStatus::kFitted;
  return fit;
}

SweepReport convergence_sweep(const SweepConfig& config) {
  config.validate();
  const Scenario& scenario = *config.scenario;
  SweepReport report;
  const manifold::MetricFn reference = [&scenario](const Point& x) { return scenario.metric(x); };

  std::vector<std::pair<double, double>> c0_series, c1_series, gap_series;
  for (double l : config.l_grid) {
    const auto diff = difference_field(scenario, MetricVariant::rescaled(l),
                                       MetricVariant::limit(), config.numeric);
    const tensor::CpNorms norms = tensor::cp_norms(diff, config.plan, reference, config.fd);

    double gap = 0.0;
    for (const Point& x : config.plan.points) {
      const auto data = manifold::killing_data(scenario, x, config.numeric);
      const Matrix g = scenario.metric(x);
      const Matrix pulled = deformation::orbit_pullback(data, deformation::rescaled_metric(data, g, l));
      const Matrix g_nh = data.m_basis.transpose() * data.B * data.m_basis;
      gap = std::max(gap, linalg::metric_operator_norm(pulled - g_nh, g_nh));
    }

    SweepRow row;
    row.l = l;
    row.c0_diff = norms.c0;
    row.c1_diff = norms.c1;
    row.gap_residual = gap;
    report.rows.push_back(row);
    c0_series.emplace_back(l, norms.c0);
    c1_series.emplace_back(l, norms.c1);
    gap_series.emplace_back(l, gap);
  }

  const Tolerances& tol = config.tolerances;
  report.c0_fit = rate_fit(c0_series, tol.noise_floor);
  report.c1_fit = rate_fit(c1_series, tol.noise_floor);
  report.gap_fit = rate_fit(gap_series, tol.noise_floor);
  report.verdicts.push_back(
      slope_verdict("convergence", "c0_slope", report.c0_fit, tol.c0_slope_min, tol.c0_slope_max));
  report.verdicts.push_back(
      slope_verdict("convergence", "c1_slope", report.c1_fit, tol.c1_slope_min, tol.c1_slope_max));

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& row : report.rows) {
    const double scaled = row.gap_residual / (row.l * row.l);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  Verdict gap{"convergence", "gap_ratio", false, kNaN, below(tol.gap_ratio_max), ""};
  if (hi == 0.0) {
    gap.passed = true;
    gap.measured = 1.0;
    gap.note = "exact (gap identically zero)";
  } else if (lo > 0.0) {
    gap.measured = hi / lo;
    gap.passed = gap.measured < tol.gap_ratio_max;
  } else {
    gap.measured = std::numeric_limits<double>::infinity();
  }
  report.gap_ratio = gap.measured;
  report.verdicts.push_back(gap);
  return report;
}

TScalingResult t_tensor_scaling_test(const SweepConfig& config) {
  config.validate();
  const Scenario& scenario = *config.scenario;
  TScalingResult out;

  tensor::TTensorOptions topt;
  topt.fd = config.fd;
  topt.h_killing = config.numeric.h_act;
  topt.direction_pairs = config.plan.directions;
  topt.seed = config.plan.seed;
  const manifold::MetricFn killing = [&scenario, &config](const Point& y) {
    return manifold::killing_operator(scenario, y, config.numeric.killing, config.numeric.h_act);
  };

  // |T^{g_M}| once per point.
  const auto original = variant_field(scenario, MetricVariant::original(), config.numeric);
  std::vector<double> base(config.plan.points.size(), 0.0);
  std::vector<manifold::KillingData> data;
  for (std::size_t i = 0; i < config.plan.points.size(); ++i) {
    const Point& x = config.plan.points[i];
    data.push_back(manifold::killing_data(scenario, x, config.numeric));
    base[i] = tensor::t_tensor(original, killing, data.back(), x, topt).value;
    if (base[i] < config.tolerances.t_exclusion) ++out.excluded_samples;
  }
  out.vacuous = out.excluded_samples == static_cast<int>(base.size());

  if (!out.vacuous) {
    for (double l : config.l_grid) {
      const auto rescaled = variant_field(scenario, MetricVariant::rescaled(l), config.numeric);
      double worst = 0.0;
      for (std::size_t i = 0; i < config.plan.points.size(); ++i) {
        if (base[i] < config.tolerances.t_exclusion) continue;
        const double t = tensor::t_tensor(rescaled, killing, data[i], config.plan.points[i], topt).value;
        worst = std::max(worst, t / base[i]);
      }
      out.ratios.emplace_back(l, worst);
    }
    out.fit = rate_fit(out.ratios, config.tolerances.noise_floor);
  } else {
    for (double l : config.l_grid) out.ratios.emplace_back(l, kNaN);
  }

  if (out.vacuous) {
    Verdict v{"t_scaling", "t_slope", true, kNaN,
              window(config.tolerances.t_slope_min, config.tolerances.t_slope_max),
              "vacuous: |T^{g_M}| vanishes on every sample (orbits already totally geodesic)"};
    out.verdicts.push_back(v);
  } else {
    auto v = slope_verdict("t_scaling", "t_slope", out.fit, config.tolerances.t_slope_min,
                           config.tolerances.t_slope_max);
    if (out.excluded_samples > 0) {
      v.note += (v.note.empty() ? "" : "; ") + std::to_string(out.excluded_samples) +
                " sample(s) with |T^{g_M}| below threshold excluded";
    }
    out.verdicts.push_back(v);
  }
  return out;
}

std::vector<tensor::GeodesicState> vertical_starts(const Scenario& scenario,
                                                   const std::vector<Point>& points,
                                                   const manifold::NumericOptions& numeric) {
  std::vector<tensor::GeodesicState> starts;
  for (const Point& p : points) {
    const auto data = manifold::killing_data(scenario, p, numeric);
    if (data.orbit_dim() == 0) throw DomainError("geodesic start lies on a fixed point");
    starts.push_back({p, data.vertical_vectors().col(0), 0.0});
  }
  return starts;
}

GeodesicTestResult totally_geodesic_test(const Scenario& scenario, const MetricVariant& variant,
                                         const std::vector<tensor::GeodesicState>& starts,
                                         double length, double step, const tensor::FdOptions& fd,
                                         const manifold::NumericOptions& numeric) {
  GeodesicTestResult out;
  const auto metric = variant_field(scenario, variant, numeric);
  for (const auto& start : starts) {
    // Precondition: vertical initial velocity.
    const auto data = manifold::killing_data(scenario, start.position, numeric);
    const Matrix g = scenario.metric(start.position);
    const Matrix km = data.vertical_vectors();
    const Vector along = km * (km.transpose() * g * km).ldlt().solve(km.transpose() * g * start.velocity);
    const Vector horizontal = start.velocity - along;
    const double speed = std::sqrt(start.velocity.dot(g * start.velocity));
    if (std::sqrt(std::abs(horizontal.dot(g * horizontal))) > 1e-10 * std::max(1.0, speed)) {
      throw std::invalid_argument("totally_geodesic_test: initial velocity is not vertical");
    }

    const Vector level = scenario.orbit_coordinates(start.position);
    if (level.size() == 0) {
      out.vacuous = true;
      out.drifts.push_back(0.0);
      continue;
    }
    const auto traj = tensor::geodesic_integrate(metric, start, length, step, fd);
    double drift = 0.0;
    for (const auto& s : traj.states) {
      drift = std::max(drift, (scenario.orbit_coordinates(s.position) - level).cwiseAbs().maxCoeff());
    }
    if (!traj.completed) ++out.inconclusive;
    out.drifts.push_back(drift);
    out.max_drift = std::max(out.max_drift, drift);
  }
  return out;
}

double InvarianceResult::max_metric_residual() const {
  return std::max({original, cheeger, rescaled, limit});
}

InvarianceResult invariance_suite(const Scenario& scenario, const std::vector<double>& l_list,
                                  const std::vector<Point>& points, int group_elements,
                                  std::uint64_t seed, const manifold::NumericOptions& numeric) {
  InvarianceResult out;
  out.group_elements = group_elements;
  out.points = static_cast<int>(points.size());
  const auto& group = scenario.group();
  const auto& chart = scenario.chart();
  CounterRng group_rng(seed, streams::kGroupElements);
  CounterRng vector_rng(seed, streams::kInvarianceVectors);
  constexpr int kMaxDraws = 10000;
  constexpr double kRadius = 2.0 * 3.14159265358979323846;

  std::vector<MetricVariant> variants{MetricVariant::original(), MetricVariant::limit()};
  for (double l : l_list) {
    variants.push_back(MetricVariant::cheeger(l));
    variants.push_back(MetricVariant::rescaled(l));
  }

  for (const Point& x : points) {
    // (a) G-invariance of every variant.
    int accepted = 0;
    for (int draw = 0; accepted < group_elements; ++draw) {
      if (draw >= kMaxDraws) {
        throw NumericalError("invariance_suite: could not find group elements keeping the "
                             "sample point inside the chart");
      }
      const auto g = group.random_element(group_rng, kRadius);
      if (!chart.contains(scenario.act(g, x), 2.0 * numeric.h_act)) continue;
      ++accepted;
      for (const auto& variant : variants) {
        const auto metric = deformation::field(scenario, variant, numeric);
        const Matrix pulled = manifold::action_pullback_metric(scenario, g, metric, x, numeric.h_act);
        const double r = linalg::max_abs(pulled - metric(x));
        switch (variant.tag) {
          case deformation::MetricTag::kOriginal: out.original = std::max(out.original, r); break;
          case deformation::MetricTag::kCheeger: out.cheeger = std::max(out.cheeger, r); break;
          case deformation::MetricTag::kRescaled: out.rescaled = std::max(out.rescaled, r); break;
          case deformation::MetricTag::kLimit: out.limit = std::max(out.limit, r); break;
        }
      }
    }

    const auto data = manifold::killing_data(scenario, x, numeric);
    const Matrix g = scenario.metric(x);
    const auto n = g.rows();

    // (b) horizontal block identity.
    const auto frame = deformation::adapted_frame(data, g);
    const Matrix horizontal = frame.frame.rightCols(n - frame.vertical_dim);
    for (double l : l_list) {
      const Matrix gl = deformation::cheeger_metric(data, g, l);
      const Matrix gtl = deformation::rescaled_metric(data, g, l);
      for (Eigen::Index c = 0; c < horizontal.cols(); ++c) {
        const Vector z = horizontal.col(c);
        out.horizontal_identity = std::max(
            {out.horizontal_identity, linalg::max_abs((gl - g) * z), linalg::max_abs((gtl - g) * z)});
      }
    }

    // (c) kappa-horizontality and isotropy leakage, on the chart basis and
    // a few random g_M-unit vectors.
    std::vector<Vector> probes;
    for (Eigen::Index i = 0; i < n; ++i) probes.push_back(Vector::Unit(n, i));
    for (int k = 0; k < 3; ++k) {
      Vector v = vector_rng.unit_vector(n);
      probes.push_back(v / std::sqrt(v.dot(g * v)));
    }
    for (const Vector& v : probes) {
      for (double l : l_list) {
        out.kappa_horizontality =
            std::max(out.kappa_horizontality, deformation::horizontality_residual(data, g, l, v));
      }
      if (data.isotropy_basis.cols() > 0) {
        const Vector k = deformation::kappa(data, g, v);
        out.kappa_isotropy = std::max(
            out.kappa_isotropy, (data.isotropy_basis.transpose() * data.B * k).cwiseAbs().maxCoeff());
      }
    }
  }
  return out;
}

LargeLResult large_l_limit_test(const Scenario& scenario, const std::vector<double>& l_grid_large,
                                const tensor::SamplePlan& plan,
                                const manifold::NumericOptions& numeric) {
  if (l_grid_large.size() < 2) throw ConfigError("sweep.large_l_grid needs at least 2 values");
  for (std::size_t i = 1; i < l_grid_large.size(); ++i) {
    if (!(l_grid_large[i] > l_grid_large[i - 1])) {
      throw ConfigError("sweep.large_l_grid must be strictly increasing");
    }
  }
  LargeLResult out;
  const manifold::MetricFn reference = [&scenario](const Point& x) { return scenario.metric(x); };
  for (double l : l_grid_large) {
    const auto diff = difference_field(scenario, MetricVariant::cheeger(l),
                                       MetricVariant::original(), numeric);
    out.deviations.emplace_back(l, tensor::cp_norm(diff, 0, plan, reference));
  }
  out.fit = rate_fit(out.deviations);
  return out;
}

double oracle_equivalence_test(const Scenario& scenario, int samples, std::uint64_t seed,
                               const manifold::NumericOptions& numeric) {
  CounterRng rng(seed, streams::kOracleSamples);
  const auto region = scenario.sample_region();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x(region.dim());
    for (int d = 0; d < region.dim(); ++d) {
      const auto& iv = region.intervals()[d];
      x(d) = rng.uniform(iv.lo, iv.hi);
    }
    const double l = rng.uniform(0.05, 5.0);
    const auto data = manifold::killing_data(scenario, x, numeric);
    const Matrix g = scenario.metric(x);
    worst = std::max(worst, linalg::max_abs(deformation::cheeger_metric(data, g, l) -
                                            deformation::cheeger_metric_closed_form(data, g, l)));
  }
  return worst;
}

}  // namespace cheeger::verify
