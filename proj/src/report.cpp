#include <algorithm>
#include <chrono>
#include <fstream>

#include <json.hpp>

#include "cheeger/errors.hpp"
#include "cheeger/run.hpp"

namespace cheeger::run {

using json = nlohmann::ordered_json;
using verify::Verdict;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string below(double x) { return "< " + format_double(x); }
std::string above(double x) { return "> " + format_double(x); }

Verdict bound(const std::string& criterion, const std::string& check, double measured,
              double max) {
  return {criterion, check, measured < max, measured, below(max), ""};
}

json fit_json(const verify::RateFit& fit) {
  json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["residual"] = fit.residual;
  j["status"] = verify::to_string(fit.status);
  j["excluded"] = fit.excluded;
  return j;
}

json series_json(const std::vector<std::pair<double, double>>& s) {
  json arr = json::array();
  for (const auto& [l, v] : s) arr.push_back(json::array({l, v}));
  return arr;
}

bool has(const std::vector<int>& xs, int x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

}  // namespace

bool RunReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

RunReport run_scenario(const RunConfig& config) {
  config.validate();
  RunReport report;
  report.config = config;
  const Stopwatch total;

  const auto scenario = scenarios::make_scenario(config.scenario, config.scenario_params);
  const manifold::Scenario& sc = *scenario;
  report.scenario_parameters = sc.parameters();

  verify::SweepConfig sweep;
  sweep.scenario = scenario;
  sweep.l_grid = config.l_grid;
  sweep.plan = tensor::make_sample_plan(sc.sample_region(), config.sample_points,
                                        config.sample_directions, config.seed);
  sweep.tolerances = config.tolerances;
  sweep.fd = {config.fd_step, config.fd_richardson};
  sweep.numeric.h_act = config.action_step;
  sweep.numeric.killing = config.killing;
  sweep.geodesic = {config.geodesic_starts, config.geodesic_length, config.geodesic_step};
  const verify::Tolerances& tol = config.tolerances;

  for (double l : config.l_grid) {
    verify::SweepRow row;
    row.l = l;
    report.rows.push_back(row);
  }

  if (config.enabled("convergence")) {
    const Stopwatch sw;
    const auto sr = verify::convergence_sweep(sweep);
    for (std::size_t i = 0; i < sr.rows.size(); ++i) {
      report.rows[i].c0_diff = sr.rows[i].c0_diff;
      report.rows[i].c1_diff = sr.rows[i].c1_diff;
      report.rows[i].gap_residual = sr.rows[i].gap_residual;
    }
    report.c0_fit = sr.c0_fit;
    report.c1_fit = sr.c1_fit;
    report.gap_fit = sr.gap_fit;
    report.gap_ratio = sr.gap_ratio;
    for (const auto& v : sr.verdicts) {
      if (v.check == "c0_slope" && !has(config.norm_orders, 0)) continue;
      if (v.check == "c1_slope" && !has(config.norm_orders, 1)) continue;
      report.verdicts.push_back(v);
    }
    report.timings.push_back({"convergence", sw.seconds()});
  }

  if (config.enabled("t_scaling")) {
    const Stopwatch sw;
    const auto tr = verify::t_tensor_scaling_test(sweep);
    for (std::size_t i = 0; i < tr.ratios.size(); ++i) report.rows[i].t_ratio_max = tr.ratios[i].second;
    report.t_fit = tr.fit;
    report.t_excluded_samples = tr.excluded_samples;
    report.t_vacuous = tr.vacuous;
    report.verdicts.insert(report.verdicts.end(), tr.verdicts.begin(), tr.verdicts.end());
    report.timings.push_back({"t_scaling", sw.seconds()});
  }

  if (config.enabled("totally_geodesic")) {
    const Stopwatch sw;
    const auto points =
        config.geodesic_starts.empty() ? sc.default_geodesic_starts() : config.geodesic_starts;
    const auto starts = verify::vertical_starts(sc, points, sweep.numeric);
    auto judge = [&](const verify::GeodesicTestResult& r, const std::string& check,
                     bool want_small, double threshold) {
      Verdict v{"totally_geodesic", check, false, r.max_drift,
                want_small ? below(threshold) : above(threshold), ""};
      const int completed = static_cast<int>(starts.size()) - r.inconclusive;
      if (r.vacuous) {
        v.passed = true;
        v.note = "vacuous: transitive action, the orbit is the whole chart";
      } else if (completed == 0) {
        v.note = "inconclusive: every geodesic left the chart early";
      } else {
        v.passed = want_small ? r.max_drift < threshold : r.max_drift > threshold;
        if (r.inconclusive > 0) {
          v.note = std::to_string(r.inconclusive) + " start(s) inconclusive (left the chart)";
        }
      }
      return v;
    };
    report.geodesic_limit =
        verify::totally_geodesic_test(sc, deformation::MetricVariant::limit(), starts,
                                      config.geodesic_length, config.geodesic_step, sweep.fd,
                                      sweep.numeric);
    report.verdicts.push_back(
        judge(report.geodesic_limit, "limit_drift", true, tol.geodesic_drift_max));
    if (!sc.orbits_totally_geodesic()) {
      report.geodesic_discrimination_checked = true;
      report.geodesic_original =
          verify::totally_geodesic_test(sc, deformation::MetricVariant::original(), starts,
                                        config.geodesic_length, config.geodesic_step, sweep.fd,
                                        sweep.numeric);
      report.verdicts.push_back(judge(report.geodesic_original, "original_drift", false,
                                      tol.geodesic_discrimination_min));
    }
    report.timings.push_back({"totally_geodesic", sw.seconds()});
  }

  if (config.enabled("invariance")) {
    const Stopwatch sw;
    const auto n = std::min<std::size_t>(config.invariance_points, sweep.plan.points.size());
    const std::vector<Point> points(sweep.plan.points.begin(), sweep.plan.points.begin() + n);
    auto& agg = report.invariance;
    agg.group_elements = config.invariance_group_elements;
    agg.points = static_cast<int>(n);
    for (auto& row : report.rows) {
      const auto r = verify::invariance_suite(sc, {row.l}, points,
                                              config.invariance_group_elements, config.seed,
                                              sweep.numeric);
      row.invariance_residual = std::max(r.cheeger, r.rescaled);
      agg.original = std::max(agg.original, r.original);
      agg.cheeger = std::max(agg.cheeger, r.cheeger);
      agg.rescaled = std::max(agg.rescaled, r.rescaled);
      agg.limit = std::max(agg.limit, r.limit);
      agg.horizontal_identity = std::max(agg.horizontal_identity, r.horizontal_identity);
      agg.kappa_horizontality = std::max(agg.kappa_horizontality, r.kappa_horizontality);
      agg.kappa_isotropy = std::max(agg.kappa_isotropy, r.kappa_isotropy);
    }
    report.verdicts.push_back(
        bound("invariance", "metric_invariance", agg.max_metric_residual(), tol.invariance_max));
    report.verdicts.push_back(bound("invariance", "horizontal_identity", agg.horizontal_identity,
                                    tol.horizontal_identity_max));
    report.verdicts.push_back(
        bound("invariance", "kappa_horizontality", agg.kappa_horizontality, tol.kappa_max));
    report.verdicts.push_back(
        bound("invariance", "kappa_isotropy", agg.kappa_isotropy, tol.kappa_max));
    report.timings.push_back({"invariance", sw.seconds()});
  }

  if (config.enabled("large_l")) {
    const Stopwatch sw;
    const auto lr = verify::large_l_limit_test(sc, config.large_l_grid, sweep.plan, sweep.numeric);
    report.large_l_deviations = lr.deviations;
    report.large_l_fit = lr.fit;
    Verdict v{"large_l", "slope", false, lr.fit.slope,
              "[" + format_double(tol.large_l_slope_min) + ", " +
                  format_double(tol.large_l_slope_max) + "]",
              ""};
    if (lr.fit.status == verify::FitStatus::kFitted) {
      v.passed = lr.fit.slope >= tol.large_l_slope_min && lr.fit.slope <= tol.large_l_slope_max;
    } else {
      v.note = "fit " + verify::to_string(lr.fit.status);
    }
    report.verdicts.push_back(v);
    report.timings.push_back({"large_l", sw.seconds()});
  }

  if (config.enabled("oracle")) {
    const Stopwatch sw;
    report.oracle_max =
        verify::oracle_equivalence_test(sc, config.oracle_samples, config.seed, sweep.numeric);
    report.verdicts.push_back(bound("oracle", "max_deviation", report.oracle_max, tol.oracle_max));
    report.timings.push_back({"oracle", sw.seconds()});
  }

  report.timings.push_back({"total", total.seconds()});
  return report;
}

std::string report_csv(const RunReport& report) {
  std::string out = "l,c0_diff,c1_diff,t_ratio_max,gap_residual,invariance_residual\n";
  for (const auto& r : report.rows) {
    out += format_double(r.l) + ',' + format_double(r.c0_diff) + ',' + format_double(r.c1_diff) +
           ',' + format_double(r.t_ratio_max) + ',' + format_double(r.gap_residual) + ',' +
           format_double(r.invariance_residual) + '\n';
  }
  return out;
}

std::string report_json(const RunReport& report) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = "cheeger-verify";

  json cfg = json::object();
  for (const auto& [k, v] : report.config.echo()) cfg[k] = v;
  j["config"] = cfg;

  json scen;
  scen["id"] = report.config.scenario;
  json params = json::object();
  for (const auto& [k, v] : report.scenario_parameters) params[k] = v;
  scen["parameters"] = params;
  j["scenario"] = scen;

  j["passed"] = report.passed();
  j["criteria"] = report.config.criteria;

  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"l", r.l},
                    {"c0_diff", r.c0_diff},
                    {"c1_diff", r.c1_diff},
                    {"t_ratio_max", r.t_ratio_max},
                    {"gap_residual", r.gap_residual},
                    {"invariance_residual", r.invariance_residual}});
  }
  j["rows"] = rows;

  const auto& cfg_ref = report.config;
  json fits = json::object();
  if (cfg_ref.enabled("convergence")) {
    fits["c0"] = fit_json(report.c0_fit);
    fits["c1"] = fit_json(report.c1_fit);
    fits["gap"] = fit_json(report.gap_fit);
  }
  if (cfg_ref.enabled("t_scaling")) fits["t"] = fit_json(report.t_fit);
  if (cfg_ref.enabled("large_l")) fits["large_l"] = fit_json(report.large_l_fit);
  j["fits"] = fits;

  json details = json::object();
  if (cfg_ref.enabled("convergence")) details["convergence"] = {{"gap_ratio", report.gap_ratio}};
  if (cfg_ref.enabled("t_scaling")) {
    details["t_scaling"] = {{"excluded_samples", report.t_excluded_samples},
                            {"vacuous", report.t_vacuous}};
  }
  if (cfg_ref.enabled("totally_geodesic")) {
    auto geo = [](const verify::GeodesicTestResult& r) {
      return json{{"max_drift", r.max_drift},
                  {"drifts", r.drifts},
                  {"inconclusive", r.inconclusive},
                  {"vacuous", r.vacuous}};
    };
    json g;
    g["limit"] = geo(report.geodesic_limit);
    if (report.geodesic_discrimination_checked) g["original"] = geo(report.geodesic_original);
    details["totally_geodesic"] = g;
  }
  if (cfg_ref.enabled("invariance")) {
    const auto& r = report.invariance;
    details["invariance"] = {{"original", r.original},
                             {"cheeger", r.cheeger},
                             {"rescaled", r.rescaled},
                             {"limit", r.limit},
                             {"horizontal_identity", r.horizontal_identity},
                             {"kappa_horizontality", r.kappa_horizontality},
                             {"kappa_isotropy", r.kappa_isotropy},
                             {"group_elements", r.group_elements},
                             {"points", r.points}};
  }
  if (cfg_ref.enabled("large_l")) {
    details["large_l"] = {{"deviations", series_json(report.large_l_deviations)}};
  }
  if (cfg_ref.enabled("oracle")) details["oracle"] = {{"max_deviation", report.oracle_max}};
  j["details"] = details;

  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back({{"criterion", v.criterion},
                        {"check", v.check},
                        {"passed", v.passed},
                        {"measured", v.measured},
                        {"threshold", v.threshold},
                        {"note", v.note}});
  }
  j["verdicts"] = verdicts;
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void emit_report(const RunReport& report) {
  if (!report.config.output_csv.empty()) write_file(report.config.output_csv, report_csv(report));
  if (!report.config.output_report.empty()) {
    write_file(report.config.output_report, report_json(report));
  }
}

}  // namespace cheeger::run
