#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cheeger/scenarios.hpp"
#include "cheeger/verify.hpp"

namespace cheeger::run {

// Criterion ids, in execution order.
inline const std::vector<std::string>& criterion_ids() {
  static const std::vector<std::string> ids{"convergence", "t_scaling", "totally_geodesic",
                                            "invariance",  "large_l",   "oracle"};
  return ids;
}

struct ConfigKeyDoc {
  std::string key;
  std::string default_value;
  std::string description;
};

// Every accepted key with its default (scenario.* keys come from the catalogue).
const std::vector<ConfigKeyDoc>& config_keys();

// Effective settings of one run. Built by parse_config; every field holds a
// value (explicit or defaulted) once validate() has passed.
struct RunConfig {
  std::string scenario;
  scenarios::ScenarioParams scenario_params;
  std::vector<double> l_grid{0.2, 0.1, 0.05, 0.025};
  std::vector<double> large_l_grid{10.0, 30.0, 100.0};
  std::vector<int> norm_orders{0, 1};
  int sample_points = 200;
  int sample_directions = 50;
  std::uint64_t seed = 42;
  double fd_step = 1e-4;
  bool fd_richardson = true;
  double action_step = 1e-5;
  manifold::KillingMethod killing = manifold::KillingMethod::kAuto;
  double geodesic_length = 3.0;
  double geodesic_step = 1e-3;
  std::vector<Point> geodesic_starts;  // empty: scenario defaults
  int invariance_group_elements = 20;
  int invariance_points = 20;
  int oracle_samples = 100;
  verify::Tolerances tolerances;
  std::string output_csv;
  std::string output_report;
  std::vector<std::string> criteria = criterion_ids();

  // Applies one `key = value` setting. Throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  // Throws ConfigError (or UnsupportedOrderError) on any inconsistency,
  // including scenario parameters rejected by the catalogue.
  void validate() const;
  bool enabled(const std::string& criterion) const;

  // Every effective parameter as `key = value` lines, in config_keys()
  // order followed by scenario parameters; parse_config_text() of the result
  // reproduces this config.
  std::vector<std::pair<std::string, std::string>> echo() const;
  std::string to_text() const;
};

// Line-oriented `key = value` text; `#` starts a comment. Errors carry the
// line number and key.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

struct Timing {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  RunConfig config;
  std::vector<std::pair<std::string, double>> scenario_parameters;
  std::vector<verify::SweepRow> rows;
  verify::RateFit c0_fit, c1_fit, gap_fit, t_fit, large_l_fit;
  std::vector<std::pair<double, double>> large_l_deviations;
  double gap_ratio = verify::kNaN;
  int t_excluded_samples = 0;
  bool t_vacuous = false;
  verify::GeodesicTestResult geodesic_limit;
  verify::GeodesicTestResult geodesic_original;
  bool geodesic_discrimination_checked = false;
  verify::InvarianceResult invariance;
  double oracle_max = verify::kNaN;
  std::vector<verify::Verdict> verdicts;
  std::vector<Timing> timings;  // not part of the written report

  bool passed() const;
};

// Runs every enabled criterion. Numerical failures propagate as exceptions.
RunReport run_scenario(const RunConfig& config);

inline constexpr int kReportSchemaVersion = 1;

std::string report_csv(const RunReport& report);
// Deterministic JSON: no timings, no host data.
std::string report_json(const RunReport& report);
// Writes to config.output_csv / config.output_report when set. Throws IoError.
void emit_report(const RunReport& report);
void write_file(const std::filesystem::path& path, const std::string& content);

std::string format_double(double x);

}  // namespace cheeger::run
