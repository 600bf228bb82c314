#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cheeger/errors.hpp"
#include "cheeger/run.hpp"

namespace cheeger::run {

namespace {

using TolField = double verify::Tolerances::*;

const std::vector<std::pair<std::string, TolField>>& tolerance_fields() {
  using T = verify::Tolerances;
  static const std::vector<std::pair<std::string, TolField>> fields{
      {"c0_slope_min", &T::c0_slope_min},
      {"c0_slope_max", &T::c0_slope_max},
      {"c1_slope_min", &T::c1_slope_min},
      {"c1_slope_max", &T::c1_slope_max},
      {"t_slope_min", &T::t_slope_min},
      {"t_slope_max", &T::t_slope_max},
      {"large_l_slope_min", &T::large_l_slope_min},
      {"large_l_slope_max", &T::large_l_slope_max},
      {"gap_ratio_max", &T::gap_ratio_max},
      {"geodesic_drift_max", &T::geodesic_drift_max},
      {"geodesic_discrimination_min", &T::geodesic_discrimination_min},
      {"invariance_max", &T::invariance_max},
      {"horizontal_identity_max", &T::horizontal_identity_max},
      {"kappa_max", &T::kappa_max},
      {"oracle_max", &T::oracle_max},
      {"t_exclusion", &T::t_exclusion},
      {"noise_floor", &T::noise_floor},
  };
  return fields;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

int parse_count(const std::string& key, const std::string& text, int min) {
  const long long v = parse_int(key, text);
  if (v < min || v > 1000000) {
    throw ConfigError(key + ": must be between " + std::to_string(min) + " and 1000000");
  }
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an unsigned 64-bit integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += format_double(xs[i]);
  }
  return s;
}

std::string killing_name(manifold::KillingMethod m) {
  switch (m) {
    case manifold::KillingMethod::kAuto: return "auto";
    case manifold::KillingMethod::kAnalytic: return "analytic";
    case manifold::KillingMethod::kFiniteDifference: return "fd";
  }
  return "auto";
}

void check_l_grid(const std::vector<double>& l_grid) {
  if (l_grid.size() < 4) {
    throw ConfigError("sweep.l_grid: needs at least 4 values for slope fitting (got " +
                      std::to_string(l_grid.size()) + ")");
  }
  for (std::size_t i = 0; i < l_grid.size(); ++i) {
    if (l_grid[i] < 1e-3) {
      throw ConfigError("sweep.l_grid: value " + format_double(l_grid[i]) + " is below 1e-3");
    }
    if (i > 0 && !(l_grid[i] < l_grid[i - 1])) {
      throw ConfigError("sweep.l_grid: must be strictly decreasing");
    }
  }
}

void check_large_l_grid(const std::vector<double>& large_l_grid) {
  if (large_l_grid.size() < 2) throw ConfigError("sweep.large_l_grid: needs at least 2 values");
  for (std::size_t i = 0; i < large_l_grid.size(); ++i) {
    if (!(large_l_grid[i] > 0.0)) throw ConfigError("sweep.large_l_grid: values must be positive");
    if (i > 0 && !(large_l_grid[i] > large_l_grid[i - 1])) {
      throw ConfigError("sweep.large_l_grid: must be strictly increasing");
    }
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

const std::vector<ConfigKeyDoc>& config_keys() {
  static const std::vector<ConfigKeyDoc> keys = [] {
    std::vector<ConfigKeyDoc> k{
        {"scenario", "", "catalogue id (required); see --list-scenarios"},
        {"sweep.l_grid", "0.2, 0.1, 0.05, 0.025", "strictly decreasing, >= 4 values, all >= 1e-3"},
        {"sweep.large_l_grid", "10, 30, 100", "strictly increasing, >= 2 values"},
        {"sweep.norm_orders", "0, 1", "C^p orders to assess (0 and 1 supported)"},
        {"samples.points", "200", "Halton points in the sample region"},
        {"samples.directions", "50", "random vertical direction pairs per point"},
        {"seed", "42", "global 64-bit seed"},
        {"fd.step", "0.0001", "finite-difference step for metric derivatives"},
        {"fd.richardson", "true", "one Richardson extrapolation level"},
        {"action.step", "1e-05", "finite-difference step for the group action"},
        {"killing.method", "auto", "auto, analytic or fd"},
        {"geodesic.length", "3", "arc length per geodesic"},
        {"geodesic.step", "0.001", "RK4 step"},
        {"geodesic.starts", "", "points 'x1, x2; y1, y2'; empty uses the scenario defaults"},
        {"invariance.group_elements", "20", "random group elements per point"},
        {"invariance.points", "20", "sample points used by the invariance suite"},
        {"oracle.samples", "100", "random (x, l) pairs for the oracle comparison"},
    };
    const verify::Tolerances defaults;
    for (const auto& [name, field] : tolerance_fields()) {
      k.push_back({"tolerance." + name, format_double(defaults.*field), "threshold override"});
    }
    k.push_back({"output.csv", "", "CSV path (empty: none)"});
    k.push_back({"output.report", "", "JSON report path (empty: none)"});
    k.push_back({"criteria", "all", "comma list of criteria to run"});
    return k;
  }();
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "scenario") {
    if (value.empty()) throw ConfigError("scenario: empty id");
    scenario = value;
  } else if (key.rfind("scenario.", 0) == 0) {
    const std::string param = key.substr(9);
    if (param.empty()) throw ConfigError("scenario.: missing parameter name");
    scenario_params[param] = value;
  } else if (key == "sweep.l_grid") {
    l_grid = parse_list(key, value);
    check_l_grid(l_grid);
  } else if (key == "sweep.large_l_grid") {
    large_l_grid = parse_list(key, value);
    check_large_l_grid(large_l_grid);
  } else if (key == "sweep.norm_orders") {
    norm_orders.clear();
    for (const auto& item : split(value, ',')) {
      norm_orders.push_back(static_cast<int>(parse_int(key, item)));
    }
    if (norm_orders.empty()) throw ConfigError(key + ": empty list");
  } else if (key == "samples.points") {
    sample_points = parse_count(key, value, 1);
  } else if (key == "samples.directions") {
    sample_directions = parse_count(key, value, 1);
  } else if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "fd.step") {
    fd_step = parse_double(key, value);
  } else if (key == "fd.richardson") {
    fd_richardson = parse_bool(key, value);
  } else if (key == "action.step") {
    action_step = parse_double(key, value);
  } else if (key == "killing.method") {
    if (value == "auto") killing = manifold::KillingMethod::kAuto;
    else if (value == "analytic") killing = manifold::KillingMethod::kAnalytic;
    else if (value == "fd") killing = manifold::KillingMethod::kFiniteDifference;
    else throw ConfigError(key + ": expected auto, analytic or fd, got '" + value + "'");
  } else if (key == "geodesic.length") {
    geodesic_length = parse_double(key, value);
  } else if (key == "geodesic.step") {
    geodesic_step = parse_double(key, value);
  } else if (key == "geodesic.starts") {
    geodesic_starts.clear();
    if (!trim(value).empty()) {
      for (const auto& pt : split(value, ';')) {
        const auto coords = parse_list(key, pt);
        geodesic_starts.push_back(Eigen::Map<const Vector>(coords.data(), coords.size()));
      }
    }
  } else if (key == "invariance.group_elements") {
    invariance_group_elements = parse_count(key, value, 1);
  } else if (key == "invariance.points") {
    invariance_points = parse_count(key, value, 1);
  } else if (key == "oracle.samples") {
    oracle_samples = parse_count(key, value, 1);
  } else if (key.rfind("tolerance.", 0) == 0) {
    const std::string name = key.substr(10);
    const auto& fields = tolerance_fields();
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const auto& f) { return f.first == name; });
    if (it == fields.end()) throw ConfigError("unknown key '" + key + "'");
    tolerances.*(it->second) = parse_double(key, value);
  } else if (key == "output.csv") {
    output_csv = value;
  } else if (key == "output.report") {
    output_report = value;
  } else if (key == "criteria" || key == "only") {
    if (value == "all") {
      criteria = criterion_ids();
    } else {
      criteria.clear();
      for (const auto& c : split(value, ',')) {
        const auto& ids = criterion_ids();
        if (std::find(ids.begin(), ids.end(), c) == ids.end()) {
          throw ConfigError(key + ": unknown criterion '" + c + "'");
        }
        if (!enabled(c)) criteria.push_back(c);
      }
      if (criteria.empty()) throw ConfigError(key + ": no criteria selected");
    }
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (scenario.empty()) throw ConfigError("scenario: missing (required key)");
  scenarios::make_scenario(scenario, scenario_params);

  check_l_grid(l_grid);
  check_large_l_grid(large_l_grid);
  for (int p : norm_orders) {
    if (p < 0) throw ConfigError("sweep.norm_orders: negative order");
    if (p >= 2) throw UnsupportedOrderError(p);
  }
  if (!(fd_step > 0.0 && fd_step < 0.1)) throw ConfigError("fd.step: must be in (0, 0.1)");
  if (!(action_step > 0.0 && action_step < 0.1)) {
    throw ConfigError("action.step: must be in (0, 0.1)");
  }
  if (!(geodesic_length > 0.0)) throw ConfigError("geodesic.length: must be positive");
  if (!(geodesic_step > 0.0 && geodesic_step <= geodesic_length)) {
    throw ConfigError("geodesic.step: must be positive and at most geodesic.length");
  }
  if (!geodesic_starts.empty()) {
    const auto sc = scenarios::make_scenario(scenario, scenario_params);
    for (const auto& p : geodesic_starts) {
      if (p.size() != sc->chart().dim()) {
        throw ConfigError("geodesic.starts: expected " + std::to_string(sc->chart().dim()) +
                          " coordinates per point");
      }
      if (!sc->chart().contains(p)) throw ConfigError("geodesic.starts: point outside the chart");
    }
  }
}

bool RunConfig::enabled(const std::string& criterion) const {
  return std::find(criteria.begin(), criteria.end(), criterion) != criteria.end();
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("scenario", scenario);
  out.emplace_back("sweep.l_grid", join(l_grid));
  out.emplace_back("sweep.large_l_grid", join(large_l_grid));
  std::string orders;
  for (std::size_t i = 0; i < norm_orders.size(); ++i) {
    orders += (i ? ", " : "") + std::to_string(norm_orders[i]);
  }
  out.emplace_back("sweep.norm_orders", orders);
  out.emplace_back("samples.points", std::to_string(sample_points));
  out.emplace_back("samples.directions", std::to_string(sample_directions));
  out.emplace_back("seed", std::to_string(seed));
  out.emplace_back("fd.step", format_double(fd_step));
  out.emplace_back("fd.richardson", fd_richardson ? "true" : "false");
  out.emplace_back("action.step", format_double(action_step));
  out.emplace_back("killing.method", killing_name(killing));
  out.emplace_back("geodesic.length", format_double(geodesic_length));
  out.emplace_back("geodesic.step", format_double(geodesic_step));
  std::string starts;
  for (std::size_t i = 0; i < geodesic_starts.size(); ++i) {
    if (i) starts += "; ";
    starts += join(std::vector<double>(geodesic_starts[i].begin(), geodesic_starts[i].end()));
  }
  out.emplace_back("geodesic.starts", starts);
  out.emplace_back("invariance.group_elements", std::to_string(invariance_group_elements));
  out.emplace_back("invariance.points", std::to_string(invariance_points));
  out.emplace_back("oracle.samples", std::to_string(oracle_samples));
  for (const auto& [name, field] : tolerance_fields()) {
    out.emplace_back("tolerance." + name, format_double(tolerances.*field));
  }
  out.emplace_back("output.csv", output_csv);
  out.emplace_back("output.report", output_report);
  std::string crit;
  for (std::size_t i = 0; i < criteria.size(); ++i) crit += (i ? "," : "") + criteria[i];
  out.emplace_back("criteria", crit);

  // Scenario parameters: catalogue defaults filled in, explicit values kept verbatim.
  std::map<std::string, std::string> params;
  for (const auto& info : scenarios::catalog()) {
    if (info.id != scenario) continue;
    for (const auto& p : info.parameters) params[p.key] = p.default_value;
  }
  for (const auto& [k, v] : scenario_params) params[k] = v;
  for (const auto& [k, v] : params) out.emplace_back("scenario." + k, v);
  return out;
}

std::string RunConfig::to_text() const {
  std::string s;
  for (const auto& [k, v] : echo()) s += k + " = " + v + "\n";
  return s;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (!seen.insert(key == "only" ? "criteria" : key).second) {
      throw ConfigError(where + "duplicate key '" + key + "'");
    }
    try {
      config.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const UnsupportedOrderError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace cheeger::run
