#include "cheeger/cheeger_c.h"

#include <memory>
#include <string>
#include <vector>

#include "cheeger/errors.hpp"
#include "cheeger/run.hpp"

struct chg_config {
  cheeger::run::RunConfig config;
  std::string text;
};

struct chg_report {
  cheeger::run::RunReport report;
  std::string csv;
  std::string json;
};

struct chg_scenario {
  std::shared_ptr<const cheeger::manifold::Scenario> scenario;
};

namespace {

thread_local std::string last_error;

chg_status fail(chg_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
chg_status guarded(F&& f) {
  using namespace cheeger;
  try {
    last_error.clear();
    f();
    return CHG_OK;
  } catch (const UnsupportedOrderError& e) {
    return fail(CHG_ERR_UNSUPPORTED, e.what());
  } catch (const ConfigError& e) {
    return fail(CHG_ERR_CONFIG, e.what());
  } catch (const NumericalError& e) {
    return fail(CHG_ERR_NUMERICAL, e.what());
  } catch (const DomainError& e) {
    return fail(CHG_ERR_DOMAIN, e.what());
  } catch (const IoError& e) {
    return fail(CHG_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CHG_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CHG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CHG_ERR_INTERNAL, "unknown exception");
  }
}

const cheeger::scenarios::ScenarioInfo* info_at(size_t index) {
  const auto& cat = cheeger::scenarios::catalog();
  return index < cat.size() ? &cat[index] : nullptr;
}

}  // namespace

extern "C" {

const char* chg_last_error(void) { return last_error.c_str(); }

const char* chg_status_name(chg_status status) {
  switch (status) {
    case CHG_OK: return "ok";
    case CHG_ERR_CONFIG: return "config error";
    case CHG_ERR_NUMERICAL: return "numerical failure";
    case CHG_ERR_DOMAIN: return "domain error";
    case CHG_ERR_UNSUPPORTED: return "unsupported";
    case CHG_ERR_IO: return "i/o error";
    case CHG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CHG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* chg_version(void) { return "0.1.0"; }

size_t chg_scenario_count(void) { return cheeger::scenarios::catalog().size(); }

const char* chg_scenario_id(size_t index) {
  const auto* info = info_at(index);
  return info ? info->id.c_str() : nullptr;
}

const char* chg_scenario_description(size_t index) {
  const auto* info = info_at(index);
  return info ? info->description.c_str() : nullptr;
}

const char* chg_scenario_parameters(size_t index) {
  static const std::vector<std::string> texts = [] {
    std::vector<std::string> out;
    for (const auto& info : cheeger::scenarios::catalog()) {
      std::string s;
      for (const auto& p : info.parameters) {
        s += p.key + "=" + p.default_value + ": " + p.description + "\n";
      }
      out.push_back(s);
    }
    return out;
  }();
  return index < texts.size() ? texts[index].c_str() : nullptr;
}

const char* chg_config_help(void) {
  static const std::string text = [] {
    std::string s;
    for (const auto& k : cheeger::run::config_keys()) {
      s += k.key + " = " + k.default_value + "  # " + k.description + "\n";
    }
    return s;
  }();
  return text.c_str();
}

chg_status chg_config_parse_file(const char* path, chg_config** out) {
  if (!path || !out) return fail(CHG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<chg_config>();
    c->config = cheeger::run::parse_config_file(path);
    *out = c.release();
  });
}

chg_status chg_config_parse_text(const char* text, chg_config** out) {
  if (!text || !out) return fail(CHG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<chg_config>();
    c->config = cheeger::run::parse_config_text(text);
    *out = c.release();
  });
}

chg_status chg_config_set(chg_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(CHG_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cheeger::run::RunConfig updated = config->config;
    updated.set(key, value);
    updated.validate();
    config->config = std::move(updated);
  });
}

const char* chg_config_text(chg_config* config) {
  if (!config) return nullptr;
  config->text = config->config.to_text();
  return config->text.c_str();
}

void chg_config_free(chg_config* config) { delete config; }

chg_status chg_run(const chg_config* config, chg_report** out) {
  if (!config || !out) return fail(CHG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<chg_report>();
    r->report = cheeger::run::run_scenario(config->config);
    r->csv = cheeger::run::report_csv(r->report);
    r->json = cheeger::run::report_json(r->report);
    *out = r.release();
  });
}

int chg_report_passed(const chg_report* report) { return report && report->report.passed(); }

size_t chg_report_verdict_count(const chg_report* report) {
  return report ? report->report.verdicts.size() : 0;
}

chg_status chg_report_verdict(const chg_report* report, size_t index, const char** criterion,
                              const char** check, int* passed, double* measured,
                              const char** threshold, const char** note) {
  if (!report) return fail(CHG_ERR_INVALID_ARGUMENT, "null report");
  if (index >= report->report.verdicts.size()) {
    return fail(CHG_ERR_INVALID_ARGUMENT, "verdict index out of range");
  }
  const auto& v = report->report.verdicts[index];
  if (criterion) *criterion = v.criterion.c_str();
  if (check) *check = v.check.c_str();
  if (passed) *passed = v.passed ? 1 : 0;
  if (measured) *measured = v.measured;
  if (threshold) *threshold = v.threshold.c_str();
  if (note) *note = v.note.c_str();
  return CHG_OK;
}

size_t chg_report_timing_count(const chg_report* report) {
  return report ? report->report.timings.size() : 0;
}

chg_status chg_report_timing(const chg_report* report, size_t index, const char** stage,
                             double* seconds) {
  if (!report) return fail(CHG_ERR_INVALID_ARGUMENT, "null report");
  if (index >= report->report.timings.size()) {
    return fail(CHG_ERR_INVALID_ARGUMENT, "timing index out of range");
  }
  const auto& t = report->report.timings[index];
  if (stage) *stage = t.stage.c_str();
  if (seconds) *seconds = t.seconds;
  return CHG_OK;
}

const char* chg_report_csv(const chg_report* report) { return report ? report->csv.c_str() : nullptr; }

const char* chg_report_json(const chg_report* report) {
  return report ? report->json.c_str() : nullptr;
}

chg_status chg_report_write(const chg_report* report, const char* csv_path,
                            const char* report_path) {
  if (!report) return fail(CHG_ERR_INVALID_ARGUMENT, "null report");
  return guarded([&] {
    const std::string csv = csv_path ? csv_path : report->report.config.output_csv;
    const std::string js = report_path ? report_path : report->report.config.output_report;
    if (!csv.empty()) cheeger::run::write_file(csv, report->csv);
    if (!js.empty()) cheeger::run::write_file(js, report->json);
  });
}

void chg_report_free(chg_report* report) { delete report; }

chg_status chg_scenario_create(const char* id, const char* params_text, chg_scenario** out) {
  if (!id || !out) return fail(CHG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    cheeger::run::RunConfig parsed;
    if (params_text) {
      std::string text = std::string("scenario = ") + id + "\n";
      // params_text holds lines "key = value" without the scenario. prefix.
      std::string line;
      for (const char* p = params_text;; ++p) {
        if (*p == '\n' || *p == '\0') {
          if (line.find_first_not_of(" \t\r") != std::string::npos) text += "scenario." + line + "\n";
          line.clear();
          if (*p == '\0') break;
        } else {
          line += *p;
        }
      }
      parsed = cheeger::run::parse_config_text(text);
    }
    auto s = std::make_unique<chg_scenario>();
    s->scenario = cheeger::scenarios::make_scenario(id, parsed.scenario_params);
    *out = s.release();
  });
}

int chg_scenario_dim(const chg_scenario* scenario) {
  return scenario ? scenario->scenario->chart().dim() : 0;
}

int chg_scenario_group_dim(const chg_scenario* scenario) {
  return scenario ? scenario->scenario->group().dim() : 0;
}

chg_status chg_scenario_metric(const chg_scenario* scenario, const double* x, double* out) {
  return chg_scenario_metric_variant(scenario, 0, 1.0, x, out);
}

chg_status chg_scenario_metric_variant(const chg_scenario* scenario, int variant, double l,
                                       const double* x, double* out) {
  if (!scenario || !x || !out) return fail(CHG_ERR_INVALID_ARGUMENT, "null argument");
  if (variant < 0 || variant > 3) return fail(CHG_ERR_INVALID_ARGUMENT, "unknown metric variant");
  return guarded([&] {
    using cheeger::deformation::MetricVariant;
    const auto& sc = *scenario->scenario;
    const int n = sc.chart().dim();
    const cheeger::Point p = Eigen::Map<const cheeger::Vector>(x, n);
    if (variant == 1 || variant == 2) cheeger::deformation::DeformationParams::make(l);
    const MetricVariant v = variant == 0   ? MetricVariant::original()
                            : variant == 1 ? MetricVariant::cheeger(l)
                            : variant == 2 ? MetricVariant::rescaled(l)
                                           : MetricVariant::limit();
    sc.chart().require_inside(p, 0.0, "evaluation point");
    const cheeger::Matrix g = cheeger::deformation::evaluate(sc, v, p);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, n, n) = g;
  });
}

chg_status chg_scenario_killing(const chg_scenario* scenario, const double* x, double* out) {
  if (!scenario || !x || !out) return fail(CHG_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& sc = *scenario->scenario;
    const int n = sc.chart().dim();
    const cheeger::Point p = Eigen::Map<const cheeger::Vector>(x, n);
    sc.chart().require_inside(p, 0.0, "evaluation point");
    const cheeger::Matrix k = cheeger::manifold::killing_operator(sc, p);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        out, k.rows(), k.cols()) = k;
  });
}

void chg_scenario_free(chg_scenario* scenario) { delete scenario; }

}  // extern "C"
