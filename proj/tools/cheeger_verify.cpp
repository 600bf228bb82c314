#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cheeger/cheeger_c.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCriterion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(chg_status s) {
  switch (s) {
    case CHG_OK: return kExitPass;
    case CHG_ERR_NUMERICAL:
    case CHG_ERR_DOMAIN: return kExitNumerical;
    case CHG_ERR_INTERNAL: return kExitNumerical;
    default: return kExitConfig;
  }
}

int report_error(chg_status s) {
  std::fprintf(stderr, "cheeger-verify: %s: %s\n", chg_status_name(s), chg_last_error());
  return exit_code(s);
}

void list_scenarios() {
  for (size_t i = 0; i < chg_scenario_count(); ++i) {
    std::printf("%s\n  %s\n", chg_scenario_id(i), chg_scenario_description(i));
    std::string params = chg_scenario_parameters(i);
    size_t pos = 0;
    while (pos < params.size()) {
      const size_t nl = params.find('\n', pos);
      std::printf("    scenario.%s\n", params.substr(pos, nl - pos).c_str());
      pos = nl == std::string::npos ? params.size() : nl + 1;
    }
  }
}

struct RunOptions {
  std::string config_path;
  std::string scenario;
  std::optional<unsigned long long> seed;
  std::string out_csv;
  std::string out_report;
  std::string only;
  std::vector<std::string> sets;
};

int run(const RunOptions& opt) {
  chg_config* cfg = nullptr;
  chg_status s;
  if (!opt.config_path.empty()) {
    s = chg_config_parse_file(opt.config_path.c_str(), &cfg);
  } else if (!opt.scenario.empty()) {
    s = chg_config_parse_text(("scenario = " + opt.scenario + "\n").c_str(), &cfg);
  } else {
    std::fprintf(stderr, "cheeger-verify: run needs a config path or --scenario\n");
    return kExitConfig;
  }
  if (s != CHG_OK) return report_error(s);

  std::vector<std::pair<std::string, std::string>> overrides;
  if (!opt.config_path.empty() && !opt.scenario.empty()) overrides.emplace_back("scenario", opt.scenario);
  if (opt.seed) overrides.emplace_back("seed", std::to_string(*opt.seed));
  if (!opt.out_csv.empty()) overrides.emplace_back("output.csv", opt.out_csv);
  if (!opt.out_report.empty()) overrides.emplace_back("output.report", opt.out_report);
  if (!opt.only.empty()) overrides.emplace_back("criteria", opt.only);
  for (const auto& kv : opt.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "cheeger-verify: --set expects key=value, got '%s'\n", kv.c_str());
      chg_config_free(cfg);
      return kExitConfig;
    }
    auto trim = [](std::string t) {
      t.erase(0, t.find_first_not_of(" \t"));
      t.erase(t.find_last_not_of(" \t") + 1);
      return t;
    };
    overrides.emplace_back(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  for (const auto& [k, v] : overrides) {
    s = chg_config_set(cfg, k.c_str(), v.c_str());
    if (s != CHG_OK) {
      chg_config_free(cfg);
      return report_error(s);
    }
  }

  chg_report* rep = nullptr;
  s = chg_run(cfg, &rep);
  chg_config_free(cfg);
  if (s != CHG_OK) return report_error(s);

  for (size_t i = 0; i < chg_report_verdict_count(rep); ++i) {
    const char *criterion, *check, *threshold, *note;
    int passed;
    double measured;
    chg_report_verdict(rep, i, &criterion, &check, &passed, &measured, &threshold, &note);
    std::printf("%s %s/%s measured=%.6g threshold=%s%s%s\n", passed ? "PASS" : "FAIL", criterion,
                check, measured, threshold, *note ? "  # " : "", note);
  }
  for (size_t i = 0; i < chg_report_timing_count(rep); ++i) {
    const char* stage;
    double seconds;
    chg_report_timing(rep, i, &stage, &seconds);
    std::fprintf(stderr, "time %s %.3f s\n", stage, seconds);
  }

  s = chg_report_write(rep, nullptr, nullptr);
  const bool passed = chg_report_passed(rep);
  chg_report_free(rep);
  if (s != CHG_OK) return report_error(s);
  return passed ? kExitPass : kExitCriterion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cheeger deformation verification runner"};
  app.footer(std::string("Config keys (key = default):\n") + chg_config_help() +
             "\nExit codes: 0 all pass, 1 criterion failure, 2 config/io error, 3 numerical failure.");
  app.require_subcommand(0, 1);

  bool list = false;
  app.add_flag("--list-scenarios", list, "List catalogued scenarios and their parameters");

  RunOptions opt;
  unsigned long long seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the verification suites for one scenario");
  run_cmd->add_option("config", opt.config_path, "Config file (key = value lines)");
  run_cmd->add_option("--scenario", opt.scenario, "Scenario id (shorthand, or override)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Global 64-bit seed");
  run_cmd->add_option("--out-csv", opt.out_csv, "CSV output path");
  run_cmd->add_option("--out-report", opt.out_report, "JSON report output path");
  run_cmd->add_option("--only", opt.only, "Comma list of criteria to run");
  run_cmd->add_option("--set", opt.sets, "Override a config key (key=value), repeatable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfig;
  }

  if (list) {
    list_scenarios();
    return kExitPass;
  }
  if (run_cmd->parsed()) {
    if (seed_opt->count() > 0) opt.seed = seed;
    return run(opt);
  }
  std::fputs(app.help().c_str(), stdout);
  return kExitConfig;
}
