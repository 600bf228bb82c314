#ifndef CHEEGER_C_H
#define CHEEGER_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CHG_BUILDING_LIBRARY)
#    define CHG_API __declspec(dllexport)
#  else
#    define CHG_API __declspec(dllimport)
#  endif
#else
#  define CHG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chg_status {
  CHG_OK = 0,
  CHG_ERR_CONFIG = 1,
  CHG_ERR_NUMERICAL = 2,
  CHG_ERR_DOMAIN = 3,
  CHG_ERR_UNSUPPORTED = 4,
  CHG_ERR_IO = 5,
  CHG_ERR_INVALID_ARGUMENT = 6,
  CHG_ERR_INTERNAL = 7
} chg_status;

typedef struct chg_config chg_config;
typedef struct chg_report chg_report;
typedef struct chg_scenario chg_scenario;

/* Message of the last failing call on this thread ("" if none). */
CHG_API const char* chg_last_error(void);
CHG_API const char* chg_status_name(chg_status status);
CHG_API const char* chg_version(void);

/* Catalogue. */
CHG_API size_t chg_scenario_count(void);
CHG_API const char* chg_scenario_id(size_t index);
CHG_API const char* chg_scenario_description(size_t index);
/* Parameters of entry `index` as "key=default: description" lines. */
CHG_API const char* chg_scenario_parameters(size_t index);
/* Every config key as "key = default  # description" lines. */
CHG_API const char* chg_config_help(void);

/* Configs. Parsing validates; chg_config_set re-validates. */
CHG_API chg_status chg_config_parse_file(const char* path, chg_config** out);
CHG_API chg_status chg_config_parse_text(const char* text, chg_config** out);
CHG_API chg_status chg_config_set(chg_config* config, const char* key, const char* value);
/* Effective configuration as config text; valid until the next call on config. */
CHG_API const char* chg_config_text(chg_config* config);
CHG_API void chg_config_free(chg_config* config);

/* Runs every enabled criterion. A failing criterion still returns CHG_OK. */
CHG_API chg_status chg_run(const chg_config* config, chg_report** out);
CHG_API int chg_report_passed(const chg_report* report);
CHG_API size_t chg_report_verdict_count(const chg_report* report);
/* Strings stay valid while the report lives; any out pointer may be NULL. */
CHG_API chg_status chg_report_verdict(const chg_report* report, size_t index,
                                      const char** criterion, const char** check,
                                      int* passed, double* measured,
                                      const char** threshold, const char** note);
CHG_API size_t chg_report_timing_count(const chg_report* report);
CHG_API chg_status chg_report_timing(const chg_report* report, size_t index,
                                     const char** stage, double* seconds);
CHG_API const char* chg_report_csv(const chg_report* report);
CHG_API const char* chg_report_json(const chg_report* report);
/* Writes to the config's output paths (or the given overrides when non-NULL). */
CHG_API chg_status chg_report_write(const chg_report* report, const char* csv_path,
                                    const char* report_path);
CHG_API void chg_report_free(chg_report* report);

/* Direct scenario evaluation. Matrices are row-major n x n (metric) and
   n x dim_g (Killing operator). */
CHG_API chg_status chg_scenario_create(const char* id, const char* params_text,
                                       chg_scenario** out);
CHG_API int chg_scenario_dim(const chg_scenario* scenario);
CHG_API int chg_scenario_group_dim(const chg_scenario* scenario);
CHG_API chg_status chg_scenario_metric(const chg_scenario* scenario, const double* x,
                                       double* out);
/* variant: 0 original, 1 Cheeger g_l, 2 rescaled, 3 limit. */
CHG_API chg_status chg_scenario_metric_variant(const chg_scenario* scenario, int variant,
                                               double l, const double* x, double* out);
CHG_API chg_status chg_scenario_killing(const chg_scenario* scenario, const double* x,
                                        double* out);
CHG_API void chg_scenario_free(chg_scenario* scenario);

#ifdef __cplusplus
}
#endif

#endif
