/*
 * limsim — closed-loop simulation of a linear induction motor drive with
 * an enumerative model predictive speed controller and a direct torque
 * control baseline.
 *
 * C API for the shared library. All objects are opaque handles; every
 * function returns a limsim_status. On failure, limsim_last_error()
 * returns a thread-local message describing what went wrong.
 */

#ifndef LIMSIM_H
#define LIMSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef LIMSIM_API
#define LIMSIM_API __attribute__((visibility("default")))
#endif

typedef enum limsim_status {
    LIMSIM_OK = 0,
    LIMSIM_ERR_INVALID_ARGUMENT = 1, /* bad pointer, bad index, bad name */
    LIMSIM_ERR_PARSE = 2,            /* scenario text is not valid JSON */
    LIMSIM_ERR_VALIDATION = 3,       /* scenario violates an invariant */
    LIMSIM_ERR_IO = 4,               /* file could not be read/written */
    LIMSIM_ERR_NUMERIC = 5,          /* simulation produced non-finite state */
    LIMSIM_ERR_UNKNOWN_KEY = 6,      /* override path does not exist */
    LIMSIM_ERR_INTERNAL = 7
} limsim_status;

typedef struct limsim_scenario limsim_scenario;
typedef struct limsim_result limsim_result;

LIMSIM_API const char *limsim_version(void);
LIMSIM_API const char *limsim_status_name(limsim_status status);

/* Thread-local message for the most recent failing call. Never NULL. */
LIMSIM_API const char *limsim_last_error(void);

/* ---- scenarios ---- */

LIMSIM_API limsim_status limsim_scenario_load_file(const char *path,
                                                   limsim_scenario **out);
LIMSIM_API limsim_status limsim_scenario_load_string(const char *json_text,
                                                     limsim_scenario **out);

/* Built-in scenarios shipped with the library ("high-speed", "low-speed",
 * "rs-plus-50", "rs-minus-50", "pj-sweep"). */
LIMSIM_API limsim_status limsim_scenario_builtin(const char *name,
                                                 limsim_scenario **out);
LIMSIM_API int limsim_builtin_count(void);
LIMSIM_API const char *limsim_builtin_name(int index);

/* Override one field addressed by a dotted path, e.g. "controller.P_sw.0"
 * or "motor.Rs". The value is parsed as JSON; bare words are treated as
 * strings, so both "dtc" and "\"dtc\"" work. */
LIMSIM_API limsim_status limsim_scenario_set(limsim_scenario *sc,
                                             const char *dotted_key,
                                             const char *value);

/* Switch the active controller block ("enmpc" or "dtc"). Falls back to
 * the scenario's embedded block for that type, or to defaults derived
 * from the motor parameters. */
LIMSIM_API limsim_status limsim_scenario_select_controller(limsim_scenario *sc,
                                                           const char *type);

LIMSIM_API limsim_status limsim_scenario_clone(const limsim_scenario *sc,
                                               limsim_scenario **out);
LIMSIM_API limsim_status limsim_scenario_validate(const limsim_scenario *sc);
LIMSIM_API limsim_status limsim_scenario_name(const limsim_scenario *sc,
                                              const char **out);
/* Serialized JSON of the scenario as currently configured. The returned
 * pointer lives until the next call on the same handle. */
LIMSIM_API limsim_status limsim_scenario_json(limsim_scenario *sc,
                                              const char **out);
LIMSIM_API void limsim_scenario_free(limsim_scenario *sc);

/* ---- running ---- */

LIMSIM_API limsim_status limsim_run(const limsim_scenario *sc,
                                    limsim_result **out);

/* ---- results ---- */

LIMSIM_API limsim_status limsim_result_write_trace(const limsim_result *res,
                                                   const char *path);

LIMSIM_API limsim_status limsim_result_metric_count(const limsim_result *res,
                                                    int *out);
LIMSIM_API limsim_status limsim_result_metric_name(const limsim_result *res,
                                                   int index, const char **out);
LIMSIM_API limsim_status limsim_result_metric_get(const limsim_result *res,
                                                  const char *name,
                                                  double *out);

/* Metrics as text: format is "kv" (key=value lines) or "csv" (header row
 * plus one value row). Returns the required size via *needed; writes up
 * to cap bytes including the terminating NUL. */
LIMSIM_API limsim_status limsim_result_metrics_text(const limsim_result *res,
                                                    const char *format,
                                                    char *buf, size_t cap,
                                                    size_t *needed);

LIMSIM_API limsim_status limsim_result_trace_rows(const limsim_result *res,
                                                  int64_t *out);
LIMSIM_API limsim_status limsim_result_trace_column_count(const limsim_result *res,
                                                          int *out);
LIMSIM_API limsim_status limsim_result_trace_column_name(const limsim_result *res,
                                                         int index,
                                                         const char **out);
LIMSIM_API limsim_status limsim_result_trace_get(const limsim_result *res,
                                                 int64_t row, int column,
                                                 double *out);
LIMSIM_API void limsim_result_free(limsim_result *res);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LIMSIM_H */
