#ifndef CORCIAR_H
#define CORCIAR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CORCIAR_API __declspec(dllexport)
#else
#define CORCIAR_API __attribute__((visibility("default")))
#endif

typedef enum corciar_status
{
    CORCIAR_OK = 0,
    CORCIAR_ERR_CONFIG = 1,
    CORCIAR_ERR_RUNTIME = 2,
    CORCIAR_ERR_ARGUMENT = 3,
    CORCIAR_ERR_IO = 4
} corciar_status;

typedef struct corciar_config corciar_config;
typedef struct corciar_result corciar_result;

/* One protocol phase of a run. Absent values are NaN. */
typedef struct corciar_summary
{
    char protocol[32];
    uint32_t n_nodes;
    int32_t n_hops;
    double throughput_kbps;
    double delivery_ratio;
    double mean_delay_ms;
    double mean_rtt_ms;
    uint64_t packets_sent;
    uint64_t packets_received;
} corciar_summary;

typedef struct corciar_counters
{
    uint64_t events;
    uint64_t collisions;
    uint64_t interference_corruptions;
    uint64_t cts_deferrals;
    uint64_t mac_failures;
    uint64_t queue_drops;
    uint64_t route_discoveries;
    uint64_t no_route;
    uint64_t out_of_range_receptions;
} corciar_counters;

typedef enum corciar_axis
{
    CORCIAR_AXIS_HOPS = 0,
    CORCIAR_AXIS_NODES = 1
} corciar_axis;

/* Message of the last failed call on this thread; never NULL. */
CORCIAR_API const char* corciar_last_error(void);
CORCIAR_API const char* corciar_version(void);

/* Strings returned through char** out-parameters are released with this. */
CORCIAR_API void corciar_string_free(char* s);

CORCIAR_API corciar_status corciar_config_default(corciar_config** out);
CORCIAR_API corciar_status corciar_config_parse(const char* text, corciar_config** out);
CORCIAR_API corciar_status corciar_config_load(const char* path, corciar_config** out);
/* Applies one `key = value` setting. */
CORCIAR_API corciar_status corciar_config_set(corciar_config* cfg, const char* key, const char* value);
CORCIAR_API corciar_status corciar_config_set_seed(corciar_config* cfg, uint64_t seed);
CORCIAR_API corciar_status corciar_config_serialize(const corciar_config* cfg, char** out);
CORCIAR_API void corciar_config_free(corciar_config* cfg);

/*
 * Runs the scenario. trace_path and routes_path may be NULL; when set, the
 * event trace and the final route tables are written there.
 */
CORCIAR_API corciar_status corciar_run(const corciar_config* cfg,
                                       const char* scenario,
                                       const char* trace_path,
                                       const char* routes_path,
                                       corciar_result** out);
CORCIAR_API size_t corciar_result_phase_count(const corciar_result* res);
CORCIAR_API corciar_status corciar_result_phase(const corciar_result* res, size_t index, corciar_summary* out);
CORCIAR_API corciar_status corciar_result_counters(const corciar_result* res, size_t index, corciar_counters* out);
/* Baseline / CoRCiaR throughput ratio; NaN unless both phases ran. */
CORCIAR_API double corciar_result_cor(const corciar_result* res);
CORCIAR_API uint64_t corciar_result_trace_hash(const corciar_result* res, size_t index);
/* 1 when every flow of every phase satisfies packet conservation. */
CORCIAR_API int corciar_result_conserved(const corciar_result* res);
/* Header line plus one row per phase. */
CORCIAR_API corciar_status corciar_result_csv(const corciar_result* res, int with_header, char** out);
CORCIAR_API void corciar_result_free(corciar_result* res);

CORCIAR_API corciar_status corciar_sweep(const corciar_config* base,
                                         corciar_axis axis,
                                         const int* values,
                                         size_t n_values,
                                         const uint64_t* seeds,
                                         size_t n_seeds,
                                         unsigned threads,
                                         char** csv_out,
                                         size_t* failed_cells);

CORCIAR_API corciar_status corciar_channel_table_csv(char** out);
CORCIAR_API const char* corciar_csv_header(void);
/* after / before; NaN when before is not positive. */
CORCIAR_API double corciar_cor(double after_kbps, double before_kbps);

#ifdef __cplusplus
}
#endif

#endif
