/*
 * wsm: relaxed FIFO work-stealing queues, history checking and benchmarks.
 *
 * Plain C interface over opaque handles. Functions return a wsm_status; on
 * failure wsm_last_error() describes the problem (per calling thread).
 *
 * Ownership: a wsm_queue is driven by exactly one owner thread at a time
 * (wsm_put / wsm_take). Each wsm_thief is used by one thread at a time;
 * thieves and the owner may run concurrently. Destroy thieves before their
 * queue.
 */
#ifndef WSM_WSM_H
#define WSM_WSM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(WSM_BUILDING_LIBRARY)
#define WSM_API __declspec(dllexport)
#else
#define WSM_API __declspec(dllimport)
#endif
#else
#define WSM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wsm_status {
  WSM_OK = 0,
  WSM_EMPTY = 1, /* extraction found no task */
  WSM_ERR_INVALID_ARGUMENT = -1,
  WSM_ERR_CAPACITY = -2,
  WSM_ERR_CONTRACT = -3,
  WSM_ERR_PARSE = -4,
  WSM_ERR_BOUND = -5,
  WSM_ERR_INTERNAL = -6
} wsm_status;

typedef enum wsm_algorithm {
  WSM_ALGO_WS_MULT = 0,
  WSM_ALGO_WS_WMULT = 1,
  WSM_ALGO_B_WS_MULT = 2,
  WSM_ALGO_B_WS_WMULT = 3,
  WSM_ALGO_EXACT = 4,
  WSM_ALGO_CHASE_LEV = 5,
  WSM_ALGO_IDEMPOTENT_FIFO = 6
} wsm_algorithm;

typedef enum wsm_buffer { WSM_BUFFER_SEGMENTED = 0, WSM_BUFFER_DOUBLING = 1 } wsm_buffer;

typedef enum wsm_profile { WSM_PROFILE_SEQ_CST = 0, WSM_PROFILE_RELAXED = 1 } wsm_profile;

typedef enum wsm_graph {
  WSM_GRAPH_TORUS2D = 0,
  WSM_GRAPH_TORUS2D60 = 1,
  WSM_GRAPH_TORUS3D = 2,
  WSM_GRAPH_TORUS3D40 = 3,
  WSM_GRAPH_RANDOM = 4
} wsm_graph;

typedef enum wsm_zero_cost_mode { WSM_PUT_TAKE = 0, WSM_PUT_STEAL = 1 } wsm_zero_cost_mode;

typedef enum wsm_spec {
  WSM_SPEC_MULTIPLICITY = 0,      /* set-linearizability, multiplicity */
  WSM_SPEC_WEAK_MULTIPLICITY = 1, /* linearizability, weak multiplicity */
  WSM_SPEC_EXACT_FIFO = 2         /* linearizability, exact FIFO */
} wsm_spec;

typedef enum wsm_bound_mode {
  WSM_BOUND_MULT = 0,
  WSM_BOUND_WEAK = 1,
  WSM_BOUND_BOUNDED = 2,
  WSM_BOUND_EXACT = 3
} wsm_bound_mode;

typedef struct wsm_queue wsm_queue;
typedef struct wsm_thief wsm_thief;

WSM_API const char* wsm_last_error(void);
WSM_API const char* wsm_status_string(wsm_status status);
WSM_API void wsm_free(void* p);

/* Name parsing ("ws-mult", "segmented", "relaxed", "torus3d40", "put-steal");
 * unknown names yield WSM_ERR_PARSE. */
WSM_API wsm_status wsm_parse_algorithm(const char* name, wsm_algorithm* out);
WSM_API wsm_status wsm_parse_buffer(const char* name, wsm_buffer* out);
WSM_API wsm_status wsm_parse_profile(const char* name, wsm_profile* out);
WSM_API wsm_status wsm_parse_graph(const char* name, wsm_graph* out);
WSM_API wsm_status wsm_parse_zero_cost_mode(const char* name, wsm_zero_cost_mode* out);
WSM_API const char* wsm_algorithm_name(wsm_algorithm algorithm);

/* Queues. `capacity` bounds the number of puts for register-based variants
 * (at most capacity - 1); `segment_length` sets the segment length or the
 * initial array length. */
WSM_API wsm_status wsm_queue_create(wsm_algorithm algorithm, wsm_buffer buffer, uint64_t capacity,
                                    uint32_t segment_length, wsm_queue** out);
WSM_API void wsm_queue_destroy(wsm_queue* queue);
WSM_API wsm_status wsm_put(wsm_queue* queue, int64_t task);
WSM_API wsm_status wsm_take(wsm_queue* queue, int64_t* task);
WSM_API wsm_status wsm_thief_create(wsm_queue* queue, wsm_thief** out);
WSM_API void wsm_thief_destroy(wsm_thief* thief);
WSM_API wsm_status wsm_steal(wsm_thief* thief, int64_t* task);

/* History checking. `history` uses the text format
 * `event,pid,op,arg_or_result,timestamp`. `processes` is the number of
 * processes for WSM_SPEC_WEAK_MULTIPLICITY. On return *accepted is 1, 0, or
 * -1 when the search budget ran out. */
WSM_API wsm_status wsm_check_history(const char* history, wsm_spec spec, uint32_t processes, int* accepted);
WSM_API wsm_status wsm_check_bounds(const char* history, wsm_bound_mode mode, int* accepted);

/* Benchmarks. */
typedef struct wsm_bench_config {
  wsm_algorithm algorithm;
  wsm_buffer buffer;
  uint32_t segment_length;
  uint64_t ops;
  uint32_t threads;
  uint32_t thieves;
  uint32_t reps;
  uint64_t seed;
  wsm_profile profile;
} wsm_bench_config;

#define WSM_MAX_RUNS 64

typedef struct wsm_bench_result {
  double trimmed_mean_ms;
  uint32_t runs;
  double run_ms[WSM_MAX_RUNS];
  uint64_t extracted;
  int ok;    /* result counts matched the algorithm's guarantee */
  int valid; /* spanning tree only: every repetition produced a valid tree */
} wsm_bench_result;

WSM_API void wsm_bench_config_default(wsm_bench_config* cfg);
WSM_API wsm_status wsm_bench_zero_cost(const wsm_bench_config* cfg, wsm_zero_cost_mode mode, wsm_bench_result* out);
WSM_API wsm_status wsm_bench_spanning_tree(const wsm_bench_config* cfg, wsm_graph graph, uint64_t vertices,
                                           uint64_t edges, int directed, wsm_bench_result* out);

/* Called once per finished suite row with the CSV line (no newline). */
typedef void (*wsm_suite_progress)(const char* csv_row, void* user);

/* Runs a JSON suite; *csv receives the full CSV (header included) and must
 * be released with wsm_free. */
WSM_API wsm_status wsm_bench_suite(const char* suite_json, wsm_suite_progress progress, void* user, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* WSM_WSM_H */
