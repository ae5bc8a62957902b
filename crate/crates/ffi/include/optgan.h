#ifndef OPTGAN_H
#define OPTGAN_H

#include <stddef.h>
#include <stdint.h>

typedef enum OptganStatus {
  OPTGAN_STATUS_OK = 0,
  OPTGAN_STATUS_NULL_POINTER = 1,
  OPTGAN_STATUS_INVALID_ARGUMENT = 2,
  OPTGAN_STATUS_SHAPE_MISMATCH = 3,
  OPTGAN_STATUS_CONFIG = 4,
  OPTGAN_STATUS_UNSUPPORTED = 5,
  OPTGAN_STATUS_NON_FINITE = 6,
  OPTGAN_STATUS_IO = 7,
  // The objective callback returned a non-zero code.
  OPTGAN_STATUS_CALLBACK = 8,
  OPTGAN_STATUS_BUFFER_TOO_SMALL = 9,
  OPTGAN_STATUS_PANIC = 10,
} OptganStatus;

typedef enum OptganTermination {
  OPTGAN_TERMINATION_PRECISION = 0,
  OPTGAN_TERMINATION_BUDGET = 1,
  OPTGAN_TERMINATION_TIME = 2,
} OptganTermination;

// Opaque benchmark problem.
typedef struct OptganProblem OptganProblem;

// Opaque result of one optimization run.
typedef struct OptganRun OptganRun;

// Run settings. Obtain defaults from [`optgan_config_default`] and adjust.
typedef struct OptganConfig {
  size_t k0;
  size_t m;
  double a;
  double lambda;
  size_t gan_iter;
  size_t d_iter;
  size_t pre_iter;
  double beta;
  size_t s;
  size_t hidden;
  double lr_g;
  double lr_d;
  uint64_t max_fes;
  double prec;
  // Wall-clock limit in seconds; zero or negative disables it.
  double time_limit_secs;
  uint64_t seed;
} OptganConfig;

// Objective callback: writes `f(x)` to `*out` and returns 0, or returns a
// non-zero code to abort the run.
typedef int (*OptganObjectiveFn)(void *user_data, const double *x, size_t n, double *out);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null. Valid until
// the next call into this library from the same thread.
const char *optgan_last_error(void);

// Library version as a static NUL-terminated string.
const char *optgan_version(void);

// # Safety
// `out` must be valid for writes.
enum OptganStatus optgan_config_default(struct OptganConfig *out);

// Creates a benchmark instance. `kernel` is a name such as `"rastrigin"`;
// `rotated` is 1, 0, or -1 for the kernel's default.
//
// # Safety
// `kernel` must be a NUL-terminated string and `out` valid for writes.
enum OptganStatus optgan_problem_new(const char *kernel,
                                     size_t dim,
                                     uint64_t instance_seed,
                                     int rotated,
                                     struct OptganProblem **out);

// # Safety
// `problem` must come from [`optgan_problem_new`] and not be used afterwards.
void optgan_problem_free(struct OptganProblem *problem);

// Dimension of `problem`, or 0 if it is null.
//
// # Safety
// `problem` must be null or a live handle.
size_t optgan_problem_dim(const struct OptganProblem *problem);

// # Safety
// `problem` must be a live handle and `out` valid for writes.
enum OptganStatus optgan_problem_f_star(const struct OptganProblem *problem, double *out);

// # Safety
// `problem` must be a live handle, `x` must point to `len` doubles and `out`
// must be valid for writes.
enum OptganStatus optgan_problem_evaluate(const struct OptganProblem *problem,
                                          const double *x,
                                          size_t len,
                                          double *out);

// Optimizes a benchmark problem. The RNG is seeded from `config->seed`.
//
// # Safety
// `problem` must be a live handle, `config` readable and `out` writable.
enum OptganStatus optgan_optimize_problem(const struct OptganProblem *problem,
                                          const struct OptganConfig *config,
                                          struct OptganRun **out);

// Optimizes a caller-supplied function over the box `[lower, upper]` of
// dimension `n`. `f_star` may be null when the optimal value is unknown.
//
// # Safety
// `lower` and `upper` must point to `n` doubles, `f_star` must be null or
// readable, `config` readable and `out` writable. `f` is called synchronously
// on this thread with `user_data`.
enum OptganStatus optgan_optimize_callback(OptganObjectiveFn f,
                                           void *user_data,
                                           const double *lower,
                                           const double *upper,
                                           size_t n,
                                           const double *f_star,
                                           const struct OptganConfig *config,
                                           struct OptganRun **out);

// # Safety
// `run` must come from an optimize call and not be used afterwards.
void optgan_run_free(struct OptganRun *run);

// Dimension of the solutions in `run`, or 0 if it is null.
//
// # Safety
// `run` must be null or a live handle.
size_t optgan_run_dim(const struct OptganRun *run);

// Function evaluations used, or 0 if `run` is null.
//
// # Safety
// `run` must be null or a live handle.
uint64_t optgan_run_fes(const struct OptganRun *run);

// # Safety
// `run` must be a live handle and `out` writable.
enum OptganStatus optgan_run_termination(const struct OptganRun *run, enum OptganTermination *out);

// Copies the best solution into `x` (capacity `len`, at least the run's
// dimension) and its value into `fitness`.
//
// # Safety
// `run` must be a live handle, `x` writable for `len` doubles and `fitness`
// writable.
enum OptganStatus optgan_run_best(const struct OptganRun *run,
                                  double *x,
                                  size_t len,
                                  double *fitness);

// Number of `(fes, indicator)` records in the run's trace.
//
// # Safety
// `run` must be null or a live handle.
size_t optgan_run_trace_len(const struct OptganRun *run);

// Copies the trace into two parallel arrays of capacity `len`.
//
// # Safety
// `run` must be a live handle; `fes` and `indicator` writable for `len`
// elements.
enum OptganStatus optgan_run_trace(const struct OptganRun *run,
                                   uint64_t *fes,
                                   double *indicator,
                                   size_t len);

// Writes the run trace file (same format as the `optgan` binary).
//
// # Safety
// `run` must be a live handle and `path` a NUL-terminated string.
enum OptganStatus optgan_run_write_trace(const struct OptganRun *run, const char *path);

// Bins `samples` draws of the trained generator of a 2-D run into a
// `gx * gy` grid written row-major (rows along y) into `counts`.
//
// # Safety
// `run` must be a live handle and `counts` writable for `len` elements.
enum OptganStatus optgan_run_heatmap(const struct OptganRun *run,
                                     size_t gx,
                                     size_t gy,
                                     uint64_t samples,
                                     uint64_t seed,
                                     uint64_t *counts,
                                     size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPTGAN_H */
