#ifndef GYQEC_H
#define GYQEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Simulation mode selectors mirroring the harness modes.
 */
typedef enum GyqecMode {
  Ideal = 0,
  Static = 1,
  Fluctuating = 2,
  GateNoise = 3,
} GyqecMode;

/**
 * Opaque run handle: configuration plus, after execution, the recorded
 * observable series.
 */
typedef struct GyqecRun GyqecRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gyqec_last_error(void);

/**
 * Allocate a run for an `n_q`-qubit register searching for `target`.
 * Returns null on invalid arguments.
 */
struct GyqecRun *gyqec_run_new(uintptr_t n_q, uintptr_t target);

/**
 * # Safety
 * `run` must be a pointer from `gyqec_run_new` not yet freed.
 */
void gyqec_run_free(struct GyqecRun *run);

/**
 * # Safety
 * `run` must be a live handle.
 */
int gyqec_run_set_iterations(struct GyqecRun *run, uintptr_t iterations);

/**
 * Select the error model and its strength.
 *
 * # Safety
 * `run` must be a live handle.
 */
int gyqec_run_set_mode(struct GyqecRun *run, enum GyqecMode mode, double epsilon);

/**
 * Enable relabeling every `l_g` gates; `swaps_per_event = 0` selects the
 * default `n_tot / 2`.
 *
 * # Safety
 * `run` must be a live handle.
 */
int gyqec_run_set_relabeling(struct GyqecRun *run, uintptr_t l_g, uintptr_t swaps_per_event);

/**
 * # Safety
 * `run` must be a live handle.
 */
int gyqec_run_set_seed(struct GyqecRun *run, uint64_t seed);

/**
 * Execute the configured run, recording one observable point per
 * iteration.
 *
 * # Safety
 * `run` must be a live handle.
 */
int gyqec_run_execute(struct GyqecRun *run);

/**
 * Number of recorded points (0 before execution).
 *
 * # Safety
 * `run` must be a live handle.
 */
uintptr_t gyqec_run_len(const struct GyqecRun *run);

/**
 * Gate count of the compiled iteration.
 *
 * # Safety
 * `run` must be a live handle.
 */
uintptr_t gyqec_run_gate_count(const struct GyqecRun *run);

/**
 * Searched-state probability at point `index`.
 *
 * # Safety
 * `run` must be a live handle; `out` must point to a writable f64.
 */
int gyqec_run_w_g(const struct GyqecRun *run, uintptr_t index, double *out);

/**
 * Four-state probability at point `index`.
 *
 * # Safety
 * `run` must be a live handle; `out` must point to a writable f64.
 */
int gyqec_run_w_4(const struct GyqecRun *run, uintptr_t index, double *out);

/**
 * Fidelity against the ideal run at point `index`.
 *
 * # Safety
 * `run` must be a live handle; `out` must point to a writable f64.
 */
int gyqec_run_fidelity(const struct GyqecRun *run, uintptr_t index, double *out);

/**
 * Norm drift at point `index`.
 *
 * # Safety
 * `run` must be a live handle; `out` must point to a writable f64.
 */
int gyqec_run_norm_error(const struct GyqecRun *run, uintptr_t index, double *out);

/**
 * Chaos border estimate `1.7 / (n_g sqrt(n_tot))`.
 */
double gyqec_epsilon_c(uintptr_t n_g, uintptr_t n_tot);

/**
 * Optimal iteration count for an `n_q`-qubit register.
 */
uintptr_t gyqec_ideal_t_g(uintptr_t n_q);

/**
 * Crate version as a static C string.
 */
const char *gyqec_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GYQEC_H */
