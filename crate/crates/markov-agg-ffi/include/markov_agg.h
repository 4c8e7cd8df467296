#ifndef MARKOV_AGG_H
#define MARKOV_AGG_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum MagStatus {
  MagStatus_Ok = 0,
  /**
   * Computation failed (non-regular chain, no convergence, ...).
   */
  MagStatus_ComputationError = 1,
  /**
   * Invalid input (bad dimensions, row sums, labels, null pointers, ...).
   */
  MagStatus_InvalidInput = 2,
  /**
   * A resource cap was exceeded.
   */
  MagStatus_ResourceLimit = 3,
} MagStatus;

/**
 * Opaque handle to a validated regular Markov chain.
 */
typedef struct MagChain MagChain;

/**
 * Opaque handle to a canonical state-space partition.
 */
typedef struct MagPartition MagPartition;

/**
 * Flat metric report; `lumpable` is 0 or 1.
 */
typedef struct MagMetrics {
  double kldr_p;
  double kldr_mu;
  double loss_x;
  double loss_y;
  double h_rate;
  uint8_t lumpable;
} MagMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *mag_last_error_message(void);

/**
 * Builds a chain from a row-major `n x n` transition matrix.
 *
 * # Safety
 * `entries` must point to `n * n` readable doubles and `out` to a writable
 * pointer slot.
 */
enum MagStatus mag_chain_new(const double *entries, size_t n, struct MagChain **out);

/**
 * Releases a chain handle; accepts null.
 *
 * # Safety
 * `chain` must be null or a pointer returned by `mag_chain_new`.
 */
void mag_chain_free(struct MagChain *chain);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `chain` must be null or a valid handle.
 */
size_t mag_chain_dim(const struct MagChain *chain);

/**
 * Copies the stationary distribution into `out` (length `n`).
 *
 * # Safety
 * `chain` must be a valid handle and `out` writable for `n` doubles.
 */
enum MagStatus mag_chain_stationary(const struct MagChain *chain, double *out);

/**
 * Builds a partition from `n` 1-based class labels (canonicalized).
 *
 * # Safety
 * `labels` must point to `n` readable values and `out` to a writable slot.
 */
enum MagStatus mag_partition_new(const size_t *labels, size_t n, struct MagPartition **out);

/**
 * Releases a partition handle; accepts null.
 *
 * # Safety
 * `partition` must be null or a pointer returned by this library.
 */
void mag_partition_free(struct MagPartition *partition);

/**
 * Number of classes, or 0 for a null handle.
 *
 * # Safety
 * `partition` must be null or a valid handle.
 */
size_t mag_partition_num_classes(const struct MagPartition *partition);

/**
 * Copies the canonical 1-based labels into `out` (length `n`).
 *
 * # Safety
 * `partition` must be a valid handle and `out` writable for `n` values.
 */
enum MagStatus mag_partition_labels(const struct MagPartition *partition, size_t *out);

/**
 * Evaluates all divergence bounds and information losses for a partition.
 *
 * # Safety
 * Handles must be valid and `out` must be writable.
 */
enum MagStatus mag_evaluate(const struct MagChain *chain,
                            const struct MagPartition *partition,
                            double tol,
                            struct MagMetrics *out);

/**
 * Writes a lifted `n x n` kernel into `out` (row-major). `use_p_lift`
 * selects the transition-profile lifting; otherwise the stationary lifting.
 *
 * # Safety
 * Handles must be valid and `out` writable for `n * n` doubles.
 */
enum MagStatus mag_lift(const struct MagChain *chain,
                        const struct MagPartition *partition,
                        uint8_t use_p_lift,
                        double *out);

/**
 * Strong lumpability check; writes 0/1 to `lumpable` and the largest
 * within-class row deviation to `max_violation`.
 *
 * # Safety
 * Handles must be valid; output pointers must be writable.
 */
enum MagStatus mag_lumpability_check(const struct MagChain *chain,
                                     const struct MagPartition *partition,
                                     double tol,
                                     uint8_t *lumpable,
                                     double *max_violation);

/**
 * Greedy agglomerative search down to `m` classes. An optional fixed class
 * is given as 0-based state indices (`fixed` may be null when empty).
 *
 * # Safety
 * `chain` must be valid; `fixed` must point to `fixed_len` readable values
 * when non-null; `out` must be a writable slot.
 */
enum MagStatus mag_search_greedy(const struct MagChain *chain,
                                 size_t m,
                                 const size_t *fixed,
                                 size_t fixed_len,
                                 struct MagPartition **out);

/**
 * Exhaustive search over all canonical `m`-class partitions, minimizing the
 * transition-profile bound (`criterion` = 0) or the relevant information
 * loss (`criterion` = 1). Writes the achieved value to `value`.
 *
 * # Safety
 * `chain` must be valid; `out` and `value` must be writable.
 */
enum MagStatus mag_search_exhaustive(const struct MagChain *chain,
                                     size_t m,
                                     uint32_t criterion,
                                     struct MagPartition **out,
                                     double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MARKOV_AGG_H */
