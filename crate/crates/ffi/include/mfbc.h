#ifndef MFBC_H
#define MFBC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MfbcStatus {
  MFBC_STATUS_OK = 0,
  MFBC_STATUS_NULL_POINTER = 1,
  MFBC_STATUS_INVALID_ARGUMENT = 2,
  MFBC_STATUS_INVALID_GRAPH = 3,
  MFBC_STATUS_COMPUTATION_FAILED = 4,
  MFBC_STATUS_BUFFER_TOO_SMALL = 5,
  MFBC_STATUS_PANIC = 6,
} MfbcStatus;

typedef enum MfbcOperand {
  MFBC_OPERAND_A = 0,
  MFBC_OPERAND_B = 1,
  MFBC_OPERAND_C = 2,
} MfbcOperand;

typedef enum MfbcPairing {
  MFBC_PAIRING_AB = 0,
  MFBC_PAIRING_AC = 1,
  MFBC_PAIRING_BC = 2,
} MfbcPairing;

// Opaque graph handle.
typedef struct MfbcGraph MfbcGraph;

typedef struct MfbcCost {
  double messages;
  double words;
  double seconds;
} MfbcCost;

// Chosen grid and variant. `dimensions` is 1, 2 or 3; `outer` is
// meaningful for 1 and 3, `pairing` for 2 and 3.
typedef struct MfbcGridChoice {
  size_t p1;
  size_t p2;
  size_t p3;
  uint32_t dimensions;
  enum MfbcOperand outer;
  enum MfbcPairing pairing;
  struct MfbcCost cost;
} MfbcGridChoice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The
// pointer stays valid until the next library call on this thread.
const char *mfbc_last_error_message(void);

// Builds a graph on `n` vertices from `m` edges `(u[i], v[i])`.
// `weights` may be null for an unweighted graph. Self-loops and repeated
// edges are dropped. Release the handle with [`mfbc_graph_free`].
//
// # Safety
// `u` and `v` (and `weights` when non-null) must point to `m` readable
// elements; `out` must be writable.
enum MfbcStatus mfbc_graph_new(size_t n,
                               bool directed,
                               const size_t *u,
                               const size_t *v,
                               const double *weights,
                               size_t m,
                               struct MfbcGraph **out);

// Releases a handle from [`mfbc_graph_new`]. Null is ignored.
//
// # Safety
// `graph` must be null or a live handle not freed before.
void mfbc_graph_free(struct MfbcGraph *graph);

// # Safety
// `graph` must be null or a live handle.
size_t mfbc_graph_vertex_count(const struct MfbcGraph *graph);

// Number of stored edges after self-loops and repeats were dropped.
//
// # Safety
// `graph` must be null or a live handle.
size_t mfbc_graph_edge_count(const struct MfbcGraph *graph);

// Betweenness of every vertex, written to `scores[0..n]`. `batch_size`
// of 0 processes all sources in one batch.
//
// # Safety
// `graph` must be a live handle and `scores` must have room for `len`
// values.
enum MfbcStatus mfbc_betweenness(const struct MfbcGraph *graph,
                                 size_t batch_size,
                                 double *scores,
                                 size_t len);

// Betweenness from the queue-based reference implementation.
//
// # Safety
// Same as [`mfbc_betweenness`].
enum MfbcStatus mfbc_betweenness_reference(const struct MfbcGraph *graph,
                                           double *scores,
                                           size_t len);

// Communication bound of batched betweenness on `p` processors with
// replication `c` for a graph with `n` vertices, `m` edges and diameter
// `d`.
//
// # Safety
// `out` must be writable.
enum MfbcStatus mfbc_cost_bound(double n,
                                double m,
                                size_t p,
                                double c,
                                double d,
                                double alpha,
                                double beta,
                                struct MfbcCost *out);

// Cheapest grid and multiply variant for operands with the given nonzero
// counts on `p` processors.
//
// # Safety
// `out` must be writable.
enum MfbcStatus mfbc_optimize_grid(double nnz_a,
                                   double nnz_b,
                                   double nnz_c,
                                   size_t p,
                                   double alpha,
                                   double beta,
                                   struct MfbcGridChoice *out);

// Library version as a static NUL-terminated string.
const char *mfbc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MFBC_H */
