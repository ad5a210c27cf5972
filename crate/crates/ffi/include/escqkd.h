/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef ESCQKD_H
#define ESCQKD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define ESCQKD_PROTOCOL_TRINE 0

#define ESCQKD_PROTOCOL_BB84 1

#define ESCQKD_ATTACK_INTERCEPT_RESEND 0

#define ESCQKD_ATTACK_CLONE 1

#define ESCQKD_BOUND_LOWER 0

#define ESCQKD_BOUND_UPPER 1

typedef enum EscqkdStatus {
  ESCQKD_STATUS_OK = 0,
  ESCQKD_STATUS_NULL_POINTER = 1,
  ESCQKD_STATUS_INVALID_ARGUMENT = 2,
  // A physical validity check failed (normalization, tightness, unitarity).
  ESCQKD_STATUS_CHECK_FAILED = 3,
  ESCQKD_STATUS_NO_ZERO_CROSSING = 4,
  ESCQKD_STATUS_BOUND_NOT_POSITIVE = 5,
  ESCQKD_STATUS_PANIC = 6,
} EscqkdStatus;

// Opaque cloning unitary handle.
typedef struct EscqkdCloner EscqkdCloner;

// Opaque frame handle.
typedef struct EscqkdFrame EscqkdFrame;

// Opaque joint distribution p(a, b, e) handle.
typedef struct EscqkdJoint EscqkdJoint;

typedef struct EscqkdRateBounds {
  double i_ab;
  double i_ae;
  double i_be;
  double i_ab_given_e;
  double lower;
  double upper;
} EscqkdRateBounds;

typedef struct EscqkdAnnealConfig {
  uint64_t seed;
  size_t steps;
  size_t restarts;
  double temp_initial;
  double cooling;
  double step_scale;
  double penalty_weight;
} EscqkdAnnealConfig;

typedef struct EscqkdThreshold {
  double q;
  double error_rate;
} EscqkdThreshold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Null-terminated library version. Static storage.
const char *escqkd_version(void);

// Message for the last non-OK status on this thread, or null if none.
// Valid until the next failing call on the same thread.
const char *escqkd_last_error(void);

// Builds `trine`, `bb84` or `simplex:<d>`.
//
// # Safety
// `name` must be a valid null-terminated string; `out` must be writable.
enum EscqkdStatus escqkd_frame_named(const char *name, struct EscqkdFrame **out);

// Builds a frame of `count` states in dimension `dim` from row-major
// amplitude arrays `re` and `im`, each of length `count * dim`. States must
// be normalized.
//
// # Safety
// `re` and `im` must point to `count * dim` readable doubles; `out` must be
// writable.
enum EscqkdStatus escqkd_frame_new(size_t dim,
                                   size_t count,
                                   const double *re,
                                   const double *im,
                                   struct EscqkdFrame **out);

// # Safety
// `frame` must be null or a handle from this library not yet freed.
void escqkd_frame_free(struct EscqkdFrame *frame);

// # Safety
// `frame` must be a live handle; `len` and `dim` must be writable.
enum EscqkdStatus escqkd_frame_shape(const struct EscqkdFrame *frame, size_t *len, size_t *dim);

// Frame potential V_t (sum over all ordered pairs, diagonal included).
//
// # Safety
// `frame` must be a live handle; `out` must be writable.
enum EscqkdStatus escqkd_frame_potential(const struct EscqkdFrame *frame, uint32_t t, double *out);

// Joint distribution of a protocol under an attack at interception
// fraction `q`. For the cloning attack `cloner` selects the unitary; null
// uses the protocol's reference cloner. `cloner` is ignored for
// intercept-resend.
//
// # Safety
// `cloner` must be null or a live handle; `out` must be writable.
enum EscqkdStatus escqkd_joint_attack(uint32_t protocol_code,
                                      uint32_t attack_code,
                                      double q,
                                      const struct EscqkdCloner *cloner,
                                      struct EscqkdJoint **out);

// Joint distribution from `na * nb * ne` probabilities indexed
// `(a * nb + b) * ne + e`.
//
// # Safety
// `probs` must point to `na * nb * ne` readable doubles; `out` must be
// writable.
enum EscqkdStatus escqkd_joint_new(size_t na,
                                   size_t nb,
                                   size_t ne,
                                   const double *probs,
                                   struct EscqkdJoint **out);

// # Safety
// `joint` must be null or a handle from this library not yet freed.
void escqkd_joint_free(struct EscqkdJoint *joint);

// Alphabet sizes of Alice, Bob and Eve.
//
// # Safety
// `joint` must be a live handle; `sizes` must point to 3 writable values.
enum EscqkdStatus escqkd_joint_sizes(const struct EscqkdJoint *joint, size_t *sizes);

// # Safety
// `joint` must be a live handle; `out` must be writable.
enum EscqkdStatus escqkd_joint_prob(const struct EscqkdJoint *joint,
                                    size_t a,
                                    size_t b,
                                    size_t e,
                                    double *out);

// # Safety
// `joint` must be a live handle; `out` must be writable.
enum EscqkdStatus escqkd_joint_bounds(const struct EscqkdJoint *joint,
                                      struct EscqkdRateBounds *out);

// Probability that Bob's outcome excludes Alice's signal.
//
// # Safety
// `joint` must be a live handle; `out` must be writable.
enum EscqkdStatus escqkd_joint_error_rate(const struct EscqkdJoint *joint,
                                          uint32_t protocol_code,
                                          double *out);

// # Safety
// `out` must be writable.
enum EscqkdStatus escqkd_anneal_config_default(struct EscqkdAnnealConfig *out);

// The protocol's reference cloning unitary.
//
// # Safety
// `out` must be writable.
enum EscqkdStatus escqkd_cloner_reference(uint32_t protocol_code, struct EscqkdCloner **out);

// Optimizes a symmetric cloner for the protocol's signal states. `config`
// may be null for defaults; `fidelity` and `penalty` may be null.
//
// # Safety
// Non-null pointers must be valid; `out` must be writable.
enum EscqkdStatus escqkd_cloner_optimize(uint32_t protocol_code,
                                         const struct EscqkdAnnealConfig *config,
                                         struct EscqkdCloner **out,
                                         double *fidelity,
                                         double *penalty);

// # Safety
// `cloner` must be null or a handle from this library not yet freed.
void escqkd_cloner_free(struct EscqkdCloner *cloner);

// Matrix dimension of the unitary (4 for qubit signal and probe).
//
// # Safety
// `cloner` must be a live handle; `out` must be writable.
enum EscqkdStatus escqkd_cloner_dim(const struct EscqkdCloner *cloner, size_t *out);

// # Safety
// `cloner` must be a live handle; `re` and `im` must be writable.
enum EscqkdStatus escqkd_cloner_entry(const struct EscqkdCloner *cloner,
                                      size_t row,
                                      size_t col,
                                      double *re,
                                      double *im);

// Average clone fidelity of the unitary on the protocol's signal states.
//
// # Safety
// `cloner` must be a live handle; `out` must be writable.
enum EscqkdStatus escqkd_cloner_fidelity(const struct EscqkdCloner *cloner,
                                         uint32_t protocol_code,
                                         double *out);

// Largest error rate at which the chosen bound is still positive. `cloner`
// is used only for the cloning attack (null means the reference cloner).
// Returns `ESCQKD_STATUS_NO_ZERO_CROSSING` when the bound stays positive.
//
// # Safety
// `cloner` must be null or a live handle; `out` must be writable.
enum EscqkdStatus escqkd_tolerable_error(uint32_t protocol_code,
                                         uint32_t attack_code,
                                         uint32_t bound_code,
                                         const struct EscqkdCloner *cloner,
                                         struct EscqkdThreshold *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ESCQKD_H */
