#ifndef QLSC_H
#define QLSC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QlscStatus {
  QLSC_STATUS_OK = 0,
  QLSC_STATUS_NULL_POINTER = 1,
  QLSC_STATUS_INVALID_ARGUMENT = 2,
  QLSC_STATUS_DIMENSION_MISMATCH = 3,
  QLSC_STATUS_CAP_EXCEEDED = 4,
  QLSC_STATUS_IO = 5,
  QLSC_STATUS_FORMAT = 6,
  QLSC_STATUS_NUMERICAL = 7,
  QLSC_STATUS_PANIC = 8,
} QlscStatus;

typedef enum QlscOutcome {
  QLSC_OUTCOME_YES = 0,
  QLSC_OUTCOME_NO = 1,
  QLSC_OUTCOME_INCONCLUSIVE = 2,
} QlscOutcome;

// Values accepted by the `layout` arguments.
typedef enum QlscLayout {
  QLSC_LAYOUT_BRICKWORK = 0,
  QLSC_LAYOUT_STAIRCASE = 1,
} QlscLayout;

// Values accepted by the `channel` arguments.
typedef enum QlscChannel {
  QLSC_CHANNEL_IDENTITY = 0,
  QLSC_CHANNEL_LOCAL_DEPOLARIZING = 1,
  QLSC_CHANNEL_GLOBAL_DEPOLARIZING = 2,
  QLSC_CHANNEL_BIT_FLIP = 3,
} QlscChannel;

// A density matrix.
typedef struct QlscState QlscState;

// The result of a complexity search, with its JSON rendering.
typedef struct QlscVerdict QlscVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *qlsc_version(void);

// Message of the last failed call on this thread, or an empty string.
// Valid until the next call into the library from the same thread.
const char *qlsc_last_error_message(void);

// Samples circuit coefficients from `seed` and prepares the noisy state of an
// `n`-qubit circuit with `depth` layers, applying `channel` after every layer.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum QlscStatus qlsc_state_prepare(size_t n,
                                   uint32_t layout,
                                   size_t depth,
                                   uint32_t channel,
                                   double strength,
                                   uint64_t seed,
                                   struct QlscState **out);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum QlscStatus qlsc_state_maximally_mixed(size_t n, struct QlscState **out);

// Builds a state from row-major real and imaginary parts of a `2^n × 2^n` matrix.
//
// # Safety
// `re` and `im` must each point to `4^n` readable doubles; `out` as for [`qlsc_state_prepare`].
enum QlscStatus qlsc_state_from_density(size_t n,
                                        const double *re,
                                        const double *im,
                                        struct QlscState **out);

// Reads a QSTATE1 file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` as for [`qlsc_state_prepare`].
enum QlscStatus qlsc_state_read(const char *path, struct QlscState **out);

// Writes a QSTATE1 file.
//
// # Safety
// `state` must be a live handle and `path` a NUL-terminated string.
enum QlscStatus qlsc_state_write(const struct QlscState *state, const char *path);

// # Safety
// `state` must be null or a handle not yet freed.
void qlsc_state_free(struct QlscState *state);

// # Safety
// `state` must be a live handle and `out` writable.
enum QlscStatus qlsc_state_num_qubits(const struct QlscState *state, size_t *out);

// `Tr ρ²`.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum QlscStatus qlsc_state_purity(const struct QlscState *state, double *out);

// Von Neumann entropy in nats from the spectrum.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum QlscStatus qlsc_state_entropy_exact(const struct QlscState *state, double *out);

// Lower bound on the purity after `depth` noisy layers on `n` qubits.
//
// # Safety
// `out` must be writable.
enum QlscStatus qlsc_purity_lower_bound(uint32_t channel,
                                        double strength,
                                        size_t n,
                                        uint32_t depth,
                                        double *out);

// Polynomial entropy estimate from trace powers. `sampled` selects finite-shot estimation
// with `shots` shots per power; otherwise exact expectations are used and `shots` is ignored.
//
// # Safety
// `state` must be a live handle; `value` and `stderr` writable.
enum QlscStatus qlsc_entropy_estimate(const struct QlscState *state,
                                      double eta,
                                      double eps,
                                      bool sampled,
                                      size_t shots,
                                      uint64_t seed,
                                      double *value,
                                      double *stderr);

// Runs the depth search against `state`.
//
// `config_json` is null (defaults) or a JSON object with any subset of the search
// configuration fields. With `measurement_only` the search sees the state only through
// measurement snapshots, which requires `"bmaxs": {"estimator": {"mode": "shadow"}}`.
//
// # Safety
// `state` must be a live handle, `config_json` null or NUL-terminated, `out` writable.
enum QlscStatus qlsc_scp_run(const struct QlscState *state,
                             const char *config_json,
                             uint64_t seed,
                             bool measurement_only,
                             struct QlscVerdict **out);

// # Safety
// `verdict` must be a live handle and `out` writable.
enum QlscStatus qlsc_verdict_outcome(const struct QlscVerdict *verdict, enum QlscOutcome *out);

// Smallest accepting depth, or 0 when the outcome is not YES.
//
// # Safety
// `verdict` must be a live handle and `out` writable.
enum QlscStatus qlsc_verdict_r_min(const struct QlscVerdict *verdict, size_t *out);

// JSON rendering of the verdict, owned by the handle. Null if `verdict` is null.
//
// # Safety
// `verdict` must be null or a live handle.
const char *qlsc_verdict_json(const struct QlscVerdict *verdict);

// # Safety
// `verdict` must be null or a handle not yet freed.
void qlsc_verdict_free(struct QlscVerdict *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QLSC_H */
