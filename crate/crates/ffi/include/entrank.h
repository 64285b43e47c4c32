#ifndef ENTRANK_H
#define ENTRANK_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result of every call.
 */
typedef enum ErStatus {
  ER_STATUS_OK = 0,
  ER_STATUS_NULL_POINTER = 1,
  ER_STATUS_INPUT_ERROR = 2,
  ER_STATUS_LIMIT_EXCEEDED = 3,
  ER_STATUS_INTERNAL = 4,
  ER_STATUS_PANIC = 5,
} ErStatus;

typedef enum ErVerdict {
  ER_VERDICT_ENTANGLED = 0,
  ER_VERDICT_INCONCLUSIVE = 1,
  ER_VERDICT_SEPARABLE_PURE_PRODUCT = 2,
} ErVerdict;

/*
 Opaque factorization handle.
 */
typedef struct ErFactorization ErFactorization;

/*
 Opaque state handle.
 */
typedef struct ErState ErState;

/*
 Rank tolerance; a singular value counts when it exceeds max(atol, rtol·σmax).
 */
typedef struct ErTolerance {
  double rtol;
  double atol;
} ErTolerance;

/*
 Summary of a rank-lattice analysis.
 */
typedef struct ErAnalysis {
  enum ErVerdict verdict;
  size_t state_rank;
  size_t depth;
  size_t num_violations;
} ErAnalysis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *er_last_error(void);

struct ErTolerance er_tolerance_default(void);

/*
 Loads a JSON state file.

 # Safety
 `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ErStatus er_state_load(const char *path, struct ErState **out);

/*
 Pure state from `len` amplitudes (split into real and imaginary arrays)
 over `num_dims` local dimensions; the norm must be 1 within 1e-9.

 # Safety
 `dims` must hold `num_dims` values, `re` and `im` must hold `len` values
 each, and `out` must be writable.
 */
enum ErStatus er_state_from_amplitudes(const size_t *dims,
                                       size_t num_dims,
                                       const double *re,
                                       const double *im,
                                       size_t len,
                                       struct ErState **out);

/*
 Density matrix from a row-major D×D matrix, D the product of `dims`.

 # Safety
 `dims` must hold `num_dims` values, `re` and `im` must hold `len` values
 each, and `out` must be writable.
 */
enum ErStatus er_state_from_density(const size_t *dims,
                                    size_t num_dims,
                                    const double *re,
                                    const double *im,
                                    size_t len,
                                    struct ErState **out);

/*
 GHZ state of `n` particles of dimension `d`.

 # Safety
 `out` must be writable.
 */
enum ErStatus er_state_ghz(size_t n, size_t d, struct ErState **out);

/*
 The six-qubit state (|000000⟩ + |000111⟩ + |011000⟩ + |011111⟩)/2.

 # Safety
 `out` must be writable.
 */
enum ErStatus er_state_six_qubit_example(struct ErState **out);

/*
 Two-qubit Werner state p|Φ⁺⟩⟨Φ⁺| + (1 − p) I/4.

 # Safety
 `out` must be writable.
 */
enum ErStatus er_state_werner(double p, struct ErState **out);

/*
 Releases a state; null is ignored.

 # Safety
 `state` must come from this library and not be used afterwards.
 */
void er_state_free(struct ErState *state);

/*
 # Safety
 `state` must be a live handle and `out` writable.
 */
enum ErStatus er_state_num_particles(const struct ErState *state, size_t *out);

/*
 Rank lattice up to `depth` (0 selects ⌊N/2⌋) and the resulting verdict.

 # Safety
 `state` must be a live handle and `out` writable.
 */
enum ErStatus er_analyze(const struct ErState *state,
                         size_t depth,
                         struct ErTolerance tol,
                         struct ErAnalysis *out);

/*
 Rank of the reduced matrix on the `len` 1-based particles in `keep`.

 # Safety
 `state` must be a live handle, `keep` must hold `len` values and `out`
 must be writable.
 */
enum ErStatus er_reduced_rank(const struct ErState *state,
                              const size_t *keep,
                              size_t len,
                              struct ErTolerance tol,
                              size_t *out);

/*
 Smallest eigenvalue of the partial transpose on the 1-based particles in `part`.

 # Safety
 `state` must be a live handle, `part` must hold `len` values and `out`
 must be writable.
 */
enum ErStatus er_ppt_min_eigenvalue(const struct ErState *state,
                                    const size_t *part,
                                    size_t len,
                                    double *out);

/*
 Pairwise rank checks for a partition expression such as `"1,2|3"`.

 # Safety
 `state` must be a live handle, `expr` NUL-terminated and `out` writable.
 */
enum ErStatus er_check_partition(const struct ErState *state,
                                 const char *expr,
                                 struct ErTolerance tol,
                                 enum ErVerdict *out);

/*
 Finest tensor-product partition of a pure (or rank-1) state.

 # Safety
 `state` must be a live handle and `out` writable.
 */
enum ErStatus er_factorize(const struct ErState *state,
                           struct ErTolerance tol,
                           struct ErFactorization **out);

/*
 # Safety
 `f` must be a live handle and `out` writable.
 */
enum ErStatus er_factorization_num_parts(const struct ErFactorization *f, size_t *out);

/*
 Copies part `index` (0-based) as 1-based particle indices into `buf`.

 `out_len` receives the part size; when `cap` is too small nothing is
 copied and the call fails with `ER_STATUS_INPUT_ERROR`.

 # Safety
 `f` must be a live handle, `buf` must hold `cap` values and `out_len`
 must be writable.
 */
enum ErStatus er_factorization_part(const struct ErFactorization *f,
                                    size_t index,
                                    size_t *buf,
                                    size_t cap,
                                    size_t *out_len);

/*
 Reconstruction residual of the factorization.

 # Safety
 `f` must be a live handle and `out` writable.
 */
enum ErStatus er_factorization_residual(const struct ErFactorization *f, double *out);

/*
 Whether part `index` has more than one particle and is fully entangled.

 # Safety
 `f` must be a live handle and `out` writable.
 */
enum ErStatus er_factorization_part_fully_entangled(const struct ErFactorization *f,
                                                    size_t index,
                                                    bool *out);

/*
 Releases a factorization; null is ignored.

 # Safety
 `f` must come from this library and not be used afterwards.
 */
void er_factorization_free(struct ErFactorization *f);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTRANK_H */
