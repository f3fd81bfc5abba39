#ifndef GRKHS_H
#define GRKHS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum GrkhsStatus {
  GRKHS_STATUS_OK = 0,
  GRKHS_STATUS_NULL_POINTER = 1,
  GRKHS_STATUS_INVALID_ARGUMENT = 2,
  GRKHS_STATUS_IO = 3,
  GRKHS_STATUS_SCHEMA = 4,
  GRKHS_STATUS_UNKNOWN_IDENTIFIER = 5,
  GRKHS_STATUS_NOT_POSITIVE_DEFINITE = 6,
  GRKHS_STATUS_NOT_INVARIANT = 7,
  GRKHS_STATUS_BUFFER_TOO_SMALL = 8,
  GRKHS_STATUS_NUMERICAL = 9,
  GRKHS_STATUS_PANIC = 10,
} GrkhsStatus;

typedef struct GrkhsKernel GrkhsKernel;

typedef struct GrkhsProject GrkhsProject;

typedef struct GrkhsRkhs GrkhsRkhs;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *grkhs_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *grkhs_last_error_message(void);

/**
 * Loads a project file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GrkhsStatus grkhs_project_load(const char *path, struct GrkhsProject **out);

/**
 * Parses a project from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum GrkhsStatus grkhs_project_from_json(const char *json, struct GrkhsProject **out);

/**
 * Writes the project in canonical form.
 *
 * # Safety
 * `project` must be a live handle and `path` a NUL-terminated string.
 */
enum GrkhsStatus grkhs_project_save(const struct GrkhsProject *project, const char *path);

/**
 * # Safety
 * `project` must be NULL or a handle from this library not yet freed.
 */
void grkhs_project_free(struct GrkhsProject *project);

/**
 * Number of stored kernels.
 *
 * # Safety
 * `project` must be a live handle and `out` writable.
 */
enum GrkhsStatus grkhs_project_kernel_count(const struct GrkhsProject *project, uintptr_t *out);

/**
 * Copies the id of kernel `index` into `buf` including the trailing NUL;
 * `needed` receives the required size either way.
 *
 * # Safety
 * `project` must be a live handle, `buf` writable for `cap` bytes (may be
 * NULL when `cap` is 0) and `needed` writable or NULL.
 */
enum GrkhsStatus grkhs_project_kernel_id(const struct GrkhsProject *project,
                                         uintptr_t index,
                                         char *buf,
                                         uintptr_t cap,
                                         uintptr_t *needed);

/**
 * Copies a stored kernel into a new handle.
 *
 * # Safety
 * `project` must be a live handle, `id` a NUL-terminated string and `out`
 * writable.
 */
enum GrkhsStatus grkhs_project_kernel(const struct GrkhsProject *project,
                                      const char *id,
                                      struct GrkhsKernel **out);

/**
 * Kernel of the stored representation `rep` and vector field `field`.
 *
 * # Safety
 * `project` must be a live handle, `rep` and `field` NUL-terminated strings
 * and `out` writable.
 */
enum GrkhsStatus grkhs_project_build_kernel(const struct GrkhsProject *project,
                                            const char *rep,
                                            const char *field,
                                            struct GrkhsKernel **out);

/**
 * Kernel of the two-point pair groupoid with `U(α) = λ` and field `(v₊, v₋)`.
 * Arrows are ordered `(+,+), (+,-), (-,+), (-,-)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GrkhsStatus grkhs_kernel_demo_qubit(double lambda_re,
                                         double lambda_im,
                                         double v_plus_re,
                                         double v_plus_im,
                                         double v_minus_re,
                                         double v_minus_im,
                                         struct GrkhsKernel **out);

/**
 * # Safety
 * `kernel` must be NULL or a handle from this library not yet freed.
 */
void grkhs_kernel_free(struct GrkhsKernel *kernel);

/**
 * Number of arrows, i.e. the matrix order.
 *
 * # Safety
 * `kernel` must be a live handle and `out` writable.
 */
enum GrkhsStatus grkhs_kernel_size(const struct GrkhsKernel *kernel, uintptr_t *out);

/**
 * Label of arrow `index`, copied as in [`grkhs_project_kernel_id`].
 *
 * # Safety
 * As for [`grkhs_project_kernel_id`].
 */
enum GrkhsStatus grkhs_kernel_label(const struct GrkhsKernel *kernel,
                                    uintptr_t index,
                                    char *buf,
                                    uintptr_t cap,
                                    uintptr_t *needed);

/**
 * Writes the `n × n` kernel values, row-major, as `2 n²` doubles.
 *
 * # Safety
 * `kernel` must be a live handle and `values` writable for `len` doubles.
 */
enum GrkhsStatus grkhs_kernel_values(const struct GrkhsKernel *kernel,
                                     double *values,
                                     uintptr_t len);

/**
 * Spectral positive-semidefiniteness test with relative tolerance `tol`.
 *
 * # Safety
 * `kernel` must be a live handle; `passed` and `min_eigenvalue` writable or NULL.
 */
enum GrkhsStatus grkhs_kernel_check_psd(const struct GrkhsKernel *kernel,
                                        double tol,
                                        bool *passed,
                                        double *min_eigenvalue);

/**
 * Translation-invariance test on range fibers.
 *
 * # Safety
 * `kernel` must be a live handle; `passed` and `max_deviation` writable or NULL.
 */
enum GrkhsStatus grkhs_kernel_check_invariance(const struct GrkhsKernel *kernel,
                                               double tol,
                                               bool *passed,
                                               double *max_deviation);

/**
 * Reconstructs a representation from the kernel and compares the rebuilt kernel.
 *
 * # Safety
 * `kernel` must be a live handle; `passed` and `max_deviation` writable or NULL.
 */
enum GrkhsStatus grkhs_kernel_round_trip(const struct GrkhsKernel *kernel,
                                         double tol,
                                         bool *passed,
                                         double *max_deviation);

/**
 * Kernel distances between all arrows, `n²` doubles row-major.
 *
 * # Safety
 * `kernel` must be a live handle and `out` writable for `len` doubles.
 */
enum GrkhsStatus grkhs_kernel_distance_matrix(const struct GrkhsKernel *kernel,
                                              double *out,
                                              uintptr_t len);

/**
 * Closed tour through all arrows. `exact` enumerates (limited to 10
 * arrows); otherwise nearest neighbour and 2-opt with `restarts` seeded
 * random starts. `order` receives `n` arrow indices.
 *
 * # Safety
 * `kernel` must be a live handle, `order` writable for `len` elements and
 * `length` writable or NULL.
 */
enum GrkhsStatus grkhs_kernel_tsp(const struct GrkhsKernel *kernel,
                                  bool exact,
                                  uintptr_t restarts,
                                  uint64_t seed,
                                  uintptr_t *order,
                                  uintptr_t len,
                                  double *length);

/**
 * Builds the reproducing kernel Hilbert space; fails on indefinite kernels.
 *
 * # Safety
 * `kernel` must be a live handle and `out` writable.
 */
enum GrkhsStatus grkhs_rkhs_build(const struct GrkhsKernel *kernel,
                                  double rank_tol,
                                  struct GrkhsRkhs **out);

/**
 * # Safety
 * `rkhs` must be NULL or a handle from this library not yet freed.
 */
void grkhs_rkhs_free(struct GrkhsRkhs *rkhs);

/**
 * # Safety
 * `rkhs` must be a live handle and `out` writable.
 */
enum GrkhsStatus grkhs_rkhs_rank(const struct GrkhsRkhs *rkhs, uintptr_t *out);

/**
 * Rank of each base point's fiber, in base-point order; `count` receives
 * the number of base points.
 *
 * # Safety
 * `rkhs` must be a live handle, `out` writable for `len` elements and
 * `count` writable or NULL.
 */
enum GrkhsStatus grkhs_rkhs_fiber_ranks(const struct GrkhsRkhs *rkhs,
                                        uintptr_t *out,
                                        uintptr_t len,
                                        uintptr_t *count);

/**
 * Checks that the computed orthonormal basis reproduces the kernel.
 *
 * # Safety
 * `rkhs` must be a live handle; `passed` and `max_deviation` writable or NULL.
 */
enum GrkhsStatus grkhs_rkhs_parseval_check(const struct GrkhsRkhs *rkhs,
                                           double tol,
                                           bool *passed,
                                           double *max_deviation);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRKHS_H */
