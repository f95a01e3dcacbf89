#ifndef QALPHA_H
#define QALPHA_H

/* Generated by cbindgen; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define QA_OK 0

#define QA_ERR_NULL 1

#define QA_ERR_INVALID 2

#define QA_ERR_NUMERICAL 3

#define QA_ERR_IO 4

#define QA_ERR_FORMAT 5

#define QA_ERR_PANIC 6

/**
 * Opaque real scalar field on a periodic grid.
 */
typedef struct QaField QaField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into the library from the same thread.
 */
const char *qa_last_error(void);

/**
 * Builds a field from `len = N^n` row-major real samples.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
int32_t qa_field_from_values(size_t n,
                             size_t size,
                             double length,
                             const double *values,
                             size_t len,
                             struct QaField **out);

/**
 * Seeded band-limited random field with unit sup norm.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t qa_field_band_limited(size_t n,
                              size_t size,
                              double length,
                              size_t kmax,
                              uint64_t seed,
                              struct QaField **out);

/**
 * Loads field number `component` of a QAFLD1 file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
int32_t qa_field_load(const char *path, size_t component, struct QaField **out);

/**
 * Writes one field as a QAFLD1 file.
 *
 * # Safety
 * `field` must be a live handle and `path` a NUL-terminated string.
 */
int32_t qa_field_save(const struct QaField *field, const char *path);

/**
 * Grid parameters of a field.
 *
 * # Safety
 * `field` must be a live handle; the output pointers must be writable.
 */
int32_t qa_field_grid(const struct QaField *field, size_t *n, size_t *size, double *length);

/**
 * Copies the real parts of the samples into `buf`, which holds `len` doubles.
 *
 * # Safety
 * `field` must be a live handle; `buf` must have room for `len` doubles.
 */
int32_t qa_field_values(const struct QaField *field, double *buf, size_t len);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `field` must come from this library and must not be used afterwards.
 */
void qa_field_free(struct QaField *field);

/**
 * Evaluates a functional by name with the default window family.
 *
 * `kind` is one of qalpha, bmo, morrey, qinv, bmo-inverse,
 * poisson-derivative, heat-gradient, morrey-poisson, psi0, sobolev,
 * sobolev-real. A non-positive or infinite `horizon` means no horizon.
 *
 * # Safety
 * `field` must be a live handle, `kind` a NUL-terminated string and `out`
 * writable.
 */
int32_t qa_norm(const struct QaField *field,
                const char *kind,
                double alpha,
                double horizon,
                double *out);

/**
 * The sharp constant of the Q_alpha to Sobolev embedding.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t qa_sharp_constant(size_t n, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QALPHA_H */
