#ifndef GAUGEFORMS_H
#define GAUGEFORMS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_ARGUMENT = 1,
  GF_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed config text or expression.
   */
  GF_STATUS_PARSE = 3,
  /**
   * Unknown name, bad dimension or grid, group not matching the dimension.
   */
  GF_STATUS_INVALID_ARGUMENT = 4,
  /**
   * A numerical stage failed (degenerate metric, no lift, ...).
   */
  GF_STATUS_COMPUTATION = 5,
  GF_STATUS_PANIC = 6,
} GfStatus;

typedef enum GfGroup {
  GF_GROUP_GL = 0,
  GF_GROUP_SL = 1,
  GF_GROUP_U = 2,
  GF_GROUP_SU = 3,
} GfGroup;

typedef enum GfMode {
  GF_MODE_PRINCIPAL = 0,
  GF_MODE_FULL = 1,
} GfMode;

typedef enum GfLattice {
  /**
   * Half-period for GL/U, strict for SL/SU.
   */
  GF_LATTICE_DEFAULT = 0,
  GF_LATTICE_STRICT = 1,
  GF_LATTICE_HALF_PERIOD = 2,
} GfLattice;

/**
 * A parsed config file. Opaque to C.
 */
typedef struct GfDocument GfDocument;

/**
 * Options for [`gf_compare`]. Non-positive tolerances and a zero sample count mean
 * the library defaults.
 */
typedef struct GfCompareOptions {
  enum GfGroup group;
  enum GfMode mode;
  enum GfLattice lattice;
  double tol_metric;
  double tol_conformal;
  double tol_potential;
  double tol_residual;
  uint32_t loop_samples;
} GfCompareOptions;

typedef struct GfComplex {
  double re;
  double im;
} GfComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *gf_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *gf_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gf_string_free(char *s);

/**
 * Parses config text into a document.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum GfStatus gf_document_parse(const char *text, struct GfDocument **out);

/**
 * Releases a document. Null is ignored.
 *
 * # Safety
 * `doc` must come from [`gf_document_parse`] and not have been freed.
 */
void gf_document_free(struct GfDocument *doc);

/**
 * Number of symbol blocks in a document.
 *
 * # Safety
 * `doc` must be a live document.
 */
size_t gf_document_symbol_count(const struct GfDocument *doc);

/**
 * Analysis report as JSON. `doc` may be null to use built-in symbols; `grid` 0 picks
 * the document's grid or the built-in default. `out_valid` may be null.
 *
 * # Safety
 * Pointers must be valid; `name` nul-terminated.
 */
enum GfStatus gf_analyze(const struct GfDocument *doc,
                         const char *name,
                         uint32_t grid,
                         bool *out_valid,
                         char **out_json);

/**
 * Default comparison options for a group.
 */
struct GfCompareOptions gf_compare_options_default(enum GfGroup group);

/**
 * Equivalence decision as JSON. `options` may be null for the U defaults;
 * `out_equivalent` may be null.
 *
 * # Safety
 * Pointers must be valid; names nul-terminated.
 */
enum GfStatus gf_compare(const struct GfDocument *doc,
                         const char *first,
                         const char *second,
                         uint32_t grid,
                         const struct GfCompareOptions *options,
                         bool *out_equivalent,
                         char **out_json);

/**
 * Frame transition and spin-lift data as JSON. `loop_samples` 0 means the default.
 *
 * # Safety
 * Pointers must be valid; names nul-terminated.
 */
enum GfStatus gf_lift(const struct GfDocument *doc,
                      const char *first,
                      const char *second,
                      uint32_t grid,
                      uint32_t loop_samples,
                      char **out_json);

/**
 * `Π(R)` for a 2x2 matrix `r` (row-major, 4 entries) into `out` (row-major `dim*dim`).
 * `dim` is 3 for the rotation part or 4 for the Lorentz action.
 *
 * # Safety
 * `r` must hold 4 values and `out` room for `dim*dim`.
 */
enum GfStatus gf_spin_hom(const struct GfComplex *r, uint32_t dim, double *out);

/**
 * An `SU(2)` matrix `R` (row-major into `out`) with `Π(R) = o` for a rotation `o`
 * (row-major, 9 entries). The sign of `R` is not fixed.
 *
 * # Safety
 * `o` must hold 9 values and `out` room for 4.
 */
enum GfStatus gf_lift_rotation(const double *o, struct GfComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUGEFORMS_H */
