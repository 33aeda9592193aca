#ifndef SIMPLEX_GAUGE_H
#define SIMPLEX_GAUGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum SgStatus {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_POINTER = 1,
  SG_STATUS_INVALID_INPUT = 2,
  SG_STATUS_UNSUPPORTED = 3,
  SG_STATUS_SINGULAR = 4,
  SG_STATUS_AMBIGUOUS = 5,
  SG_STATUS_DIMENSION = 6,
  SG_STATUS_BUDGET = 7,
  SG_STATUS_NO_PATH = 8,
  SG_STATUS_CONFIG = 9,
  SG_STATUS_IO = 10,
  SG_STATUS_JSON = 11,
  SG_STATUS_CSV = 12,
  SG_STATUS_UTF8 = 13,
  SG_STATUS_PANIC = 14,
} SgStatus;

// Opaque semidiscrete principal bundle.
typedef struct SgBundle SgBundle;

// Opaque simplicial complex.
typedef struct SgComplex SgComplex;

// Opaque connection on a bundle.
typedef struct SgConnection SgConnection;

// Opaque structure group with its representation.
typedef struct SgGroup SgGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Valid until the next call.
const char *sg_last_error(void);

// Library version as a static string.
const char *sg_version(void);

// # Safety
// `s` must be NULL or a string returned by this library.
void sg_string_free(char *s);

// Complex from JSON `{"vertex_count": n, "maximal_simplices": [[..], ..]}`.
//
// # Safety
// `json_text` must be a valid C string; `out` a valid pointer.
enum SgStatus sg_complex_from_json(const char *json_text, struct SgComplex **out);

// Named fixture (`triangle`, `hollow_triangle`, `tetrahedron_boundary`,
// `torus7`, `two_triangles`, `circle`, `grid_torus`, `disc_fan`); `n` is
// the size for the parametrized ones and ignored otherwise.
//
// # Safety
// `name` must be a valid C string; `out` a valid pointer.
enum SgStatus sg_complex_fixture(const char *name, size_t n, struct SgComplex **out);

// # Safety
// `c` must be NULL or a handle from this library, not used afterwards.
void sg_complex_free(struct SgComplex *c);

// Number of k-simplices.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_complex_count(const struct SgComplex *c, size_t k, size_t *out);

// Complex serialized back to JSON.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_complex_to_json(const struct SgComplex *c, char **out);

// Betti number and torsion count of H_k with integer coefficients; the
// torsion coefficients themselves are available through
// [`sg_homology_json`].
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_homology(const struct SgComplex *c, size_t k, size_t *rank, size_t *torsion_count);

// H_k as JSON `{"k","rank","torsion"}`.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_homology_json(const struct SgComplex *c, size_t k, char **out);

// Group from JSON such as `{"kind":"so","n":3}` or `{"kind":"circle"}`.
//
// # Safety
// `json_text` must be a valid C string; `out` a valid pointer.
enum SgStatus sg_group_from_json(const char *json_text, struct SgGroup **out);

// # Safety
// `g` must be NULL or a handle from this library, not used afterwards.
void sg_group_free(struct SgGroup *g);

// Trivial bundle over a complex.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_bundle_trivial(const struct SgComplex *c,
                                const struct SgGroup *g,
                                struct SgBundle **out);

// Copy of `b` with the slots of a slots JSON document applied.
//
// # Safety
// Handles, strings and pointers must be valid.
enum SgStatus sg_bundle_with_slots_json(const struct SgBundle *b,
                                        const char *json_text,
                                        struct SgBundle **out);

// Random slot assignment over the given dimensions with uniform class
// choice from `classes[0..n_classes]`. `mode` 0 is free, 1 cocycle completion.
//
// # Safety
// Handles and arrays must be valid for the given lengths.
enum SgStatus sg_bundle_assign_random(const struct SgBundle *b,
                                      const size_t *dims,
                                      size_t n_dims,
                                      double density,
                                      const int64_t *classes,
                                      size_t n_classes,
                                      uint32_t mode,
                                      uint64_t seed,
                                      struct SgBundle **out);

// Slots as JSON.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_bundle_slots_json(const struct SgBundle *b, char **out);

// Characteristic-class verdicts as JSON `[{"n","verdict"}, ..]`.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_bundle_classes_json(const struct SgBundle *b, char **out);

// # Safety
// `b` must be NULL or a handle from this library, not used afterwards.
void sg_bundle_free(struct SgBundle *b);

// Connection with identity values on every edge.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_connection_identity(const struct SgBundle *b, struct SgConnection **out);

// Connection with Haar-random edge values drawn from `seed`.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_connection_random(const struct SgBundle *b,
                                   uint64_t seed,
                                   struct SgConnection **out);

// Connection from JSON `{"charts":[{"chart","edges":[{"edge","value"}]}]}`.
//
// # Safety
// Handles, strings and pointers must be valid.
enum SgStatus sg_connection_from_json(const struct SgBundle *b,
                                      const char *json_text,
                                      struct SgConnection **out);

// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_connection_to_json(const struct SgConnection *c, char **out);

// Scalar curvature (trace of the triangle holonomy) at `base`.
//
// # Safety
// `tri` must point to three vertex ids; other pointers valid.
enum SgStatus sg_scalar_curvature(const struct SgConnection *c,
                                  const size_t *tri,
                                  size_t base,
                                  double *out);

// Curvature map CSV `triangle,base_vertex,scalar_curvature`.
//
// # Safety
// Handles and pointers must be valid.
enum SgStatus sg_curvature_csv(const struct SgConnection *c, char **out);

// # Safety
// `c` must be NULL or a handle from this library, not used afterwards.
void sg_connection_free(struct SgConnection *c);

// Run an experiment configuration; relative paths resolve against
// `base_dir` (NULL for the working directory). Writes the report JSON.
//
// # Safety
// Strings and pointers must be valid.
enum SgStatus sg_run_config(const char *config_json, const char *base_dir, char **report_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIMPLEX_GAUGE_H */
