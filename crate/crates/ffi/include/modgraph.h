#ifndef MODGRAPH_H
#define MODGRAPH_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes of every fallible call.
typedef enum MgStatus {
  MG_STATUS_OK = 0,
  // A required pointer argument was null.
  MG_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  MG_STATUS_INVALID_UTF8 = 2,
  // An argument was rejected (unknown name, unstable type, malformed input).
  MG_STATUS_INVALID_ARGUMENT = 3,
  // The computation failed; see `mg_last_error`.
  MG_STATUS_COMPUTATION_FAILED = 4,
  // An internal panic was caught at the boundary.
  MG_STATUS_PANIC = 5,
} MgStatus;

// A coefficient system.
typedef struct MgCoefficients MgCoefficients;

// A Feynman transform complex with lazily computed Betti numbers.
typedef struct MgComplex MgComplex;

// A modular graph.
typedef struct MgGraph MgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Free with `mg_string_free`.
char *mg_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, freed at most once.
void mg_string_free(char *s);

// Library version as a static string.
const char *mg_version(void);

// A built-in system (`com-envelope`, `com-extension`, `lie-odd`) covering every
// vertex of graphs of type `(g, n)`.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum MgStatus mg_coefficients_builtin(const char *name,
                                      size_t g,
                                      size_t n,
                                      struct MgCoefficients **out);

// A system from its JSON description.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum MgStatus mg_coefficients_from_json(const char *json, struct MgCoefficients **out);

// # Safety
// `c` must be null or a handle from this library, freed at most once.
void mg_coefficients_free(struct MgCoefficients *c);

// Build `FT(coefficients)(g, n)`.
//
// # Safety
// `coeff` must be a live handle; `out` must be writable.
enum MgStatus mg_feynman_build(const struct MgCoefficients *coeff,
                               size_t g,
                               size_t n,
                               struct MgComplex **out);

// # Safety
// `c` must be null or a handle from this library, freed at most once.
void mg_complex_free(struct MgComplex *c);

// Lowest and highest degree with a nonzero chain group. Both are 0 for the zero complex.
//
// # Safety
// `c` must be a live handle; `lo` and `hi` must be writable.
enum MgStatus mg_complex_degree_range(const struct MgComplex *c, int64_t *lo, int64_t *hi);

// Dimension of the chain group in `degree`.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum MgStatus mg_complex_dim(const struct MgComplex *c, int64_t degree, size_t *out);

// Betti number in `degree`, computed exactly on first use.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum MgStatus mg_complex_betti(const struct MgComplex *c, int64_t degree, size_t *out);

// Euler characteristic of the complex.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum MgStatus mg_complex_euler(const struct MgComplex *c, int64_t *out);

// The basis and exact differential as JSON. Free with `mg_string_free`.
//
// # Safety
// `c` must be a live handle; `out` must be writable.
enum MgStatus mg_complex_dump_json(const struct MgComplex *c, char **out);

// A named family member (`path:k`, `cycle:k`, `bouquet:k`, `K4`, `theta`) or graph JSON.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum MgStatus mg_graph_new(const char *spec, struct MgGraph **out);

// # Safety
// `g` must be null or a handle from this library, freed at most once.
void mg_graph_free(struct MgGraph *g);

// # Safety
// `g` must be a live handle; `out` must be writable.
enum MgStatus mg_graph_num_edges(const struct MgGraph *g, size_t *out);

// Check every retract identity for every admissible edge, and that the fiber
// complex has homology of rank one in degree `−|E|`.
//
// # Safety
// `g` must be a live handle; `all_hold` must be writable.
enum MgStatus mg_fiber_verify(const struct MgGraph *g, bool *all_hold);

// Compare the nesting poset with the tubing poset of the line graph.
//
// # Safety
// `g` must be a live handle; both outputs must be writable.
enum MgStatus mg_polytope_verify(const struct MgGraph *g, bool *isomorphic, size_t *full_nestings);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MODGRAPH_H */
