#ifndef PACKINGLAB_H
#define PACKINGLAB_H

/* Generated by cbindgen from the packinglab-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum PlStatus {
  PL_STATUS_OK = 0,
  PL_STATUS_NULL_POINTER = 1,
  PL_STATUS_INVALID_UTF8 = 2,
  // Malformed text, JSON or diagram input.
  PL_STATUS_PARSE = 3,
  // Well-formed input violating a mathematical precondition.
  PL_STATUS_INVALID_INPUT = 4,
  // Mixed quadratic fields or an unrepresentable value.
  PL_STATUS_FIELD = 5,
  PL_STATUS_SINGULAR = 6,
  PL_STATUS_NO_CONVERGENCE = 7,
  // A search or enumeration limit was exceeded.
  PL_STATUS_LIMIT = 8,
  PL_STATUS_UNSUPPORTED = 9,
  PL_STATUS_OUT_OF_RANGE = 10,
  PL_STATUS_PANIC = 11,
} PlStatus;

typedef struct PlGram PlGram;

typedef struct PlPacking PlPacking;

typedef struct PlWallSystem PlWallSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty after a
// success. Valid until the next call into the library on this thread.
const char *pl_last_error(void);

// Library version as a static string.
const char *pl_version(void);

// # Safety
// `s` must be null or a string returned by this library.
void pl_string_free(char *s);

// Parses a wall system from its JSON form.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum PlStatus pl_system_parse(const char *json, struct PlWallSystem **out);

// # Safety
// `sys` must be null or a handle from this library, not yet freed.
void pl_system_free(struct PlWallSystem *sys);

// Number of walls, or 0 for a null handle.
//
// # Safety
// `sys` must be null or a live handle.
size_t pl_system_wall_count(const struct PlWallSystem *sys);

// # Safety
// `sys` must be a live handle; `out` must be writable.
enum PlStatus pl_system_to_json(const struct PlWallSystem *sys, char **out);

// Gram matrix of all walls of a system.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum PlStatus pl_system_gram(const struct PlWallSystem *sys, struct PlGram **out);

// Compiles Coxeter diagram text into its Gram matrix.
//
// # Safety
// `diagram` must be a nul-terminated string; `out` must be writable.
enum PlStatus pl_gram_from_diagram(const char *diagram, struct PlGram **out);

// Reads `{"format": 1, "gram": [[...]]}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum PlStatus pl_gram_parse(const char *json, struct PlGram **out);

// # Safety
// `g` must be null or a live handle.
void pl_gram_free(struct PlGram *g);

// # Safety
// `g` must be null or a live handle.
size_t pl_gram_size(const struct PlGram *g);

// Entry `(i, j)`, 0-based, in the exact text format.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum PlStatus pl_gram_entry(const struct PlGram *g, size_t i, size_t j, char **out);

// # Safety
// `g` must be a live handle; `out` must be writable.
enum PlStatus pl_gram_to_json(const struct PlGram *g, char **out);

// Cyclic-product test as JSON: `{"verdict": "NonArithmetic", "cycle":
// [...], "product": "..."}` with 1-based indices, or `{"verdict":
// "PassesUpTo", "max_len": L}`.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum PlStatus pl_vinberg(const struct PlGram *g, size_t max_len, char **out);

// All decompositions as a JSON array of `{"cluster": [...], "cocluster":
// [...]}` with 1-based indices.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum PlStatus pl_decompose(const struct PlGram *g, char **out);

// Enumerates the packing (or superpacking when `superpacking` is nonzero)
// up to the bend `bound`, given in the exact text format.
//
// # Safety
// `sys` must be a live handle, `bound` a nul-terminated string and `out`
// writable.
enum PlStatus pl_orbit(const struct PlWallSystem *sys,
                       const char *bound,
                       size_t max_word,
                       int superpacking,
                       size_t jobs,
                       struct PlPacking **out);

// Reads a packing file.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum PlStatus pl_packing_parse(const char *json, struct PlPacking **out);

// # Safety
// `p` must be null or a live handle.
void pl_packing_free(struct PlPacking *p);

// # Safety
// `p` must be null or a live handle.
size_t pl_packing_len(const struct PlPacking *p);

// 1 if the enumeration reached every sphere within the bound, else 0.
//
// # Safety
// `p` must be null or a live handle.
int pl_packing_saturated(const struct PlPacking *p);

// Bend of sphere `i` (0-based) in the exact text format.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum PlStatus pl_packing_bend(const struct PlPacking *p, size_t i, char **out);

// # Safety
// `p` must be a live handle; `out` must be writable.
enum PlStatus pl_packing_to_json(const struct PlPacking *p, char **out);

// Writes 1 to `integral` if every bend is a rational integer, else 0.
//
// # Safety
// `p` must be a live handle; `integral` must be writable.
enum PlStatus pl_certify(const struct PlPacking *p, int *integral);

// SVG drawing with a viewport fitted to the packing.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum PlStatus pl_render_svg(const struct PlPacking *p,
                            uint32_t size_px,
                            double min_radius_px,
                            int labels,
                            char **out);

// Numerical realization followed by exact recovery in `Q(sqrt d)` and
// exact verification.
//
// # Safety
// `target_json` must be a nul-terminated string; `out` must be writable.
enum PlStatus pl_geometrize(const char *target_json,
                            uint64_t d,
                            uint64_t denom_bound,
                            uint64_t seed,
                            struct PlWallSystem **out);

// Bend residues mod `modulus` reachable from the cluster bends, as a JSON
// array.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum PlStatus pl_residues(const struct PlWallSystem *sys, uint64_t modulus, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PACKINGLAB_H */
