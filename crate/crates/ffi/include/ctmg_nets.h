#ifndef CTMG_NETS_H
#define CTMG_NETS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CtmgStatus {
  CTMG_STATUS_OK = 0,
  CTMG_STATUS_NULL_POINTER = 1,
  CTMG_STATUS_INVALID_UTF8 = 2,
  CTMG_STATUS_PARSE = 3,
  CTMG_STATUS_INVALID_MODEL = 4,
  CTMG_STATUS_STRATEGY_MISMATCH = 5,
  CTMG_STATUS_GUARD = 6,
  CTMG_STATUS_NUMERIC = 7,
  CTMG_STATUS_INVALID_ARGUMENT = 8,
  CTMG_STATUS_IO = 9,
  CTMG_STATUS_PANIC = 10,
} CtmgStatus;

// A parsed and validated model.
typedef struct CtmgModel CtmgModel;

// The outcome of [`ctmg_solve`], with strategies in the model's time scale.
typedef struct CtmgSolution CtmgSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses and validates a model given as NUL-terminated text.
//
// # Safety
// `model_text` must be a valid C string; `out` must be writable.
enum CtmgStatus ctmg_model_parse(const char *model_text, struct CtmgModel **out);

// Reads, parses and validates a model file.
//
// # Safety
// `path` must be a valid C string; `out` must be writable.
enum CtmgStatus ctmg_model_from_file(const char *path, struct CtmgModel **out);

// One of the built-in benchmarks with default parameters:
// `running-example`, `erlang` or `chain-game`.
//
// # Safety
// `name` must be a valid C string; `out` must be writable.
enum CtmgStatus ctmg_model_benchmark(const char *name, struct CtmgModel **out);

// # Safety
// `model` must come from this library and not be used afterwards.
void ctmg_model_free(struct CtmgModel *model);

// # Safety
// `model` must be a live handle; `out` must be writable.
enum CtmgStatus ctmg_model_num_locations(const struct CtmgModel *model, size_t *out);

// Index of the location called `name`.
//
// # Safety
// `model` must be a live handle, `name` a valid C string, `out` writable.
enum CtmgStatus ctmg_model_location_index(const struct CtmgModel *model,
                                          const char *name,
                                          size_t *out);

// Solves the model up to `horizon` (model time) with a net of `level`
// (1 to 4) at precision `precision`.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum CtmgStatus ctmg_solve(const struct CtmgModel *model,
                           double horizon,
                           double precision,
                           uint32_t level,
                           struct CtmgSolution **out);

// # Safety
// `solution` must come from this library and not be used afterwards.
void ctmg_solution_free(struct CtmgSolution *solution);

// Value at time 0 of `location`.
//
// # Safety
// `solution` must be a live handle; `out` must be writable.
enum CtmgStatus ctmg_solution_value(const struct CtmgSolution *solution,
                                    size_t location,
                                    double *out);

// Copies up to `len` values into `buffer` and stores the number of
// locations in `written`.
//
// # Safety
// `buffer` must hold `len` doubles; `written` must be writable.
enum CtmgStatus ctmg_solution_values(const struct CtmgSolution *solution,
                                     double *buffer,
                                     size_t len,
                                     size_t *written);

// Guaranteed global error bound of the values.
//
// # Safety
// `solution` must be a live handle; `out` must be writable.
enum CtmgStatus ctmg_solution_bound(const struct CtmgSolution *solution, double *out);

// Number of intervals and their width in normed time.
//
// # Safety
// `solution` must be a live handle; both out pointers must be writable.
enum CtmgStatus ctmg_solution_grid(const struct CtmgSolution *solution,
                                   uint64_t *intervals,
                                   double *epsilon);

// Strategy of player `'R'` or `'S'` in the text format. Release the string
// with [`ctmg_string_free`].
//
// # Safety
// `solution` must be a live handle; `out` must be writable.
enum CtmgStatus ctmg_solution_strategy(const struct CtmgSolution *solution,
                                       char player,
                                       char **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void ctmg_string_free(char *s);

// Number of uniform intervals level `level` needs for precision
// `precision` over `horizon`.
//
// # Safety
// `out` must be writable.
enum CtmgStatus ctmg_interval_count(uint32_t level,
                                    double horizon,
                                    double precision,
                                    uint64_t *out);

// Message of the last failed call on this thread, empty after a success.
// The pointer stays valid until the next library call on the same thread.
const char *ctmg_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTMG_NETS_H */
