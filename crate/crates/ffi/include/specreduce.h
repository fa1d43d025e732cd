#ifndef SPECREDUCE_H
#define SPECREDUCE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all functions.
typedef enum SrStatus {
  SR_STATUS_OK = 0,
  SR_STATUS_NULL_POINTER = 1,
  SR_STATUS_INVALID_ARGUMENT = 2,
  SR_STATUS_PARSE = 3,
  SR_STATUS_OUT_OF_RANGE = 4,
  SR_STATUS_TOO_MANY_QUBITS = 5,
  SR_STATUS_IO = 6,
  SR_STATUS_BUFFER_TOO_SMALL = 7,
  SR_STATUS_INTERNAL = 8,
} SrStatus;

// Parsed circuit.
typedef struct SrCircuit SrCircuit;

// Outcome of a basis search.
typedef struct SrReduction SrReduction;

// Simulated or user supplied state.
typedef struct SrStatevector SrStatevector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf`.
//
// # Safety
// `buf` must be writable for `len` bytes; `needed` may be null.
enum SrStatus sr_last_error_message(char *buf, size_t len, size_t *needed);

// Parses circuit text.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum SrStatus sr_circuit_parse(const char *text, struct SrCircuit **out);

// # Safety
// `circuit` must come from this library or be null.
void sr_circuit_free(struct SrCircuit *circuit);

// # Safety
// `circuit` must be a live handle; `out` must be writable.
enum SrStatus sr_circuit_num_qubits(const struct SrCircuit *circuit, size_t *out);

// Writes the circuit in text form.
//
// # Safety
// `circuit` must be a live handle; `buf` writable for `len` bytes.
enum SrStatus sr_circuit_serialize(const struct SrCircuit *circuit,
                                   char *buf,
                                   size_t len,
                                   size_t *needed);

// Runs the circuit on its input basis state.
//
// # Safety
// `circuit` must be a live handle; `out` must be writable.
enum SrStatus sr_simulate(const struct SrCircuit *circuit, struct SrStatevector **out);

// Builds a state from `len` real amplitudes, normalizing them.
//
// # Safety
// `values` must be readable for `len` doubles; `out` must be writable.
enum SrStatus sr_statevector_from_real(const double *values,
                                       size_t len,
                                       struct SrStatevector **out);

// # Safety
// `state` must come from this library or be null.
void sr_statevector_free(struct SrStatevector *state);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum SrStatus sr_statevector_num_qubits(const struct SrStatevector *state, size_t *out);

// Number of amplitudes with magnitude above `eps`.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum SrStatus sr_statevector_rank(const struct SrStatevector *state, double eps, size_t *out);

// Copies the amplitudes into `re` and `im`, each of length `2^n`.
//
// # Safety
// `re` and `im` must be writable for `len` doubles.
enum SrStatus sr_statevector_amplitudes(const struct SrStatevector *state,
                                        double *re,
                                        double *im,
                                        size_t len);

// Applies Hadamards on the qubits marked `h` in `mask` (e.g. `"1h1"`).
//
// # Safety
// `state` must be a live handle, `mask` NUL-terminated, `out` writable.
enum SrStatus sr_apply_mask(const struct SrStatevector *state,
                            const char *mask,
                            struct SrStatevector **out);

// Greedy basis search.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum SrStatus sr_reduce_greedy(const struct SrStatevector *state,
                               uint64_t seed,
                               struct SrReduction **out);

// Random basis search with `budget` distinct masks.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum SrStatus sr_reduce_random(const struct SrStatevector *state,
                               size_t budget,
                               uint64_t seed,
                               struct SrReduction **out);

// Exhaustive basis search.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum SrStatus sr_reduce_exhaustive(const struct SrStatevector *state, struct SrReduction **out);

// # Safety
// `reduction` must come from this library or be null.
void sr_reduction_free(struct SrReduction *reduction);

// Default and reduced ranks plus the search's objective calls.
//
// # Safety
// `reduction` must be a live handle; outputs may be null to skip them.
enum SrStatus sr_reduction_summary(const struct SrReduction *reduction,
                                   size_t *default_rank,
                                   size_t *reduced_rank,
                                   size_t *objective_calls);

// Writes the found mask in `1`/`h` shorthand.
//
// # Safety
// `reduction` must be a live handle; `buf` writable for `len` bytes.
enum SrStatus sr_reduction_mask(const struct SrReduction *reduction,
                                char *buf,
                                size_t len,
                                size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECREDUCE_H */
