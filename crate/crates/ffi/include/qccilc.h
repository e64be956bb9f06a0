#ifndef QCCILC_H
#define QCCILC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `U_ILC` applied as `U†HU` (inverse) or `UHU†` (forward).
 */
typedef enum QccDirection {
  QCC_DIRECTION_INVERSE = 0,
  QCC_DIRECTION_FORWARD = 1,
} QccDirection;

typedef enum QccMapping {
  QCC_MAPPING_JORDAN_WIGNER = 0,
  QCC_MAPPING_PARITY = 1,
} QccMapping;

/**
 * Result of every fallible call.
 */
typedef enum QccStatus {
  QCC_STATUS_OK = 0,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  QCC_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed input text or mismatched qubit counts.
   */
  QCC_STATUS_INPUT = 2,
  /**
   * No anti-commuting entangler set exists.
   */
  QCC_STATUS_INFEASIBLE = 3,
  QCC_STATUS_NON_CONVERGENCE = 4,
  /**
   * A documented precondition was violated.
   */
  QCC_STATUS_CONTRACT = 5,
  /**
   * The library panicked; the handle arguments are left untouched.
   */
  QCC_STATUS_INTERNAL = 6,
} QccStatus;

/**
 * ILC ansatz handle.
 */
typedef struct QccIlcAnsatz QccIlcAnsatz;

/**
 * Sparse Pauli operator handle.
 */
typedef struct QccOperator QccOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (always nul
 * terminated when `len > 0`) and returns the full message length, or 0
 * when the last call succeeded.
 */
size_t qcc_last_error_message(char *buf, size_t len);

/**
 * Library version as a static nul-terminated string.
 */
const char *qcc_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void qcc_string_free(char *s);

/**
 * Parses `.pauli` text.
 */
enum QccStatus qcc_operator_parse(const char *text, struct QccOperator **out);

/**
 * Maps FCIDUMP text to a qubit Hamiltonian with blocked spin ordering. A
 * negative `spin_penalty` disables the penalty term. When `reference_out`
 * is non-null it receives the Hartree–Fock bitstring (free with
 * `qcc_string_free`).
 */
enum QccStatus qcc_operator_from_fcidump(const char *text,
                                         enum QccMapping mapping,
                                         double spin_penalty,
                                         struct QccOperator **out,
                                         char **reference_out);

/**
 * Releases an operator. Null is ignored.
 */
void qcc_operator_free(struct QccOperator *op);

/**
 * Qubit count, or 0 for null.
 */
size_t qcc_operator_n_qubits(const struct QccOperator *op);

/**
 * Number of stored terms, or 0 for null.
 */
size_t qcc_operator_len(const struct QccOperator *op);

/**
 * Serializes to `.pauli` text; free the result with `qcc_string_free`.
 */
enum QccStatus qcc_operator_to_string(const struct QccOperator *op, char **out);

/**
 * `⟨b|H|b⟩` for a computational basis state written qubit 0 first.
 */
enum QccStatus qcc_basis_energy(const struct QccOperator *op, const char *bits, double *out);

/**
 * Exact ground-state energy (dense or Lanczos, within the size caps).
 */
enum QccStatus qcc_ground_energy(const struct QccOperator *op, double *out);

/**
 * Selects `n` anti-commuting entanglers from the DIS at `reference` and
 * returns the optimal ILC ansatz and its energy.
 */
enum QccStatus qcc_ilc_optimize(const struct QccOperator *op,
                                const char *reference,
                                size_t n,
                                struct QccIlcAnsatz **out,
                                double *energy);

/**
 * Releases an ansatz. Null is ignored.
 */
void qcc_ilc_free(struct QccIlcAnsatz *a);

/**
 * Entangler count, or 0 for null.
 */
size_t qcc_ilc_len(const struct QccIlcAnsatz *a);

/**
 * Rotation angle `τ`, or NaN for null.
 */
double qcc_ilc_tau(const struct QccIlcAnsatz *a);

/**
 * Copies up to `len` amplitudes into `alphas`; returns the entangler count.
 */
size_t qcc_ilc_alphas(const struct QccIlcAnsatz *a, double *alphas, size_t len);

/**
 * Entangler `index` as text (`"Y0 X1"`); free with `qcc_string_free`.
 */
enum QccStatus qcc_ilc_entangler(const struct QccIlcAnsatz *a, size_t index, char **out);

/**
 * Exact ILC dressing of `op`.
 */
enum QccStatus qcc_dress_ilc(const struct QccOperator *op,
                             const struct QccIlcAnsatz *ansatz,
                             enum QccDirection direction,
                             struct QccOperator **out);

/**
 * `d` rounds of `n`-entangler ILC dressing from `reference` (null picks the
 * mean-field determinant), then a QCC energy with `m` entanglers
 * (`m = 0` reports the final reference energy). `dressed` may be null.
 */
enum QccStatus qcc_pipeline(const struct QccOperator *op,
                            const char *reference,
                            size_t d,
                            size_t n,
                            size_t m,
                            double *energy,
                            struct QccOperator **dressed);

/**
 * Worst-case term growth factor `(N² + N + 2)/2`.
 */
double qcc_growth_worst(size_t n);

/**
 * Average term growth factor `(N² + N + 4)/4`.
 */
double qcc_growth_avg(size_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCCILC_H */
