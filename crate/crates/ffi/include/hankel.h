#ifndef HANKEL_FFI_H
#define HANKEL_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum HkStatus {
  HK_STATUS_OK = 0,
  HK_STATUS_NULL_POINTER = 1,
  HK_STATUS_INVALID_ARGUMENT = 2,
  HK_STATUS_INVALID_WEIGHT = 3,
  // Zero or nonzero constant term where the other was required, or `F'(0) = 0`.
  HK_STATUS_DEGENERATE_SERIES = 4,
  HK_STATUS_NON_CONVERGENT = 5,
  HK_STATUS_PARSE = 6,
  HK_STATUS_IO = 7,
  // A Rust panic was caught at the boundary.
  HK_STATUS_PANIC = 8,
} HkStatus;

// Simply connected domain `F(𝔻)`.
typedef struct HkDomain HkDomain;

// Truncated power series `Σ c_k z^k`.
typedef struct HkSeries HkSeries;

typedef struct HkComplex {
  double re;
  double im;
} HkComplex;

// Flat copy of a bound report. Optional values are NaN when absent.
typedef struct HkBoundReport {
  double alpha;
  size_t dim;
  double lower_rigidity;
  double commutator_norm;
  double upper_sharp;
  double upper_putnam;
  double khavinson_lower;
  bool chain_ok;
} HkBoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL terminated,
// truncated to `len`). Returns the full message length without the NUL.
// Pass a null `buf` to query the length.
//
// # Safety
// `buf` must be null or point to at least `len` writable bytes.
size_t hk_last_error_message(char *buf, size_t len);

// Static NUL-terminated version string.
const char *hk_version(void);

// Builds a series from `len` coefficients, lowest degree first.
//
// # Safety
// `coeffs` must point to `len` values; `out` must be writable.
enum HkStatus hk_series_new(const struct HkComplex *coeffs, size_t len, struct HkSeries **out);

// # Safety
// `s` must be null or a handle from [`hk_series_new`] not yet freed.
void hk_series_free(struct HkSeries *s);

// Number of stored coefficients, 0 for a null handle.
//
// # Safety
// `s` must be null or a live handle.
size_t hk_series_len(const struct HkSeries *s);

// # Safety
// `s` must be a live handle and `out` writable.
enum HkStatus hk_series_coeff(const struct HkSeries *s, size_t k, struct HkComplex *out);

// # Safety
// `s` must be a live handle and `out` writable.
enum HkStatus hk_series_evaluate(const struct HkSeries *s,
                                 struct HkComplex z,
                                 struct HkComplex *out);

// Domain `F(𝔻)` for the map `F`, which must have `F'(0) ≠ 0`.
// `samples` is the boundary sample count used for the perimeter (at least 16).
//
// # Safety
// `id` must be a NUL-terminated string, `map` a live handle, `out` writable.
enum HkStatus hk_domain_new(const char *id,
                            const struct HkSeries *map,
                            size_t samples,
                            struct HkDomain **out);

// `"disk"`, `"example1"`, or a path to a coefficient file.
//
// # Safety
// `name` must be a NUL-terminated string and `out` writable.
enum HkStatus hk_domain_builtin(const char *name, struct HkDomain **out);

// # Safety
// `d` must be null or a domain handle not yet freed.
void hk_domain_free(struct HkDomain *d);

// # Safety
// `d` must be a live handle and `out` writable.
enum HkStatus hk_domain_area(const struct HkDomain *d, double *out);

// # Safety
// `d` must be a live handle and `out` writable.
enum HkStatus hk_domain_perimeter(const struct HkDomain *d, double *out);

// `‖H_{ψ̄} f‖²` in `A²_α(𝔻)`.
//
// # Safety
// `f` and `psi` must be live handles and `out` writable.
enum HkStatus hk_hankel_norm_sq(const struct HkSeries *f,
                                const struct HkSeries *psi,
                                double alpha,
                                double *out);

// Squared norm of `H_{ψ̄}` compressed to polynomials of degree `< dim`.
//
// # Safety
// `psi` must be a live handle and `out` writable.
enum HkStatus hk_operator_norm_sq(const struct HkSeries *psi,
                                  double alpha,
                                  size_t dim,
                                  double *out);

// `Σ n|c_n|² / (α+2)`, the sharp upper bound for the squared norm.
//
// # Safety
// `psi` must be a live handle and `out` writable.
enum HkStatus hk_theorem_bound_sq(const struct HkSeries *psi, double alpha, double *out);

// Weighted torsional rigidity `‖H_{w̄} 1‖²` on the domain, normalized units.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum HkStatus hk_rigidity(const struct HkDomain *d, double alpha, double *out);

// Rigidity divided by `‖1‖²`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum HkStatus hk_rigidity_lower_bound(const struct HkDomain *d, double alpha, double *out);

// `4 Area² / Per²`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum HkStatus hk_khavinson(const struct HkDomain *d, double *out);

// `Area / π`.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum HkStatus hk_putnam(const struct HkDomain *d, double *out);

// Squared commutator norm at truncation `dim`. A null `psi` means `ψ(w) = w`.
//
// # Safety
// `d` must be a live handle, `psi` null or live, `out` writable.
enum HkStatus hk_commutator_norm_sq(const struct HkDomain *d,
                                    const struct HkSeries *psi,
                                    double alpha,
                                    size_t dim,
                                    double *out);

// Full bound chain. A null `psi` means `ψ(w) = w`.
//
// # Safety
// `d` must be a live handle, `psi` null or live, `out` writable.
enum HkStatus hk_full_report(const struct HkDomain *d,
                             const struct HkSeries *psi,
                             double alpha,
                             size_t dim,
                             struct HkBoundReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HANKEL_FFI_H */
