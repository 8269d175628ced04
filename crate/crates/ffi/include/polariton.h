#ifndef POLARITON_H
#define POLARITON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum PolStatus {
  POL_STATUS_OK = 0,
  POL_STATUS_NULL_POINTER = 1,
  POL_STATUS_INVALID_PARAMETER = 2,
  POL_STATUS_PRECONDITION = 3,
  /*
   Eigensolver, integrator or steady-state failure.
   */
  POL_STATUS_NUMERICAL = 4,
  POL_STATUS_IO = 5,
  /*
   Caller buffer shorter than the data.
   */
  POL_STATUS_BUFFER_TOO_SMALL = 6,
  POL_STATUS_NOT_FOUND = 7,
  POL_STATUS_PANIC = 8,
} PolStatus;

typedef enum PolPreset {
  POL_PRESET_SET_A = 0,
  POL_PRESET_SET_B = 1,
} PolPreset;

/*
 Opaque table: an abscissa plus named columns.
 */
typedef struct PolScan PolScan;

/*
 Opaque system handle.
 */
typedef struct PolSystem PolSystem;

/*
 System parameters in units of `g`.
 */
typedef struct PolParams {
  double g;
  double j;
  double delta1;
  double delta2;
  double kappa1;
  double kappa2;
  double gamma;
  uint32_t n1_cutoff;
  uint32_t n2_cutoff;
} PolParams;

typedef struct PolEffectiveParams {
  double alpha;
  double beta;
  double g_eff;
  double delta_eff;
  double kappa_eff;
  double gamma_eff;
  double shift_e;
  double shift_2;
} PolEffectiveParams;

/*
 The two dark eigenvalues `re + i im` of an excitation manifold.
 */
typedef struct PolDoublet {
  double minus_re;
  double minus_im;
  double plus_re;
  double plus_im;
  double splitting;
  /*
   Nonzero when `delta1 < 5 kappa1`.
   */
  int32_t outside_adiabatic;
} PolDoublet;

typedef struct PolRabiSummary {
  double g_eff;
  double rms_deviation;
  double max_n1;
  double max_n2;
  double max_trace_error;
  double min_eigenvalue;
} PolRabiSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. The pointer stays
 valid until the next failing call on this thread.
 */
const char *pol_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *pol_version(void);

/*
 Fill `out` with a named parameter set.

 # Safety
 `out` must be null or point to writable memory for one `PolParams`.
 */
enum PolStatus pol_preset(enum PolPreset preset, struct PolParams *out);

/*
 Validate `params` and create a system handle.

 # Safety
 `params` must be null or point to a valid `PolParams`; `out` must be null
 or point to writable storage for one pointer.
 */
enum PolStatus pol_system_new(const struct PolParams *params, struct PolSystem **out);

/*
 # Safety
 `sys` must be null or a handle from `pol_system_new` not yet freed.
 */
void pol_system_free(struct PolSystem *sys);

/*
 Current parameters of a system.

 # Safety
 Pointers must be null or valid.
 */
enum PolStatus pol_system_params(const struct PolSystem *sys, struct PolParams *out);

/*
 Move `delta2` onto the effective resonance `(beta^2 - alpha^2) delta1`.

 # Safety
 `sys` must be null or a live handle.
 */
enum PolStatus pol_system_set_resonance(struct PolSystem *sys);

/*
 # Safety
 Pointers must be null or valid.
 */
enum PolStatus pol_effective_params(const struct PolSystem *sys, struct PolEffectiveParams *out);

/*
 Dark doublet of the `n_exc` manifold (1 or 2).

 # Safety
 Pointers must be null or valid.
 */
enum PolStatus pol_dark_doublet(const struct PolSystem *sys,
                                uint32_t n_exc,
                                struct PolDoublet *out);

/*
 Vacuum-Rabi run from `|e,0,0>` over `periods` Rabi periods.

 The table has abscissa `t` and columns `N1`, `N2`, `Pe`, `Pe_eff`.
 `summary` may be null.

 # Safety
 Pointers must be null or valid.
 */
enum PolStatus pol_rabi_run(const struct PolSystem *sys,
                            double periods,
                            uint32_t samples,
                            double rtol,
                            double atol,
                            struct PolRabiSummary *summary,
                            struct PolScan **out);

/*
 `g2(0)` of the auxiliary mode over probe detunings, probe amplitude `eps`
 on `a2`. Uses the system's cutoffs and a (2,2) cross-check.

 # Safety
 Pointers must be null or valid.
 */
enum PolStatus pol_g2_scan(const struct PolSystem *sys,
                           double eps,
                           double start,
                           double stop,
                           uint32_t count,
                           struct PolScan **out);

/*
 Normalized emitter excitation spectrum over probe detunings.

 # Safety
 Pointers must be null or valid.
 */
enum PolStatus pol_spectrum(const struct PolSystem *sys,
                            double eps,
                            double start,
                            double stop,
                            uint32_t count,
                            struct PolScan **out);

/*
 Number of rows, or 0 for a null handle.

 # Safety
 `scan` must be null or a live handle.
 */
size_t pol_scan_len(const struct PolScan *scan);

/*
 Number of named columns (the abscissa excluded).

 # Safety
 `scan` must be null or a live handle.
 */
size_t pol_scan_column_count(const struct PolScan *scan);

/*
 Name of column `index`, owned by the handle; null when out of range.

 # Safety
 `scan` must be null or a live handle.
 */
const char *pol_scan_column_name(const struct PolScan *scan, size_t index);

/*
 Copy the abscissa into `buf` (at least `pol_scan_len` values).

 # Safety
 `buf` must be valid for `len` writes.
 */
enum PolStatus pol_scan_abscissa(const struct PolScan *scan, double *buf, size_t len);

/*
 Copy the column called `name` into `buf`.

 # Safety
 `name` must be a NUL-terminated string; `buf` must be valid for `len` writes.
 */
enum PolStatus pol_scan_column(const struct PolScan *scan,
                               const char *name,
                               double *buf,
                               size_t len);

/*
 # Safety
 `scan` must be null or a live handle.
 */
void pol_scan_free(struct PolScan *scan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLARITON_H */
