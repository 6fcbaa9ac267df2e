/* C ABI for the coupled-channel PT-symmetric square well solver.
 *
 * Conventions:
 *   - opaque handles own library data and must be released with the
 *     matching *_free function;
 *   - every fallible call returns a PtwellStatus and writes results
 *     through out-pointers, which are left untouched on failure;
 *   - all functions are thread-safe; handles are immutable after creation.
 *
 * Maintained by hand against crates/ptwell-ffi/src/lib.rs; the crate's
 * header_matches_exports test checks that every declaration below exists.
 */

#ifndef PTWELL_H
#define PTWELL_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum PtwellStatus {
  PTWELL_OK = 0,
  PTWELL_NULL_POINTER = 1,
  PTWELL_INVALID_PARAMS = 2,
  PTWELL_ROOT_NOT_FOUND = 3,
  PTWELL_NO_MERGE = 4,
  PTWELL_INVALID_ARGUMENT = 5,
  PTWELL_ACCIDENTAL_NODE = 6,
} PtwellStatus;

/* Opaque handles. */
typedef struct PtwellParams PtwellParams;
typedef struct PtwellSpectrum PtwellSpectrum;

/* One solved level. */
typedef struct PtwellLevel {
  unsigned int n;
  int sigma;          /* spin sector, +1 or -1 */
  double s;
  double t;
  double energy;      /* E = s^2 - t^2 */
  double q;           /* root offset Q_n */
  int quasi_parity;   /* +1 / -1; 0 when no sign exists (accidental node) */
} PtwellLevel;

/* A detected level coalescence. */
typedef struct PtwellMergeEvent {
  unsigned int n_lower;
  unsigned int n_upper;
  double z_critical;  /* |Z_eff| at coalescence */
  double critical_z;  /* external Z at merging: z_critical - sqrt(xy) */
  double s_merge;     /* common root value at coalescence */
} PtwellMergeEvent;

/* Library version as a static NUL-terminated string. */
const char *ptwell_version(void);

/* Static message for a status code. */
const char *ptwell_status_message(PtwellStatus status);

/* The conventional two-decimal critical strength of the single-channel
 * well; ptwell_find_critical_z recomputes it to solver precision. */
double ptwell_z_crit_default(void);

/* Create a parameter handle. X > 0, Y > 0; Z any real. */
PtwellStatus ptwell_params_new(double x, double y, double z,
                               PtwellParams **out);

/* Release a parameter handle. Null is a no-op. */
void ptwell_params_free(PtwellParams *params);

/* Effective sector strength Z_eff(sigma) = Z + sigma sqrt(XY). */
PtwellStatus ptwell_z_eff(const PtwellParams *params, int sigma, double *out);

/* Whether sqrt(XY) + |Z| < z_crit. Writes 1 or 0. */
PtwellStatus ptwell_is_physical(const PtwellParams *params, double z_crit,
                                int *out);

/* Solve one level of one sector. */
PtwellStatus ptwell_solve_level(const PtwellParams *params, unsigned int n,
                                int sigma, double tol, PtwellLevel *out);

/* Solve all levels 0..=n_max of both sectors into a spectrum handle.
 * Succeeds even when the spectrum is non-physical. */
PtwellStatus ptwell_solve_spectrum(const PtwellParams *params,
                                   unsigned int n_max, double tol,
                                   PtwellSpectrum **out);

/* Release a spectrum handle. Null is a no-op. */
void ptwell_spectrum_free(PtwellSpectrum *spectrum);

/* Number of solved levels (levels lost to complexification are absent). */
unsigned int ptwell_spectrum_len(const PtwellSpectrum *spectrum);

/* 1 when every requested level is real, else 0. */
int ptwell_spectrum_is_physical(const PtwellSpectrum *spectrum);

/* Copy out level `index` (energy-ascending order). */
PtwellStatus ptwell_spectrum_level(const PtwellSpectrum *spectrum,
                                   unsigned int index, PtwellLevel *out);

/* Locate the coalescence of the adjacent pair (n_lower, n_lower + 1) as
 * |Z_eff| grows, for a given coupling product xy >= 0. */
PtwellStatus ptwell_find_critical_z(double xy_product, unsigned int n_lower,
                                    double tol, PtwellMergeEvent *out);

/* Perturbation-series offset at the given order (1 or 2). */
PtwellStatus ptwell_q_series(unsigned int n, double z_eff, unsigned int order,
                             double *out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PTWELL_H */
