#ifndef RINGFLOCK_H
#define RINGFLOCK_H

#include <stddef.h>
#include <stdint.h>

typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_NULL_POINTER = 1,
  RF_STATUS_INVALID_ARGUMENT = 2,
  RF_STATUS_INVALID_PARAMS = 3,
  RF_STATUS_UNSTABLE = 4,
  RF_STATUS_DEGENERATE = 5,
  RF_STATUS_NUMERICAL = 6,
  RF_STATUS_BUFFER_TOO_SMALL = 7,
  RF_STATUS_PANIC = 8,
} RfStatus;

/**
 * Parameter set of a ring formation.
 */
typedef struct RfParams RfParams;

/**
 * Eigenvalues of the first-order system, two per mode.
 */
typedef struct RfSpectrum RfSpectrum;

/**
 * Stored frames of a time integration.
 */
typedef struct RfTrajectory RfTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *rf_last_error(void);

/**
 * Static description of a status code.
 */
const char *rf_status_str(enum RfStatus status);

/**
 * Builds and validates a parameter set from `len` offsets and weights.
 *
 * # Safety
 * `offsets`, `rho_x` and `rho_v` must each point to `len` readable values;
 * `out_params` must be writable.
 */
enum RfStatus rf_params_new(size_t n,
                            double g_x,
                            double g_v,
                            const int64_t *offsets,
                            const double *rho_x,
                            const double *rho_v,
                            size_t len,
                            struct RfParams **out_params);

/**
 * Nearest-neighbor parameters; weights are `{rho(-1), rho(0), rho(+1)}`.
 *
 * # Safety
 * `rho_x` and `rho_v` must point to three readable values each.
 */
enum RfStatus rf_params_new_nearest(size_t n,
                                    double g_x,
                                    double g_v,
                                    const double *rho_x,
                                    const double *rho_v,
                                    struct RfParams **out_params);

/**
 * # Safety
 * `params` must be NULL or a handle from `rf_params_new*` not yet freed.
 */
void rf_params_free(struct RfParams *params);

/**
 * # Safety
 * `params` must be a live handle.
 */
size_t rf_params_n(const struct RfParams *params);

/**
 * Writes 1 when the parameters are stable at every ring size, else 0.
 *
 * # Safety
 * `params` must be a live handle and `stable` writable.
 */
enum RfStatus rf_stability_gate(const struct RfParams *params, int32_t *stable);

/**
 * Searches ring sizes up to `n_max` for a mode with positive real part.
 * Writes `found = 0` when none exists up to `n_max`.
 *
 * # Safety
 * `params` must be a live handle; all outputs writable.
 */
enum RfStatus rf_instability_witness(const struct RfParams *params,
                                     size_t n_max,
                                     int32_t *found,
                                     size_t *n,
                                     int64_t *m,
                                     double *re_nu,
                                     double *im_nu);

/**
 * Signal velocities `c_+ > 0 > c_-` of stable parameters.
 *
 * # Safety
 * `params` must be a live handle; outputs writable.
 */
enum RfStatus rf_signal_velocities(const struct RfParams *params, double *c_plus, double *c_minus);

/**
 * # Safety
 * `params` must be a live handle and `out_spectrum` writable.
 */
enum RfStatus rf_spectrum_new(const struct RfParams *params, struct RfSpectrum **out_spectrum);

/**
 * # Safety
 * `spectrum` must be NULL or a live handle.
 */
void rf_spectrum_free(struct RfSpectrum *spectrum);

/**
 * Number of eigenvalues, `2N`.
 *
 * # Safety
 * `spectrum` must be a live handle.
 */
size_t rf_spectrum_len(const struct RfSpectrum *spectrum);

/**
 * Copies all eigenvalues as `(nu_plus, nu_minus)` pairs in mode order,
 * starting from the most negative mode index.
 *
 * # Safety
 * `re` and `im` must each hold `cap` writable values.
 */
enum RfStatus rf_spectrum_eigenvalues(const struct RfSpectrum *spectrum,
                                      double *re,
                                      double *im,
                                      size_t cap);

/**
 * Integrates from the state `(z0, zdot0)` of length `N` up to `t_end`,
 * storing every `stride`-th step (0 picks a default).
 *
 * # Safety
 * `z0` and `zdot0` must point to `N` readable values; `out_traj` writable.
 */
enum RfStatus rf_integrate(const struct RfParams *params,
                           const double *z0,
                           const double *zdot0,
                           double t_end,
                           double dt,
                           size_t stride,
                           struct RfTrajectory **out_traj);

/**
 * Kicks agent 0 with unit velocity and tracks the wavefronts until `t_end`.
 * Fitted velocities are NaN when a branch has too few arrivals.
 *
 * # Safety
 * `params` must be a live handle; all outputs writable.
 */
enum RfStatus rf_impulse(const struct RfParams *params,
                         double t_end,
                         double dt,
                         double *fitted_c_plus,
                         double *fitted_c_minus,
                         struct RfTrajectory **out_traj);

/**
 * # Safety
 * `traj` must be NULL or a live handle.
 */
void rf_trajectory_free(struct RfTrajectory *traj);

/**
 * Number of stored frames.
 *
 * # Safety
 * `traj` must be a live handle.
 */
size_t rf_trajectory_frames(const struct RfTrajectory *traj);

/**
 * Copies frame `i`: its time and the `N` displacements and velocities.
 *
 * # Safety
 * `z` and `zdot` must each hold `cap` writable values, `t` writable.
 */
enum RfStatus rf_trajectory_frame(const struct RfTrajectory *traj,
                                  size_t i,
                                  double *t,
                                  double *z,
                                  double *zdot,
                                  size_t cap);

/**
 * Arrival time per agent from `rf_impulse`, NaN where the front never came.
 *
 * # Safety
 * `arrival` must hold `cap` writable values.
 */
enum RfStatus rf_trajectory_arrivals(const struct RfTrajectory *traj, double *arrival, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RINGFLOCK_H */
