#ifndef ELLIPTRACK_H
#define ELLIPTRACK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum EtStatus {
  ET_STATUS_OK = 0,
  ET_STATUS_NULL_POINTER = 1,
  ET_STATUS_INVALID_INPUT = 2,
  ET_STATUS_SINGULAR = 3,
  ET_STATUS_DEGENERATE_LINEARIZATION = 4,
  ET_STATUS_PANIC = 5,
} EtStatus;

/*
 Opaque track handle.
 */
typedef struct EtTrack EtTrack;

/*
 Plain-data copy of a track estimate. Kinematic order is
 `(x, y, vx, vy, ax, ay)`, shape order `(alpha, l1, l2)`.
 */
typedef struct EtTrackState {
  double kinematic_mean[6];
  double kinematic_cov[36];
  double shape_mean[3];
  double shape_cov[9];
} EtTrackState;

/*
 Multiplicative (`c_h`) and sensor (`c_v`) noise covariances.
 */
typedef struct EtNoise {
  double c_h[4];
  double c_v[4];
} EtNoise;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates a track from `state`. Covariances must be SPD and both semi-axes
 positive. The handle must be released with [`et_track_free`].

 # Safety
 `state` must point to a valid `EtTrackState`; `out` must be writable.
 */
enum EtStatus et_track_new(const struct EtTrackState *state, struct EtTrack **out);

/*
 Releases a handle from [`et_track_new`]. Null is ignored.

 # Safety
 `track` must be null or a live handle not used afterwards.
 */
void et_track_free(struct EtTrack *track);

/*
 Copies the current estimate into `out`.

 # Safety
 `track` must be a live handle; `out` must be writable.
 */
enum EtStatus et_track_get_state(const struct EtTrack *track, struct EtTrackState *out);

/*
 Constant-acceleration prediction over `dt` seconds with white jerk of
 spectral density `jerk_psd`; `shape_process_noise` is a row-major 3x3.

 # Safety
 `track` must be a live handle; `shape_process_noise` must point to 9 doubles.
 */
enum EtStatus et_track_predict(struct EtTrack *track,
                               double dt,
                               double jerk_psd,
                               const double *shape_process_noise);

/*
 Sequential update with `count` measurements stored as `x0, y0, x1, y1, ...`.

 # Safety
 `track` must be a live handle, `xy` must point to `2 * count` doubles
 (may be null when `count` is 0) and `noise` must be valid.
 */
enum EtStatus et_track_update_ekf_star(struct EtTrack *track,
                                       const double *xy,
                                       uintptr_t count,
                                       const struct EtNoise *noise);

/*
 Posterior-centered batch update followed by the shape covariance clamp.

 # Safety
 As [`et_track_update_ekf_star`].
 */
enum EtStatus et_track_update_eif_yl(struct EtTrack *track,
                                     const double *xy,
                                     uintptr_t count,
                                     const struct EtNoise *noise,
                                     double clamp_factor);

/*
 Prior-centered batch update in `chunk_count` contiguous chunks; 0 means
 one chunk per measurement.

 # Safety
 As [`et_track_update_ekf_star`].
 */
enum EtStatus et_track_update_eif_y0(struct EtTrack *track,
                                     const double *xy,
                                     uintptr_t count,
                                     const struct EtNoise *noise,
                                     uintptr_t chunk_count);

/*
 Posterior-centered batch update with one weight in `[0, 1]` per measurement.

 # Safety
 As [`et_track_update_ekf_star`]; `weights` must point to `count` doubles.
 */
enum EtStatus et_track_update_weighted(struct EtTrack *track,
                                       const double *xy,
                                       const double *weights,
                                       uintptr_t count,
                                       const struct EtNoise *noise,
                                       double clamp_factor);

/*
 Caps the semi-axis variances at `(factor * l)^2`.

 # Safety
 `track` must be a live handle.
 */
enum EtStatus et_track_clamp_shape(struct EtTrack *track, double factor);

/*
 Gaussian Wasserstein distance between two ellipses given by center and
 row-major 2x2 SPD extent matrix.

 # Safety
 Centers must point to 2 doubles, extents to 4, `out` must be writable.
 */
enum EtStatus et_gw_distance(const double *center_a,
                             const double *extent_a,
                             const double *center_b,
                             const double *extent_b,
                             double *out);

/*
 Message for the last failed call on this thread. Valid until the next
 failing call on the same thread.
 */
const char *et_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELLIPTRACK_H */
