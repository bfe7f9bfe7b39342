//! C ABI over the `elliptrack` filters.
//!
//! Tracks live behind an opaque [`EtTrack`] handle created with
//! [`et_track_new`] and released with [`et_track_free`]. Every fallible call
//! returns an [`EtStatus`]; on failure the track is left unchanged and
//! [`et_last_error_message`] describes the problem. Matrices are passed as
//! row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use elliptrack::eif::{
    batch_update_y0, batch_update_yl, clamp_shape_covariance, weighted_batch_update_yl,
};
use elliptrack::ekf::sequential_update;
use elliptrack::metrics::gw_distance;
use elliptrack::motion::{predict, MotionConfig};
use elliptrack::{
    BatchUpdateConfig, ChunkCount, Ellipse, Error, GaussianState, MeasurementBatch, MemNoiseConfig,
    TrackState,
};
use nalgebra::{Matrix2, Matrix3, SMatrix, Vector2, Vector3, Vector6};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Singular = 3,
    DegenerateLinearization = 4,
    Panic = 5,
}

/// Opaque track handle.
pub struct EtTrack {
    state: TrackState,
}

/// Plain-data copy of a track estimate. Kinematic order is
/// `(x, y, vx, vy, ax, ay)`, shape order `(alpha, l1, l2)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtTrackState {
    pub kinematic_mean: [f64; 6],
    pub kinematic_cov: [f64; 36],
    pub shape_mean: [f64; 3],
    pub shape_cov: [f64; 9],
}

/// Multiplicative (`c_h`) and sensor (`c_v`) noise covariances.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtNoise {
    pub c_h: [f64; 4],
    pub c_v: [f64; 4],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> EtStatus {
    match e.root() {
        Error::Singular(_) => EtStatus::Singular,
        Error::DegenerateLinearization(_) => EtStatus::DegenerateLinearization,
        _ => EtStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), EtStatus>) -> EtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EtStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic");
            EtStatus::Panic
        }
    }
}

fn fail(e: Error) -> EtStatus {
    set_last_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> EtStatus {
    set_last_error(&format!("`{what}` is null"));
    EtStatus::NullPointer
}

fn invalid(msg: &str) -> EtStatus {
    set_last_error(msg);
    EtStatus::InvalidInput
}

fn matrix<const N: usize>(row_major: &[f64]) -> SMatrix<f64, N, N> {
    SMatrix::from_row_slice(row_major)
}

fn row_major<const N: usize, const K: usize>(m: &SMatrix<f64, N, N>) -> [f64; K] {
    let mut out = [0.0; K];
    for (k, v) in out.iter_mut().enumerate() {
        *v = m[(k / N, k % N)];
    }
    out
}

unsafe fn noise_from(noise: *const EtNoise) -> Result<MemNoiseConfig, EtStatus> {
    let n = unsafe { noise.as_ref() }.ok_or_else(|| null("noise"))?;
    Ok(MemNoiseConfig {
        c_h: matrix::<2>(&n.c_h),
        c_v: matrix::<2>(&n.c_v),
    })
}

unsafe fn batch_from(xy: *const f64, count: usize) -> Result<MeasurementBatch, EtStatus> {
    if count == 0 {
        return Ok(MeasurementBatch::default());
    }
    if xy.is_null() {
        return Err(null("xy"));
    }
    let flat = unsafe { slice::from_raw_parts(xy, 2 * count) };
    Ok(MeasurementBatch::new(
        flat.chunks_exact(2)
            .map(|p| Vector2::new(p[0], p[1]))
            .collect(),
        0,
    ))
}

unsafe fn track_mut<'a>(track: *mut EtTrack) -> Result<&'a mut EtTrack, EtStatus> {
    unsafe { track.as_mut() }.ok_or_else(|| null("track"))
}

fn apply(track: &mut EtTrack, result: elliptrack::Result<TrackState>) -> Result<(), EtStatus> {
    track.state = result.map_err(fail)?;
    Ok(())
}

/// Creates a track from `state`. Covariances must be SPD and both semi-axes
/// positive. The handle must be released with [`et_track_free`].
///
/// # Safety
/// `state` must point to a valid `EtTrackState`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_track_new(
    state: *const EtTrackState,
    out: *mut *mut EtTrack,
) -> EtStatus {
    guard(|| {
        let s = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kinematic = GaussianState::new(
            Vector6::from_row_slice(&s.kinematic_mean),
            matrix::<6>(&s.kinematic_cov),
        );
        let shape = GaussianState::new(
            Vector3::from_row_slice(&s.shape_mean),
            matrix::<3>(&s.shape_cov),
        );
        let state = kinematic
            .and_then(|k| TrackState::new(k, shape?))
            .map_err(fail)?;
        unsafe { *out = Box::into_raw(Box::new(EtTrack { state })) };
        Ok(())
    })
}

/// Releases a handle from [`et_track_new`]. Null is ignored.
///
/// # Safety
/// `track` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn et_track_free(track: *mut EtTrack) {
    if !track.is_null() {
        drop(unsafe { Box::from_raw(track) });
    }
}

/// Copies the current estimate into `out`.
///
/// # Safety
/// `track` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_track_get_state(
    track: *const EtTrack,
    out: *mut EtTrackState,
) -> EtStatus {
    guard(|| {
        let t = unsafe { track.as_ref() }.ok_or_else(|| null("track"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let s = &t.state;
        *out = EtTrackState {
            kinematic_mean: s.kinematic.mean.into(),
            kinematic_cov: row_major::<6, 36>(&s.kinematic.cov),
            shape_mean: s.shape.mean.into(),
            shape_cov: row_major::<3, 9>(&s.shape.cov),
        };
        Ok(())
    })
}

/// Constant-acceleration prediction over `dt` seconds with white jerk of
/// spectral density `jerk_psd`; `shape_process_noise` is a row-major 3x3.
///
/// # Safety
/// `track` must be a live handle; `shape_process_noise` must point to 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn et_track_predict(
    track: *mut EtTrack,
    dt: f64,
    jerk_psd: f64,
    shape_process_noise: *const f64,
) -> EtStatus {
    guard(|| {
        let t = unsafe { track_mut(track) }?;
        if shape_process_noise.is_null() {
            return Err(null("shape_process_noise"));
        }
        let q = unsafe { slice::from_raw_parts(shape_process_noise, 9) };
        let cfg = MotionConfig {
            dt,
            jerk_psd,
            shape_process_noise: Matrix3::from_row_slice(q),
        };
        cfg.validate().map_err(fail)?;
        t.state = predict(&t.state, &cfg);
        Ok(())
    })
}

/// Sequential update with `count` measurements stored as `x0, y0, x1, y1, ...`.
///
/// # Safety
/// `track` must be a live handle, `xy` must point to `2 * count` doubles
/// (may be null when `count` is 0) and `noise` must be valid.
#[no_mangle]
pub unsafe extern "C" fn et_track_update_ekf_star(
    track: *mut EtTrack,
    xy: *const f64,
    count: usize,
    noise: *const EtNoise,
) -> EtStatus {
    guard(|| {
        let t = unsafe { track_mut(track) }?;
        let (batch, noise) = unsafe { (batch_from(xy, count)?, noise_from(noise)?) };
        let result = sequential_update(&t.state, &batch, &noise);
        apply(t, result)
    })
}

/// Posterior-centered batch update followed by the shape covariance clamp.
///
/// # Safety
/// As [`et_track_update_ekf_star`].
#[no_mangle]
pub unsafe extern "C" fn et_track_update_eif_yl(
    track: *mut EtTrack,
    xy: *const f64,
    count: usize,
    noise: *const EtNoise,
    clamp_factor: f64,
) -> EtStatus {
    guard(|| {
        let t = unsafe { track_mut(track) }?;
        let (batch, noise) = unsafe { (batch_from(xy, count)?, noise_from(noise)?) };
        let cfg = BatchUpdateConfig {
            clamp_factor,
            ..BatchUpdateConfig::posterior_centered()
        };
        let result = batch_update_yl(&t.state, &batch, &noise, &cfg);
        apply(t, result)
    })
}

/// Prior-centered batch update in `chunk_count` contiguous chunks; 0 means
/// one chunk per measurement.
///
/// # Safety
/// As [`et_track_update_ekf_star`].
#[no_mangle]
pub unsafe extern "C" fn et_track_update_eif_y0(
    track: *mut EtTrack,
    xy: *const f64,
    count: usize,
    noise: *const EtNoise,
    chunk_count: usize,
) -> EtStatus {
    guard(|| {
        let t = unsafe { track_mut(track) }?;
        let (batch, noise) = unsafe { (batch_from(xy, count)?, noise_from(noise)?) };
        let chunks = match chunk_count {
            0 => ChunkCount::PerMeasurement,
            u => ChunkCount::Fixed(u),
        };
        let result = batch_update_y0(
            &t.state,
            &batch,
            &noise,
            &BatchUpdateConfig::prior_centered(chunks),
        );
        apply(t, result)
    })
}

/// Posterior-centered batch update with one weight in `[0, 1]` per measurement.
///
/// # Safety
/// As [`et_track_update_ekf_star`]; `weights` must point to `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn et_track_update_weighted(
    track: *mut EtTrack,
    xy: *const f64,
    weights: *const f64,
    count: usize,
    noise: *const EtNoise,
    clamp_factor: f64,
) -> EtStatus {
    guard(|| {
        let t = unsafe { track_mut(track) }?;
        let (batch, noise) = unsafe { (batch_from(xy, count)?, noise_from(noise)?) };
        let w: &[f64] = match (count, weights.is_null()) {
            (0, _) => &[],
            (_, true) => return Err(null("weights")),
            _ => unsafe { slice::from_raw_parts(weights, count) },
        };
        let cfg = BatchUpdateConfig {
            clamp_factor,
            ..BatchUpdateConfig::posterior_centered()
        };
        let result = weighted_batch_update_yl(&t.state, &batch, w, &noise, &cfg);
        apply(t, result)
    })
}

/// Caps the semi-axis variances at `(factor * l)^2`.
///
/// # Safety
/// `track` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn et_track_clamp_shape(track: *mut EtTrack, factor: f64) -> EtStatus {
    guard(|| {
        let t = unsafe { track_mut(track) }?;
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(invalid("clamp factor must lie in (0, 1]"));
        }
        t.state = clamp_shape_covariance(&t.state, factor);
        Ok(())
    })
}

/// Gaussian Wasserstein distance between two ellipses given by center and
/// row-major 2x2 SPD extent matrix.
///
/// # Safety
/// Centers must point to 2 doubles, extents to 4, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_gw_distance(
    center_a: *const f64,
    extent_a: *const f64,
    center_b: *const f64,
    extent_b: *const f64,
    out: *mut f64,
) -> EtStatus {
    guard(|| {
        let ptrs = [center_a, extent_a, center_b, extent_b];
        if ptrs.iter().any(|p| p.is_null()) || out.is_null() {
            return Err(null("argument"));
        }
        let ellipse = |c: *const f64, e: *const f64| unsafe {
            Ellipse {
                center: Vector2::from_row_slice(slice::from_raw_parts(c, 2)),
                sigma: Matrix2::from_row_slice(slice::from_raw_parts(e, 4)),
            }
        };
        let d = gw_distance(&ellipse(center_a, extent_a), &ellipse(center_b, extent_b))
            .map_err(fail)?;
        unsafe { *out = d };
        Ok(())
    })
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn et_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
