//! Time prediction between scans: constant acceleration driven by white-noise
//! jerk for the kinematics, random walk for the shape.

use nalgebra::{Matrix3, Matrix6};

use crate::error::{Error, Result};
use crate::linalg::symmetrize;
use crate::track::TrackState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionConfig {
    /// Scan interval, seconds.
    pub dt: f64,
    /// Power spectral density of the jerk, (m/s^3)^2 s.
    pub jerk_psd: f64,
    /// Added to the shape covariance once per prediction.
    pub shape_process_noise: Matrix3<f64>,
}

impl MotionConfig {
    pub fn default_shape_process_noise() -> Matrix3<f64> {
        Matrix3::from_diagonal(&nalgebra::Vector3::new(0.01, 1.0, 1.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.jerk_psd >= 0.0 && self.jerk_psd.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "jerk PSD must be non-negative, got {}",
                self.jerk_psd
            )));
        }
        let q = &self.shape_process_noise;
        if (q - q.transpose()).amax() > 1e-12 * q.amax()
            || nalgebra::SymmetricEigen::new(*q).eigenvalues.min() < 0.0
        {
            return Err(Error::InvalidInput(
                "shape process noise must be symmetric PSD".into(),
            ));
        }
        Ok(())
    }
}

/// Constant-acceleration transition for the state order `(x, y, vx, vy, ax, ay)`.
pub fn transition(dt: f64) -> Matrix6<f64> {
    let block = Matrix3::new(1.0, dt, 0.5 * dt * dt, 0.0, 1.0, dt, 0.0, 0.0, 1.0);
    interleave_axes(&block)
}

/// Discretized white-noise-jerk process noise for the same state order.
pub fn process_noise(dt: f64, jerk_psd: f64) -> Matrix6<f64> {
    let (d2, d3) = (dt * dt, dt * dt * dt);
    let (d4, d5) = (d3 * dt, d3 * d2);
    let block = Matrix3::new(
        d5 / 20.0,
        d4 / 8.0,
        d3 / 6.0, //
        d4 / 8.0,
        d3 / 3.0,
        d2 / 2.0, //
        d3 / 6.0,
        d2 / 2.0,
        dt,
    ) * jerk_psd;
    interleave_axes(&block)
}

/// Places a per-axis 3x3 (position, velocity, acceleration) block on both axes.
fn interleave_axes(block: &Matrix3<f64>) -> Matrix6<f64> {
    let mut out = Matrix6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            for axis in 0..2 {
                out[(2 * i + axis, 2 * j + axis)] = block[(i, j)];
            }
        }
    }
    out
}

/// Shape covariance clamping is left to the caller.
pub fn predict(track: &TrackState, cfg: &MotionConfig) -> TrackState {
    let a = transition(cfg.dt);
    let mut out = *track;
    out.kinematic.mean = a * track.kinematic.mean;
    out.kinematic.cov = symmetrize(
        &(a * track.kinematic.cov * a.transpose() + process_noise(cfg.dt, cfg.jerk_psd)),
    );
    out.shape.cov = symmetrize(&(track.shape.cov + cfg.shape_process_noise));
    out
}
