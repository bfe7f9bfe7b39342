//! Sequential measurement-by-measurement update (MEM-EKF*): for every
//! measurement a kinematic Kalman step, then a shape Kalman step on the
//! quadratic pseudo-measurement. The shape step uses the kinematic mean and
//! covariance from *before* that measurement's kinematic step.

use nalgebra::Vector2;

use crate::error::Result;
use crate::filters::{kalman_update, LinearMeasurementModel};
use crate::linalg::{spd_inverse, symmetrize};
use crate::mem::{
    pseudo_covariance, pseudo_expectation, pseudo_outcome, MemNoiseConfig, ShapeLinearization,
};
use crate::metrics::gw_distance;
use crate::track::{position_projection, MeasurementBatch, TrackState};

pub(crate) fn single_measurement_step(
    track: &TrackState,
    y: &Vector2<f64>,
    noise: &MemNoiseConfig,
) -> Result<TrackState> {
    let lin = ShapeLinearization::new(&track.shape_params(), &track.shape.cov, &noise.c_h);
    let y_hat = track.position();
    let spread = lin.c_i + lin.c_ii + noise.c_v;
    let c_y = symmetrize(&(track.position_cov() + spread));

    let model = LinearMeasurementModel {
        h: position_projection(),
        r: spread,
    };
    let kinematic = kalman_update(&track.kinematic, &model, y)?;

    let outcome = pseudo_outcome(y, &y_hat);
    let expected = pseudo_expectation(&c_y);
    let c_pseudo = pseudo_covariance(&c_y);
    let cross = track.shape.cov * lin.m.transpose();
    let gain = cross * spd_inverse(&c_pseudo, "pseudo-measurement covariance")?;

    let mut next = TrackState {
        kinematic,
        shape: crate::filters::GaussianState {
            mean: track.shape.mean + gain * (outcome - expected),
            cov: symmetrize(&(track.shape.cov - gain * cross.transpose())),
        },
    };
    next.floor_semi_axes();
    Ok(next)
}

/// Processes `batch` one measurement at a time in the given order.
pub fn sequential_update(
    track: &TrackState,
    batch: &MeasurementBatch,
    noise: &MemNoiseConfig,
) -> Result<TrackState> {
    batch
        .measurements
        .iter()
        .enumerate()
        .try_fold(*track, |t, (i, y)| {
            single_measurement_step(&t, y, noise).map_err(|e| e.at_measurement(i))
        })
}

/// Gaussian Wasserstein distance between the sequential update on `batch` and
/// on its reverse. A diagnostic for measurement-order dependence.
pub fn order_sensitivity_probe(
    track: &TrackState,
    batch: &MeasurementBatch,
    noise: &MemNoiseConfig,
) -> Result<f64> {
    let forward = sequential_update(track, batch, noise)?;
    let backward = sequential_update(track, &batch.reversed(), noise)?;
    gw_distance(&forward.ellipse(), &backward.ellipse())
}
