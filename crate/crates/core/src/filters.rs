//! Linear-Gaussian estimation primitives: the sequential Kalman update, the
//! moment/information conversions, and the batch information update.
//!
//! Dimensions are const generics, so a state/measurement size mismatch is a
//! compile error rather than a runtime one.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::linalg::{pairwise_sum, spd_inverse, symmetrize};

/// Mean and covariance of a Gaussian estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState<const N: usize> {
    pub mean: SVector<f64, N>,
    pub cov: SMatrix<f64, N, N>,
}

impl<const N: usize> GaussianState<N> {
    /// Validating constructor: `cov` must be symmetric (relative 1e-9) and positive-definite.
    pub fn new(mean: SVector<f64, N>, cov: SMatrix<f64, N, N>) -> Result<Self> {
        let scale = cov.amax();
        if !mean.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(
                "state mean has non-finite entries".into(),
            ));
        }
        if (cov - cov.transpose()).amax() > 1e-9 * scale {
            return Err(Error::InvalidInput("covariance is not symmetric".into()));
        }
        spd_inverse(&cov, "covariance")?;
        Ok(Self { mean, cov })
    }
}

/// Information-form parameters `(xi, lambda) = (C^-1 x, C^-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationState<const N: usize> {
    pub info_vector: SVector<f64, N>,
    pub info_matrix: SMatrix<f64, N, N>,
}

/// `y = H x + v`, `v ~ N(0, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMeasurementModel<const M: usize, const N: usize> {
    pub h: SMatrix<f64, M, N>,
    pub r: SMatrix<f64, M, M>,
}

impl<const M: usize, const N: usize> LinearMeasurementModel<M, N> {
    pub fn new(h: SMatrix<f64, M, N>, r: SMatrix<f64, M, M>) -> Result<Self> {
        spd_inverse(&r, "measurement noise covariance")?;
        Ok(Self { h, r })
    }
}

/// One Kalman measurement update.
pub fn kalman_update<const M: usize, const N: usize>(
    state: &GaussianState<N>,
    model: &LinearMeasurementModel<M, N>,
    y: &SVector<f64, M>,
) -> Result<GaussianState<N>> {
    let cross = state.cov * model.h.transpose();
    let innovation_cov = symmetrize(&(model.r + model.h * cross));
    let innovation_inv = spd_inverse(&innovation_cov, "innovation covariance")?;
    let gain = cross * innovation_inv;
    let mean = state.mean + gain * (y - model.h * state.mean);
    let cov = symmetrize(&(state.cov - gain * cross.transpose()));
    Ok(GaussianState { mean, cov })
}

pub fn to_information<const N: usize>(state: &GaussianState<N>) -> Result<InformationState<N>> {
    let info_matrix = spd_inverse(&state.cov, "covariance")?;
    Ok(InformationState {
        info_vector: info_matrix * state.mean,
        info_matrix,
    })
}

pub fn from_information<const N: usize>(info: &InformationState<N>) -> Result<GaussianState<N>> {
    let cov = spd_inverse(&info.info_matrix, "information matrix")?;
    Ok(GaussianState {
        mean: cov * info.info_vector,
        cov,
    })
}

/// Incorporates all of `batch` in a single information-form step. Equivalent
/// to folding [`kalman_update`] over the batch; an empty batch returns `state`.
pub fn information_batch_update<const M: usize, const N: usize>(
    state: &GaussianState<N>,
    model: &LinearMeasurementModel<M, N>,
    batch: &[SVector<f64, M>],
) -> Result<GaussianState<N>> {
    if batch.is_empty() {
        return Ok(*state);
    }
    let prior = to_information(state)?;
    let noise_info = spd_inverse(&model.r, "measurement noise covariance")?;
    let ht_rinv = model.h.transpose() * noise_info;
    let sum = pairwise_sum(batch, |y| *y);
    let posterior = InformationState {
        info_vector: prior.info_vector + ht_rinv * sum,
        info_matrix: symmetrize(&(prior.info_matrix + ht_rinv * model.h * batch.len() as f64)),
    };
    from_information(&posterior)
}
