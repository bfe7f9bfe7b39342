//! Batch information-filter updates for the multiplicative error model.
//!
//! Both variants linearize the shape once per batch (or chunk) and then add up
//! measurement and pseudo-measurement contributions in information form:
//!
//! * [`batch_update_yl`] centers the pseudo-measurements on the *posterior*
//!   kinematic mean and uses the posterior kinematic covariance for their
//!   moments. Its output does not depend on measurement order.
//! * [`batch_update_y0`] centers them on the *prior* kinematic estimate and
//!   splits the scan into `U` contiguous chunks, relinearizing between chunks.
//!   With one measurement per chunk it reproduces the sequential update.

use log::warn;
use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::filters::GaussianState;
use crate::linalg::{pairwise_sum, spd_inverse, symmetrize};
use crate::mem::{
    pseudo_covariance, pseudo_expectation, pseudo_outcome, MemNoiseConfig, ShapeLinearization,
};
use crate::track::{position_projection, MeasurementBatch, TrackState};

/// Default bound on the semi-axis standard deviations relative to the semi-axes.
pub const DEFAULT_CLAMP_FACTOR: f64 = 0.4;

/// Eigenvalue floor of the pseudo-measurement noise, relative to `tr(C^Y)`.
pub const PSEUDO_NOISE_EIGEN_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchVariant {
    /// Pseudo-measurements linearized at the posterior kinematic estimate.
    PosteriorCentered,
    /// Pseudo-measurements linearized at the prior kinematic estimate, chunked.
    PriorCentered,
}

/// How many sequential sub-batches the prior-centered variant uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkCount {
    Fixed(usize),
    /// One chunk per measurement (`U = L`).
    PerMeasurement,
}

impl ChunkCount {
    /// Effective chunk count for a scan of `len` measurements.
    pub fn resolve(self, len: usize) -> usize {
        match self {
            ChunkCount::Fixed(u) => u.min(len),
            ChunkCount::PerMeasurement => len,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchUpdateConfig {
    pub variant: BatchVariant,
    /// Only read by [`BatchVariant::PriorCentered`].
    pub chunk_count: ChunkCount,
    pub clamp_factor: f64,
}

impl BatchUpdateConfig {
    pub fn posterior_centered() -> Self {
        Self {
            variant: BatchVariant::PosteriorCentered,
            chunk_count: ChunkCount::Fixed(1),
            clamp_factor: DEFAULT_CLAMP_FACTOR,
        }
    }

    pub fn prior_centered(chunk_count: ChunkCount) -> Self {
        Self {
            variant: BatchVariant::PriorCentered,
            chunk_count,
            clamp_factor: DEFAULT_CLAMP_FACTOR,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.clamp_factor > 0.0 && self.clamp_factor <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "clamp factor must lie in (0, 1], got {}",
                self.clamp_factor
            )));
        }
        if self.chunk_count == ChunkCount::Fixed(0) {
            return Err(Error::InvalidInput("chunk count must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for BatchUpdateConfig {
    fn default() -> Self {
        Self::posterior_centered()
    }
}

/// Dispatches on `cfg.variant`.
pub fn batch_update(
    track: &TrackState,
    batch: &MeasurementBatch,
    noise: &MemNoiseConfig,
    cfg: &BatchUpdateConfig,
) -> Result<TrackState> {
    match cfg.variant {
        BatchVariant::PosteriorCentered => batch_update_yl(track, batch, noise, cfg),
        BatchVariant::PriorCentered => batch_update_y0(track, batch, noise, cfg),
    }
}

/// Single-step batch update with pseudo-measurements centered on the posterior
/// kinematic mean. The shape covariance is clamped afterwards.
pub fn batch_update_yl(
    track: &TrackState,
    batch: &MeasurementBatch,
    noise: &MemNoiseConfig,
    cfg: &BatchUpdateConfig,
) -> Result<TrackState> {
    cfg.validate()?;
    posterior_centered(track, &batch.measurements, None, noise, cfg.clamp_factor)
}

/// [`batch_update_yl`] with every measurement's contribution scaled by a weight
/// in `[0, 1]` (e.g. a marginal association probability). The measurement count
/// is replaced by the weight total everywhere.
pub fn weighted_batch_update_yl(
    track: &TrackState,
    batch: &MeasurementBatch,
    weights: &[f64],
    noise: &MemNoiseConfig,
    cfg: &BatchUpdateConfig,
) -> Result<TrackState> {
    cfg.validate()?;
    if weights.len() != batch.len() {
        return Err(Error::InvalidInput(format!(
            "{} weights for {} measurements",
            weights.len(),
            batch.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(Error::InvalidInput(format!("weight {w} outside [0, 1]")));
    }
    posterior_centered(
        track,
        &batch.measurements,
        Some(weights),
        noise,
        cfg.clamp_factor,
    )
}

/// Chunked batch update with pseudo-measurements centered on the kinematic
/// estimate at the start of each chunk.
pub fn batch_update_y0(
    track: &TrackState,
    batch: &MeasurementBatch,
    noise: &MemNoiseConfig,
    cfg: &BatchUpdateConfig,
) -> Result<TrackState> {
    cfg.validate()?;
    let chunks = chunk_sizes(batch.len(), cfg.chunk_count.resolve(batch.len()));
    let mut state = *track;
    let mut start = 0;
    for (index, size) in chunks.into_iter().enumerate() {
        let chunk = &batch.measurements[start..start + size];
        state = prior_centered_chunk(&state, chunk, noise).map_err(|e| e.at_chunk(index))?;
        start += size;
    }
    Ok(state)
}

/// Sizes of `chunks` contiguous chunks covering `len` items; sizes differ by
/// at most one with the larger chunks first.
pub fn chunk_sizes(len: usize, chunks: usize) -> Vec<usize> {
    if len == 0 || chunks == 0 {
        return Vec::new();
    }
    let chunks = chunks.min(len);
    let (base, extra) = (len / chunks, len % chunks);
    (0..chunks).map(|i| base + usize::from(i < extra)).collect()
}

/// Scales row/column `k` of the shape covariance so that the variance of each
/// semi-axis stays below `(factor * l_k)^2`; correlation coefficients are kept.
pub fn clamp_shape_covariance(track: &TrackState, clamp_factor: f64) -> TrackState {
    let mut out = *track;
    for k in 1..3 {
        let bound = (clamp_factor * out.shape.mean[k]).powi(2);
        let var = out.shape.cov[(k, k)];
        if var > bound {
            let scale = (bound / var).sqrt();
            for j in 0..3 {
                if j != k {
                    out.shape.cov[(k, j)] *= scale;
                    out.shape.cov[(j, k)] *= scale;
                }
            }
            out.shape.cov[(k, k)] = bound;
        }
    }
    out
}

fn weighted_sum<F>(ys: &[Vector2<f64>], weights: Option<&[f64]>, f: F) -> Vector3<f64>
where
    F: Fn(&Vector2<f64>) -> Vector3<f64> + Copy,
{
    match weights {
        None => pairwise_sum(ys, f),
        Some(w) => {
            let pairs: Vec<(&Vector2<f64>, f64)> = ys.iter().zip(w.iter().copied()).collect();
            pairwise_sum(&pairs, |(y, w)| f(y) * *w)
        }
    }
}

fn weighted_position_sum(ys: &[Vector2<f64>], weights: Option<&[f64]>) -> Vector2<f64> {
    match weights {
        None => pairwise_sum(ys, |y| *y),
        Some(w) => {
            let pairs: Vec<(&Vector2<f64>, f64)> = ys.iter().zip(w.iter().copied()).collect();
            pairwise_sum(&pairs, |(y, w)| **y * *w)
        }
    }
}

/// Information-form kinematic update from `total` measurements summing to
/// `sum`, all with noise `spread`.
fn kinematic_information_step(
    prior: &GaussianState<6>,
    spread: &Matrix2<f64>,
    sum: &Vector2<f64>,
    total: f64,
) -> Result<GaussianState<6>> {
    let h = position_projection();
    let prior_info = spd_inverse(&prior.cov, "prior kinematic covariance")?;
    let spread_info = spd_inverse(spread, "kinematic measurement noise C^s")?;
    let ht_sinv = h.transpose() * spread_info;
    let info_vector = prior_info * prior.mean + ht_sinv * sum;
    let info_matrix = symmetrize(&(prior_info + ht_sinv * h * total));
    let cov = spd_inverse(&info_matrix, "posterior kinematic information")?;
    Ok(GaussianState {
        mean: cov * info_vector,
        cov,
    })
}

/// Noise of the linearized pseudo-measurement model, `C^Y - M C^p M^T`,
/// floored to stay positive-definite.
fn pseudo_noise(
    c_pseudo: &Matrix3<f64>,
    m: &Matrix3<f64>,
    c_p: &Matrix3<f64>,
) -> Result<Matrix3<f64>> {
    let scale = c_pseudo.trace();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::DegenerateLinearization(
            "pseudo-measurement covariance C^Y",
        ));
    }
    let c_t = symmetrize(&(c_pseudo - m * c_p * m.transpose()));
    let floor = PSEUDO_NOISE_EIGEN_FLOOR * scale;
    let eig = SymmetricEigen::new(c_t);
    if eig.eigenvalues.min() >= floor {
        return Ok(c_t);
    }
    warn!(
        "degenerate linearization: pseudo-measurement noise eigenvalue {:.3e} floored to {:.3e}",
        eig.eigenvalues.min(),
        floor
    );
    let floored = eig.eigenvalues.map(|v| v.max(floor));
    Ok(symmetrize(
        &(eig.eigenvectors * Matrix3::from_diagonal(&floored) * eig.eigenvectors.transpose()),
    ))
}

/// Information-form shape update from pseudo-measurements summing to `sum`
/// (weight total `total`), linearized by `lin` with deviation covariance `c_y`.
fn shape_information_step(
    prior: &GaussianState<3>,
    lin: &ShapeLinearization,
    c_y: &Matrix2<f64>,
    sum: &Vector3<f64>,
    total: f64,
) -> Result<GaussianState<3>> {
    let c_pseudo = pseudo_covariance(c_y);
    let expected = pseudo_expectation(c_y);
    let c_t = pseudo_noise(&c_pseudo, &lin.m, &prior.cov)?;
    let noise_info = spd_inverse(&c_t, "pseudo-measurement noise C^t")?;
    let prior_info = spd_inverse(&prior.cov, "prior shape covariance")?;
    let mt_tinv = lin.m.transpose() * noise_info;
    let innovation = sum - expected * total + lin.m * prior.mean * total;
    let info_vector = prior_info * prior.mean + mt_tinv * innovation;
    let info_matrix = symmetrize(&(prior_info + mt_tinv * lin.m * total));
    let cov = spd_inverse(&info_matrix, "posterior shape information")?;
    Ok(GaussianState {
        mean: cov * info_vector,
        cov,
    })
}

fn posterior_centered(
    track: &TrackState,
    ys: &[Vector2<f64>],
    weights: Option<&[f64]>,
    noise: &MemNoiseConfig,
    clamp_factor: f64,
) -> Result<TrackState> {
    let total = match weights {
        Some(w) => w.iter().sum::<f64>(),
        None => ys.len() as f64,
    };
    if ys.is_empty() || total == 0.0 {
        return Ok(*track);
    }
    let lin = ShapeLinearization::new(&track.shape_params(), &track.shape.cov, &noise.c_h);
    let spread = symmetrize(&(lin.c_i + lin.c_ii + noise.c_v));

    let kinematic = kinematic_information_step(
        &track.kinematic,
        &spread,
        &weighted_position_sum(ys, weights),
        total,
    )?;

    let y_hat = Vector2::new(kinematic.mean[0], kinematic.mean[1]);
    let c_y = symmetrize(&(kinematic.cov.fixed_view::<2, 2>(0, 0) + spread));
    let pseudo_sum = weighted_sum(ys, weights, |y| pseudo_outcome(y, &y_hat));
    let shape = shape_information_step(&track.shape, &lin, &c_y, &pseudo_sum, total)?;

    let mut out = TrackState { kinematic, shape };
    out.floor_semi_axes();
    Ok(clamp_shape_covariance(&out, clamp_factor))
}

fn prior_centered_chunk(
    track: &TrackState,
    ys: &[Vector2<f64>],
    noise: &MemNoiseConfig,
) -> Result<TrackState> {
    let total = ys.len() as f64;
    let lin = ShapeLinearization::new(&track.shape_params(), &track.shape.cov, &noise.c_h);
    let spread = symmetrize(&(lin.c_i + lin.c_ii + noise.c_v));

    let kinematic =
        kinematic_information_step(&track.kinematic, &spread, &pairwise_sum(ys, |y| *y), total)?;

    let y_hat = track.position();
    let c_y = symmetrize(&(track.position_cov() + spread));
    let pseudo_sum = pairwise_sum(ys, |y| pseudo_outcome(y, &y_hat));
    let shape = shape_information_step(&track.shape, &lin, &c_y, &pseudo_sum, total)?;

    let mut out = TrackState { kinematic, shape };
    out.floor_semi_axes();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mem::ShapeParams;
    use nalgebra::{Matrix6, Vector6};

    fn prior() -> TrackState {
        TrackState::from_parts(
            Vector6::new(0.0, 0.0, 5.0, 0.0, 0.0, 0.0),
            Matrix6::from_diagonal(&Vector6::new(100.0, 100.0, 25.0, 25.0, 1.0, 1.0)),
            ShapeParams::new(0.0, 170.0, 40.0),
            Matrix3::from_diagonal(&Vector3::new(0.02, 400.0, 100.0)),
        )
        .unwrap()
    }

    fn scan() -> MeasurementBatch {
        let pts = [
            (10.0, 5.0),
            (-80.0, 12.0),
            (120.0, -20.0),
            (40.0, 30.0),
            (-150.0, -8.0),
            (60.0, 3.0),
        ];
        MeasurementBatch::new(pts.iter().map(|&(x, y)| Vector2::new(x, y)).collect(), 0)
    }

    #[test]
    fn chunk_partition() {
        assert_eq!(chunk_sizes(10, 4), vec![3, 3, 2, 2]);
        assert_eq!(chunk_sizes(3, 5), vec![1, 1, 1]);
        assert_eq!(chunk_sizes(7, 1), vec![7]);
        assert!(chunk_sizes(0, 3).is_empty());
        assert_eq!(ChunkCount::PerMeasurement.resolve(9), 9);
        assert_eq!(ChunkCount::Fixed(12).resolve(9), 9);
    }

    #[test]
    fn empty_batches_leave_track_unchanged() {
        let empty = MeasurementBatch::default();
        let noise = MemNoiseConfig::default();
        assert_eq!(
            batch_update_yl(&prior(), &empty, &noise, &BatchUpdateConfig::default()).unwrap(),
            prior()
        );
        let cfg = BatchUpdateConfig::prior_centered(ChunkCount::Fixed(1));
        assert_eq!(
            batch_update_y0(&prior(), &empty, &noise, &cfg).unwrap(),
            prior()
        );
    }

    #[test]
    fn clamp_examples() {
        let t = prior();
        assert_eq!(clamp_shape_covariance(&t, 0.4), t);

        let mut loose = prior();
        loose.shape.cov = Matrix3::new(0.02, 2.0, 0.1, 2.0, 10_000.0, 30.0, 0.1, 30.0, 100.0);
        let clamped = clamp_shape_covariance(&loose, 0.4);
        assert_eq!(clamped.shape.cov[(1, 1)], 4624.0);
        let corr =
            |c: &Matrix3<f64>, i: usize, j: usize| c[(i, j)] / (c[(i, i)] * c[(j, j)]).sqrt();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert!((corr(&clamped.shape.cov, i, j) - corr(&loose.shape.cov, i, j)).abs() < 1e-12);
        }
        assert!(crate::linalg::is_spd(&clamped.shape.cov));
    }

    #[test]
    fn weights_reduce_to_unweighted() {
        let noise = MemNoiseConfig::default();
        let cfg = BatchUpdateConfig::default();
        let plain = batch_update_yl(&prior(), &scan(), &noise, &cfg).unwrap();
        let ones = vec![1.0; scan().len()];
        let weighted = weighted_batch_update_yl(&prior(), &scan(), &ones, &noise, &cfg).unwrap();
        assert_eq!(plain, weighted);

        let zeros = vec![0.0; scan().len()];
        assert_eq!(
            weighted_batch_update_yl(&prior(), &scan(), &zeros, &noise, &cfg).unwrap(),
            prior()
        );
    }

    #[test]
    fn split_weights_match_single_copy() {
        let noise = MemNoiseConfig::default();
        let cfg = BatchUpdateConfig::default();
        let y = Vector2::new(35.0, -12.0);
        let single = weighted_batch_update_yl(
            &prior(),
            &MeasurementBatch::new(vec![y], 0),
            &[1.0],
            &noise,
            &cfg,
        )
        .unwrap();
        let doubled = weighted_batch_update_yl(
            &prior(),
            &MeasurementBatch::new(vec![y, y], 0),
            &[0.5, 0.5],
            &noise,
            &cfg,
        )
        .unwrap();
        let diff = crate::linalg::max_relative_diff;
        assert!(
            diff(
                doubled.kinematic.mean.as_slice(),
                single.kinematic.mean.as_slice()
            ) < 1e-12
        );
        assert!(diff(doubled.shape.mean.as_slice(), single.shape.mean.as_slice()) < 1e-12);
        assert!(diff(doubled.shape.cov.as_slice(), single.shape.cov.as_slice()) < 1e-12);
    }

    #[test]
    fn invalid_weights_and_config_rejected() {
        let noise = MemNoiseConfig::default();
        let cfg = BatchUpdateConfig::default();
        let mut w = vec![1.0; scan().len()];
        w[2] = -0.1;
        assert!(matches!(
            weighted_batch_update_yl(&prior(), &scan(), &w, &noise, &cfg),
            Err(Error::InvalidInput(_))
        ));
        assert!(weighted_batch_update_yl(&prior(), &scan(), &[1.0], &noise, &cfg).is_err());
        let bad = BatchUpdateConfig {
            clamp_factor: 0.0,
            ..cfg
        };
        assert!(batch_update_yl(&prior(), &scan(), &noise, &bad).is_err());
        let zero_chunks = BatchUpdateConfig::prior_centered(ChunkCount::Fixed(0));
        assert!(batch_update_y0(&prior(), &scan(), &noise, &zero_chunks).is_err());
    }

    #[test]
    fn pseudo_noise_floor_repairs_indefinite() {
        let c_pseudo = Matrix3::identity();
        let m = Matrix3::identity();
        let c_p = Matrix3::from_diagonal(&Vector3::new(2.0, 0.5, 0.5));
        let repaired = pseudo_noise(&c_pseudo, &m, &c_p).unwrap();
        let eig = SymmetricEigen::new(repaired).eigenvalues;
        assert!(eig.min() >= PSEUDO_NOISE_EIGEN_FLOOR * 3.0 * (1.0 - 1e-9));
        assert!(pseudo_noise(&Matrix3::zeros(), &m, &c_p).is_err());
    }

    #[test]
    fn information_never_decreases() {
        let noise = MemNoiseConfig::default();
        let post =
            batch_update_yl(&prior(), &scan(), &noise, &BatchUpdateConfig::default()).unwrap();
        let gain_r = spd_inverse(&post.kinematic.cov, "r").unwrap()
            - spd_inverse(&prior().kinematic.cov, "r").unwrap();
        assert!(SymmetricEigen::new(symmetrize(&gain_r)).eigenvalues.min() > -1e-9);
        let gain_p = spd_inverse(&post.shape.cov, "p").unwrap()
            - spd_inverse(&prior().shape.cov, "p").unwrap();
        assert!(SymmetricEigen::new(symmetrize(&gain_p)).eigenvalues.min() > -1e-9 * gain_p.amax());
    }
}
