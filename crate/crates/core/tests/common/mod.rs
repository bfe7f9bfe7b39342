#![allow(dead_code)]

use elliptrack::simulation::{sample_scan, GroundTruthStep};
use elliptrack::{MeasurementBatch, MemNoiseConfig, ShapeParams, TrackState};
use nalgebra::{Matrix2, Matrix3, SMatrix, Vector2, Vector6};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_matrix<const R: usize, const C: usize, G: Rng>(rng: &mut G) -> SMatrix<f64, R, C> {
    SMatrix::from_fn(|_, _| rng.sample(StandardNormal))
}

/// Random SPD matrix with eigenvalues drawn log-uniformly from `[lo, hi]`.
pub fn random_spd<const N: usize, G: Rng>(rng: &mut G, lo: f64, hi: f64) -> SMatrix<f64, N, N> {
    let mut q = gaussian_matrix::<N, N, G>(rng);
    for j in 0..N {
        for k in 0..j {
            let proj = q.column(k).dot(&q.column(j));
            let qk = q.column(k).into_owned();
            q.column_mut(j).axpy(-proj, &qk, 1.0);
        }
        let norm = q.column(j).norm();
        q.column_mut(j).unscale_mut(norm);
    }
    let eig = SMatrix::<f64, N, 1>::from_fn(|_, _| {
        (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp()
    });
    let m = q * SMatrix::from_diagonal(&eig) * q.transpose();
    (m + m.transpose()) * 0.5
}

pub fn random_track<G: Rng>(rng: &mut G) -> TrackState {
    let r = Vector6::new(
        rng.random_range(-500.0..500.0),
        rng.random_range(-500.0..500.0),
        rng.random_range(-15.0..15.0),
        rng.random_range(-15.0..15.0),
        rng.random_range(-0.5..0.5),
        rng.random_range(-0.5..0.5),
    );
    let scales = Vector6::new(30.0, 30.0, 5.0, 5.0, 0.5, 0.5);
    let d = nalgebra::Matrix6::from_diagonal(&scales);
    let c_r = d * random_spd::<6, G>(rng, 0.2, 2.0) * d;
    let l1 = rng.random_range(60.0..200.0);
    let l2 = rng.random_range(20.0..l1);
    let p = ShapeParams::new(rng.random_range(-1.5..1.5), l1, l2);
    let dp = Matrix3::from_diagonal(&nalgebra::Vector3::new(0.15, 0.15 * l1, 0.15 * l2));
    let c_p = dp * random_spd::<3, G>(rng, 0.2, 2.0) * dp;
    TrackState::from_parts(r, c_r, p, c_p).expect("random track is valid")
}

pub fn random_noise<G: Rng>(rng: &mut G) -> MemNoiseConfig {
    MemNoiseConfig::with_sensor_noise(random_spd::<2, G>(rng, 100.0, 4000.0))
}

/// `len` measurements from an object close to the track's estimate.
pub fn random_scan<G: Rng>(
    rng: &mut G,
    track: &TrackState,
    noise: &MemNoiseConfig,
    len: usize,
) -> MeasurementBatch {
    let p = track.shape_params();
    let gt = GroundTruthStep {
        center: track.position()
            + Vector2::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)),
        orientation: p.alpha + rng.random_range(-0.1..0.1),
        semi_axes: (
            p.l1 * rng.random_range(0.9..1.1),
            p.l2 * rng.random_range(0.9..1.1),
        ),
        velocity: Vector2::new(1.0, 0.0),
    };
    sample_scan(&gt, len, &noise.c_v, rng)
}

pub fn rel(value: &[f64], reference: &[f64]) -> f64 {
    elliptrack::linalg::max_relative_diff(value, reference)
}

/// Largest relative deviation over both means and both covariances.
pub fn track_rel(a: &TrackState, b: &TrackState) -> f64 {
    [
        rel(a.kinematic.mean.as_slice(), b.kinematic.mean.as_slice()),
        rel(a.kinematic.cov.as_slice(), b.kinematic.cov.as_slice()),
        rel(a.shape.mean.as_slice(), b.shape.mean.as_slice()),
        rel(a.shape.cov.as_slice(), b.shape.cov.as_slice()),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}
