//! Multiplicative error model: shape matrix, its Jacobians, the spread
//! covariances it adds to the measurement noise, and the quadratic
//! pseudo-measurement used to observe the shape.
//!
//! Every 3-vector derived from a 2x2 second moment uses component order
//! `(xx, yy, xy)`.

use nalgebra::{Matrix2, Matrix2x3, Matrix3, Matrix3x4, RowVector2, Vector2, Vector3};

use crate::linalg::symmetrize;

/// Orientation and semi-axis lengths of an ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    /// Orientation of the first semi-axis, radians.
    pub alpha: f64,
    /// First (major, by convention) semi-axis, meters.
    pub l1: f64,
    /// Second (minor, by convention) semi-axis, meters.
    pub l2: f64,
}

impl ShapeParams {
    pub fn new(alpha: f64, l1: f64, l2: f64) -> Self {
        Self { alpha, l1, l2 }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.alpha, self.l1, self.l2)
    }

    pub fn is_valid(&self) -> bool {
        self.alpha.is_finite()
            && self.l1 > 0.0
            && self.l2 > 0.0
            && self.l1.is_finite()
            && self.l2.is_finite()
    }
}

/// Noise covariances of the measurement model `y = H r + S(p) h + v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemNoiseConfig {
    /// Covariance of the multiplicative noise `h`.
    pub c_h: Matrix2<f64>,
    /// Covariance of the additive sensor noise `v`.
    pub c_v: Matrix2<f64>,
}

impl MemNoiseConfig {
    /// Covariance of a point drawn uniformly from the filled unit disk.
    pub fn uniform_disk_c_h() -> Matrix2<f64> {
        Matrix2::identity() * 0.25
    }

    pub fn with_sensor_noise(c_v: Matrix2<f64>) -> Self {
        Self {
            c_h: Self::uniform_disk_c_h(),
            c_v,
        }
    }
}

impl Default for MemNoiseConfig {
    fn default() -> Self {
        Self::with_sensor_noise(Matrix2::new(10_000.0, 0.0, 0.0, 1_600.0))
    }
}

/// `[[l1 cos a, -l2 sin a], [l1 sin a, l2 cos a]]`.
pub fn shape_matrix(p: &ShapeParams) -> Matrix2<f64> {
    let (s, c) = p.alpha.sin_cos();
    Matrix2::new(p.l1 * c, -p.l2 * s, p.l1 * s, p.l2 * c)
}

/// Jacobians of the two rows of the shape matrix with respect to `(alpha, l1, l2)`.
/// Row `k` of `J_n` is the gradient of entry `k` of row `n` of `S`.
pub fn shape_jacobians(p: &ShapeParams) -> (Matrix2x3<f64>, Matrix2x3<f64>) {
    let (s, c) = p.alpha.sin_cos();
    let j1 = Matrix2x3::new(-p.l1 * s, c, 0.0, -p.l2 * c, 0.0, -s);
    let j2 = Matrix2x3::new(p.l1 * c, s, 0.0, -p.l2 * s, 0.0, c);
    (j1, j2)
}

fn moment_matrix_from(
    s: &Matrix2<f64>,
    j1: &Matrix2x3<f64>,
    j2: &Matrix2x3<f64>,
    c_h: &Matrix2<f64>,
) -> Matrix3<f64> {
    let s1: RowVector2<f64> = s.row(0).into();
    let s2: RowVector2<f64> = s.row(1).into();
    let r1 = (s1 * c_h * j1) * 2.0;
    let r2 = (s2 * c_h * j2) * 2.0;
    let r3 = s1 * c_h * j2 + s2 * c_h * j1;
    Matrix3::from_rows(&[r1, r2, r3])
}

/// Jacobian of the expected pseudo-measurement with respect to the shape
/// parameters (rows in `(xx, yy, xy)` order).
pub fn moment_matrix(p: &ShapeParams, c_h: &Matrix2<f64>) -> Matrix3<f64> {
    let (j1, j2) = shape_jacobians(p);
    moment_matrix_from(&shape_matrix(p), &j1, &j2, c_h)
}

fn spread_from(
    s: &Matrix2<f64>,
    j1: &Matrix2x3<f64>,
    j2: &Matrix2x3<f64>,
    c_p: &Matrix3<f64>,
    c_h: &Matrix2<f64>,
) -> (Matrix2<f64>, Matrix2<f64>) {
    let c_i = symmetrize(&(s * c_h * s.transpose()));
    let js = [j1, j2];
    let mut c_ii = Matrix2::zeros();
    for m in 0..2 {
        for n in 0..2 {
            c_ii[(m, n)] = (c_p * js[n].transpose() * c_h * js[m]).trace();
        }
    }
    (c_i, symmetrize(&c_ii))
}

/// Extent-induced (`C_I`) and shape-uncertainty-induced (`C_II`) inflation of
/// the measurement covariance.
pub fn spread_covariances(
    p: &ShapeParams,
    c_p: &Matrix3<f64>,
    c_h: &Matrix2<f64>,
) -> (Matrix2<f64>, Matrix2<f64>) {
    let (j1, j2) = shape_jacobians(p);
    spread_from(&shape_matrix(p), &j1, &j2, c_p, c_h)
}

/// Removes the duplicated off-diagonal of a Kronecker square (keeps `u1 w2`).
pub fn selection_f() -> Matrix3x4<f64> {
    Matrix3x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0)
}

/// Sibling of [`selection_f`] keeping the other off-diagonal (`u2 w1`).
pub fn selection_f_tilde() -> Matrix3x4<f64> {
    Matrix3x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0)
}

/// Quadratic pseudo-measurement `F ((y - y_hat) (x) (y - y_hat))`.
pub fn pseudo_outcome(y: &Vector2<f64>, y_hat: &Vector2<f64>) -> Vector3<f64> {
    let d = y - y_hat;
    Vector3::new(d.x * d.x, d.y * d.y, d.x * d.y)
}

/// Expected pseudo-measurement for a zero-mean deviation with covariance `c_y`.
pub fn pseudo_expectation(c_y: &Matrix2<f64>) -> Vector3<f64> {
    Vector3::new(c_y[(0, 0)], c_y[(1, 1)], c_y[(0, 1)])
}

/// Covariance of the pseudo-measurement for Gaussian deviations,
/// `F (C (x) C) (F + F~)^T`.
pub fn pseudo_covariance(c_y: &Matrix2<f64>) -> Matrix3<f64> {
    let f = selection_f();
    let sum = f + selection_f_tilde();
    symmetrize(&(f * c_y.kronecker(c_y) * sum.transpose()))
}

/// Every shape-dependent helper quantity evaluated at one linearization point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeLinearization {
    pub s: Matrix2<f64>,
    pub j1: Matrix2x3<f64>,
    pub j2: Matrix2x3<f64>,
    pub m: Matrix3<f64>,
    pub c_i: Matrix2<f64>,
    pub c_ii: Matrix2<f64>,
}

impl ShapeLinearization {
    pub fn new(p: &ShapeParams, c_p: &Matrix3<f64>, c_h: &Matrix2<f64>) -> Self {
        let s = shape_matrix(p);
        let (j1, j2) = shape_jacobians(p);
        let (c_i, c_ii) = spread_from(&s, &j1, &j2, c_p, c_h);
        let m = moment_matrix_from(&s, &j1, &j2, c_h);
        Self {
            s,
            j1,
            j2,
            m,
            c_i,
            c_ii,
        }
    }

    pub fn s1(&self) -> RowVector2<f64> {
        self.s.row(0).into()
    }

    pub fn s2(&self) -> RowVector2<f64> {
        self.s.row(1).into()
    }
}
