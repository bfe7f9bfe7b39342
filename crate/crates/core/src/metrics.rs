//! Gaussian Wasserstein distance between ellipses.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::linalg::is_spd;
use crate::mem::{shape_matrix, ShapeParams};

/// An ellipse viewed as a Gaussian: center and extent matrix `S S^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: Vector2<f64>,
    pub sigma: Matrix2<f64>,
}

impl Ellipse {
    pub fn from_shape(center: Vector2<f64>, p: &ShapeParams) -> Self {
        Self {
            center,
            sigma: extent_matrix(p),
        }
    }
}

pub fn extent_matrix(p: &ShapeParams) -> Matrix2<f64> {
    let s = shape_matrix(p);
    s * s.transpose()
}

/// Principal square root of a 2x2 SPD matrix:
/// `sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A))`.
pub fn sqrt_spd2(a: &Matrix2<f64>) -> Matrix2<f64> {
    let root_det = a.determinant().max(0.0).sqrt();
    let t = (a.trace() + 2.0 * root_det).sqrt();
    (a + Matrix2::identity() * root_det) / t
}

/// `tr(A) + tr(B) - 2 tr(sqrt(sqrt(A) B sqrt(A)))` for 2x2 SPD matrices.
///
/// With `X = tr A + tr B` and `Y = 2 tr(...)`, evaluated as `(X^2 - Y^2) / (X + Y)`
/// where the numerator is expanded into terms that vanish individually when
/// `A = B`, so identical inputs give exactly zero.
fn shape_term(a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    let (a11, a12, a22) = (a[(0, 0)], 0.5 * (a[(0, 1)] + a[(1, 0)]), a[(1, 1)]);
    let (b11, b12, b22) = (b[(0, 0)], 0.5 * (b[(0, 1)] + b[(1, 0)]), b[(1, 1)]);
    let det_a = (a11 * a22 - a12 * a12).max(0.0);
    let det_b = (b11 * b22 - b12 * b12).max(0.0);
    let root_det_ab = (det_a * det_b).sqrt();
    let frobenius = (a11 - b11).powi(2) + 2.0 * (a12 - b12).powi(2) + (a22 - b22).powi(2);
    let det_gap = det_a.sqrt() - det_b.sqrt();
    let cross = 0.5 * (a11 * b22 + a22 * b11) - a12 * b12 - root_det_ab;
    let numerator = frobenius + 2.0 * det_gap * det_gap + 4.0 * cross;
    let trace_ab = a11 * b11 + 2.0 * a12 * b12 + a22 * b22;
    let denominator = a11 + a22 + b11 + b22 + 2.0 * (trace_ab + 2.0 * root_det_ab).max(0.0).sqrt();
    if denominator <= 0.0 {
        return 0.0;
    }
    (numerator / denominator).max(0.0)
}

/// Gaussian Wasserstein distance in meters.
pub fn gw_distance(a: &Ellipse, b: &Ellipse) -> Result<f64> {
    if !is_spd(&a.sigma) || !is_spd(&b.sigma) {
        return Err(Error::InvalidInput(
            "ellipse extent matrix must be SPD".into(),
        ));
    }
    Ok(((a.center - b.center).norm_squared() + shape_term(&a.sigma, &b.sigma)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn circle(r2: f64) -> Ellipse {
        Ellipse {
            center: Vector2::zeros(),
            sigma: Matrix2::identity() * r2,
        }
    }

    #[test]
    fn extent_examples() {
        assert!(
            (extent_matrix(&ShapeParams::new(1.234, 1.0, 1.0)) - Matrix2::identity()).amax()
                < 1e-15
        );
        assert_eq!(
            extent_matrix(&ShapeParams::new(0.0, 170.0, 40.0)),
            Matrix2::new(28_900.0, 0.0, 0.0, 1_600.0)
        );
        let e = extent_matrix(&ShapeParams::new(FRAC_PI_2, 170.0, 40.0));
        assert!((e - Matrix2::new(1_600.0, 0.0, 0.0, 28_900.0)).amax() < 1e-9);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Matrix2::new(5.0, 2.0, 2.0, 3.0);
        let r = sqrt_spd2(&a);
        assert!((r * r - a).amax() < 1e-13);
    }

    #[test]
    fn distance_examples() {
        let a = Ellipse::from_shape(Vector2::new(1.0, 2.0), &ShapeParams::new(0.3, 5.0, 2.0));
        assert_eq!(gw_distance(&a, &a).unwrap(), 0.0);
        let b = Ellipse {
            center: a.center + Vector2::new(3.0, 0.0),
            ..a
        };
        assert!((gw_distance(&a, &b).unwrap() - 3.0).abs() < 1e-12);
        assert!((gw_distance(&circle(1.0), &circle(4.0)).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let big = Ellipse::from_shape(Vector2::new(-3e3, 7e2), &ShapeParams::new(1.1, 170.0, 40.0));
        assert_eq!(gw_distance(&big, &big).unwrap(), 0.0);
    }

    #[test]
    fn matches_square_root_form() {
        let a = Matrix2::new(900.0, 120.0, 120.0, 50.0);
        let b = Matrix2::new(30.0, -8.0, -8.0, 400.0);
        let ra = sqrt_spd2(&a);
        let inner = ra * b * ra;
        let direct = a.trace() + b.trace() - 2.0 * sqrt_spd2(&inner).trace();
        assert!((shape_term(&a, &b) - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn non_spd_rejected() {
        let bad = Ellipse {
            center: Vector2::zeros(),
            sigma: Matrix2::new(1.0, 2.0, 2.0, 1.0),
        };
        assert!(gw_distance(&bad, &circle(1.0)).is_err());
    }
}
