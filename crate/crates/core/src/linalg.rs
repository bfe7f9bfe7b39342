//! Small dense helpers shared by the filters: guarded SPD inversion,
//! re-symmetrization and order-robust summation.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};

/// Smallest accepted ratio between the smallest and largest Cholesky pivot.
pub const PIVOT_RATIO_GUARD: f64 = 1e-12;

/// Inverts a symmetric positive-definite matrix through its Cholesky factor.
///
/// Fails with [`Error::Singular`] naming `what` when the factorization does not
/// exist, a pivot `L_ii^2` is below `PIVOT_RATIO_GUARD` times the largest pivot,
/// or the input holds non-finite values.
pub fn spd_inverse<const N: usize>(
    m: &SMatrix<f64, N, N>,
    what: &'static str,
) -> Result<SMatrix<f64, N, N>> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Singular(what));
    }
    let chol = m.cholesky().ok_or(Error::Singular(what))?;
    let l = chol.l_dirty();
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot = 0.0_f64;
    for i in 0..N {
        let p = l[(i, i)] * l[(i, i)];
        min_pivot = min_pivot.min(p);
        max_pivot = max_pivot.max(p);
    }
    if !(min_pivot > PIVOT_RATIO_GUARD * max_pivot) {
        return Err(Error::Singular(what));
    }
    Ok(symmetrize(&chol.inverse()))
}

/// `(m + m^T) / 2`.
pub fn symmetrize<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    (m + m.transpose()) * 0.5
}

/// Checks symmetric positive-definiteness the same way [`spd_inverse`] does.
pub fn is_spd<const N: usize>(m: &SMatrix<f64, N, N>) -> bool {
    let scale = m.amax();
    let asym = (m - m.transpose()).amax();
    scale.is_finite() && asym <= 1e-9 * scale && spd_inverse(m, "probe").is_ok()
}

/// Pairwise (tree) sum of `N`-vectors. Rounding error grows with `log(len)`
/// instead of `len`, so the result is close to independent of input order.
pub fn pairwise_sum<const N: usize, I>(
    items: &[I],
    f: impl Fn(&I) -> SVector<f64, N> + Copy,
) -> SVector<f64, N> {
    const BLOCK: usize = 16;
    if items.len() <= BLOCK {
        return items.iter().fold(SVector::zeros(), |acc, x| acc + f(x));
    }
    let (lo, hi) = items.split_at(items.len() / 2);
    pairwise_sum(lo, f) + pairwise_sum(hi, f)
}

/// Largest absolute entrywise difference scaled by the largest absolute entry
/// of `reference`.
pub fn max_relative_diff(value: &[f64], reference: &[f64]) -> f64 {
    assert_eq!(value.len(), reference.len());
    let scale = reference.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let diff = value
        .iter()
        .zip(reference)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Matrix3, Vector2};

    #[test]
    fn inverse_of_diagonal() {
        let m = Matrix2::new(4.0, 0.0, 0.0, 0.25);
        let inv = spd_inverse(&m, "m").unwrap();
        assert!((inv - Matrix2::new(0.25, 0.0, 0.0, 4.0)).amax() < 1e-15);
    }

    #[test]
    fn singular_is_reported_by_name() {
        let m = Matrix2::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(
            spd_inverse(&m, "innovation"),
            Err(Error::Singular("innovation"))
        );
    }

    #[test]
    fn ill_conditioned_trips_guard() {
        let m = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, 1e-13));
        assert!(spd_inverse(&m, "c").is_err());
        let ok = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, 1e-11));
        assert!(spd_inverse(&ok, "c").is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        let m = Matrix2::new(f64::NAN, 0.0, 0.0, 1.0);
        assert!(spd_inverse(&m, "c").is_err());
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<Vector2<f64>> = (0..1000)
            .map(|i| Vector2::new(i as f64, -(i as f64) * 0.5))
            .collect();
        let s = pairwise_sum(&xs, |v| *v);
        assert_eq!(s, Vector2::new(499_500.0, -249_750.0));
        assert_eq!(
            pairwise_sum::<2, Vector2<f64>>(&[], |v| *v),
            Vector2::zeros()
        );
    }
}
