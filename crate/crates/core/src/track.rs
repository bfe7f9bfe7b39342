use nalgebra::{Matrix2, Matrix2x6, Matrix3, Matrix6, Vector2, Vector6};

use crate::error::{Error, Result};
use crate::filters::GaussianState;
use crate::mem::{shape_matrix, ShapeParams};
use crate::metrics::Ellipse;

/// Semi-axis lengths are floored here after every shape update, meters.
pub const MIN_SEMI_AXIS: f64 = 0.1;

/// Projection of the kinematic state `(x, y, vx, vy, ax, ay)` onto position.
pub fn position_projection() -> Matrix2x6<f64> {
    Matrix2x6::new(
        1.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, 0.0, 0.0,
    )
}

/// Joint estimate of an elliptical target: kinematics `(x, y, vx, vy, ax, ay)`
/// and shape `(alpha, l1, l2)`, kept as independent Gaussians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackState {
    pub kinematic: GaussianState<6>,
    pub shape: GaussianState<3>,
}

impl TrackState {
    pub fn new(kinematic: GaussianState<6>, shape: GaussianState<3>) -> Result<Self> {
        let kinematic = GaussianState::new(kinematic.mean, kinematic.cov)?;
        let shape = GaussianState::new(shape.mean, shape.cov)?;
        if !ShapeParams::from_vector(&shape.mean).is_valid() {
            return Err(Error::InvalidInput("semi-axes must be positive".into()));
        }
        Ok(Self { kinematic, shape })
    }

    pub fn from_parts(
        r: Vector6<f64>,
        c_r: Matrix6<f64>,
        p: ShapeParams,
        c_p: Matrix3<f64>,
    ) -> Result<Self> {
        Self::new(
            GaussianState { mean: r, cov: c_r },
            GaussianState {
                mean: p.to_vector(),
                cov: c_p,
            },
        )
    }

    pub fn shape_params(&self) -> ShapeParams {
        ShapeParams::from_vector(&self.shape.mean)
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.kinematic.mean[0], self.kinematic.mean[1])
    }

    /// `H C^r H^T`.
    pub fn position_cov(&self) -> Matrix2<f64> {
        self.kinematic.cov.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn ellipse(&self) -> Ellipse {
        let s = shape_matrix(&self.shape_params());
        Ellipse {
            center: self.position(),
            sigma: s * s.transpose(),
        }
    }

    pub(crate) fn floor_semi_axes(&mut self) {
        for k in 1..3 {
            if !(self.shape.mean[k] >= MIN_SEMI_AXIS) {
                self.shape.mean[k] = MIN_SEMI_AXIS;
            }
        }
    }
}

/// The 2-D position measurements received in one scan.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasurementBatch {
    pub measurements: Vec<Vector2<f64>>,
    /// Scan index `k`.
    pub step: usize,
}

impl MeasurementBatch {
    pub fn new(measurements: Vec<Vector2<f64>>, step: usize) -> Self {
        Self { measurements, step }
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut measurements = self.measurements.clone();
        measurements.reverse();
        Self::new(measurements, self.step)
    }
}
