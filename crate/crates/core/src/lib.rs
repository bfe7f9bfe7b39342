//! Elliptical extended-object tracking under the multiplicative error model.
//!
//! The crate provides two families of measurement updates for a target whose
//! state is a 6-D constant-acceleration kinematic vector plus an ellipse
//! `(alpha, l1, l2)`:
//!
//! * [`ekf::sequential_update`] processes a scan measurement by measurement
//!   (the MEM-EKF* tracker).
//! * [`eif`] processes a scan in one information-form step (MEM-EIF), either
//!   centered on the posterior kinematic estimate or on the prior with a
//!   tunable number of chunks.
//!
//! Around them sit generic Kalman/information primitives ([`filters`]), time
//! prediction ([`motion`]), the Gaussian Wasserstein metric ([`metrics`]), and
//! a simulation and benchmarking harness ([`simulation`], [`bench`](mod@bench)).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config;
pub mod eif;
pub mod ekf;
pub mod error;
pub mod filters;
pub mod linalg;
pub mod mem;
pub mod metrics;
pub mod motion;
pub mod simulation;
pub mod track;

pub use eif::{BatchUpdateConfig, BatchVariant, ChunkCount};
pub use error::{Error, Result};
pub use filters::{GaussianState, InformationState, LinearMeasurementModel};
pub use mem::{MemNoiseConfig, ShapeParams};
pub use metrics::Ellipse;
pub use simulation::{ScenarioConfig, TrackerKind};
pub use track::{MeasurementBatch, TrackState};
