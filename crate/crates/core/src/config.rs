//! Scenario file format: flat `key = value` TOML. Every key is optional and
//! falls back to the default scenario.
//!
//! ```toml
//! semi_axes = [170.0, 40.0]        # true (l1, l2), m
//! speed = 13.888888888888889       # m/s
//! poisson_rate = 20.0
//! num_steps = 104
//! dt = 10.0                        # s
//! segment_plan = "S22,T10:90,S20,T10:90,S20,T10:90,S12"
//! sensor_noise = [10000.0, 0.0, 1600.0]        # C_v as (xx, xy, yy), m^2
//! rng_seed = 42
//! multiplicative_noise = [0.25, 0.0, 0.25]     # C_h as (xx, xy, yy)
//! init_kinematic_var = [2500.0, 2500.0, 400.0, 400.0, 1.0, 1.0]
//! init_shape_var = [0.5, 10000.0, 2500.0]
//! jerk_psd = 0.001
//! shape_process_noise = [0.01, 1.0, 1.0]       # diagonal, per scan
//! clamp_factor = 0.4
//! ```
//!
//! Segment plan entries are `S<steps>` (straight) or `T<steps>:<degrees>`
//! (coordinated turn, total heading change in degrees, positive = left).

use std::path::Path;

use nalgebra::{Matrix2, Matrix3, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::{ScenarioConfig, Segment, TrackerTuning};

/// On-disk representation of a [`ScenarioConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub semi_axes: [f64; 2],
    pub speed: f64,
    pub poisson_rate: f64,
    pub num_steps: usize,
    pub dt: f64,
    pub segment_plan: String,
    pub sensor_noise: [f64; 3],
    pub rng_seed: u64,
    pub multiplicative_noise: [f64; 3],
    pub init_kinematic_var: [f64; 6],
    pub init_shape_var: [f64; 3],
    pub jerk_psd: f64,
    pub shape_process_noise: [f64; 3],
    pub clamp_factor: f64,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        Self::from(&ScenarioConfig::default())
    }
}

fn sym2(v: [f64; 3]) -> Matrix2<f64> {
    Matrix2::new(v[0], v[1], v[1], v[2])
}

fn packed2(m: &Matrix2<f64>) -> [f64; 3] {
    [m[(0, 0)], m[(0, 1)], m[(1, 1)]]
}

impl From<&ScenarioConfig> for ScenarioFile {
    fn from(c: &ScenarioConfig) -> Self {
        let t = &c.tuning;
        Self {
            semi_axes: [c.semi_axes.0, c.semi_axes.1],
            speed: c.speed,
            poisson_rate: c.poisson_rate,
            num_steps: c.num_steps,
            dt: c.dt,
            segment_plan: format_segment_plan(&c.segment_plan),
            sensor_noise: packed2(&c.c_v),
            rng_seed: c.rng_seed,
            multiplicative_noise: packed2(&t.c_h),
            init_kinematic_var: t.init_kinematic_var.into(),
            init_shape_var: t.init_shape_var.into(),
            jerk_psd: t.jerk_psd,
            shape_process_noise: t.shape_process_noise.diagonal().into(),
            clamp_factor: t.clamp_factor,
        }
    }
}

impl TryFrom<ScenarioFile> for ScenarioConfig {
    type Error = Error;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        let cfg = ScenarioConfig {
            semi_axes: (f.semi_axes[0], f.semi_axes[1]),
            speed: f.speed,
            poisson_rate: f.poisson_rate,
            num_steps: f.num_steps,
            dt: f.dt,
            segment_plan: parse_segment_plan(&f.segment_plan)?,
            c_v: sym2(f.sensor_noise),
            rng_seed: f.rng_seed,
            tuning: TrackerTuning {
                init_kinematic_var: Vector6::from(f.init_kinematic_var),
                init_shape_var: Vector3::from(f.init_shape_var),
                jerk_psd: f.jerk_psd,
                shape_process_noise: Matrix3::from_diagonal(&Vector3::from(f.shape_process_noise)),
                c_h: sym2(f.multiplicative_noise),
                clamp_factor: f.clamp_factor,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_segment_plan(text: &str) -> Result<Vec<Segment>> {
    let bad = |item: &str| {
        Error::InvalidInput(format!(
            "bad segment `{item}` (expected S<steps> or T<steps>:<deg>)"
        ))
    };
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            if let Some(rest) = item.strip_prefix('S') {
                let steps = rest.parse().map_err(|_| bad(item))?;
                Ok(Segment::Straight { steps })
            } else if let Some(rest) = item.strip_prefix('T') {
                let (steps, deg) = rest.split_once(':').ok_or_else(|| bad(item))?;
                let steps = steps.parse().map_err(|_| bad(item))?;
                let deg: f64 = deg.parse().map_err(|_| bad(item))?;
                Ok(Segment::Turn {
                    steps,
                    angle: deg.to_radians(),
                })
            } else {
                Err(bad(item))
            }
        })
        .collect()
}

pub fn format_segment_plan(plan: &[Segment]) -> String {
    plan.iter()
        .map(|s| match *s {
            Segment::Straight { steps } => format!("S{steps}"),
            Segment::Turn { steps, angle } => format!("T{steps}:{}", angle.to_degrees()),
        })
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
    ScenarioConfig::try_from(file)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Canonical text of a scenario: every key, fixed order, default formatting.
pub fn canonical_text(cfg: &ScenarioConfig) -> String {
    toml::to_string(&ScenarioFile::from(cfg)).expect("scenario file serializes")
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Fingerprint embedded in CSV headers.
pub fn scenario_hash(cfg: &ScenarioConfig) -> u64 {
    fnv1a64(canonical_text(cfg).as_bytes())
}
