//! Implementation of the `elliptrack` subcommands: Monte Carlo accuracy
//! evaluation, update runtime scaling, and chunk-count sweeps. All of them
//! write CSV (UTF-8, `\n`, header row preceded by one `#` provenance line)
//! and return a summary for printing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use nalgebra::{Matrix3, Matrix6, Vector2, Vector3, Vector6};
use thiserror::Error;

use crate::eif::{batch_update_yl, BatchUpdateConfig, ChunkCount};
use crate::ekf::sequential_update;
use crate::error::Error;
use crate::mem::{MemNoiseConfig, ShapeParams};
use crate::simulation::{
    run_monte_carlo, run_rng, sample_scan, GroundTruthStep, MonteCarloReport, ScenarioConfig,
    TrackerKind,
};
use crate::track::{MeasurementBatch, TrackState};

/// Warm-up calls excluded from every timing median.
pub const WARMUP_CALLS: usize = 3;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(String),
    #[error("tracker failure: {0}")]
    Tracker(#[source] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) | CommandError::Io { .. } => 2,
            CommandError::Tracker(_) => 3,
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(msg) => CommandError::Config(msg),
            other => CommandError::Tracker(other),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CommandError> {
    fs::write(path, text).map_err(|source| CommandError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn check_runs(runs: usize) -> Result<(), CommandError> {
    if runs == 0 {
        return Err(CommandError::Config("runs must be ≥ 1".into()));
    }
    Ok(())
}

/// Aggregated Monte Carlo result for one tracker on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario_hash: u64,
    pub tracker: String,
    pub gw_mean: Vec<f64>,
    pub gw_std: Vec<f64>,
    pub seconds_per_update: f64,
    pub runs: usize,
}

impl RunReport {
    fn new(scenario_hash: u64, tracker: String, mc: MonteCarloReport) -> Self {
        Self {
            scenario_hash,
            tracker,
            gw_mean: mc.gw_mean,
            gw_std: mc.gw_std,
            seconds_per_update: mc.seconds_per_update,
            runs: mc.runs,
        }
    }

    pub fn overall_mean(&self) -> f64 {
        self.gw_mean.iter().sum::<f64>() / self.gw_mean.len().max(1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct EvaluateSummary {
    pub reports: Vec<RunReport>,
}

impl EvaluateSummary {
    pub fn report(&self, tracker: &str) -> Option<&RunReport> {
        self.reports.iter().find(|r| r.tracker == tracker)
    }

    /// Overall mean error of `tracker` divided by that of the sequential tracker.
    pub fn ratio_to_sequential(&self, tracker: &str) -> Option<f64> {
        let base = self
            .report(&TrackerKind::Sequential.to_string())?
            .overall_mean();
        Some(self.report(tracker)?.overall_mean() / base)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("tracker          mean_gw_m   vs_ekf_star  s/update\n");
        for r in &self.reports {
            let ratio = self
                .ratio_to_sequential(&r.tracker)
                .map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
            let _ = writeln!(
                out,
                "{:<16} {:>9.3}   {:>11}  {:.3e}",
                r.tracker,
                r.overall_mean(),
                ratio,
                r.seconds_per_update
            );
        }
        out
    }
}

fn provenance(command: &str, cfg: &ScenarioConfig, runs: usize) -> String {
    format!(
        "# elliptrack {command} scenario=0x{:016x} seed={} runs={runs}\n",
        crate::config::scenario_hash(cfg),
        cfg.rng_seed
    )
}

/// Monte Carlo comparison of `trackers`; CSV columns `k,tracker,gw_mean,gw_std`.
pub fn cmd_evaluate(
    cfg: &ScenarioConfig,
    trackers: &[TrackerKind],
    runs: usize,
    out: &Path,
) -> Result<EvaluateSummary, CommandError> {
    check_runs(runs)?;
    if trackers.is_empty() {
        return Err(CommandError::Config("tracker list is empty".into()));
    }
    cfg.validate()?;
    let hash = crate::config::scenario_hash(cfg);
    let mut reports = Vec::with_capacity(trackers.len());
    for tracker in trackers {
        let mc = run_monte_carlo(cfg, *tracker, runs)?;
        reports.push(RunReport::new(hash, tracker.to_string(), mc));
    }
    let mut csv = provenance("evaluate", cfg, runs);
    csv.push_str("k,tracker,gw_mean,gw_std\n");
    for r in &reports {
        for (k, (m, s)) in r.gw_mean.iter().zip(&r.gw_std).enumerate() {
            let _ = writeln!(csv, "{k},{},{m},{s}", r.tracker);
        }
    }
    write_file(out, &csv)?;
    Ok(EvaluateSummary { reports })
}

/// Least-squares line `seconds = intercept + slope * L` with its R^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

#[derive(Debug, Clone)]
pub struct RuntimeSummary {
    pub sizes: Vec<usize>,
    /// Median seconds per sequential update, one per size.
    pub sequential: Vec<f64>,
    /// Median seconds per batch update, one per size.
    pub batch: Vec<f64>,
    pub sequential_fit: LinearFit,
    pub batch_fit: LinearFit,
}

impl RuntimeSummary {
    pub fn slope_ratio(&self) -> f64 {
        self.sequential_fit.slope / self.batch_fit.slope
    }

    /// Sequential/batch time ratio at the largest size.
    pub fn speedup_at_largest(&self) -> f64 {
        let i = self
            .sizes
            .iter()
            .enumerate()
            .max_by_key(|(_, l)| **l)
            .map_or(0, |(i, _)| i);
        self.sequential[i] / self.batch[i]
    }

    pub fn render(&self) -> String {
        let mut out = String::from("L        ekf_star[s]   eif_yl[s]     speedup\n");
        for ((l, s), b) in self.sizes.iter().zip(&self.sequential).zip(&self.batch) {
            let _ = writeln!(out, "{l:<8} {s:<13.4e} {b:<13.4e} {:.1}", s / b);
        }
        let _ = writeln!(
            out,
            "slope ekf_star {:.4e} s/meas (R^2 {:.4}), eif_yl {:.4e} s/meas (R^2 {:.4}), ratio {:.1}",
            self.sequential_fit.slope,
            self.sequential_fit.r_squared,
            self.batch_fit.slope,
            self.batch_fit.r_squared,
            self.slope_ratio()
        );
        out
    }
}

/// Fixed prior and scan of exactly `count` measurements for timing.
pub fn synthetic_update_input(count: usize) -> (TrackState, MeasurementBatch, MemNoiseConfig) {
    let gt = GroundTruthStep {
        center: Vector2::zeros(),
        orientation: 0.0,
        semi_axes: (170.0, 40.0),
        velocity: Vector2::new(50.0 / 3.6, 0.0),
    };
    let noise = MemNoiseConfig::default();
    let mut rng = run_rng(0x5eed, count);
    let batch = sample_scan(&gt, count, &noise.c_v, &mut rng);
    let track = TrackState::from_parts(
        Vector6::new(5.0, -3.0, 13.0, 0.5, 0.0, 0.0),
        Matrix6::from_diagonal(&Vector6::new(100.0, 100.0, 25.0, 25.0, 1.0, 1.0)),
        ShapeParams::new(0.05, 160.0, 45.0),
        Matrix3::from_diagonal(&Vector3::new(0.02, 400.0, 100.0)),
    )
    .expect("synthetic prior is valid");
    (track, batch, noise)
}

fn median_seconds(reps: usize, mut call: impl FnMut()) -> f64 {
    for _ in 0..WARMUP_CALLS {
        call();
    }
    let mut samples: Vec<f64> = (0..reps)
        .map(|_| {
            let start = Instant::now();
            call();
            start.elapsed().as_secs_f64()
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        0.5 * (samples[mid - 1] + samples[mid])
    }
}

/// Times the sequential and the posterior-centered batch update alone, median
/// of `reps` calls per size.
pub fn measure_runtime(sizes: &[usize], reps: usize) -> Result<RuntimeSummary, CommandError> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CommandError::Config(
            "sizes must be a non-empty list of values ≥ 1".into(),
        ));
    }
    if reps == 0 {
        return Err(CommandError::Config("repetitions must be ≥ 1".into()));
    }
    let cfg = BatchUpdateConfig::default();
    let mut sequential = Vec::with_capacity(sizes.len());
    let mut batch = Vec::with_capacity(sizes.len());
    for &l in sizes {
        let (track, scan, noise) = synthetic_update_input(l);
        sequential_update(&track, &scan, &noise).map_err(CommandError::Tracker)?;
        batch_update_yl(&track, &scan, &noise, &cfg).map_err(CommandError::Tracker)?;
        sequential.push(median_seconds(reps, || {
            std::hint::black_box(
                sequential_update(&track, std::hint::black_box(&scan), &noise).ok(),
            );
        }));
        batch.push(median_seconds(reps, || {
            std::hint::black_box(
                batch_update_yl(&track, std::hint::black_box(&scan), &noise, &cfg).ok(),
            );
        }));
    }
    let xs: Vec<f64> = sizes.iter().map(|l| *l as f64).collect();
    Ok(RuntimeSummary {
        sizes: sizes.to_vec(),
        sequential_fit: fit_line(&xs, &sequential),
        batch_fit: fit_line(&xs, &batch),
        sequential,
        batch,
    })
}

/// [`measure_runtime`] written as CSV columns `L,tracker,seconds_per_update`.
pub fn cmd_bench_runtime(
    sizes: &[usize],
    reps: usize,
    out: &Path,
) -> Result<RuntimeSummary, CommandError> {
    let summary = measure_runtime(sizes, reps)?;
    let mut csv = format!("# elliptrack bench reps={reps} warmup={WARMUP_CALLS}\n");
    csv.push_str("L,tracker,seconds_per_update\n");
    for (i, l) in sizes.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{l},{},{}",
            TrackerKind::Sequential,
            summary.sequential[i]
        );
        let _ = writeln!(
            csv,
            "{l},{},{}",
            TrackerKind::PosteriorCentered,
            summary.batch[i]
        );
    }
    write_file(out, &csv)?;
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    /// `(config label, overall mean error)`, references first.
    pub overall: Vec<(String, f64)>,
    pub series: Vec<(String, Vec<f64>)>,
}

impl SweepSummary {
    pub fn overall_of(&self, label: &str) -> Option<f64> {
        self.overall
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| *v)
    }

    pub fn series_of(&self, label: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v.as_slice())
    }

    pub fn render(&self) -> String {
        let mut out = String::from("config           mean_gw_m\n");
        for (label, v) in &self.overall {
            let _ = writeln!(out, "{label:<16} {v:>9.3}");
        }
        out
    }
}

/// Prior-centered batch update at every chunk count in `chunks`, plus the
/// sequential and posterior-centered references; CSV columns `k,config,gw_mean`.
pub fn cmd_sweep_chunks(
    cfg: &ScenarioConfig,
    chunks: &[ChunkCount],
    runs: usize,
    out: &Path,
) -> Result<SweepSummary, CommandError> {
    if chunks.is_empty() {
        return Err(CommandError::Config("chunk list is empty".into()));
    }
    check_runs(runs)?;
    cfg.validate()?;
    let mut kinds = vec![TrackerKind::Sequential, TrackerKind::PosteriorCentered];
    kinds.extend(chunks.iter().map(|c| TrackerKind::PriorCentered(*c)));
    let mut series = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let mc = run_monte_carlo(cfg, kind, runs)?;
        series.push((kind.to_string(), mc.gw_mean));
    }
    let mut csv = provenance("sweep", cfg, runs);
    csv.push_str("k,config,gw_mean\n");
    for (label, values) in &series {
        for (k, v) in values.iter().enumerate() {
            let _ = writeln!(csv, "{k},{label},{v}");
        }
    }
    write_file(out, &csv)?;
    let overall = series
        .iter()
        .map(|(l, v)| (l.clone(), v.iter().sum::<f64>() / v.len().max(1) as f64))
        .collect();
    Ok(SweepSummary { overall, series })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_exact() {
        let fit = fit_line(&[1.0, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0]);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CommandError::Config("x".into()).exit_code(), 2);
        assert_eq!(CommandError::Tracker(Error::Singular("c")).exit_code(), 3);
        assert_eq!(
            CommandError::from(Error::InvalidInput("x".into())).exit_code(),
            2
        );
    }

    #[test]
    fn synthetic_input_has_requested_size() {
        let (_, batch, _) = synthetic_update_input(37);
        assert_eq!(batch.len(), 37);
    }
}
