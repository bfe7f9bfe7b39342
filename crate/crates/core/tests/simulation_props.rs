use elliptrack::config::{canonical_text, load_scenario, parse_scenario, scenario_hash};
use elliptrack::mem::shape_matrix;
use elliptrack::simulation::{
    generate_trajectory, run_monte_carlo, run_rng, sample_scan, sample_unit_disk, GroundTruthStep,
};
use elliptrack::{ChunkCount, ScenarioConfig, TrackerKind};
use nalgebra::{Matrix2, Vector2};
use proptest::prelude::*;

#[test]
fn measurement_moments_match_model() {
    const DRAWS: usize = 1_000_000;
    let gt = GroundTruthStep {
        center: Vector2::new(120.0, -40.0),
        orientation: 0.7,
        semi_axes: (170.0, 40.0),
        velocity: Vector2::new(1.0, 0.0),
    };
    let c_v = Matrix2::new(2500.0, 300.0, 300.0, 900.0);
    let scan = sample_scan(&gt, DRAWS, &c_v, &mut run_rng(99, 0));
    let n = DRAWS as f64;
    let s = shape_matrix(&gt.shape());
    let want_cov = s * Matrix2::identity() * 0.25 * s.transpose() + c_v;

    let mean = scan.measurements.iter().sum::<Vector2<f64>>() / n;
    for i in 0..2 {
        let se = (want_cov[(i, i)] / n).sqrt();
        assert!(
            (mean[i] - gt.center[i]).abs() < 3.0 * se,
            "mean[{i}] off by {:.2} se",
            (mean[i] - gt.center[i]).abs() / se
        );
    }
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        let prods: Vec<f64> = scan
            .measurements
            .iter()
            .map(|y| (y[i] - gt.center[i]) * (y[j] - gt.center[j]))
            .collect();
        let m = prods.iter().sum::<f64>() / n;
        let se = (prods.iter().map(|p| (p - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
        assert!(
            (m - want_cov[(i, j)]).abs() < 3.0 * se,
            "cov[{i},{j}] off by {:.2} se",
            (m - want_cov[(i, j)]).abs() / se
        );
    }
}

#[test]
fn per_measurement_chunks_reproduce_sequential_series() {
    let cfg = ScenarioConfig::default();
    let sequential = run_monte_carlo(&cfg, TrackerKind::Sequential, 20).unwrap();
    let chunked = run_monte_carlo(
        &cfg,
        TrackerKind::PriorCentered(ChunkCount::PerMeasurement),
        20,
    )
    .unwrap();
    assert_eq!(sequential.counts, chunked.counts);
    for (k, (a, b)) in sequential.gw_mean.iter().zip(&chunked.gw_mean).enumerate() {
        assert!((a - b).abs() < 1e-6, "step {k}: {a} vs {b}");
    }
}

#[test]
fn report_shape() {
    let cfg = ScenarioConfig::default();
    let report = run_monte_carlo(&cfg, TrackerKind::PosteriorCentered, 5).unwrap();
    assert_eq!(report.gw_mean.len(), cfg.num_steps);
    assert_eq!(report.gw_std.len(), cfg.num_steps);
    assert!(report
        .gw_mean
        .iter()
        .chain(&report.gw_std)
        .all(|v| *v >= 0.0 && v.is_finite()));
    assert!(report.counts.iter().all(|c| *c <= 5));
    assert_eq!(*report.counts.last().unwrap(), 5);
}

#[test]
fn shipped_config_is_the_default_scenario() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.toml");
    let cfg = load_scenario(std::path::Path::new(path)).unwrap();
    assert_eq!(
        scenario_hash(&cfg),
        scenario_hash(&ScenarioConfig::default())
    );
}

#[test]
fn canonical_text_round_trips() {
    let cfg = parse_scenario("rng_seed = 7\npoisson_rate = 12.5\n").unwrap();
    let again = parse_scenario(&canonical_text(&cfg)).unwrap();
    assert_eq!(canonical_text(&again), canonical_text(&cfg));
    assert_eq!(scenario_hash(&again), scenario_hash(&cfg));
    assert_ne!(
        scenario_hash(&cfg),
        scenario_hash(&ScenarioConfig::default())
    );
}

proptest! {
    #[test]
    fn unit_disk_samples_stay_inside(seed in any::<u64>()) {
        let mut rng = run_rng(seed, 0);
        for _ in 0..100 {
            prop_assert!(sample_unit_disk(&mut rng).norm() <= 1.0);
        }
    }

    #[test]
    fn trajectory_moves_at_constant_speed(speed in 1.0f64..40.0, dt in 0.5f64..20.0, angle in -180.0f64..180.0) {
        let text = format!("speed = {speed}\ndt = {dt}\nnum_steps = 30\nsegment_plan = \"S10,T10:{angle},S10\"\n");
        let cfg = parse_scenario(&text).unwrap();
        let truth = generate_trajectory(&cfg).unwrap();
        prop_assert_eq!(truth.len(), 30);
        let step = speed * dt;
        let mut prev = Vector2::zeros();
        for gt in &truth {
            let moved = (gt.center - prev).norm();
            prop_assert!(moved <= step * (1.0 + 1e-12) && moved >= step * 0.9);
            prop_assert!((gt.velocity.norm() - speed).abs() < 1e-9 * speed);
            prev = gt.center;
        }
        let turned = truth[29].orientation - truth[0].orientation;
        prop_assert!((turned - angle.to_radians()).abs() < 1e-9);
    }
}
