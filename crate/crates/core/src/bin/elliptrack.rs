use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use elliptrack::bench::{cmd_bench_runtime, cmd_evaluate, cmd_sweep_chunks, CommandError};
use elliptrack::config::load_scenario;
use elliptrack::simulation::{parse_chunk_count, ScenarioConfig, TrackerKind};

/// Extended object tracking with multiplicative-error ellipse models.
#[derive(Parser)]
#[command(name = "elliptrack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo accuracy comparison of trackers.
    Evaluate {
        /// Scenario TOML; built-in default scenario when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated tracker ids, e.g. ekf_star,eif_yl,eif_y0:U=4,eif_y0:U=L.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "ekf_star,eif_yl,eif_y0:U=4"
        )]
        trackers: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value = "evaluate.csv")]
        out: PathBuf,
    },
    /// Update runtime against the number of measurements per scan.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "10,50,100,500,1000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value = "bench.csv")]
        out: PathBuf,
    },
    /// Accuracy of the prior-centered batch update against its chunk count.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated chunk counts; `L` means one chunk per measurement.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,L")]
        chunks: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
}

fn scenario(path: Option<PathBuf>) -> Result<ScenarioConfig, CommandError> {
    let mut cfg = match path {
        Some(p) => load_scenario(&p)?,
        None => ScenarioConfig::default(),
    };
    if let Ok(seed) = std::env::var("ELLIPTRACK_SEED") {
        cfg.rng_seed = seed.trim().parse().map_err(|_| {
            CommandError::Config(format!(
                "ELLIPTRACK_SEED is not an unsigned integer: {seed:?}"
            ))
        })?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CommandError> {
    match cli.command {
        Command::Evaluate {
            config,
            trackers,
            runs,
            out,
        } => {
            let cfg = scenario(config)?;
            let kinds = trackers
                .iter()
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<TrackerKind>())
                .collect::<Result<Vec<_>, _>>()?;
            let summary = cmd_evaluate(&cfg, &kinds, runs, &out)?;
            print!("{}", summary.render());
        }
        Command::Bench { sizes, reps, out } => {
            let summary = cmd_bench_runtime(&sizes, reps, &out)?;
            print!("{}", summary.render());
        }
        Command::Sweep {
            config,
            chunks,
            runs,
            out,
        } => {
            let cfg = scenario(config)?;
            let counts = chunks
                .iter()
                .filter(|c| !c.trim().is_empty())
                .map(|c| parse_chunk_count(c.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let summary = cmd_sweep_chunks(&cfg, &counts, runs, &out)?;
            print!("{}", summary.render());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
