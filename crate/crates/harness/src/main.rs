use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use specnet::bench::benchmark;
use specnet::compare::compare_modes;
use specnet::config::{Pipeline, RunMode};
use specnet::csv_io::write_map;
use specnet::report::{run_pipeline, to_json, write_json};
use specnet_core::planner::{cost_estimate, place_transforms, PlanMode};

/// Caps the worker threads used for per-channel products and mode comparison.
const THREADS_ENV: &str = "SPECNET_THREADS";

#[derive(Parser)]
#[command(
    name = "specnet",
    version,
    about = "Frequency-domain convolution pipelines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a pipeline and write its run report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// naive, legacy, fused or oracle; defaults to the config's mode.
        #[arg(long)]
        mode: Option<RunMode>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the output map as CSV.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Compare against the spatial reference and fail on mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Run with mask activation and with ReLU, and report the differences.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mode: Option<RunMode>,
        #[arg(long)]
        out: PathBuf,
        /// Fail unless outputs differ exactly at the negative mask pixels.
        #[arg(long)]
        check: bool,
    },
    /// Time every planning mode and the direct/spectral crossover.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Fail unless every repetition is bitwise identical.
        #[arg(long)]
        check: bool,
    },
    /// Print planned graphs and cost reports.
    Plan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mode: Option<RunMode>,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn load(config: &Path) -> Result<Pipeline> {
    Pipeline::load(config).with_context(|| format!("loading {}", config.display()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            mode,
            out,
            map,
            check,
        } => {
            let pipeline = load(&config)?;
            let mode = mode.unwrap_or(pipeline.mode);
            let (report, output) = run_pipeline(&pipeline, mode, check)?;
            write_json(&out, &report)?;
            if let Some(path) = map {
                write_map(&path, &output)?;
            }
            println!(
                "{mode}: {} -> {} transforms, output {}",
                report.plan,
                report.measured_transforms.total(),
                report.output
            );
            if let Some(c) = &report.check {
                println!(
                    "check: max relative error {:e} (tolerance {:e}) {}",
                    c.max_relative_error,
                    c.tolerance,
                    if c.passed { "ok" } else { "FAILED" }
                );
                return Ok(c.passed);
            }
            Ok(true)
        }
        Command::Compare {
            config,
            mode,
            out,
            check,
        } => {
            let pipeline = load(&config)?;
            let mode = mode.unwrap_or(pipeline.mode).plan_mode();
            let report = compare_modes(&pipeline, mode)?.report;
            write_json(&out, &report)?;
            println!(
                "max |diff| {:e}, rms {:e}, {:.4} of pixels differ ({} negative under the mask)",
                report.max_abs_diff,
                report.rms_diff,
                report.fraction_of_pixels_differing,
                report.negative_pixels.len()
            );
            Ok(!check || report.differences_match_negatives())
        }
        Command::Bench {
            config,
            reps,
            out,
            check,
        } => {
            let pipeline = load(&config)?;
            let report = benchmark(&pipeline, reps)?;
            write_json(&out, &report)?;
            for m in &report.modes {
                println!(
                    "{:<16} {:>12.6}s  {}",
                    m.mode.as_str(),
                    m.median_seconds,
                    m.plan
                );
            }
            for c in &report.crossover {
                println!(
                    "n={} k={}: direct {:.6}s spectral {:.6}s",
                    c.n, c.k, c.direct_seconds, c.spectral_seconds
                );
            }
            Ok(!check || report.deterministic)
        }
        Command::Plan { config, mode } => {
            let pipeline = load(&config)?;
            let modes = match mode {
                Some(m) => vec![m.plan_mode()],
                None => PlanMode::ALL.to_vec(),
            };
            for mode in modes {
                let plan = place_transforms(pipeline.graph(), mode)?;
                println!("{mode}: {plan}");
                println!("{}", to_json(&cost_estimate(&plan)?));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| run(cli));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
