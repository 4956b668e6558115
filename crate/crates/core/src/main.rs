use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pachner33::runner::{report_to_json, run, CheckKind, TrialConfig};
use pachner33::Scalar;

/// Seeded randomized verification of the 3→3 move relations: exact rational
/// checks in ℝ³ and the floating-point Euclidean relation in ℝ⁴.
#[derive(Parser, Debug)]
#[command(name = "pachner33", version)]
struct Cli {
    /// Master seed; trial k uses ChaCha8 stream k+1 of this seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Number of independently seeded trials.
    #[arg(long, default_value_t = 10)]
    trials: u32,

    /// Integer coordinate range [-R, R] for random ℝ³ configurations.
    #[arg(long = "coord-range", default_value_t = 10)]
    coord_range: i64,

    /// Comma-separated checks to run: boundary, transport, holonomy,
    /// flatness, rank, ratio, main, euclidean.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "boundary,transport,holonomy,flatness,rank,ratio,main,euclidean"
    )]
    checks: Vec<String>,

    /// Rational perturbation added to one admissible λ face, e.g. 1/7.
    #[arg(long = "perturb-delta", default_value = "1/7")]
    perturb_delta: String,

    /// Write the JSON report to this path instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Suppress per-trial console progress.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut checks = Vec::new();
    for name in &cli.checks {
        match name.parse::<CheckKind>() {
            Ok(kind) => checks.push(kind),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let perturb_delta: Scalar = match cli.perturb_delta.parse() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: --perturb-delta: {e}");
            return ExitCode::from(2);
        }
    };

    let config = TrialConfig {
        seed: cli.seed,
        trials: cli.trials,
        coord_range: cli.coord_range,
        checks,
        perturb_delta,
        output_path: cli.report.clone(),
        quiet: cli.quiet,
    };

    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let json = report_to_json(&report);
    match &config.output_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: cannot write report to {}: {e}", path.display());
                return ExitCode::from(2);
            }
            if !config.quiet {
                eprintln!("report written to {}", path.display());
            }
        }
        None => print!("{json}"),
    }

    if report.summary.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
