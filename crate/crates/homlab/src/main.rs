use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use homlab::{run_config, CliError, ExperimentConfig};

/// Curvature experiments on locally homogeneous spaces, driven by one JSON config.
///
/// Exit codes: 0 success, 1 validation failure, 2 orbit optimizer budget
/// exhausted, 3 i/o error, 4 command-line usage error.
#[derive(Parser)]
#[command(name = "homlab", version)]
struct Args {
    /// Experiment config (see docs/config.schema.json).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn run() -> Result<i32, CliError> {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => return Err(CliError::Usage(e.to_string())),
        Err(e) => {
            // --help and --version
            print!("{e}");
            return Ok(0);
        }
    };
    let (mut cfg, base): (ExperimentConfig, PathBuf) = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out_dir = args.out_dir.unwrap_or_else(|| base.join(&cfg.output_dir));
    let outcome = run_config(&cfg, &base, &out_dir)?;
    for f in &outcome.files {
        println!("{}", f.display());
    }
    if let Some(err) = &outcome.failure {
        eprintln!("homlab: {err}");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("homlab: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
