use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use scatter_cli::{run, CliError, Experiment, ExperimentConfig, RunOptions};

/// Run one experiment of the dispersive three-body laboratory.
#[derive(Debug, Parser)]
#[command(name = "scatter", version)]
struct Args {
    /// spectrum, dispersion, thresholds, mourre, partition, evolve,
    /// local-decay, min-velocity, channels or verify-all
    experiment: Experiment,

    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `[run] output`.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Overrides `[run] seed`.
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, env = "SCATTER_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("scatter: {failure}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("scatter: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<Option<String>, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::ReadConfig {
        path: args.config.display().to_string(),
        source,
    })?;
    let mut cfg = ExperimentConfig::parse(&text, Some(args.experiment))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::config(None, "--threads must be positive"));
        }
        scatter_cli::set_threads(n)?;
    }
    let report = run(
        &cfg,
        &RunOptions {
            out: args.out.clone(),
            config_path: Some(args.config.clone()),
            quiet: false,
        },
    )?;
    eprintln!("manifest: {}", report.manifest.display());
    Ok(report.failure)
}
