use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use roadmatch::{Execution, SweepMode};
use roadmatch_cli::commands;
use roadmatch_cli::error::EXIT_USAGE;
use roadmatch_cli::{CliError, RunConfig};

/// Perspective-aware road-grid matching: footprint geometry, per-cell SNR,
/// error-rate sweeps, map matching and image rectification.
///
/// Exit codes: 0 success, 2 usage, 3 config, 4 I/O, 5 input parse,
/// 6 validation.
#[derive(Debug, Parser)]
#[command(name = "roadmatch", version)]
struct Cli {
    /// `key = value` config file; defaults to the reference camera.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Write results here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Aligned human-readable table instead of CSV.
    #[arg(long, global = true)]
    table: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Visible whole cells with footprint areas and Gramian weights.
    Geometry,
    /// Per-cell noise variance and SNR for one amplitude.
    Snr {
        #[arg(long)]
        amplitude: Option<f64>,
    },
    /// Error probability of both matching rules across amplitudes.
    Simulate {
        /// Add per-amplitude standard deviation columns.
        #[arg(long)]
        sd: bool,
        #[arg(long)]
        mode: Option<SweepMode>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sequential: bool,
    },
    /// Best footprint offset of an observation grid inside a map.
    Classify {
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        observation: Option<PathBuf>,
    },
    /// Average a PGM image over the visible cells into a grid file.
    Rectify {
        #[arg(long)]
        image: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        /// Subtract the mean cell value.
        #[arg(long)]
        zero_center: bool,
    },
}

fn required(flag: Option<PathBuf>, from_config: &Option<PathBuf>, name: &str) -> Result<PathBuf, CliError> {
    flag.or_else(|| from_config.clone())
        .ok_or_else(|| CliError::Validation(format!("no {name} given (use --{name} or `{name} =` in the config)")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let text = match cli.command {
        Command::Geometry => commands::geometry(&cfg)?.render(cli.table),
        Command::Snr { amplitude } => commands::snr(&cfg, amplitude.unwrap_or(cfg.amplitude))?.render(cli.table),
        Command::Simulate { sd, mode, trials, seed, sequential } => {
            cfg.mode = mode.unwrap_or(cfg.mode);
            cfg.trials = trials.unwrap_or(cfg.trials);
            cfg.seed = seed.unwrap_or(cfg.seed);
            if sequential {
                cfg.execution = Execution::Sequential;
            }
            cfg.validate().map_err(CliError::Validation)?;
            commands::simulate(&cfg, sd || cfg.with_sd, cli.table)?
        }
        Command::Classify { map, observation } => {
            let map = required(map, &cfg.map, "map")?;
            let observation = required(observation, &cfg.observation, "observation")?;
            commands::classify(&cfg, &map, &observation)?.render(cli.table)
        }
        Command::Rectify { image, samples, zero_center } => {
            let image = required(image, &cfg.image, "image")?;
            let samples = samples.unwrap_or(cfg.samples_per_cell);
            commands::rectify(&cfg, &image, samples, zero_center || cfg.zero_center)?.to_text()
        }
    };
    match cli.output.or(cfg.output) {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("roadmatch: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
