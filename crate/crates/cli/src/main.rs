use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fracdiff_cli::commands::{self, Command};
use fracdiff_cli::{parse_config, CliError, RunConfig};
use fracdiff_core::Execution;

/// Fractional diffusion toolkit: stable sampling, Mittag-Leffler
/// functions, Green functions, the Riesz solver and agent simulations.
#[derive(Parser, Debug)]
#[command(name = "fracdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML-style parameter file; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for the randomized subcommands (required by them).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Run the data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Draw stable, one-sided or 2-D subgaussian variates.
    Sample,
    /// Tabulate Mittag-Leffler derivatives or the CTRW jump-count law.
    MlEval,
    /// Tabulate the Green function of the fractional diffusion equation.
    Green,
    /// Run the explicit Riesz scheme and write density snapshots.
    Solve,
    /// Simulate a Levy-flight agent ensemble.
    Agents,
    /// Simulate a continuous-time random walk.
    Ctrw,
    /// Compare agents, solver and reference density.
    Compare,
    /// Per-step total mass of a solver run.
    MassReport,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Sample => Command::Sample,
            Cmd::MlEval => Command::MlEval,
            Cmd::Green => Command::Green,
            Cmd::Solve => Command::Solve,
            Cmd::Agents => Command::Agents,
            Cmd::Ctrw => Command::Ctrw,
            Cmd::Compare => Command::Compare,
            Cmd::MassReport => Command::MassReport,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    config.seed = cli.seed;
    config.out_dir = cli.out.clone();
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let Format::Csv = cli.format;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = load(&cli).and_then(|config| commands::run(cli.command.into(), &config, exec));
    match result {
        Ok(summary) => {
            for note in &summary.notes {
                println!("{note}");
            }
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fracdiff: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
