use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use execlab_cli::fixtures::{replay_builtin, replay_file};
use execlab_cli::scenario::Format;
use execlab_cli::{figures, load_scenario, run, CliError};

#[derive(Parser)]
#[command(name = "execlab", version, about = "Execution simulation, fixtures and cost analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write logs and reports.
    Run { scenario: PathBuf },
    /// Replay the built-in book fixtures, or the given fixture files.
    ReplayFixtures { files: Vec<PathBuf> },
    /// Write efficient-frontier tables without simulating.
    Frontier { scenario: PathBuf },
    /// Write plot data for a finished run.
    Figures { run_dir: PathBuf },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let prepare = |path: &PathBuf| -> Result<_, CliError> {
        let mut s = load_scenario(path)?;
        if let Some(seed) = cli.seed {
            s = s.with_seed(seed);
        }
        if let Some(f) = cli.format {
            s.output.format = f;
        }
        Ok(s)
    };
    match &cli.command {
        Command::Run { scenario } => {
            let s = prepare(scenario)?;
            let (report, files) = run(&s, &out)?;
            if let Some(e) = &report.execution {
                println!("filled {} of {} ({} residual)", e.filled, e.quantity, e.residual);
            }
            if let Some(is) = &report.shortfall {
                println!("shortfall {} ({} bps)", is.total, is.total_bps);
            }
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Frontier { scenario } => {
            for f in execlab_cli::run::run_frontier(&prepare(scenario)?, &out)? {
                println!("wrote {}", f.display());
            }
        }
        Command::Figures { run_dir } => {
            let dest = cli.out.clone().unwrap_or_else(|| run_dir.clone());
            for f in figures::emit_figures(run_dir, &dest)? {
                println!("wrote {}", f.display());
            }
        }
        Command::ReplayFixtures { files } => {
            let outcomes = if files.is_empty() {
                replay_builtin()?
            } else {
                files.iter().map(|f| replay_file(f)).collect::<Result<Vec<_>, _>>()?
            };
            let failed = outcomes.iter().filter(|o| !o.passed()).count();
            for o in &outcomes {
                println!("{o}");
            }
            if failed > 0 {
                return Err(CliError::FixtureMismatch { failed, total: outcomes.len() });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
