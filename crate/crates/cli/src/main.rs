use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sphere_pursuit::scenario::{self, Mode, RunError, ScenarioError};

/// Pursuit-evasion on a sphere: run a scenario file and write its artifacts.
#[derive(Debug, Parser)]
#[command(name = "sphere-pe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Equilibrium playout: trajectory.csv, trajectory.txt, summary.txt.
    Simulate(Io),
    /// Apollonius boundaries and intercept records: boundary_NN.csv, intercept_NN.txt.
    Apollonius(Io),
    /// One-on-one equilibrium intercept record: intercept.txt.
    Intercept(Io),
    /// Two-pursuer intercept: two_pursuer.txt, boundary_p1.csv, boundary_p2.csv.
    TwoPursuer(Io),
    /// Target-guarding verdict and a random-polyline playout: guard.txt, guard_trajectory.csv.
    Guard(Io),
}

#[derive(Debug, Args)]
struct Io {
    /// Scenario document (TOML).
    scenario: PathBuf,
    /// Directory for the output files; created if missing.
    outdir: PathBuf,
}

impl Command {
    fn split(self) -> (Mode, Io) {
        match self {
            Command::Simulate(io) => (Mode::Simulate, io),
            Command::Apollonius(io) => (Mode::Apollonius, io),
            Command::Intercept(io) => (Mode::Intercept, io),
            Command::TwoPursuer(io) => (Mode::TwoPursuer, io),
            Command::Guard(io) => (Mode::Guard, io),
        }
    }
}

fn run(mode: Mode, io: Io) -> Result<Vec<PathBuf>, RunError> {
    let s = scenario::parse_file(&io.scenario)?;
    if s.mode != mode {
        return Err(RunError::Scenario {
            path: Some(io.scenario),
            source: ScenarioError::new(
                "mode",
                format!("scenario is {}, subcommand is {mode}", s.mode),
            ),
        });
    }
    scenario::execute(&s, &io.outdir)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (mode, io) = cli.command.split();
    match run(mode, io) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
