//! Command-line driver for the measurement and exclusion-process library.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 on runtime failure.

mod commands;
mod output;
mod settings;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::Artifacts;
use settings::{Flags, Settings};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl From<zeno_ssep::Error> for CliError {
    fn from(e: zeno_ssep::Error) -> Self {
        match e {
            zeno_ssep::Error::Eigendecomposition => CliError::Runtime(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "zeno-ssep", version, about = "Repeated configuration measurements on fermion rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the canonical anticommutation relations (--n)
    CarCheck,
    /// Transition matrix of one measurement interval (--n --t)
    Transition,
    /// Emergent generator against the exclusion-process generator (--n)
    Generator,
    /// Generator agreement across random potentials and couplings (--n --specs --lambdas)
    Independence,
    /// Distance to the limit law under the rescaled measurement scan (--n --tau --m --init)
    ZenoScan,
    /// Survival probability of the initial configuration (--n --total-time --m --init)
    ZenoSurvival,
    /// Product formula convergence to the matrix exponential (--n --ks [--alpha --scale])
    LemmaCheck,
    /// Gillespie ensemble against the master equation (--n --tau --trajectories --init)
    SsepCompare,
    /// Density profiles: measured, exclusion process, heat equation, free evolution (--n --tau --m --init)
    Density,
    /// One sampled measurement trajectory (--n --t --steps --init)
    Trajectory,
}

fn run(command: Command, flags: Flags) -> Result<(), CliError> {
    let settings = Settings::new(flags)?;
    let mut artifacts = Artifacts::default();
    let summary = match command {
        Command::CarCheck => commands::car_check(&settings, &mut artifacts),
        Command::Transition => commands::transition(&settings, &mut artifacts),
        Command::Generator => commands::generator(&settings, &mut artifacts),
        Command::Independence => commands::independence(&settings, &mut artifacts),
        Command::ZenoScan => commands::zeno_scan_cmd(&settings, &mut artifacts),
        Command::ZenoSurvival => commands::zeno_survival_cmd(&settings, &mut artifacts),
        Command::LemmaCheck => commands::lemma_check(&settings, &mut artifacts),
        Command::SsepCompare => commands::ssep_compare(&settings, &mut artifacts),
        Command::Density => commands::density(&settings, &mut artifacts),
        Command::Trajectory => commands::trajectory(&settings, &mut artifacts),
    }?;
    for path in artifacts.commit(&settings.out_dir())? {
        eprintln!("wrote {}", path.display());
    }
    println!("{summary}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command, cli.flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
