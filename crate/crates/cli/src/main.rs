//! `jjbath` command-line front end. Writes CSV tables and JSON reports into
//! `--out`; exit status 0 on success, 2 on invalid input, 3 on numerical failure.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod figures;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};
use figures::Figure;
use output::Output;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Core(jjbath::Error),
    Io(std::io::Error),
}

impl From<jjbath::Error> for CliError {
    fn from(e: jjbath::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            _ => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "jjbath", version, about = "Josephson-junction-array bath correlators and GKSL coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Preset (junction, lorentzian, lorentzian-broad, disorder) or path to a scenario JSON
    #[arg(long, global = true)]
    scenario: Option<String>,
    /// Oscillator frequency
    #[arg(long, global = true)]
    omega0: Option<f64>,
    /// Inverse temperature; omitted means zero temperature
    #[arg(long, global = true)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// G(t) of a junction (exact and perturbative) or Γ(t) of a chain
    Correlation,
    /// Spectral density J(E) and the chain profiles
    Spectral,
    /// Decay rate and Lamb shift at omega0
    Gksl,
    /// Oscillator evolution from a Fock state
    Evolve,
    /// Large-E_C to large-E_J mapping and its check
    Duality,
    /// Sample a disordered chain
    Disorder,
    /// Born-Markov and secular criteria
    Markovianity,
    /// Data behind a figure preset
    Figure {
        #[arg(value_enum)]
        name: Figure,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Correlation => "correlation",
            Command::Spectral => "spectral",
            Command::Gksl => "gksl",
            Command::Evolve => "evolve",
            Command::Duality => "duality",
            Command::Disorder => "disorder",
            Command::Markovianity => "markovianity",
            Command::Figure { .. } => "figure",
        }
    }

    fn default_scenario(&self) -> &'static str {
        match self {
            Command::Correlation | Command::Figure { .. } => "junction",
            Command::Disorder => "disorder",
            _ => "lorentzian",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output_path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let settings = config::resolve(
        cfg,
        Overrides {
            command: cli.command.name(),
            default_scenario: cli.command.default_scenario(),
            scenario: cli.scenario.as_deref(),
            seed: cli.seed,
            omega0: cli.omega0,
            beta: cli.beta,
        },
    )?;
    let mut out = Output::new(&out_dir, &settings)?;
    let report = match cli.command {
        Command::Correlation => commands::correlation(&settings, &mut out).map(|_| None),
        Command::Spectral => commands::spectral(&settings, &mut out).map(|_| None),
        Command::Gksl => commands::gksl(&settings, &mut out).map(Some),
        Command::Evolve => commands::evolve(&settings, &mut out).map(|_| None),
        Command::Duality => commands::duality(&settings, &mut out).map(Some),
        Command::Disorder => commands::disorder(&settings, &mut out).map(Some),
        Command::Markovianity => commands::markovianity(&settings, &mut out).map(Some),
        Command::Figure { name } => {
            out.echo_extra("figure", format!("{name:?}").to_lowercase());
            figures::run(name, &settings, &mut out).map(|_| None)
        }
    }?;
    if let Some(r) = report {
        // A closed pipe on stdout is not a failure of the run.
        let _ = writeln!(std::io::stdout(), "{r}");
    }
    for p in &out.written {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
