mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ConfigError;

/// Talbot-effect qudit simulations: carpets, synthesized states, entangled
/// carpets, CGLMP Bell values and hardware estimates.
#[derive(Parser, Debug)]
#[command(name = "talbot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON config file; missing fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config field, e.g. `--set dim=5` or `--set field.sampling.periods=32`.
    /// The value is parsed as JSON, falling back to a string.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Directory for output files (created if needed).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Density |psi(x, z)|^2 of a periodic field over one revival.
    Carpet(Common),
    /// Lens-grating-lens synthesis of a single-photon Talbot state.
    Synth(Common),
    /// Photon pair through D-slit apertures and the synthesizer.
    Entangle(Common),
    /// One CGLMP evaluation.
    Bell(Common),
    /// CGLMP values over dimensions and source models.
    BellScan(Common),
    /// Talbot length, dimension and information bounds for an SLM.
    Constraints(Common),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<talbot_core::Error>() {
            return match e {
                talbot_core::Error::Io(_) => 1,
                e if e.is_numerical_guard() => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 1;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Carpet(c) => commands::carpet(c),
        Command::Synth(c) => commands::synth(c),
        Command::Entangle(c) => commands::entangle(c),
        Command::Bell(c) => commands::bell(c),
        Command::BellScan(c) => commands::bell_scan(c),
        Command::Constraints(c) => commands::constraints(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
