use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod manifest;

#[derive(Parser, Debug)]
#[command(name = "ciot", version, about = "Bearer-request traffic, MME delay model and EPC simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scenario TOML; the built-in reference scenario when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, env = "CIOT_OUT_DIR", default_value = "ciot-out")]
    pub out: PathBuf,
    /// Independent replications with seeds seed, seed+1, ...
    #[arg(long, global = true, default_value_t = 1)]
    pub replications: u32,
    /// Worker threads for replications; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Overrides the source count, keeping the group size.
    #[arg(long, global = true)]
    pub sources: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a bearer-request stream from the scenario.
    Generate,
    /// Compare inter-arrival gaps against the exponential law.
    ValidateArrivals {
        /// Trace CSV to test instead of a generated stream.
        #[arg(long)]
        stream: Option<PathBuf>,
        /// Model rate in requests/s; defaults to the scenario rate, or the
        /// fitted rate of `--stream`.
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Run the EPC simulation and write per-request delays.
    Simulate,
    /// Evaluate the analytic delay model.
    Predict {
        #[arg(long, default_value_t = 0.99)]
        percentile: f64,
    },
    /// Run the closed scaling loop over the ramp or a trace.
    Scale {
        /// Trace CSV replayed window by window.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate => commands::generate(&cli.common),
        Command::ValidateArrivals { stream, rate } => {
            commands::validate_arrivals(&cli.common, stream.as_deref(), *rate)
        }
        Command::Simulate => commands::simulate(&cli.common),
        Command::Predict { percentile } => commands::predict(&cli.common, *percentile),
        Command::Scale { trace } => commands::scale(&cli.common, trace.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = e.hint() {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
