//! `qss`: batch commands for the secret-sharing simulator.

mod angles;
mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qss_core::states::CarrierFamily;

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "qss", version, about = "Quantum secret sharing simulator and analyzers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Carrier {
    G,
    Ghz,
}

impl From<Carrier> for CarrierFamily {
    fn from(c: Carrier) -> Self {
        match c {
            Carrier::G => CarrierFamily::G,
            Carrier::Ghz => CarrierFamily::Ghz,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FrameMode {
    Default,
    Search,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Marginals {
    FirstLast,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run of the protocol; writes transcript.jsonl and summary.json
    RunProtocol {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        phi: String,
        /// Read angles in degrees
        #[arg(long)]
        deg: bool,
        #[arg(long, value_enum, default_value = "g")]
        carrier: Carrier,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coalition as 1-based Bob numbers, e.g. `1,3`; repeatable
        #[arg(long = "coalition")]
        coalitions: Vec<String>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact information and Bell quantities over a grid of attack angles
    SweepAttack {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "g")]
        carrier: Carrier,
        /// `START:STOP:COUNT` or a comma-separated list
        #[arg(long, default_value = "0:pi/2:21")]
        phi_grid: String,
        #[arg(long)]
        deg: bool,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-setting correlation sums of a noisy carrier
    Bell {
        #[arg(long, value_enum)]
        state: Carrier,
        #[arg(long)]
        n: usize,
        /// Visibility p of the pure state in p|ψ⟩⟨ψ| + (1−p)I/2^n
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, value_enum, default_value = "default")]
        frame: FrameMode,
        #[arg(long, default_value_t = qss_core::bell::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical visibilities of the G and GHZ families
    Thresholds {
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Marginal-determination analysis of G_n
    Rdm {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "first-last")]
        marginals: Marginals,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full correlation tensor
    Tensor {
        #[arg(long, value_enum)]
        state: Carrier,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> CliResult<()> {
    if let Ok(value) = std::env::var("QSS_THREADS") {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("QSS_THREADS={value:?} is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let outputs = match cli.command {
        Command::RunProtocol {
            m,
            rounds,
            phi,
            deg,
            carrier,
            seed,
            coalitions,
            out,
        } => {
            let phi = angles::parse_angle(&phi, deg)?;
            commands::run_protocol(m, rounds, phi, carrier.into(), seed, &coalitions, &out)?
        }
        Command::SweepAttack {
            m,
            carrier,
            phi_grid,
            deg,
            out,
        } => {
            let grid = angles::parse_grid(&phi_grid, deg)?;
            commands::sweep_attack(m, carrier.into(), &grid, &out)?
        }
        Command::Bell {
            state,
            n,
            noise,
            frame,
            restarts,
            seed,
            out,
        } => commands::bell(state.into(), n, noise, frame, restarts, seed, out.as_deref())?,
        Command::Thresholds { n_min, n_max, out } => commands::thresholds(n_min, n_max, &out)?,
        Command::Rdm { n, marginals, out } => commands::rdm(n, marginals, out.as_deref())?,
        Command::Tensor {
            state,
            n,
            noise,
            out,
        } => commands::tensor(state.into(), n, noise, out.as_deref())?,
    };
    outputs.commit()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qss: {e}");
            e.exit_code()
        }
    }
}
