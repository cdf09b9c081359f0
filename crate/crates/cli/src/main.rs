mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Failure;

#[derive(Parser, Debug)]
#[command(name = "fracks", version, about = "Time-fractional chemotaxis-fluid solver and verification harness")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; a file for `specfun-table`, stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to the rayon default).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for random profiles without their own seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a golden special-function table.
    SpecfunTable {
        /// Mittag-Leffler order for the E_{α,1} rows (default 1).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Run the Picard solver and write snapshots plus `run.csv`.
    Solve,
    /// Verification experiments.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Smoothing exponent of a point mass under the heat kernel, S or P.
    Decay {
        #[arg(long, default_value = "S")]
        kind: String,
    },
    /// Compare a run with its rescaled copy.
    Scaling {
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
    },
    /// Picard ratios over the configured κ list.
    Contraction,
    /// Perturbation experiment comparing linear and nonlinear differences.
    Asymptotics,
    /// Norms of a snapshot file.
    Norms {
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Spectral solution operators against the subordination formulas.
    Operators,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            eprintln!("ERR 2: {first}");
            eprint!("{text}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ERR {}: {}", f.code, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::internal(e.to_string()))?;
    }
    let g = &cli.global;
    match cli.command {
        Command::SpecfunTable { alpha } => commands::specfun_table(g, alpha),
        Command::Solve => commands::solve(g),
        Command::Verify(v) => commands::verify(g, v),
    }
}
