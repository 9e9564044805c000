mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CmdResult, Failure};
use config::{parse_noise, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "adapt-qsci", version, about = "ADAPT-QSCI simulator and experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Run a single seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Noise rates: `P` for both, or `P2Q,PM`.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<(f64, f64)>,
    /// Apply ZNE, readout mitigation and post-selection.
    #[arg(long)]
    mitigate: bool,
    /// Fold factor (1 or 3) for unmitigated noisy runs.
    #[arg(long)]
    fold: Option<u32>,
    /// Per-iteration progress on stderr and mitigation diagnostics.
    #[arg(long, short)]
    verbose: bool,
}

impl ConfigArgs {
    fn load(&self) -> CmdResult<RunConfig> {
        let mut cfg = RunConfig::load(&self.config).map_err(Failure::Input)?;
        let o = Overrides {
            seed: self.seed,
            out: self.out.clone(),
            noise: self.noise,
            mitigate: self.mitigate,
            fold: self.fold,
        };
        cfg.apply(&o).map_err(Failure::Input)?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// ADAPT-QSCI for every configured seed.
    Run(ConfigArgs),
    /// Exact sector ground state, amplitude spectrum and R_delta table.
    Exact {
        #[command(flatten)]
        args: ConfigArgs,
        /// Thresholds for the R_delta table (overrides `exact.deltas`).
        #[arg(long = "delta")]
        deltas: Vec<f64>,
    },
    /// Size (and optionally the listing) of the operator pool.
    Pool {
        n_qubits: usize,
        #[arg(long)]
        list: bool,
    },
    /// Grouped-measurement VQE shot estimate next to the ADAPT-QSCI ledger.
    EstimateShots {
        #[command(flatten)]
        args: ConfigArgs,
        /// Target standard error in Hartree (overrides `estimate.epsilon`).
        #[arg(long)]
        epsilon: Option<f64>,
        /// VQE iterations plus one (overrides `estimate.vqe_iterations`).
        #[arg(long)]
        vqe_iterations: Option<u64>,
    },
    /// Write an FCIDUMP file as a qubit-Hamiltonian JSON file.
    Convert { input: PathBuf, output: PathBuf },
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Run(args) => commands::cmd_run(&args.load()?, args.verbose),
        Command::Exact { args, deltas } => {
            let cfg = args.load()?;
            let deltas = if deltas.is_empty() { cfg.exact.deltas.clone() } else { deltas };
            commands::cmd_exact(&cfg, &deltas)
        }
        Command::Pool { n_qubits, list } => commands::cmd_pool(n_qubits, list),
        Command::EstimateShots { args, epsilon, vqe_iterations } => {
            let mut cfg = args.load()?;
            if let Some(e) = epsilon {
                cfg.estimate.epsilon = e;
            }
            if let Some(v) = vqe_iterations {
                cfg.estimate.vqe_iterations = v;
            }
            cfg.validate().map_err(Failure::Input)?;
            commands::cmd_estimate_shots(&cfg, args.verbose)
        }
        Command::Convert { input, output } => commands::cmd_convert(&input, &output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
