//! Command-line driver for reward-tilted sampling experiments.
//!
//! Five subcommands share one config format and one CSV writer:
//! `pareto`, `convergence`, `audit`, `blockwise`, `sample`. Flags override
//! config values, which override built-in defaults.

pub mod commands;
pub mod config;
pub mod csvout;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use config::{load_config, ExperimentConfig};

#[derive(Parser)]
#[command(name = "align-lab", version, about = "exact and sampled best-of-n experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config file (key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the Monte Carlo draw budget
    #[arg(long)]
    mc_draws: Option<u64>,
    /// Override the worker thread count
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reward-vs-KL sweep: tilted frontier, best-of-n, soft best-of-n
    Pareto {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write a <out-stem>.plot.csv with series,x,y columns
        #[arg(long)]
        plot_data: bool,
    },
    /// KL and TV decay in n at fixed temperatures, with power-law fits
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every exact bound audit plus the Monte Carlo tail checks
    Audit {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare symbolwise tilting against blockwise soft best-of-n
    Blockwise {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample each configured strategy and report drift from the exact law
    Sample {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn merged_config(common: &CommonArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = load_config(&common.config).map_err(CliError::Config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if let Some(draws) = common.mc_draws {
        cfg.mc_draws = Some(draws);
    }
    if let Some(workers) = common.workers {
        cfg.workers = workers;
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

/// Parse arguments, run the selected command, return the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Pareto { common, plot_data } => {
            merged_config(common).and_then(|cfg| commands::cmd_pareto(&cfg, *plot_data))
        }
        Cmd::Convergence { common } => {
            merged_config(common).and_then(|cfg| commands::cmd_convergence(&cfg))
        }
        Cmd::Audit { common } => merged_config(common).and_then(|cfg| commands::cmd_audit(&cfg)),
        Cmd::Blockwise { common } => {
            merged_config(common).and_then(|cfg| commands::cmd_blockwise(&cfg))
        }
        Cmd::Sample { common } => merged_config(common).and_then(|cfg| commands::cmd_sample(&cfg)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}
