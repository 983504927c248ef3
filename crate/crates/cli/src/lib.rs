//! Command-line driver for the temporal-superposition SWITCH simulator:
//! configuration resolution, report rendering, and the four subcommands.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::config::{FileConfig, ReportFormat, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "tswitch",
    version,
    about = "Simulate two decaying emitters whose superposed decay times drive operations \
             in an indefinite order, and certify the recovered quantum SWITCH"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve the decay process; report order statistics and the reduced state
    Simulate(SimulateArgs),
    /// Sweep dt values and fit the discretization convergence order
    Converge(ConvergeArgs),
    /// Build the time-bin photon state and certify it against the target
    Timebin(TimebinArgs),
    /// Certify both realizations against the ideal switch in one run
    Verify(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Decay rate of emitter A (1/time)
    #[arg(long)]
    pub gamma_a: Option<f64>,
    /// Decay rate of emitter B (1/time)
    #[arg(long)]
    pub gamma_b: Option<f64>,
    /// Fixed number of evolution steps
    #[arg(long)]
    pub steps: Option<u32>,
    /// Stop once the incomplete-decay weight falls below this instead of
    /// fixing the step count
    #[arg(long, conflicts_with = "steps")]
    pub target_incomplete: Option<f64>,
    /// Dimension of the system register
    #[arg(long)]
    pub system_dim: Option<usize>,
    /// Gate fired by emitter A: i|x|z|h|haar or a JSON matrix of `[re, im]` pairs
    #[arg(long)]
    pub ua: Option<String>,
    /// Gate fired by emitter B
    #[arg(long)]
    pub ub: Option<String>,
    /// Initial system state: basis index or JSON vector of `[re, im]` pairs
    #[arg(long)]
    pub phi: Option<String>,
    /// Make the timer record order-blind (beam-splitter erasure)
    #[arg(long, action = ArgAction::SetTrue)]
    pub symmetrize: bool,
    /// Seed for haar gate specs
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the machine-readable report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    pub format: Option<ReportFormat>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Discretization step (time)
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated dt values, sorted descending
    #[arg(long, value_delimiter = ',', required = true)]
    pub dt: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct TimebinArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Discretization step (time)
    #[arg(long)]
    pub dt: Option<f64>,
    /// Early emission time
    #[arg(long)]
    pub t_early: Option<f64>,
    /// Late emission time
    #[arg(long)]
    pub t_late: Option<f64>,
}

/// Merge defaults, config file, environment, and flags into a resolved run
/// configuration.
pub fn resolve_config(
    common: &CommonArgs,
    dt: Option<f64>,
    t_early: Option<f64>,
    t_late: Option<f64>,
) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let file = FileConfig::load(path)?;
        cfg.apply_file(&file);
    }
    if let Some(v) = common.gamma_a {
        cfg.gamma_a = v;
    }
    if let Some(v) = common.gamma_b {
        cfg.gamma_b = v;
    }
    if let Some(v) = dt {
        cfg.dt = v;
    }
    if let Some(v) = common.steps {
        cfg.steps = Some(v);
    }
    if let Some(v) = common.target_incomplete {
        cfg.target_incomplete = v;
        cfg.steps = None;
    }
    if let Some(v) = common.system_dim {
        cfg.system_dim = v;
    }
    if let Some(ref v) = common.ua {
        cfg.ua = v.clone();
    }
    if let Some(ref v) = common.ub {
        cfg.ub = v.clone();
    }
    if let Some(ref v) = common.phi {
        cfg.phi = v.clone();
    }
    if common.symmetrize {
        cfg.symmetrize = true;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = t_early {
        cfg.t_early = v;
    }
    if let Some(v) = t_late {
        cfg.t_late = v;
    }
    if let Some(v) = common.format {
        cfg.format = v;
    }
    cfg.max_branches = config::max_branches_from_env()?;
    Ok(cfg)
}
