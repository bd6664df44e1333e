//! Configuration-driven experiment runner for q-HMC: single chains,
//! q-sweeps, force tables and inverse-problem pipelines.

pub mod chain;
pub mod config;
pub mod force_table;
pub mod inverse;
pub mod output;
pub mod runner;
pub mod sweep;

use std::path::PathBuf;

use anyhow::Result;
use qhmc_core::potentials::PotentialRegistry;

pub use config::{ConfigError, ExperimentConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sweep,
    ForceTable,
    Inverse,
    Chain,
}

/// Loads the config, applies overrides, runs the command and returns the
/// output directory.
pub fn execute(command: Command, config: &std::path::Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<PathBuf> {
    let mut cfg = ExperimentConfig::load(config)?;
    cfg.apply_overrides(seed, out);
    cfg.validate()?;
    let potentials = PotentialRegistry::builtin();
    match command {
        Command::Sweep => {
            sweep::run_sweep(&cfg, &potentials)?;
        }
        Command::ForceTable => {
            force_table::run_force_table(&cfg, &potentials)?;
        }
        Command::Inverse => {
            inverse::run_inverse(&cfg, &inverse::InverseRegistry::builtin())?;
        }
        Command::Chain => {
            chain::run_single(&cfg, &potentials)?;
        }
    }
    Ok(cfg.output.dir)
}
