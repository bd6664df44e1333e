//! Force magnitudes at a single high-gradient point across q.

use anyhow::Result;
use qhmc_core::potentials::PotentialRegistry;
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{self, num, trimmed};

pub const FORCE_HEADER: [&str; 4] = ["q", "reference_point", "jackson_derivative", "force_magnitude"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceRow {
    pub q: f64,
    /// `q^2 x`; absent on the classical row.
    pub reference_point: Option<f64>,
    pub jackson_derivative: f64,
    pub force_magnitude: f64,
}

impl ForceRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            num(self.q),
            self.reference_point.map_or_else(|| "N/A".into(), trimmed),
            num(self.jackson_derivative),
            num(self.force_magnitude),
        ]
    }
}

/// Rows for the configured target (one-dimensional) at `x`: the Jackson
/// derivative of `U` and the force magnitude `q^{1/2} |D_q U(x)|`. The
/// classical row uses the finite-difference fallback.
pub fn force_rows(cfg: &ExperimentConfig, registry: &PotentialRegistry) -> Result<Vec<ForceRow>> {
    let section = cfg.force_table.clone().unwrap_or_default();
    let potential = registry.build(&cfg.target.name, &cfg.target.params()).map_err(ConfigError::from)?;
    if potential.dim() != 1 {
        return Err(ConfigError(format!("force-table needs a one-dimensional target, got dimension {}", potential.dim())).into());
    }
    section
        .q_values
        .iter()
        .map(|&q| {
            let dp = cfg.qcalc.deformation(q)?;
            let d = potential.q_gradient(&[section.x], &dp)?[0];
            let reference_point = (!dp.is_classical()).then_some(q * q * section.x);
            Ok(ForceRow { q, reference_point, jackson_derivative: d, force_magnitude: (q.sqrt() * d).abs() })
        })
        .collect()
}

pub fn run_force_table(cfg: &ExperimentConfig, registry: &PotentialRegistry) -> Result<Vec<ForceRow>> {
    let rows = force_rows(cfg, registry)?;
    let dir = &cfg.output.dir;
    output::ensure_dir(dir)?;
    output::write_csv(&dir.join("force_table.csv"), &FORCE_HEADER, rows.iter().map(ForceRow::record))?;
    output::write_metadata(dir, "force-table", cfg, &rows)?;
    Ok(rows)
}
