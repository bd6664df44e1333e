//! CSV series and run metadata.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qhmc_core::diagnostics::MixingReport;
use qhmc_core::sampler::ChainOutput;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// Shortest representation that parses back to the same `f64`; `nan` for NaN.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

/// Fixed 12-decimal rendering with trailing zeros removed.
pub fn trimmed(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), num)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// `metadata.json`: the resolved config plus whatever the command reports.
#[derive(Debug, Serialize)]
pub struct Metadata<'a, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub results: R,
}

pub fn write_metadata<R: Serialize>(dir: &Path, command: &str, config: &ExperimentConfig, results: R) -> Result<PathBuf> {
    let path = dir.join("metadata.json");
    let meta = Metadata { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), command, config, results };
    write_json(&path, &meta)?;
    Ok(path)
}

/// Every iteration's position with acceptance, divergence and potential.
pub fn write_samples(path: &Path, chain: &ChainOutput) -> Result<()> {
    let mut header = vec!["iteration".to_string()];
    header.extend((0..chain.dim).map(|i| format!("x{i}")));
    header.extend(["potential", "accepted", "diverged"].map(String::from));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..chain.len()).map(|k| {
        let mut row = vec![k.to_string()];
        row.extend(chain.samples[k].iter().map(|v| num(*v)));
        row.push(num(chain.potential_trace[k]));
        row.push(u8::from(chain.accepted[k]).to_string());
        row.push(u8::from(chain.diverged[k]).to_string());
        row
    });
    write_csv(path, &header, rows)
}

pub fn write_acf(path: &Path, report: &MixingReport, lags: usize) -> Result<()> {
    let rows = report.acf.iter().take(lags + 1).enumerate().map(|(k, r)| vec![k.to_string(), num(*r)]);
    write_csv(path, &["lag", "rho"], rows)
}

/// Normalised histogram (`density` integrates to one).
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, f64)> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in &finite {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = finite.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let left = lo + width * i as f64;
            (left, left + width, c as f64 / (n * width))
        })
        .collect()
}

pub fn write_histogram(path: &Path, values: &[f64], bins: usize) -> Result<()> {
    let rows = histogram(values, bins).into_iter().map(|(l, r, d)| vec![num(l), num(r), num(d)]);
    write_csv(path, &["bin_left", "bin_right", "density"], rows)
}
