//! Persisted results: long-form curves CSV, summary JSON, sweep table.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::runner::ExperimentResult;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CURVES_FILE: &str = "curves.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SWEEP_FILE: &str = "sweep.csv";

pub const CURVE_HEADER: [&str; 9] = ["policy", "alpha", "beta", "T", "n", "m", "replication", "t", "cum_regret"];

/// One row of the curves file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub policy: String,
    pub alpha: f64,
    pub beta: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub n: usize,
    pub m: usize,
    pub replication: usize,
    pub t: usize,
    pub cum_regret: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub policy: String,
    pub alpha: f64,
    pub beta: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub n: usize,
    pub m: usize,
    pub final_mean: f64,
    pub final_std: f64,
    pub final_realized_mean: f64,
    pub replications: usize,
    pub seed: u64,
}

fn csv_writer<W: Write>(inner: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(inner)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::config(format!("{}: {other:?}", path.display())),
    }
}

fn beta_field(beta: Option<f64>) -> String {
    beta.map(|b| b.to_string()).unwrap_or_default()
}

/// Appends the curve rows of `result` to `writer`.
pub fn write_curve_rows<S: Real, W: Write>(result: &ExperimentResult<S>, writer: &mut csv::Writer<W>) -> csv::Result<()> {
    for policy in &result.policies {
        let beta = beta_field(policy.beta);
        for (r, curve) in policy.curves.iter().enumerate() {
            for (&t, value) in result.checkpoints.iter().zip(curve) {
                writer.write_record([
                    policy.label.as_str(),
                    &result.alpha.to_string(),
                    &beta,
                    &result.horizon.to_string(),
                    &result.n.to_string(),
                    &result.m.to_string(),
                    &r.to_string(),
                    &t.to_string(),
                    &value.to_string(),
                ])?;
            }
        }
    }
    Ok(())
}

pub fn summary_entries<S: Real>(result: &ExperimentResult<S>) -> Vec<SummaryEntry> {
    result
        .policies
        .iter()
        .map(|p| SummaryEntry {
            policy: p.label.clone(),
            alpha: result.alpha,
            beta: p.beta,
            horizon: result.horizon,
            n: result.n,
            m: result.m,
            final_mean: p.final_mean().as_f64(),
            final_std: p.final_std().as_f64(),
            final_realized_mean: p.final_realized_mean().as_f64(),
            replications: result.replications,
            seed: result.base_seed,
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_curves<S: Real>(dir: &Path, results: &[ExperimentResult<S>]) -> Result<PathBuf> {
    let path = dir.join(CURVES_FILE);
    let mut writer = csv_writer(create(&path)?);
    writer.write_record(CURVE_HEADER).map_err(|e| csv_error(&path, e))?;
    for result in results {
        write_curve_rows(result, &mut writer).map_err(|e| csv_error(&path, e))?;
    }
    writer.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_summary<S: Real>(dir: &Path, results: &[ExperimentResult<S>]) -> Result<PathBuf> {
    let path = dir.join(SUMMARY_FILE);
    let entries: Vec<SummaryEntry> = results.iter().flat_map(summary_entries).collect();
    let mut text = serde_json::to_string_pretty(&entries)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `curves.csv` and `summary.json` into `dir`.
pub fn write_run<S: Real>(dir: &Path, result: &ExperimentResult<S>) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let results = std::slice::from_ref(result);
    Ok(vec![write_curves(dir, results)?, write_summary(dir, results)?])
}

/// Writes the sweep's curves and summary plus `sweep.csv`
/// (`policy,alpha,beta,final_mean,final_std,replications`).
pub fn write_sweep<S: Real>(dir: &Path, results: &[ExperimentResult<S>]) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let curves = write_curves(dir, results)?;
    let summary = write_summary(dir, results)?;
    let path = dir.join(SWEEP_FILE);
    let mut writer = csv_writer(create(&path)?);
    let wrap = |e| csv_error(&path, e);
    writer
        .write_record(["policy", "alpha", "beta", "final_mean", "final_std", "replications"])
        .map_err(wrap)?;
    for result in results {
        for p in &result.policies {
            writer
                .write_record([
                    p.label.as_str(),
                    &result.alpha.to_string(),
                    &beta_field(p.beta),
                    &p.final_mean().to_string(),
                    &p.final_std().to_string(),
                    &result.replications.to_string(),
                ])
                .map_err(wrap)?;
        }
    }
    writer.flush().map_err(|e| Error::io(&path, e))?;
    Ok(vec![curves, summary, path])
}

pub fn read_curve_rows<R: Read>(reader: R) -> csv::Result<Vec<CurveRow>> {
    csv::Reader::from_reader(reader).deserialize().collect()
}

pub fn load_curves(path: impl AsRef<Path>) -> Result<Vec<CurveRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_curve_rows(file).map_err(|e| csv_error(path, e))
}

pub fn load_summary(path: impl AsRef<Path>) -> Result<Vec<SummaryEntry>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
