//! Artifact serialization: versioned CSV / JSON tables written atomically.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use cyclodet::experiments::{SweepPoint, ThresholdTable};
use cyclodet::{DetectorKind, ExperimentResult, ScenarioConfig};

pub const SCHEMA_CALIBRATE: &str = "cyclodet.calibrate/1";
pub const SCHEMA_ROC: &str = "cyclodet.roc/1";
pub const SCHEMA_SWEEP: &str = "cyclodet.sweep/1";
pub const SCHEMA_SINGLE_TRIAL: &str = "cyclodet.single_trial/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Writes bytes through a temporary file in the target directory followed
/// by a rename, so readers never observe partial artifacts.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .with_context(|| format!("creating temporary file next to {}", path.display()))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.flush())
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn csv_header(schema: &str, columns: &str) -> String {
    format!("# schema={schema}\n{columns}\n")
}

#[derive(Serialize)]
struct CalibrateArtifact<'a> {
    schema: &'static str,
    seed: u64,
    scenario: &'a ScenarioConfig,
    tables: &'a [ThresholdTable],
}

pub fn render_calibrate(
    tables: &[ThresholdTable],
    scenario: &ScenarioConfig,
    seed: u64,
    format: Format,
) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut out = csv_header(SCHEMA_CALIBRATE, "detector,pfa_target,threshold,trials");
            for table in tables {
                for (pfa, eta) in table.pfa_targets.iter().zip(&table.thresholds) {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        table.detector, pfa, eta, table.trials
                    ));
                }
            }
            Ok(out.into_bytes())
        }
        Format::Json => {
            let artifact = CalibrateArtifact {
                schema: SCHEMA_CALIBRATE,
                seed,
                scenario,
                tables,
            };
            Ok(serde_json::to_vec_pretty(&artifact)?)
        }
    }
}

#[derive(Serialize)]
struct RocRow {
    detector: DetectorKind,
    pfa: f64,
    pd: f64,
    pd_stderr: f64,
}

#[derive(Serialize)]
struct RocArtifact<'a> {
    schema: &'static str,
    seed: u64,
    trials: usize,
    scenario: &'a ScenarioConfig,
    rows: Vec<RocRow>,
}

/// ROC rows sorted by (detector, pfa); the library already produces the
/// points in ascending pfa order per detector.
pub fn render_roc(result: &ExperimentResult, format: Format) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for curve in &result.roc {
        for p in &curve.points {
            rows.push(RocRow {
                detector: curve.detector,
                pfa: p.pfa,
                pd: p.pd,
                pd_stderr: p.pd_stderr,
            });
        }
    }
    // Points per detector are already in ascending pfa order; a stable sort
    // on the name yields (detector, pfa) ordering.
    rows.sort_by(|a, b| a.detector.as_str().cmp(b.detector.as_str()));
    match format {
        Format::Csv => {
            let mut out = csv_header(SCHEMA_ROC, "detector,pfa,pd,pd_stderr");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.detector, r.pfa, r.pd, r.pd_stderr
                ));
            }
            Ok(out.into_bytes())
        }
        Format::Json => {
            let artifact = RocArtifact {
                schema: SCHEMA_ROC,
                seed: result.seed,
                trials: result.trials,
                scenario: &result.scenario,
                rows,
            };
            Ok(serde_json::to_vec_pretty(&artifact)?)
        }
    }
}

#[derive(Serialize)]
struct SweepArtifact<'a> {
    schema: &'static str,
    seed: u64,
    trials_per_point: usize,
    pfa: f64,
    scenario: &'a ScenarioConfig,
    rows: &'a [SweepPoint],
}

pub fn render_sweep(result: &ExperimentResult, pfa: f64, format: Format) -> Result<Vec<u8>> {
    let mut rows = result.sweep.clone();
    rows.sort_by(|a, b| {
        a.detector
            .as_str()
            .cmp(b.detector.as_str())
            .then(a.snr_db.partial_cmp(&b.snr_db).expect("finite SNR"))
    });
    match format {
        Format::Csv => {
            let mut out = csv_header(SCHEMA_SWEEP, "detector,snr_db,pd,pd_stderr");
            for p in &rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    p.detector, p.snr_db, p.pd, p.pd_stderr
                ));
            }
            Ok(out.into_bytes())
        }
        Format::Json => {
            let artifact = SweepArtifact {
                schema: SCHEMA_SWEEP,
                seed: result.seed,
                trials_per_point: result.trials,
                pfa,
                scenario: &result.scenario,
                rows: &rows,
            };
            Ok(serde_json::to_vec_pretty(&artifact)?)
        }
    }
}

#[derive(Serialize)]
pub struct TrialRow {
    pub detector: DetectorKind,
    pub hypothesis: &'static str,
    pub statistic: f64,
}

#[derive(Serialize)]
struct SingleTrialArtifact<'a> {
    schema: &'static str,
    seed: u64,
    scenario: &'a ScenarioConfig,
    rows: &'a [TrialRow],
}

pub fn render_single_trial(
    rows: &[TrialRow],
    scenario: &ScenarioConfig,
    seed: u64,
    format: Format,
) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut out = csv_header(SCHEMA_SINGLE_TRIAL, "detector,hypothesis,statistic");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{}\n",
                    r.detector, r.hypothesis, r.statistic
                ));
            }
            Ok(out.into_bytes())
        }
        Format::Json => {
            let artifact = SingleTrialArtifact {
                schema: SCHEMA_SINGLE_TRIAL,
                seed,
                scenario,
                rows,
            };
            Ok(serde_json::to_vec_pretty(&artifact)?)
        }
    }
}
