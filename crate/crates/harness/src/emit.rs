//! CSV tables and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiments::{Exp1Row, Exp2Row, Exp3Row};
use crate::oracle_rates::{OracleDeltaRow, OracleSourceRow};
use crate::rates::RateSummary;

/// A row with a fixed column layout.
pub trait CsvRow {
    fn header() -> Vec<String>;
    fn record(&self) -> Vec<String>;
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl CsvRow for Exp1Row {
    fn header() -> Vec<String> {
        cols(&["alpha", "J", "e_T", "e_l1", "ratio_table1"])
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.alpha.to_string(),
            self.steps.to_string(),
            self.e_t.to_string(),
            self.e_l1.to_string(),
            self.ratio_table1.to_string(),
        ]
    }
}

impl CsvRow for Exp2Row {
    fn header() -> Vec<String> {
        cols(&["alpha", "J", "e_inf"])
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.alpha.to_string(),
            self.steps.to_string(),
            self.e_inf.to_string(),
        ]
    }
}

impl CsvRow for Exp3Row {
    fn header() -> Vec<String> {
        cols(&["alpha", "J", "error", "iterations", "optimality_residual"])
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.alpha.to_string(),
            self.steps.to_string(),
            self.error.to_string(),
            self.iterations.to_string(),
            self.optimality_residual.to_string(),
        ]
    }
}

impl CsvRow for OracleDeltaRow {
    fn header() -> Vec<String> {
        cols(&["alpha", "J", "e_T", "e_l1"])
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.alpha.to_string(),
            self.steps.to_string(),
            self.e_t.to_string(),
            self.e_l1.to_string(),
        ]
    }
}

impl CsvRow for OracleSourceRow {
    fn header() -> Vec<String> {
        cols(&["alpha", "J", "e_inf"])
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.alpha.to_string(),
            self.steps.to_string(),
            self.e_inf.to_string(),
        ]
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_records(
    path: &Path,
    header: Vec<String>,
    records: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(&header).map_err(csv_err(path))?;
    for r in records {
        w.write_record(&r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Header line plus one line per row, in the given order.
pub fn write_csv<R: CsvRow>(path: &Path, rows: &[R]) -> Result<()> {
    write_records(path, R::header(), rows.iter().map(CsvRow::record))
}

/// `alpha, metric, slope, rate_1, …` (rows may differ in length).
pub fn write_rates(path: &Path, rates: &[RateSummary]) -> Result<()> {
    let width = rates
        .iter()
        .map(|r| r.fit.pairwise.len())
        .max()
        .unwrap_or(0);
    let mut header = cols(&["alpha", "metric", "slope"]);
    header.extend((1..=width).map(|i| format!("rate_{i}")));
    write_records(
        path,
        header,
        rates.iter().map(|r| {
            let mut rec = vec![
                r.alpha.to_string(),
                r.metric.clone(),
                r.fit.slope.to_string(),
            ];
            rec.extend(r.fit.pairwise.iter().map(|p| p.to_string()));
            rec
        }),
    )
}

/// Parse `(alpha, J, column)` triples from an emitted CSV.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<(f64, usize, f64)>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let headers = r.headers().map_err(csv_err(path))?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            HarnessError::Config(format!("{} has no column `{name}`", path.display()))
        })
    };
    let (ia, ij, ic) = (find("alpha")?, find("J")?, find(column)?);
    let parse_err =
        |what: &str| HarnessError::Config(format!("{}: unparsable {what}", path.display()));
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        out.push((
            rec[ia].parse().map_err(|_| parse_err("alpha"))?,
            rec[ij].parse().map_err(|_| parse_err("J"))?,
            rec[ic].parse().map_err(|_| parse_err(column))?,
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub wall_time_seconds: f64,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(
        command: &str,
        config: &ExperimentConfig,
        wall_time_seconds: f64,
        files: Vec<String>,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            wall_time_seconds,
            files,
        }
    }
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).map_err(|source| HarnessError::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, text + "\n").map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })
}
