use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::Axis;
use crate::error::Result;
use crate::params::SystemParams;

/// Resolved inputs of one dataset column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    pub column: String,
    pub observable: String,
    /// Parameters before the axis value is applied.
    pub params: SystemParams,
    pub n_th: f64,
    pub temperature_k: f64,
    pub backaction: bool,
    pub overrides: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    pub series: Vec<SeriesMetadata>,
    pub notes: Vec<String>,
}

impl DatasetMetadata {
    pub fn new(series: Vec<SeriesMetadata>, notes: Vec<String>) -> Self {
        DatasetMetadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            series,
            notes,
        }
    }
}

/// Axis values times observables, with a per-row flag list. Missing values
/// (singular or failed points) are `None` and always carry a flag.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepDataset {
    pub id: String,
    pub axis: Axis,
    pub axis_values: Vec<f64>,
    pub columns: Vec<String>,
    /// `rows[i][k]` is column `k` at `axis_values[i]`.
    pub rows: Vec<Vec<Option<f64>>>,
    /// `column:flag` tokens per row.
    pub flags: Vec<Vec<String>>,
    pub metadata: DatasetMetadata,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    id: &'a str,
    axis: &'a Axis,
    rows: usize,
    columns: Vec<String>,
    #[serde(flatten)]
    metadata: &'a DatasetMetadata,
}

impl SweepDataset {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn csv_header(&self) -> String {
        let mut h = self.axis.label();
        for c in &self.columns {
            h.push(',');
            h.push_str(c);
        }
        h.push_str(",flags");
        h
    }

    /// CSV body. Floats use the shortest representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for ((x, row), flags) in self.axis_values.iter().zip(&self.rows).zip(&self.flags) {
            let _ = write!(out, "{x:e}");
            for v in row {
                out.push(',');
                if let Some(v) = v {
                    let _ = write!(out, "{v:e}");
                }
            }
            out.push(',');
            out.push_str(&flags.join(";"));
            out.push('\n');
        }
        out
    }

    pub fn metadata_json(&self) -> Result<String> {
        let mut columns = vec![self.axis.label()];
        columns.extend(self.columns.iter().cloned());
        columns.push("flags".into());
        let sidecar = Sidecar {
            id: &self.id,
            axis: &self.axis,
            rows: self.rows.len(),
            columns,
            metadata: &self.metadata,
        };
        Ok(serde_json::to_string_pretty(&sidecar)?)
    }

    /// Writes `<id>.csv` and `<id>.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.id));
        let json = dir.join(format!("{}.json", self.id));
        fs::write(&csv, self.to_csv())?;
        fs::write(&json, self.metadata_json()? + "\n")?;
        Ok((csv, json))
    }

    /// Rows with any flag.
    pub fn flagged_rows(&self) -> usize {
        self.flags.iter().filter(|f| !f.is_empty()).count()
    }
}
