use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::RunConfig;
use crate::error::Result;

/// A rectangular table written as CSV next to the summary JSON.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Number formatting shared by every table: shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Summary of one run. Re-running the same configuration reproduces it
/// bit for bit (it carries no timestamps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub toolkit_version: String,
    pub rng_key_schema_version: u32,
    pub experiment: String,
    pub base_seed: u64,
    pub config: RunConfig,
    /// Per-path (or per-item) outcome records, ordered by path index.
    pub records: Vec<Value>,
    /// Aggregate statistics recomputable from `records`.
    pub aggregates: Value,
    /// Series and tables written next to the summary.
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: RunResult,
    pub tables: Vec<Table>,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Write `result.json` and every table into `dir` (created if needed).
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in &self.tables {
            t.write_csv(std::fs::File::create(dir.join(t.file_name()))?)?;
        }
        let json = serde_json::to_string_pretty(&self.result)?;
        std::fs::write(dir.join("result.json"), json + "\n")?;
        Ok(())
    }
}
