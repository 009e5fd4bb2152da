//! Tabular results and their CSV form.
//!
//! The first line of every CSV is `# ` followed by one JSON object holding the
//! tool version, the fully resolved config, the column names and the summary
//! values. Missing values (NaN) are written as empty cells.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::config::{ExperimentConfig, METADATA_PREFIX};
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// A command's output: the table plus named scalar results.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub summary: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Self { table, summary: BTreeMap::new() }
    }

    pub fn note(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_owned(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.summary.get(key).copied()
    }

    /// JSON text of the summary; NaN entries become `null`.
    pub fn summary_json(&self) -> String {
        serde_json::to_string(&self.summary).expect("maps of f64 always serialize")
    }

    pub fn write_csv<W: Write>(&self, config: &ExperimentConfig, mut out: W) -> CliResult<()> {
        #[derive(Serialize)]
        struct Metadata<'a> {
            tool: &'static str,
            version: &'static str,
            config: &'a ExperimentConfig,
            columns: &'a [&'static str],
            summary: &'a BTreeMap<String, f64>,
        }
        let meta = Metadata {
            tool: "onebit",
            version: env!("CARGO_PKG_VERSION"),
            config,
            columns: self.table.columns(),
            summary: &self.summary,
        };
        let line = serde_json::to_string(&meta).expect("metadata always serializes");
        writeln!(out, "{METADATA_PREFIX}{line}")?;

        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.table.columns())?;
        for row in self.table.rows() {
            w.write_record(row.iter().map(|v| format_cell(*v)))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn format_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        // Shortest representation that parses back to the same f64.
        format!("{v}")
    }
}
