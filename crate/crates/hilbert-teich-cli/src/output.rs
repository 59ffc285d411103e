use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Config, Format};

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub claim: String,
    pub bound: f64,
    pub worst_observed: f64,
    pub pass: bool,
}

impl Claim {
    /// `pass` is `worst <= bound`; tolerances are folded into `bound`.
    pub fn new(claim: impl Into<String>, bound: f64, worst_observed: f64) -> Self {
        Claim { claim: claim.into(), bound, worst_observed, pass: worst_observed <= bound }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub claims: Vec<Claim>,
}

fn write_csv(path: &Path, table: &Table) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    w.write_record(&table.columns).map_err(|e| e.to_string())?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

fn write_json(path: &Path, table: &Table) -> Result<(), String> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(|&v| Value::from(v))).collect();
            Value::Object(obj)
        })
        .collect();
    let text = serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?;
    fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes every table plus `<command>_summary.json`; returns the summary text.
pub fn write(cfg: &Config, command: &str, report: &Report) -> Result<String, String> {
    fs::create_dir_all(&cfg.out).map_err(|e| format!("{}: {e}", cfg.out.display()))?;
    for table in &report.tables {
        match cfg.format {
            Format::Csv => write_csv(&cfg.out.join(format!("{}.csv", table.name)), table)?,
            Format::Json => write_json(&cfg.out.join(format!("{}.json", table.name)), table)?,
        }
    }
    let summary = serde_json::to_string_pretty(&report.claims).map_err(|e| e.to_string())?;
    let path = cfg.out.join(format!("{command}_summary.json"));
    fs::write(&path, summary.clone() + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(summary)
}
