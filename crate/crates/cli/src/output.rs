use std::path::{Path, PathBuf};

use rademacher_clt::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::Settings;

/// One line of the CSV output.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub n: Option<usize>,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub term: String,
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub wall_ms: u64,
}

#[derive(Serialize)]
struct Summary<'a> {
    version: &'static str,
    command: &'a str,
    config: &'a Settings,
    rows: &'a [ResultRow],
}

pub fn paths(out: &Path) -> (PathBuf, PathBuf) {
    (out.with_extension("csv"), out.with_extension("json"))
}

fn io(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Validation(format!("{}: {e}", path.display()))
}

pub fn write_all(out: &Path, command: &str, settings: &Settings, rows: &[ResultRow]) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| !r.value.is_finite()) {
        return Err(Error::Contract(format!("non-finite value for {} {}", bad.experiment, bad.term)));
    }
    let (csv_path, json_path) = paths(out);
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| io(&csv_path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io(&csv_path, e))?;
    }
    w.flush().map_err(|e| io(&csv_path, e))?;
    let summary = Summary {
        version: env!("RCLT_VERSION"),
        command,
        config: settings,
        rows,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| io(&json_path, e))?;
    std::fs::write(&json_path, json + "\n").map_err(|e| io(&json_path, e))?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| io(path, e))).collect()
}
