//! CSV tables and the run manifest.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    /// `(column, unit)` pairs.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[(&str, &str)], rows: Vec<Vec<f64>>) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|(c, u)| (c.to_string(), u.to_string())).collect(),
            rows,
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// `#`-prefixed header, then one row per line with 12 significant digits.
    pub fn to_csv(&self) -> Vec<u8> {
        let header: Vec<String> = self.columns.iter().map(|(c, u)| format!("{c} [{u}]")).collect();
        let mut out = format!("# {}\n", header.join(", ")).into_bytes();
        let mut w = csv::Writer::from_writer(&mut out);
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.11e}"))).expect("writing to memory");
        }
        w.flush().expect("writing to memory");
        drop(w);
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write every table into `dir` and a `manifest.ini` holding `resolved`
/// followed by a `[manifest]` section with checksums.
pub fn write_run(dir: &Path, tables: &[Table], resolved: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut manifest = format!("{resolved}\n[manifest]\nversion = {}\n", env!("CARGO_PKG_VERSION"));
    let names: Vec<String> = tables.iter().map(Table::file_name).collect();
    manifest.push_str(&format!("files = {}\n", names.join(", ")));
    for (table, name) in tables.iter().zip(&names) {
        let bytes = table.to_csv();
        let path = dir.join(name);
        fs::write(&path, &bytes).map_err(|e| CliError::io(&path, e))?;
        manifest.push_str(&format!("sha256.{name} = {}\n", sha256_hex(&bytes)));
    }
    let path = dir.join("manifest.ini");
    fs::write(&path, manifest).map_err(|e| CliError::io(&path, e))
}
