//! CSV tables and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    /// Doubles as 17 significant digits, which round-trips exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::F(x) if x.is_nan() => "NaN".into(),
            Cell::F(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::F(x.unwrap_or(f64::NAN))
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &[&'static str]) -> Self {
        Self {
            schema,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for {}",
            self.schema
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = format!("# schema {}/{}\n", self.schema, SCHEMA_VERSION).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
            w.write_record(&self.columns).map_err(io)?;
            for r in &self.rows {
                w.write_record(r.iter().map(Cell::render)).map_err(io)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let d = Sha256::digest(cfg.to_text().as_bytes());
    d.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct ManifestInfo<'a> {
    pub command: &'a str,
    pub threads: usize,
    pub wall_time_s: f64,
    pub alarms: &'a [String],
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.manifest.json`.
pub fn write_outputs(
    dir: &Path,
    name: &str,
    table: &Table,
    cfg: &ExperimentConfig,
    info: &ManifestInfo<'_>,
) -> Result<(PathBuf, PathBuf), CliError> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{name}.csv"));
    let man_path = dir.join(format!("{name}.manifest.json"));
    fs::write(&csv_path, table.to_csv()?)?;
    let manifest = serde_json::json!({
        "tool": "hall-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": info.command,
        "schema": format!("{}/{}", table.schema, SCHEMA_VERSION),
        "seed": cfg.seed,
        "config_hash": config_hash(cfg),
        "config": cfg.to_text(),
        "threads": info.threads,
        "wall_time_s": info.wall_time_s,
        "rows": table.rows.len(),
        "csv": csv_path.file_name().and_then(|s| s.to_str()),
        "alarms": info.alarms,
    });
    let mut f = fs::File::create(&man_path)?;
    f.write_all(
        serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Io(e.into()))?
            .as_bytes(),
    )?;
    f.write_all(b"\n")?;
    Ok((csv_path, man_path))
}
