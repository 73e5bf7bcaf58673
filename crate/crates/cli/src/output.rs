//! CSV tables and the JSON provenance sidecar written next to every output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::CliError;

pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io_err)?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format!("{v:e}"),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            w.write_record(&fields).map_err(io_err)?;
        }
        w.into_inner().map_err(|e| CliError::Input(e.to_string()))
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
    pub scenarios: Vec<String>,
    pub outputs: Vec<String>,
    pub config: Config,
}

/// Per-invocation writer rooted at the output directory.
pub struct Sink {
    pub dir: PathBuf,
    pub command: String,
    pub seed: u64,
    pub scenarios: Vec<String>,
}

impl Sink {
    pub fn new(
        dir: &Path,
        command: String,
        seed: u64,
        scenarios: Vec<String>,
    ) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            seed,
            scenarios,
        })
    }

    fn write(&self, file: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(file);
        fs::write(&path, bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    fn manifest(
        &self,
        stem: &str,
        outputs: Vec<String>,
        config: &Config,
    ) -> Result<PathBuf, CliError> {
        let m = RunManifest {
            command: self.command.clone(),
            config_digest: config.digest(),
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            scenarios: self.scenarios.clone(),
            outputs,
            config: config.clone(),
        };
        let text = serde_json::to_string_pretty(&m).map_err(io_err)?;
        self.write(&format!("{stem}.manifest.json"), text.as_bytes())
    }

    /// Writes `<stem>.csv` and its manifest; returns the CSV path.
    pub fn csv(&self, stem: &str, table: &Table, config: &Config) -> Result<PathBuf, CliError> {
        let file = format!("{stem}.csv");
        let path = self.write(&file, &table.to_csv()?)?;
        self.manifest(stem, vec![file], config)?;
        Ok(path)
    }

    /// Writes `<stem>.json` and its manifest; returns the JSON path.
    pub fn json<T: Serialize>(
        &self,
        stem: &str,
        value: &T,
        config: &Config,
    ) -> Result<PathBuf, CliError> {
        let file = format!("{stem}.json");
        let text = serde_json::to_string_pretty(value).map_err(io_err)?;
        let path = self.write(&file, text.as_bytes())?;
        self.manifest(stem, vec![file], config)?;
        Ok(path)
    }
}

/// Columns `abscissa`, `p_up`, `sigma`.
pub type ScanColumns = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Reads an `abscissa,p_up,sigma` CSV.
pub fn read_scan_csv(path: &Path) -> Result<ScanColumns, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let headers = r.headers().map_err(io_err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("{}: missing column `{name}`", path.display())))
    };
    let (ia, ip, is) = (col("abscissa")?, col("p_up")?, col("sigma")?);
    let (mut a, mut p, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        let num = |i: usize| -> Result<f64, CliError> {
            let raw = rec.get(i).unwrap_or("");
            raw.trim().parse().map_err(|_| {
                CliError::Input(format!(
                    "{}: row {}: `{raw}` in column `{}` is not a number",
                    path.display(),
                    line + 2,
                    &headers[i]
                ))
            })
        };
        a.push(num(ia)?);
        p.push(num(ip)?);
        s.push(num(is)?);
    }
    Ok((a, p, s))
}
