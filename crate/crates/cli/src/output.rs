//! CSV files with a commented metadata header.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// `prefix_t<time>.csv` with the time in [`fmt_num`] form.
pub fn time_file(prefix: &str, t: f64) -> String {
    format!("{prefix}_t{}.csv", fmt_num(t))
}

/// Comment lines written above the column header.
#[derive(Debug, Clone, Default)]
pub struct Metadata {
    lines: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        Self {
            lines: vec![format!(
                "fracdiff {} command={command} seed={seed}",
                env!("CARGO_PKG_VERSION")
            )],
        }
    }

    /// One line `[section] k=v k=v ...`.
    pub fn section(mut self, name: &str, pairs: &[(String, String)]) -> Self {
        let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        self.lines.push(format!("[{name}] {}", body.join(" ")));
        self
    }

    pub fn line(mut self, text: impl Into<String>) -> Self {
        self.lines.push(text.into());
        self
    }
}

pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn write<I>(&mut self, name: &str, meta: &Metadata, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.root.join(name);
        let io = |e: std::io::Error| CliError::io(&path, e);
        let mut out = BufWriter::new(File::create(&path).map_err(io)?);
        for l in &meta.lines {
            writeln!(out, "# {l}").map_err(io)?;
        }
        let mut csv = csv::Writer::from_writer(out);
        let as_io = |e: csv::Error| CliError::io(&path, e.into());
        csv.write_record(header).map_err(as_io)?;
        for row in rows {
            csv.write_record(&row).map_err(as_io)?;
        }
        csv.flush().map_err(io)?;
        self.written.push(path);
        Ok(())
    }

    /// Two-column `metric,value` report.
    pub fn write_metrics(&mut self, name: &str, meta: &Metadata, metrics: &[(String, f64)]) -> Result<(), CliError> {
        let rows = metrics.iter().map(|(k, v)| vec![k.clone(), fmt_num(*v)]);
        self.write(name, meta, &["metric", "value"], rows)
    }
}
