//! Artifact writers. Floats are written with 17 significant digits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Streams CSV rows to a file, flushing on drop so partial output
/// survives an early return.
pub struct CsvSink {
    inner: csv::Writer<BufWriter<File>>,
    rows: usize,
}

impl CsvSink {
    pub fn create(path: &Path, header: &[&str]) -> std::io::Result<Self> {
        let file = File::create(path)?;
        let mut inner = csv::WriterBuilder::new().from_writer(BufWriter::new(file));
        inner.write_record(header).map_err(into_io)?;
        Ok(Self { inner, rows: 0 })
    }

    pub fn row(&mut self, fields: &[String]) -> std::io::Result<()> {
        self.inner.write_record(fields).map_err(into_io)?;
        self.rows += 1;
        Ok(())
    }

    pub fn floats(&mut self, values: &[f64]) -> std::io::Result<()> {
        let fields: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        self.row(&fields)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> std::io::Result<usize> {
        self.inner.flush()?;
        Ok(self.rows)
    }
}

impl Drop for CsvSink {
    fn drop(&mut self) {
        let _ = self.inner.flush();
    }
}

fn into_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

/// Pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::other)?;
    w.write_all(b"\n")?;
    w.flush()
}

pub fn sidecar_path(artifact: &Path) -> PathBuf {
    let mut s = artifact.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

/// Writes `<artifact>.config.json` with the subcommand and every effective
/// setting.
pub fn write_sidecar(artifact: &Path, subcommand: &str, effective: &BTreeMap<&'static str, Value>) -> std::io::Result<PathBuf> {
    let path = sidecar_path(artifact);
    let doc = json!({
        "subcommand": subcommand,
        "version": env!("CARGO_PKG_VERSION"),
        "config": effective,
    });
    write_json(&path, &doc)?;
    Ok(path)
}

/// JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}
