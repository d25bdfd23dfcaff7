use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// First line of every report CSV.
pub const REPORT_MARKER: &str = "# treebench-report v1";

pub fn num(v: f64) -> String {
    v.to_string()
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Report CSV written row by row and flushed after each row.
pub struct ReportWriter {
    inner: csv::Writer<File>,
}

impl ReportWriter {
    pub fn create(path: &Path, columns: &[&str]) -> Result<Self> {
        let mut file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        writeln!(file, "{REPORT_MARKER}")?;
        let mut inner = csv::Writer::from_writer(file);
        inner.write_record(columns)?;
        inner.flush()?;
        Ok(ReportWriter { inner })
    }

    /// Appends to an existing report without repeating the header.
    pub fn append(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        Ok(ReportWriter {
            inner: csv::WriterBuilder::new().has_headers(false).from_writer(file),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        self.inner.write_record(fields)?;
        self.inner.flush()?;
        Ok(())
    }
}

/// Header and data rows of an existing report, checking the marker line.
pub fn read_report(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    anyhow::ensure!(
        first.trim_end() == REPORT_MARKER,
        "{} is not a treebench report",
        path.display()
    );
    let mut r = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}
