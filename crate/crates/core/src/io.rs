//! Reading outcome samples and writing reports.
//!
//! Two input layouts are accepted: one decimal literal per line, or one
//! column of a CSV file with a header row. Parsing is locale independent
//! (`.` decimal separator) and rejects NaN and infinities. Reports are written
//! as JSON with sorted keys, or as an aligned text table.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, RejectedRow, Result};

/// Where a sample comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    Stdin,
    File(PathBuf),
}

impl InputSource {
    /// `"-"` selects standard input.
    pub fn from_arg(arg: &str) -> Self {
        if arg == "-" {
            Self::Stdin
        } else {
            Self::File(PathBuf::from(arg))
        }
    }

    fn label(&self) -> String {
        match self {
            Self::Stdin => "<stdin>".to_string(),
            Self::File(p) => p.display().to_string(),
        }
    }

    fn open(&self) -> Result<Box<dyn Read>> {
        match self {
            Self::Stdin => Ok(Box::new(io::stdin().lock())),
            Self::File(p) => File::open(p)
                .map(|f| Box::new(f) as Box<dyn Read>)
                .map_err(|source| Error::Io { path: self.label(), source }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CsvColumn {
    Name(String),
    /// 0-based.
    Index(usize),
}

impl CsvColumn {
    /// Digits select by position, anything else by header name.
    pub fn from_arg(arg: &str) -> Self {
        arg.parse().map_or_else(|_| Self::Name(arg.to_string()), Self::Index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputFormat {
    Lines,
    /// The file must start with a header row.
    Csv(CsvColumn),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpec {
    pub source: InputSource,
    pub format: InputFormat,
}

impl InputSpec {
    pub fn lines(path: impl AsRef<Path>) -> Self {
        Self { source: InputSource::File(path.as_ref().to_path_buf()), format: InputFormat::Lines }
    }

    pub fn csv(path: impl AsRef<Path>, column: CsvColumn) -> Self {
        Self { source: InputSource::File(path.as_ref().to_path_buf()), format: InputFormat::Csv(column) }
    }
}

/// Parsed values plus the lines that were skipped as blank.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleInput {
    pub values: Vec<f64>,
    pub blank_lines: Vec<u64>,
}

/// Reads every value of the sample described by `spec`.
///
/// Any token that is not a finite decimal number fails the whole read; the
/// error lists every rejected line.
pub fn read_sample(spec: &InputSpec) -> Result<SampleInput> {
    let label = spec.source.label();
    let reader = spec.source.open()?;
    let parsed = match &spec.format {
        InputFormat::Lines => read_lines(BufReader::new(reader), &label)?,
        InputFormat::Csv(column) => read_csv(reader, column, &label)?,
    };
    if !parsed.rejected.is_empty() {
        return Err(Error::Parse { path: label, rows: parsed.rejected });
    }
    if parsed.values.is_empty() {
        return Err(Error::NoValues { path: label });
    }
    Ok(SampleInput { values: parsed.values, blank_lines: parsed.blank_lines })
}

#[derive(Default)]
struct Parsed {
    values: Vec<f64>,
    blank_lines: Vec<u64>,
    rejected: Vec<RejectedRow>,
}

impl Parsed {
    fn push(&mut self, line: u64, token: &str) {
        let token = token.trim();
        if token.is_empty() {
            self.blank_lines.push(line);
            return;
        }
        match parse_finite(token) {
            Some(v) => self.values.push(v),
            None => self.rejected.push(RejectedRow { line, token: token.to_string() }),
        }
    }
}

fn parse_finite(token: &str) -> Option<f64> {
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn read_lines<R: BufRead>(reader: R, label: &str) -> Result<Parsed> {
    let mut parsed = Parsed::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io { path: label.to_string(), source })?;
        parsed.push(idx as u64 + 1, &line);
    }
    Ok(parsed)
}

fn read_csv<R: Read>(reader: R, column: &CsvColumn, label: &str) -> Result<Parsed> {
    let csv_err = |source| Error::Csv { path: label.to_string(), source };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let col = match column {
        CsvColumn::Index(i) => *i,
        CsvColumn::Name(name) => rdr
            .headers()
            .map_err(csv_err)?
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn { path: label.to_string(), column: name.clone() })?,
    };
    let mut parsed = Parsed::default();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        match record.get(col) {
            Some(field) if !field.trim().is_empty() => parsed.push(line, field),
            Some(_) => parsed.push(line, ""),
            None => parsed.rejected.push(RejectedRow { line, token: format!("<no column {col}>") }),
        }
    }
    Ok(parsed)
}

/// Writes values one per line in shortest round-trip decimal form.
pub fn write_sample<W: Write>(values: &[f64], mut out: W) -> io::Result<()> {
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Destination {
    #[default]
    Stdout,
    File(PathBuf),
}

impl Destination {
    /// `"-"` selects standard output.
    pub fn from_arg(arg: &str) -> Self {
        if arg == "-" {
            Self::Stdout
        } else {
            Self::File(PathBuf::from(arg))
        }
    }
}

/// Rows of text cells under a header.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub title: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { title: None, header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn titled(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Right-aligned columns separated by two spaces.
    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = (0..cols)
                .map(|i| format!("{:>w$}", cells.get(i).map_or("", String::as_str), w = widths[i]))
                .collect::<Vec<_>>()
                .join("  ");
            s.truncate(s.trim_end().len());
            s
        };
        let mut out = String::new();
        if let Some(title) = &self.title {
            out.push_str(title);
            out.push('\n');
        }
        out.push_str(&line(&self.header));
        out.push('\n');
        let rule: usize = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
        out.push_str(&"-".repeat(rule));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

/// Reports that can be shown as aligned text tables.
pub trait TableReport {
    fn to_table(&self) -> Table;
}

/// Renders `report` in the requested format. JSON output has
/// lexicographically sorted keys and a trailing newline.
pub fn render_report<T: Serialize + TableReport>(report: &T, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            // serde_json's Value map is ordered by key
            let value = serde_json::to_value(report)?;
            let mut s = serde_json::to_string_pretty(&value)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Table => Ok(report.to_table().render()),
    }
}

pub fn write_report<T: Serialize + TableReport>(
    report: &T,
    format: ReportFormat,
    destination: &Destination,
) -> Result<()> {
    let text = render_report(report, format)?;
    match destination {
        Destination::Stdout => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
        Destination::File(path) => std::fs::write(path, text)
            .map_err(|source| Error::Io { path: path.display().to_string(), source }),
    }
}

/// Formats a float with a fixed number of decimals for table cells.
pub(crate) fn fixed(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}
