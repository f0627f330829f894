//! Tables, deterministic formatting and sidecar manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::plan::Format;
use super::CliError;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// 17 significant digits, so every `f64` round-trips.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // + 0.0 maps -0.0 to 0.0
        format!("{:.16e}", x + 0.0)
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
                w.write_record(&self.columns).map_err(CliError::io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_csv)).map_err(CliError::io)?;
                }
                w.into_inner().map_err(|e| CliError::io(e.into_error()))
            }
            Format::Json => {
                let rows: Vec<Vec<Value>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(Cell::to_json).collect())
                    .collect();
                let doc = json!({"columns": self.columns, "rows": rows});
                let mut out = serde_json::to_vec_pretty(&doc).map_err(CliError::io)?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

/// `<path>.manifest.json`.
pub fn manifest_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    data.with_file_name(name)
}

/// `<dir>/<stem>.<suffix>.<ext>` beside `base`.
pub fn sibling(base: &Path, suffix: &str, format: Format) -> PathBuf {
    let stem = base.file_stem().unwrap_or_default().to_string_lossy();
    base.with_file_name(format!("{stem}.{suffix}.{}", format.extension()))
}

/// Where a table goes.
#[derive(Debug, Clone)]
pub enum Sink {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    data_file: String,
    format: Format,
    columns: &'a [String],
    rows: usize,
    config: &'a C,
    results: &'a Value,
}

/// Writes `table` and, for file sinks, its sidecar manifest. Returns the data
/// path when one was written.
pub fn emit<C: Serialize>(
    sink: &Sink,
    format: Format,
    command: &str,
    table: &Table,
    config: &C,
    results: &Value,
) -> Result<Option<PathBuf>, CliError> {
    let bytes = table.render(format)?;
    match sink {
        Sink::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).map_err(CliError::io)?;
            out.flush().map_err(CliError::io)?;
            Ok(None)
        }
        Sink::File(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(CliError::io)?;
            }
            fs::write(path, &bytes).map_err(CliError::io)?;
            let manifest = Manifest {
                tool: TOOL,
                version: VERSION,
                command,
                data_file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                format,
                columns: &table.columns,
                rows: table.rows.len(),
                config,
                results,
            };
            let mut text = serde_json::to_vec_pretty(&manifest).map_err(CliError::io)?;
            text.push(b'\n');
            fs::write(manifest_path(path), text).map_err(CliError::io)?;
            Ok(Some(path.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(0.8), "8.0000000000000004e-1");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![1.5.into(), "x,y".into(), Cell::Empty]);
        let csv = String::from_utf8(t.render(Format::Csv).unwrap()).unwrap();
        assert_eq!(csv, "a,b,c\n1.5000000000000000e0,\"x,y\",\n");
        let json: Value = serde_json::from_slice(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(json["rows"][0], json!([1.5, "x,y", null]));
    }

    #[test]
    fn paths() {
        let p = Path::new("out/fig2.csv");
        assert_eq!(manifest_path(p), Path::new("out/fig2.csv.manifest.json"));
        assert_eq!(sibling(p, "cuts", Format::Csv), Path::new("out/fig2.cuts.csv"));
    }
}
