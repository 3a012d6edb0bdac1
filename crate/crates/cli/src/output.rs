//! Tables, CSV/JSON rendering and the JSON sidecar.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, RawConfig, RunConfig, SCHEMA_VERSION};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// A divergent value; rendered as the token `inf`.
    Inf,
}

impl Cell {
    fn render_csv(&self, out: &mut String) {
        match self {
            Cell::Num(x) => {
                debug_assert!(x.is_finite());
                let _ = write!(out, "{x:.16e}");
            }
            Cell::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Cell::Text(s) => out.push_str(s),
            Cell::Inf => out.push_str("inf"),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => Value::from(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Inf => Value::from("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Header line plus one line per row, LF terminated.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_json).collect())).collect();
        let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
        let mut text = serde_json::to_string(&doc).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Result of one command: the data table and quantities for the sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub derived: Map<String, Value>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema_version: u32,
    version: &'a str,
    config: RawConfig,
    columns: &'a [&'static str],
    rows: usize,
    derived: &'a Map<String, Value>,
}

/// Sidecar path for a data file: `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn render_sidecar(config: &RunConfig, output: &RunOutput) -> String {
    let sidecar = Sidecar {
        schema_version: SCHEMA_VERSION,
        version: ffa_core::VERSION,
        config: config.echo(),
        columns: &output.table.columns,
        rows: output.table.rows.len(),
        derived: &output.derived,
    };
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    text.push('\n');
    text
}

/// Writes the data to `--out` (with a sidecar next to it) or to stdout.
pub fn write_outputs(config: &RunConfig, output: &RunOutput) -> Result<(), CliError> {
    let data = output.table.render(config.format);
    match &config.out {
        Some(path) => {
            let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
            fs::write(path, data).map_err(io)?;
            let side = sidecar_path(path);
            fs::write(&side, render_sidecar(config, output)).map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(data.as_bytes()) {
                // A closed pipe (`ffa ... | head`) is not a failure of the run.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other.map_err(|e| CliError::Io(e.to_string()))?,
            }
        }
    }
    Ok(())
}
