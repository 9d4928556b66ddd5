use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::args::Format;
use crate::CliError;

/// One table cell. Floats are written with 17 significant digits in CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_num(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// Non-finite floats have no JSON spelling and become null.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// A single-row table built from the scalar members of a JSON object.
    /// Nested objects and arrays are skipped.
    pub fn from_record(record: &Map<String, Value>) -> (Vec<String>, Vec<String>) {
        let mut header = Vec::new();
        let mut row = Vec::new();
        for (k, v) in record {
            let cell = match v {
                Value::Number(n) => match n.as_f64() {
                    Some(x) if n.is_f64() => Cell::Num(x).csv(),
                    _ => n.to_string(),
                },
                Value::String(s) => s.clone(),
                Value::Bool(b) => b.to_string(),
                Value::Null => String::new(),
                Value::Array(_) | Value::Object(_) => continue,
            };
            header.push(k.clone());
            row.push(cell);
        }
        (header, row)
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io_err)?;
        }
        w.flush().map_err(|e| CliError::Runtime(e.to_string()))
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

/// `out.csv` gets `out.manifest.json` next to it.
pub fn manifest_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn sink(output: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match output {
        Some(p) => Box::new(
            std::fs::File::create(p)
                .map_err(|e| CliError::Input(format!("--output: {}: {e}", p.display())))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_text(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut w = sink(output)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Emits a table and its manifest.
///
/// CSV goes to `output` (or stdout) with the manifest beside it (or on
/// stderr). JSON is a single document: the manifest plus a `rows` array.
pub fn table(
    format: Format,
    output: Option<&Path>,
    table: &Table,
    mut manifest: Map<String, Value>,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            table.write_csv(sink(output)?)?;
            let text = pretty(&Value::Object(manifest));
            match output {
                Some(p) => std::fs::write(manifest_path(p), text)
                    .map_err(|e| CliError::Runtime(e.to_string())),
                None => {
                    eprint!("{text}");
                    Ok(())
                }
            }
        }
        Format::Json => {
            manifest.insert("rows".into(), table.to_json());
            write_text(output, &pretty(&Value::Object(manifest)))
        }
    }
}

/// Emits a single-record result. The JSON document carries its own config
/// echo; CSV writes the scalar members as one row plus a manifest.
pub fn record(
    format: Format,
    output: Option<&Path>,
    document: Map<String, Value>,
) -> Result<(), CliError> {
    match format {
        Format::Json => write_text(output, &pretty(&Value::Object(document))),
        Format::Csv => {
            let (header, row) = Table::from_record(&document);
            let mut w = csv::Writer::from_writer(sink(output)?);
            w.write_record(&header).map_err(io_err)?;
            w.write_record(&row).map_err(io_err)?;
            w.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
            drop(w);
            let text = pretty(&Value::Object(document));
            match output {
                Some(p) => std::fs::write(manifest_path(p), text)
                    .map_err(|e| CliError::Runtime(e.to_string())),
                None => {
                    eprint!("{text}");
                    Ok(())
                }
            }
        }
    }
}
