//! Output tables: CSV with a `#` metadata header, or JSON lines.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::simulation::RNG_NAME;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    /// One JSON object per line; the first carries the metadata.
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
    /// A method that does not apply; written as an empty field or `null`.
    Empty,
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 ..= 1e17`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        trim_zeros(format!("{:.*}", (16 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Int(v) => json!(v),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(format_float(*x)),
            Cell::Empty => Value::Null,
        }
    }
}

/// Everything needed to reproduce a table.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub build: String,
    pub rng: String,
}

impl Metadata {
    pub fn new(command: impl Into<String>, config: Value, seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            config,
            seed,
            build: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            rng: RNG_NAME.into(),
        }
    }

    /// `# key: value` lines.
    pub fn comment_lines(&self, prefix: &str) -> Vec<String> {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        vec![
            format!("{prefix} command: {}", self.command),
            format!("{prefix} config: {}", self.config),
            format!("{prefix} seed: {seed}"),
            format!("{prefix} build: {}", self.build),
            format!("{prefix} rng: {}", self.rng),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, meta: &Metadata, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                for line in meta.comment_lines("#") {
                    writeln!(out, "{line}")?;
                }
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush()
            }
            Format::Json => {
                writeln!(out, "{}", json!({ "metadata": meta }))?;
                for row in &self.rows {
                    let fields: Vec<String> =
                        self.columns.iter().zip(row).map(|(c, v)| format!("{}:{}", json!(c), v.json())).collect();
                    writeln!(out, "{{{}}}", fields.join(","))?;
                }
                Ok(())
            }
        }
    }
}
