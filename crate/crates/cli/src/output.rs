//! Tables written as CSV with `#` metadata lines, or as JSON.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits: enough to round-trip every f64.
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(k) => Value::from(*k),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub command: String,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, config: &impl Serialize, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            config: serde_json::to_value(config).expect("config serializes"),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# lightcone {}", lightcone::VERSION).unwrap();
        writeln!(s, "# command: {}", self.command).unwrap();
        writeln!(s, "# config: {}", self.config).unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = serde_json::json!({
            "version": lightcone::VERSION,
            "command": self.command,
            "config": self.config,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Metadata and rows of a CSV produced by [`Table::to_csv`].
#[cfg(test)]
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCsv {
    pub version: String,
    pub command: String,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[cfg(test)]
pub fn parse_csv(text: &str) -> Result<ParsedCsv> {
    let mut version = None;
    let mut command = None;
    let mut config = None;
    let mut lines = text.lines();
    let mut header = None;
    for line in lines.by_ref() {
        if let Some(meta) = line.strip_prefix("# ") {
            if let Some(v) = meta.strip_prefix("lightcone ") {
                version = Some(v.to_string());
            } else if let Some(c) = meta.strip_prefix("command: ") {
                command = Some(c.to_string());
            } else if let Some(c) = meta.strip_prefix("config: ") {
                config = Some(serde_json::from_str(c).map_err(CliError::config)?);
            }
        } else {
            header = Some(line);
            break;
        }
    }
    let missing = |what: &str| CliError::Config(format!("csv lacks {what}"));
    let columns: Vec<String> = header.ok_or_else(|| missing("a header row"))?.split(',').map(str::to_string).collect();
    let rows = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').map(str::to_string).collect()).collect();
    Ok(ParsedCsv {
        version: version.ok_or_else(|| missing("a version line"))?,
        command: command.ok_or_else(|| missing("a command line"))?,
        config: config.ok_or_else(|| missing("a config line"))?,
        columns,
        rows,
    })
}

pub fn emit(table: &Table, format: Format, out: Option<&Path>) -> Result<()> {
    let text = table.render(format);
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
