//! Table emission in CSV or JSON with fixed 12-significant-digit numbers.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(raw: &str) -> Result<Self, CliError> {
        match raw {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(crate::config::bad("output.format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // parsing the fixed text back keeps JSON and CSV at the same precision
            Cell::Num(x) if x.is_finite() => format_num(*x).parse::<f64>().map_or(Value::Null, Value::from),
            Cell::Num(_) => Value::Null,
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// `{:.11e}`, with `nan`, `inf` and `-inf` spelled out.
pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

/// Rows of one command's output; `gaps` counts rows standing in for failed solves.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub gaps: usize,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), gaps: 0 }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(table: &Table, command: &str, config: &Config) -> Value {
    let echo: Map<String, Value> = config.entries().iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
    let data: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
            Value::Object(obj)
        })
        .collect();
    json!({
        "meta": { "command": command, "config": echo, "version": env!("CARGO_PKG_VERSION") },
        "data": data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_twelve_digits() {
        assert_eq!(format_num(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(format_num(-2.5), "-2.50000000000e0");
        assert_eq!(format_num(f64::NAN), "nan");
        assert_eq!(format_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_uses_lf_and_header() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Num(1.0), Cell::Int(-1)]);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1.00000000000e0,-1\n");
    }

    #[test]
    fn json_has_meta_and_rows() {
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![Cell::Num(0.1), Cell::Num(f64::NAN)]);
        let v = to_json(&t, "spectrum", &Config::from_pairs([("trap.eta", "5")]));
        assert_eq!(v["meta"]["command"], "spectrum");
        assert_eq!(v["meta"]["config"]["trap.eta"], "5");
        assert_eq!(v["data"][0]["x"], 0.1);
        assert!(v["data"][0]["y"].is_null());
    }
}
