use std::io::Write;

use serde_json::{Map, Value};

use super::config::Format;
use super::run::{Cell, Outcome};
use crate::error::{Error, Result};

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// 17 significant digits; non-finite values become empty fields.
fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn format_cell(c: &Cell) -> String {
    match *c {
        Cell::Int(n) => n.to_string(),
        Cell::Real(v) => format_real(v),
    }
}

pub fn write_csv<W: Write>(outcome: &Outcome, w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wtr.write_record(&outcome.table.columns).map_err(io)?;
    for row in &outcome.table.rows {
        wtr.write_record(row.iter().map(format_cell)).map_err(io)?;
    }
    wtr.flush().map_err(io)
}

fn cell_value(c: &Cell) -> Value {
    match *c {
        Cell::Int(n) => Value::from(n),
        Cell::Real(v) => Value::from(v),
    }
}

/// A flat object: scalars, the verdict, and one array per table column.
pub fn to_json(outcome: &Outcome) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), Value::from(outcome.command.as_str()));
    map.insert("passed".into(), Value::from(outcome.passed));
    for (name, v) in &outcome.scalars {
        map.insert((*name).into(), Value::from(*v));
    }
    for (j, name) in outcome.table.columns.iter().enumerate() {
        debug_assert!(!map.contains_key(*name), "column `{name}` shadows a scalar");
        let col = outcome.table.rows.iter().map(|r| cell_value(&r[j])).collect();
        map.insert((*name).into(), Value::Array(col));
    }
    Value::Object(map)
}

pub fn write_outcome<W: Write>(outcome: &Outcome, format: Format, mut w: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(outcome, w),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &to_json(outcome)).map_err(io)?;
            w.write_all(b"\n").map_err(io)
        }
    }
}
