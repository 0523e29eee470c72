//! Output selection: canonical compact JSON, a flat CSV rendering, or the
//! human-readable summary.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

pub fn emit(format: Format, value: &Value, plain: &str) -> anyhow::Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string(value)?),
        Format::Csv => {
            let (header, row) = flatten(value);
            println!("{header}");
            println!("{row}");
        }
        Format::Plain => println!("{plain}"),
    }
    Ok(())
}

/// One-row CSV for a JSON object: nested values render as compact JSON in a
/// quoted cell.
fn flatten(value: &Value) -> (String, String) {
    match value.as_object() {
        Some(map) => {
            let mut headers = Vec::new();
            let mut cells = Vec::new();
            for (k, v) in map {
                headers.push(k.clone());
                cells.push(csv_cell(v));
            }
            (headers.join(","), cells.join(","))
        }
        None => ("value".into(), csv_cell(value)),
    }
}

pub fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => quote(s),
        other => quote(&serde_json::to_string(other).unwrap_or_default()),
    }
}

fn quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
