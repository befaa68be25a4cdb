//! Report rendering: single-line JSON, CSV, or a table.

use serde_json::{Map, Value};
use superint::clifford::Word;
use superint::grassmann::Blade;
use superint::integrate::CliffordResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Name of a Clifford component such as `e1e3` or `e2è1`; `1` for the scalar.
pub fn component_name(blade: Blade, word: &Word) -> String {
    let mut s = String::new();
    for j in 0..32 {
        if blade >> j & 1 == 1 {
            s.push_str(&format!("e{}", j + 1));
        }
    }
    for w in word {
        s.push_str(&format!("è{w}"));
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

pub fn components(r: &CliffordResult) -> Value {
    let mut obj = Map::new();
    for ((b, w), v) in &r.components {
        obj.insert(component_name(*b, w), Value::from(*v));
    }
    Value::Object(obj)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rows are the top-level fields for a single report, or the elements of `rows`.
pub fn render(report: &Value, format: Format, pretty: bool) -> String {
    if pretty {
        return table(report);
    }
    match format {
        Format::Json => report.to_string(),
        Format::Csv => {
            let rows: Vec<&Map<String, Value>> = match report.get("rows") {
                Some(Value::Array(a)) => a.iter().filter_map(Value::as_object).collect(),
                _ => report.as_object().into_iter().collect(),
            };
            let Some(first) = rows.first() else { return String::new() };
            let header: Vec<&String> = first.keys().collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header.iter().map(|h| h.as_str())).expect("in-memory write");
            for r in &rows {
                w.write_record(header.iter().map(|h| cell(r.get(*h).unwrap_or(&Value::Null)))).expect("in-memory write");
            }
            let bytes = w.into_inner().expect("in-memory flush");
            String::from_utf8(bytes).expect("utf-8").trim_end().to_string()
        }
    }
}

fn table(report: &Value) -> String {
    let mut out = Vec::new();
    if let Some(Value::Array(rows)) = report.get("rows") {
        for r in rows {
            if let Some(line) = r.get("line").and_then(Value::as_str) {
                out.push(line.to_string());
            }
        }
        if let Some(Value::Array(fails)) = report.get("failures") {
            for f in fails {
                out.push(format!("  failed: {}", cell(f)));
            }
        }
        return out.join("\n");
    }
    let Some(obj) = report.as_object() else { return report.to_string() };
    let width = obj.keys().map(|k| k.chars().count()).max().unwrap_or(0);
    for (k, v) in obj {
        match v {
            Value::Object(inner) => {
                out.push(format!("{k:<width$}"));
                for (ik, iv) in inner {
                    out.push(format!("  {ik:<12} {}", cell(iv)));
                }
            }
            _ => out.push(format!("{k:<width$}  {}", cell(v))),
        }
    }
    out.join("\n")
}
