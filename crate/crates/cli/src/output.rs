use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value};
use seqcap::network::format_g12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Round every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format_g12(x).parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// Wrap a report with the schema version and render it.
pub fn json_document(body: Value) -> String {
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::from(1));
    match round_floats(body) {
        Value::Object(o) => doc.extend(o),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn csv_float(x: f64) -> String {
    format_g12(x)
}

pub fn csv_opt(x: Option<f64>) -> String {
    x.map(format_g12).unwrap_or_default()
}

/// Simple CSV document: header plus rows, newline terminated.
pub fn csv_document(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

pub fn emit(text: &str, output: Option<&Path>) -> io::Result<()> {
    match output {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
