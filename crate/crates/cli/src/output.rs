//! CSV / JSON serialization of record sets.
//!
//! Floats are written with 12 significant digits in `%g` style. The same
//! text feeds both formats, so a JSON file read back yields exactly the
//! values shown in the CSV.

use std::io::Write;
use std::path::Path;

use cavity_grover::record::{ExperimentRecord, Value};
use serde_json::{Map, Number};

use crate::config::Format;
use crate::CliError;

const SIG_DIGITS: usize = 12;

/// Records sharing one fixed column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSet {
    pub columns: Vec<&'static str>,
    pub records: Vec<ExperimentRecord>,
}

impl RecordSet {
    pub fn new(columns: &[&'static str], records: Vec<ExperimentRecord>) -> Self {
        RecordSet {
            columns: columns.to_vec(),
            records,
        }
    }
}

/// `%.12g`: fixed notation for exponents in [-4, 12), scientific otherwise,
/// trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_cell(value: &Value) -> String {
    match value {
        Value::Int(i) => i.to_string(),
        Value::Float(x) => format_float(*x),
        Value::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::Text(s) => s.clone(),
        Value::Missing => String::new(),
    }
}

fn json_value(value: &Value) -> serde_json::Value {
    match value {
        Value::Int(i) => serde_json::Value::from(*i),
        Value::Float(x) => format_float(*x)
            .parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map_or(serde_json::Value::Null, serde_json::Value::Number),
        Value::Text(s) => serde_json::Value::from(s.as_str()),
        Value::Missing => serde_json::Value::Null,
    }
}

fn cell<'a>(record: &'a ExperimentRecord, column: &str) -> &'a Value {
    record.get(column).unwrap_or(&Value::Missing)
}

pub fn render_csv(set: &RecordSet) -> String {
    let mut out = set.columns.join(",");
    out.push('\n');
    for record in &set.records {
        let row: Vec<String> = set
            .columns
            .iter()
            .map(|c| csv_cell(cell(record, c)))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(set: &RecordSet) -> String {
    let rows: Vec<serde_json::Value> = set
        .records
        .iter()
        .map(|record| {
            let obj: Map<String, serde_json::Value> = set
                .columns
                .iter()
                .map(|c| (c.to_string(), json_value(cell(record, c))))
                .collect();
            serde_json::Value::Object(obj)
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows).expect("records serialize");
    text.push('\n');
    text
}

pub fn render(set: &RecordSet, format: Format) -> String {
    match format {
        Format::Csv => render_csv(set),
        Format::Json => render_json(set),
    }
}

/// Writes to `path`, or stdout when `path` is `None`.
pub fn write_records(set: &RecordSet, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = render(set, format);
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}
