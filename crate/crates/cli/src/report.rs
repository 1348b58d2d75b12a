//! Report assembly and JSON/CSV rendering.

use std::f64::consts::LN_2;

use entmix::bounds::BoundReport;
use entmix::Estimate;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Whether a quantity is measured in nats and so follows `--bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Info,
    Plain,
}

/// A report under construction. Fields are kept in a sorted map so that the
/// same inputs always print the same bytes.
#[derive(Debug, Default)]
pub struct Report {
    pub fields: Map<String, Value>,
    pub bits: bool,
}

impl Report {
    pub fn new(command: &str, bits: bool) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        fields.insert("unit".into(), json!(if bits { "bits" } else { "nats" }));
        Report { fields, bits }
    }

    fn factor(&self, unit: Unit) -> f64 {
        if self.bits && unit == Unit::Info {
            1.0 / LN_2
        } else {
            1.0
        }
    }

    pub fn put(&mut self, key: &str, v: Value) {
        self.fields.insert(key.into(), v);
    }

    pub fn estimate(&self, e: &Estimate, unit: Unit) -> Value {
        let k = self.factor(unit);
        json!({"value": number(e.value * k), "error": number(e.error * k), "method": e.method})
    }

    /// A closed-form number: error zero.
    pub fn exact(&self, v: f64, unit: Unit) -> Value {
        self.estimate(&Estimate::exact(v), unit)
    }

    /// A bound report with its value converted; `details` stay in nats.
    pub fn bound(&self, r: &BoundReport, unit: Unit) -> Value {
        let mut v = serde_json::to_value(r).expect("bound reports serialize");
        v["value"] = json!({"value": number(r.value * self.factor(unit)), "error": 0.0});
        v["details_unit"] = json!("nats");
        v
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.fields)
    }
}

/// JSON has no infinities; they are written as strings.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x + 0.0)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Renders `{value, error}` leaves as `field,value,error` rows, other numbers
/// with an empty error, strings and booleans verbatim.
pub fn flatten_csv(v: &Value) -> String {
    let mut rows = vec!["field,value,error".to_string()];
    walk(v, String::new(), &mut rows);
    rows.join("\n") + "\n"
}

fn walk(v: &Value, path: String, rows: &mut Vec<String>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) if m.contains_key("value") && m.contains_key("error") => {
            rows.push(format!("{path},{},{}", cell(&m["value"]), cell(&m["error"])));
            for (k, x) in m.iter().filter(|(k, _)| *k != "value" && *k != "error") {
                walk(x, join(k), rows);
            }
        }
        Value::Object(m) => {
            for (k, x) in m {
                walk(x, join(k), rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                walk(x, join(&i.to_string()), rows);
            }
        }
        Value::Null => {}
        other => rows.push(format!("{path},{},", cell(other))),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Shortest round-trip form of a float, for CSV cells.
pub fn csv_number(x: f64) -> String {
    match number(x) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("reports serialize") + "\n",
        Format::Csv => flatten_csv(v),
    }
}
