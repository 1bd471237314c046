use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use riffle_core::algebra::{MeasureJson, MeasureValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Every output carries the command and the fully resolved parameters.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub command: &'a str,
    pub parameters: Value,
    pub result: T,
}

pub fn json_output<T: Serialize>(command: &str, parameters: &Value, result: T) -> String {
    let env = Envelope { command, parameters: parameters.clone(), result };
    let mut s = serde_json::to_string_pretty(&env).expect("serializable output");
    s.push('\n');
    s
}

/// `# command key=value ...` header used by table and CSV output.
pub fn header(command: &str, parameters: &Value) -> String {
    let mut out = format!("# {command}");
    if let Value::Object(map) = parameters {
        for (k, v) in map {
            match v {
                Value::Null => {}
                Value::String(s) => {
                    let _ = write!(out, " {k}={s}");
                }
                other => {
                    let _ = write!(out, " {k}={other}");
                }
            }
        }
    }
    out.push('\n');
    out
}

fn value_text(v: &MeasureValue) -> String {
    match v {
        MeasureValue::Exact(s) => s.clone(),
        MeasureValue::Symbolic { numerator, denominator_power } => {
            format!("[{}] / x^{denominator_power}", numerator.join(", "))
        }
    }
}

/// Rows keyed by descent count when the measure depends only on it,
/// otherwise by descent set.
pub fn measure_table(m: &MeasureJson) -> String {
    let by_count = {
        let mut seen: Vec<(usize, String)> = vec![];
        m.entries.iter().all(|e| {
            let v = value_text(&e.value);
            match seen.iter().find(|(d, _)| *d == e.descent_set.len()) {
                Some((_, w)) => *w == v,
                None => {
                    seen.push((e.descent_set.len(), v));
                    true
                }
            }
        })
    };
    let mut rows: Vec<(String, usize, String)> = vec![];
    for e in &m.entries {
        let key = if by_count {
            e.descent_set.len().to_string()
        } else {
            format!("{{{}}}", e.descent_set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
        };
        match rows.iter_mut().find(|r| r.0 == key) {
            Some(r) => r.1 += 1,
            None => rows.push((key, 1, value_text(&e.value))),
        }
    }
    rows.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    let mut out = format!("{:<14} {:>9}  value\n", if by_count { "descents" } else { "descent set" }, "elements");
    for (k, n, v) in rows {
        let _ = writeln!(out, "{k:<14} {n:>9}  {v}");
    }
    out
}

pub fn measure_csv(m: &MeasureJson) -> String {
    let cdes = m.entries.first().is_some_and(|e| e.cdes.is_some());
    let mut out = String::from(if cdes { "word,descent_set,cdes,value\n" } else { "word,descent_set,value\n" });
    let set = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    for e in &m.entries {
        let value = match &e.value {
            MeasureValue::Exact(s) => s.clone(),
            MeasureValue::Symbolic { numerator, denominator_power } => format!("{} / x^{denominator_power}", numerator.join(" ")),
        };
        match &e.cdes {
            Some(c) if cdes => {
                let _ = writeln!(out, "{},{},{},{}", e.word, set(&e.descent_set), set(c), value);
            }
            _ => {
                let _ = writeln!(out, "{},{},{}", e.word, set(&e.descent_set), value);
            }
        }
    }
    out
}

pub fn params(pairs: &[(&str, Value)]) -> Value {
    let mut map = serde_json::Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v.clone());
    }
    Value::Object(map)
}

pub fn opt<T: Serialize>(v: &Option<T>) -> Value {
    match v {
        Some(x) => json!(x),
        None => Value::Null,
    }
}
