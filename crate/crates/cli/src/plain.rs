//! `key: value` rendering of a JSON report, one line per leaf.

use serde_json::Value;

pub fn render(report: &Value) -> String {
    let mut out = String::new();
    walk(report, "", &mut out);
    out
}

fn walk(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(child, &key, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, child) in items.iter().enumerate() {
                walk(child, &format!("{path}[{i}]"), out);
            }
        }
        _ => {
            out.push_str(path);
            out.push_str(": ");
            out.push_str(&scalar(v));
            out.push('\n');
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
        Value::Null => "-".to_string(),
        other => other.to_string(),
    }
}
