use std::fmt::Write;

use serde_json::Value;

use crate::ReportEnvelope;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f:.6}"),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn walk(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{pad}{key:<24} {s}");
        return;
    }
    let _ = writeln!(out, "{pad}{key}");
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| walk(out, k, x, depth + 1)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(out, &format!("[{i}]"), x, depth + 1)),
        _ => unreachable!(),
    }
}

pub fn pretty(env: &ReportEnvelope) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "switchlab {}  ({} ms)", env.command, env.elapsed_ms);
    if let Some(seed) = env.seed {
        let _ = writeln!(out, "seed {seed}");
    }
    for (k, v) in &env.parameters {
        walk(&mut out, k, v, 1);
    }
    let _ = writeln!(out, "results");
    match &env.results {
        Value::Object(m) => m.iter().for_each(|(k, x)| walk(&mut out, k, x, 1)),
        other => walk(&mut out, "value", other, 1),
    }
    out
}
