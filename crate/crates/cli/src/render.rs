use std::fmt::Write;

use orelat_core::reproduce::Report;
use serde_json::Value;

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// Two-column rendering of the results followed by one line per claim.
pub fn table(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} (orelat {})", report.command, report.version);
    let mut rows = Vec::new();
    flatten("", &report.results, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        let _ = writeln!(out, "  {k:<width$}  {v}");
    }
    if !report.claims.is_empty() {
        let _ = writeln!(out);
        for c in &report.claims {
            let status = match (c.pass, c.informational) {
                (true, _) => "PASS",
                (false, true) => "INFO",
                (false, false) => "FAIL",
            };
            let _ = writeln!(out, "{status}  {:<40} {}", c.id, c.paper_location);
            if !c.pass {
                let _ = writeln!(out, "      expected {}", c.expected);
                let _ = writeln!(out, "      actual   {}", c.actual);
            }
        }
        let failed = report.failures().count();
        let _ = writeln!(out, "\n{} claims, {} failed", report.claims.len(), failed);
    }
    out
}
