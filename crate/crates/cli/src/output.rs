//! Deterministic file and stdout output.
//!
//! Floats are rendered with Rust's shortest round-trip formatting and JSON
//! fields keep struct declaration order, so identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::CliError;

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::io(path))
}

/// CSV with a header row; every cell formatted with `Display`.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut text = String::new();
    let _ = writeln!(text, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(text, "{}", cells.join(","));
    }
    std::fs::write(path, text).map_err(CliError::io(path))
}

/// Sample path as `t,x` rows, starting from the origin.
pub fn write_path_csv(path: &Path, sample: &ctrw_core::Path) -> Result<(), CliError> {
    let mut rows = vec![vec![0.0, 0.0]];
    let mut x = 0.0;
    for &(t, j) in sample.events() {
        x += j;
        rows.push(vec![t, x]);
    }
    write_csv(path, &["t", "x"], &rows)
}

/// Print a serializable summary to stdout as pretty JSON or flat
/// `key,value` CSV lines.
pub fn print_summary<T: Serialize>(format: OutputFormat, value: &T) -> Result<(), CliError> {
    let json = serde_json::to_value(value)
        .map_err(|e| CliError::Validation(format!("serializing summary: {e}")))?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        OutputFormat::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&json).unwrap());
        }
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            flatten_json("", &json, &mut rows);
            for (key, value) in rows {
                let _ = writeln!(out, "{key},{value}");
            }
        }
    }
    Ok(())
}

fn flatten_json(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&key, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_json(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), render_scalar(other))),
    }
}

fn render_scalar(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
