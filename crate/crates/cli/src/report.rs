use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use crate::{Cli, Failure, Format};

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Embedded in every report. `timing` stays null unless requested so that
/// identical runs produce identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub config: Value,
    pub version: String,
    pub timing: Option<Timing>,
}

impl RunManifest {
    pub fn new(subcommand: &str, inputs: &[&Path], seed: Option<u64>, config: Value) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            seed,
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timing: None,
        }
    }
}

/// A plain table for plotting tools.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Key/value rows from a JSON object, nested keys joined with '.'.
    pub fn flattened(value: &Value) -> Self {
        let mut t = Table::new(&["key", "value"]);
        flatten("", value, &mut t);
        t
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Table) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push(vec![prefix.to_string(), s.clone()]),
        other => out.push(vec![prefix.to_string(), other.to_string()]),
    }
}

/// What a subcommand produces before formatting.
pub struct Output {
    pub manifest: RunManifest,
    pub result: Value,
    /// Preferred TSV view; the flattened result is used when absent.
    pub table: Option<Table>,
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Runtime(e.into()))
}

fn render(cli: &Cli, out: &Output) -> Result<String, Failure> {
    let manifest = to_value(&out.manifest)?;
    match cli.format {
        Format::Json => {
            let doc = serde_json::json!({ "manifest": manifest, "result": out.result });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Runtime(e.into()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Tsv => {
            let table = out.table.clone().unwrap_or_else(|| Table::flattened(&out.result));
            let mut s = format!("# manifest {}\n", serde_json::to_string(&manifest).map_err(|e| Failure::Runtime(e.into()))?);
            s.push_str(&table.header.join("\t"));
            s.push('\n');
            for row in &table.rows {
                s.push_str(&row.join("\t"));
                s.push('\n');
            }
            Ok(s)
        }
    }
}

pub fn emit(cli: &Cli, out: &Output) -> Result<(), Failure> {
    let text = render(cli, out)?;
    match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Runtime),
        None => std::io::stdout().lock().write_all(text.as_bytes()).context("writing standard output").map_err(Failure::Runtime),
    }
}
