use std::fs;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::io::{require_file, write_atomic};
use crate::ReportArgs;

#[derive(Serialize)]
struct Section {
    source: String,
    command: Value,
    config: Value,
    results: Value,
}

#[derive(Serialize)]
struct Combined {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    sections: Vec<Section>,
    /// Every warning of every merged run, prefixed by its command.
    warnings: Vec<String>,
}

pub fn run(args: &ReportArgs) -> Result<()> {
    let mut sections = Vec::new();
    let mut warnings = Vec::new();
    for path in &args.inputs {
        require_file(path)?;
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let doc: Value = serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
        let Some(obj) = doc.as_object() else {
            bail!("{} is not a run report", path.display());
        };
        let command = obj.get("command").cloned().unwrap_or(Value::Null);
        if command.is_null() || !obj.contains_key("results") {
            bail!("{} is not a run report", path.display());
        }
        let name = command.as_str().unwrap_or("?").to_string();
        if let Some(ws) = obj.get("warnings").and_then(Value::as_array) {
            warnings.extend(ws.iter().filter_map(Value::as_str).map(|w| format!("{name}: {w}")));
        }
        sections.push(Section {
            source: path.display().to_string(),
            command,
            config: obj.get("config").cloned().unwrap_or(Value::Null),
            results: obj.get("results").cloned().unwrap_or(Value::Null),
        });
    }
    let combined = Combined {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "report",
        sections,
        warnings,
    };
    let mut bytes = serde_json::to_vec_pretty(&combined)?;
    bytes.push(b'\n');
    write_atomic(&args.out, &bytes)
}
