use std::path::Path;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::io::write_atomic;

/// The structured document written by every subcommand.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Resolved arguments of the run, including the seed where one applies.
    pub config: Value,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, config: impl Serialize) -> Result<Self> {
        Ok(RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            results: Value::Null,
            warnings: Vec::new(),
        })
    }

    pub fn results(mut self, results: impl Serialize) -> Result<Self> {
        self.results = serde_json::to_value(results)?;
        Ok(self)
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }
}
