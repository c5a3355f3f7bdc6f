use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::output;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigRecord {
    pub n: usize,
    pub theta: f64,
    /// θ as typed, e.g. `2.1pi`.
    pub theta_input: String,
    pub gamma0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// `None` for commands that span many chains (`verify`).
    pub config: Option<ConfigRecord>,
    pub options: BTreeMap<String, String>,
    pub output_paths: Vec<String>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: Option<ConfigRecord>,
        options: BTreeMap<String, String>,
        outputs: &[&Path],
    ) -> Self {
        Self {
            command: command.to_string(),
            config,
            options,
            output_paths: outputs.iter().map(|p| p.display().to_string()).collect(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

/// `results.csv` → `results.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}

/// Writes the data file and, when it went to disk, its manifest.
pub fn emit_with_manifest(
    out: Option<&Path>,
    bytes: &[u8],
    command: &str,
    config: Option<ConfigRecord>,
    options: BTreeMap<String, String>,
) -> Result<(), CliError> {
    output::emit(out, bytes)?;
    if let Some(path) = out {
        let manifest = RunManifest::new(command, config, options, &[path]);
        std::fs::write(manifest_path(path), output::to_json(&manifest)?)?;
    }
    Ok(())
}
