//! Collected outputs of one command and the manifest written beside them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::RunError;

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    parallel_build: bool,
    config: &'a ExperimentConfig<'a>,
    config_sha256: String,
    seed: Option<u64>,
    outputs: BTreeMap<&'a str, String>,
}

fn sha256(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Files produced by a command, in the order they were added. The first is
/// the main result and goes to stdout when no directory is given.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, String)>,
    summary: String,
}

impl Outputs {
    pub fn file(&mut self, name: impl Into<String>, content: String) {
        self.files.push((name.into(), content));
    }

    /// Human-readable text for the terminal.
    pub fn summary(&mut self, text: String) {
        self.summary = text;
    }

    pub fn finish(self, dir: Option<&Path>, config: &ExperimentConfig<'_>) -> Result<(), RunError> {
        let Some(dir) = dir else {
            if let Some((_, main)) = self.files.first() {
                print!("{main}");
            }
            eprint!("{}", self.summary);
            return Ok(());
        };
        std::fs::create_dir_all(dir)?;
        let mut outputs = BTreeMap::new();
        for (name, content) in &self.files {
            std::fs::write(dir.join(name), content)?;
            outputs.insert(name.as_str(), sha256(content.as_bytes()));
        }
        let config_json = serde_json::to_string(config).map_err(|e| RunError::Operational(e.to_string()))?;
        let manifest = Manifest {
            tool: "interchange-lab",
            version: env!("CARGO_PKG_VERSION"),
            parallel_build: interchange_lab::par::is_parallel(),
            config,
            config_sha256: sha256(config_json.as_bytes()),
            seed: config.flags.seed,
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| RunError::Operational(e.to_string()))?;
        text.push('\n');
        std::fs::write(dir.join("manifest.json"), text)?;
        print!("{}", self.summary);
        Ok(())
    }
}
