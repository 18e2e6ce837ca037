//! Provenance block attached to every payload.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use emosent::Execution;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnicodeVersions {
    /// Property tables used for emoji and word-character classification.
    pub property_tables: &'static str,
    /// Grapheme cluster segmentation rules.
    pub segmentation: String,
}

/// Every wall-clock dependent value lives here.
#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub started_at: String,
    pub wall_seconds: f64,
    pub stages: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub command_line: Vec<String>,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub execution: Execution,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<PathBuf>,
    pub unicode: UnicodeVersions,
    pub timings: Timings,
}

pub fn sha256_file(path: &Path) -> CliResult<FileDigest> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(FileDigest {
        path: path.to_path_buf(),
        sha256: format!("{:x}", Sha256::digest(&bytes)),
        bytes: bytes.len() as u64,
    })
}

pub fn sha256_str(s: &str) -> String {
    format!("{:x}", Sha256::digest(s.as_bytes()))
}

/// Collects provenance while a subcommand runs.
pub struct RunContext {
    pub exec: Execution,
    started: Instant,
    started_at: String,
    inputs: Vec<FileDigest>,
    outputs: Vec<PathBuf>,
    stages: BTreeMap<String, f64>,
}

impl RunContext {
    pub fn new(exec: Execution) -> Self {
        RunContext {
            exec,
            started: Instant::now(),
            started_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            inputs: Vec::new(),
            outputs: Vec::new(),
            stages: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        if !self.inputs.iter().any(|d| d.path == path) {
            self.inputs.push(sha256_file(path)?);
        }
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Run `f`, recording its wall time under `name`.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.stages.entry(name.to_string()).or_insert(0.0) += t.elapsed().as_secs_f64();
        out
    }

    pub fn finish(
        self,
        command: &'static str,
        command_line: Vec<String>,
        parameters: serde_json::Value,
        seed: Option<u64>,
    ) -> RunManifest {
        RunManifest {
            tool: "emosent",
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            command_line,
            parameters,
            seed,
            execution: self.exec,
            inputs: self.inputs,
            outputs: self.outputs,
            unicode: UnicodeVersions {
                property_tables: emosent::tokenizer::UCD_VERSION,
                segmentation: emosent::tokenizer::segmentation_unicode_version(),
            },
            timings: Timings {
                started_at: self.started_at,
                wall_seconds: self.started.elapsed().as_secs_f64(),
                stages: self.stages,
            },
        }
    }
}
