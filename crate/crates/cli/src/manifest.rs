//! Run manifest: what was read, what was written, and per-stage summaries.
//!
//! Everything except the per-stage wall-clock times is deterministic:
//! content digests instead of timestamps, config-relative input paths
//! instead of absolute ones, stable key order. Rerunning the same command
//! on the same inputs reproduces every digest and every output file
//! byte-for-byte; only the `wall_ms` readings differ.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct StageSummary {
    pub name: String,
    /// Stage wall-clock time in milliseconds; the one field excluded from
    /// the reproducibility contract.
    pub wall_ms: f64,
    pub summary: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub stages: Vec<StageSummary>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(command: &str, config_bytes: &[u8]) -> Self {
        Self {
            tool: "defect-photonics".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: sha256_hex(config_bytes),
            inputs: Vec::new(),
            outputs: Vec::new(),
            stages: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(FileDigest {
            path: path.into(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn add_output(&mut self, path: &str, bytes: &[u8]) {
        self.outputs.push(FileDigest {
            path: path.into(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn add_stage(&mut self, name: &str, wall_ms: f64, summary: serde_json::Value) {
        self.stages.push(StageSummary {
            name: name.into(),
            wall_ms,
            summary,
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
