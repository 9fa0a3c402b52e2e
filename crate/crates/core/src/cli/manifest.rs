//! Run manifest written next to every set of outputs.

use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

impl OutputDigest {
    pub fn of(path: &Path, contents: &[u8]) -> Self {
        OutputDigest {
            file: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            bytes: contents.len(),
            sha256: hex::encode(Sha256::digest(contents)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Seconds since the Unix epoch at start; the only field expected to
    /// differ between reproducing runs, together with `duration_s`.
    pub timestamp: f64,
    pub duration_s: f64,
    pub seeds: Vec<u64>,
    pub rng: Option<&'static str>,
    /// Fully resolved configuration; feeding it back via `--config x.json`
    /// reproduces the data files.
    pub config: RunConfig,
    pub details: serde_json::Value,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig, started: SystemTime, elapsed: Duration) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            timestamp: started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            duration_s: elapsed.as_secs_f64(),
            seeds: Vec::new(),
            rng: None,
            config: config.clone(),
            details: serde_json::Value::Null,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("in-memory JSON");
        out.push(b'\n');
        out
    }
}
