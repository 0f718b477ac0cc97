//! The per-invocation run manifest.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const RUN_MANIFEST_FORMAT: &str = "pdcontact-run";
pub const RUN_MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub phase: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExitStatus {
    pub code: i32,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub command: String,
    /// Every flag of the invocation after defaults were applied.
    pub config: serde_json::Value,
    /// SHA-256 of the problem file bytes, hex.
    pub problem_hash: Option<String>,
    /// Set when the run wrote a history CSV.
    pub history_schema: Option<u32>,
    pub started_unix: f64,
    pub timings: Vec<Timing>,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub exit: ExitStatus,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects what a command does; turned into a [`RunManifest`] at the end.
pub struct Run {
    manifest: RunManifest,
    start: Instant,
}

impl Run {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        let started_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        Run {
            manifest: RunManifest {
                format: RUN_MANIFEST_FORMAT.into(),
                version: RUN_MANIFEST_VERSION,
                tool_version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                config,
                problem_hash: None,
                history_schema: None,
                started_unix,
                timings: Vec::new(),
                outputs: Vec::new(),
                warnings: Vec::new(),
                exit: ExitStatus { code: 0, message: None },
            },
            start: Instant::now(),
        }
    }

    pub fn problem_bytes(&mut self, bytes: &[u8]) {
        self.manifest.problem_hash = Some(sha256_hex(bytes));
    }

    pub fn history_schema(&mut self, version: u32) {
        self.manifest.history_schema = Some(version);
    }

    /// Runs `f` and records its wall time under `phase`.
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.manifest.timings.push(Timing {
            phase: phase.into(),
            seconds: t.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn output(&mut self, path: &Path) {
        self.manifest.outputs.push(path.to_path_buf());
    }

    pub fn warn(&mut self, msg: String) {
        eprintln!("warning: {msg}");
        self.manifest.warnings.push(msg);
    }

    pub fn finish(mut self, code: i32, message: Option<String>) -> RunManifest {
        self.manifest.timings.push(Timing {
            phase: "total".into(),
            seconds: self.start.elapsed().as_secs_f64(),
        });
        self.manifest.exit = ExitStatus { code, message };
        self.manifest
    }
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> anyhow::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(manifest)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}
