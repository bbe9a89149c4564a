use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::table::write_json;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub arguments: Vec<String>,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<InputDigest, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(command: &str, arguments: Vec<String>, config: serde_json::Value) -> Self {
        let canonical = serde_json::to_vec(&config).expect("JSON values serialize");
        RunManifest {
            tool: "iotn",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments,
            config_sha256: sha256_hex(&canonical),
            config,
            seeds: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_at: now(),
            finished_at: String::new(),
        }
    }

    /// Lists every file under `out` (relative, sorted) and writes the
    /// manifest there.
    pub fn finish(mut self, out: &Path) -> Result<(), CliError> {
        let mut files = Vec::new();
        collect_files(out, out, &mut files)?;
        files.sort();
        self.outputs = files
            .into_iter()
            .map(|p| p.to_string_lossy().replace('\\', "/"))
            .filter(|p| p != MANIFEST_FILE)
            .collect();
        self.finished_at = now();
        write_json(&out.join(MANIFEST_FILE), &serde_json::to_value(&self)?)
    }
}

fn collect_files(root: &Path, dir: &Path, acc: &mut Vec<PathBuf>) -> Result<(), CliError> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(root, &path, acc)?;
        } else {
            acc.push(path.strip_prefix(root).unwrap_or(&path).to_path_buf());
        }
    }
    Ok(())
}
