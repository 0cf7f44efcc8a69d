//! Run manifests: what was run, on which inputs, and what it produced.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::output::{to_json, write_atomic};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> CliResult<Self> {
        let data = std::fs::read(path).map_err(|e| CliError::read(path, e))?;
        Ok(Self { path: path.display().to_string(), bytes: data.len() as u64, sha256: sha256_hex(&data) })
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    pub success: bool,
    pub exit_code: i32,
    pub error: Option<String>,
    pub seed: Option<u64>,
    /// SHA-256 of the effective configuration as pretty JSON.
    pub config_sha256: Option<String>,
    pub config: Option<serde_json::Value>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub failures: BTreeMap<String, usize>,
    pub workers: Option<usize>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args,
            success: false,
            exit_code: 0,
            error: None,
            seed: None,
            config_sha256: None,
            config: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            failures: BTreeMap::new(),
            workers: None,
            duration_seconds: 0.0,
        }
    }

    pub fn set_config<T: Serialize>(&mut self, config: &T) {
        let value = serde_json::to_value(config).expect("configs serialize");
        self.config_sha256 = Some(sha256_hex(to_json(&value).as_bytes()));
        self.config = Some(value);
    }

    pub fn add_input(&mut self, path: &Path) -> CliResult<()> {
        self.inputs.push(FileDigest::of(path)?);
        Ok(())
    }

    pub fn set_outputs(&mut self, paths: &[PathBuf]) -> CliResult<()> {
        self.outputs = paths.iter().map(|p| FileDigest::of(p)).collect::<CliResult<_>>()?;
        Ok(())
    }

    pub fn finish(&mut self, result: &CliResult<()>, elapsed: Duration) {
        self.duration_seconds = elapsed.as_secs_f64();
        match result {
            Ok(()) => {
                self.success = true;
                self.exit_code = 0;
            }
            Err(e) => {
                self.success = false;
                self.exit_code = e.exit_code();
                self.error = Some(e.to_string());
                self.outputs.clear();
            }
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
        let path = dir.join(MANIFEST_NAME);
        write_atomic(&path, to_json(self))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_bytes() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn failure_clears_outputs() {
        let mut m = RunManifest::new("fit", vec![]);
        m.outputs.push(FileDigest { path: "x".into(), bytes: 0, sha256: String::new() });
        m.finish(&Err(CliError::runtime("boom")), Duration::from_millis(5));
        assert!(!m.success);
        assert_eq!(m.exit_code, 2);
        assert!(m.outputs.is_empty());
    }
}
