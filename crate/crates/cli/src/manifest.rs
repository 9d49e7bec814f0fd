//! Run manifests: the resolved configuration plus digests of every output
//! file. Re-running a subcommand with the same manifest inputs reproduces
//! the outputs byte for byte.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::io;
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, config: serde_json::Value) -> Self {
        Self {
            tool: "riscode",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            seed,
            config,
            outputs: Vec::new(),
        }
    }

    /// Writes one output file under `dir` and records its digest.
    pub fn write_output(&mut self, dir: &Path, name: &str, contents: &str) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), contents)?;
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        let sha256 = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>();
        self.outputs.push(OutputDigest { path: name.to_string(), sha256 });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(dir.join("manifest.json"), body + "\n")
    }
}
