//! Run manifest written next to every output set.
//!
//! The manifest records everything that determines the outputs and nothing
//! else, so two runs with equal manifests produce equal files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub config_path: String,
    pub config_sha256: String,
    pub out_dir: String,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        parameters: BTreeMap<String, String>,
        config_path: &Path,
        config_bytes: &[u8],
        out_dir: &Path,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            parameters,
            config_path: config_path.display().to_string(),
            config_sha256: hex::encode(Sha256::digest(config_bytes)),
            out_dir: out_dir.display().to_string(),
            files: Vec::new(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}
