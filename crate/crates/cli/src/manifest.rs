use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FORMAT: &str = "claimlens-manifest";
pub const MANIFEST_VERSION: u32 = 1;

/// What a command read, how it was configured and what it wrote. Nothing in
/// here depends on the clock or the machine, so identical runs give
/// byte-identical manifests.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub format: &'static str,
    pub version: u32,
    pub command: String,
    pub tool_version: &'static str,
    pub parameters: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub output_digests: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            format: MANIFEST_FORMAT,
            version: MANIFEST_VERSION,
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            parameters: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            output_digests: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs
            .insert(path.display().to_string(), sha256_hex(bytes));
    }

    /// Records an output by its name inside the output directory.
    pub fn output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.push(name.to_string());
        self.output_digests
            .insert(name.to_string(), sha256_hex(bytes));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
