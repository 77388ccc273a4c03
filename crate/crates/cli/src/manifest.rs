use std::path::Path;

use serde::Serialize;

use crate::files::sha256_hex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn new(path: &Path, bytes: &[u8]) -> Self {
        FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        }
    }
}

/// Record of one run: what went in, how it was configured, what came out.
/// Contains nothing time- or host-dependent, so identical runs produce
/// identical manifests.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub tool_version: &'static str,
    pub arguments: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub config: serde_json::Value,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn new(command: &'static str, config: serde_json::Value) -> Self {
        RunManifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            arguments: std::env::args().skip(1).collect(),
            inputs: Vec::new(),
            config,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }
}
