//! Sidecar `<out>.manifest.json` describing how an output was produced.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    command: &'static str,
    version: &'static str,
    seed: Option<u64>,
    parameters: BTreeMap<&'static str, Value>,
    inputs: BTreeMap<&'static str, InputDigest>,
    output: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

impl Manifest {
    pub fn new(command: &'static str, out: &Path) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
            parameters: BTreeMap::new(),
            inputs: BTreeMap::new(),
            output: out.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn param(mut self, key: &'static str, value: impl Serialize) -> Self {
        self.parameters
            .insert(key, serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn input(mut self, key: &'static str, path: &Path) -> std::io::Result<Self> {
        let bytes = fs::read(path)?;
        self.inputs.insert(
            key,
            InputDigest {
                path: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            },
        );
        Ok(self)
    }

    pub fn write(&self, out: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(sidecar_path(out), text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn sidecar_next_to_output() {
        assert_eq!(
            sidecar_path(Path::new("runs/out.csv")),
            PathBuf::from("runs/out.csv.manifest.json")
        );
    }
}
