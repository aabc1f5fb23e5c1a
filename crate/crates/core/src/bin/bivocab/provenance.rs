use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// What produced an artifact: tool version, a hash of the effective
/// arguments, digests of every input and a timestamp. The timestamp honours
/// `SOURCE_DATE_EPOCH`.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub created_unix: u64,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut f = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut h = Sha256::new();
    std::io::copy(&mut f, &mut h).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(h.finalize()))
}

impl RunRecord {
    pub fn new(command: &str, config: &impl std::fmt::Debug, seed: u64, inputs: &[&Path]) -> Result<Self, CliError> {
        let config_sha256 = hex::encode(Sha256::digest(format!("{config:?}").as_bytes()));
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    path: p.to_path_buf(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<_, CliError>>()?;
        let created_unix = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
        Ok(Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_sha256,
            seed,
            inputs,
            created_unix,
        })
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("run record serializes")
    }

    /// Writes `<artifact>.meta.json`.
    pub fn write_sidecar(&self, artifact: &Path) -> Result<(), CliError> {
        write_json(&bivocab::tokenizer::meta_path(artifact), &self.to_value())
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    std::fs::write(path, s).map_err(|e| CliError::io(path, e))
}
