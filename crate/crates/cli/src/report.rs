use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Output of every analysis command. Objects serialize with sorted keys, so
/// identical inputs give byte-identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    /// SHA-256 over the input files, each prefixed by its byte length.
    pub input_digest: Option<String>,
    pub provenance: BTreeMap<String, bool>,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, inputs: &[&[u8]], seed: Option<u64>, results: Value) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            input_digest: (!inputs.is_empty()).then(|| digest(inputs)),
            provenance: BTreeMap::new(),
            results,
        }
    }

    pub fn flag(mut self, name: &str, value: bool) -> Self {
        self.provenance.insert(name.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
