//! The JSON document printed by every invocation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    /// SHA-256 over the input files, each prefixed by its byte length.
    pub input_digest: String,
    pub payload: serde_json::Value,
    pub reliable_range: Option<(i32, i32)>,
    pub version: String,
}

pub fn digest(inputs: &[&str]) -> String {
    let mut h = Sha256::new();
    for text in inputs {
        h.update((text.len() as u64).to_le_bytes());
        h.update(text.as_bytes());
    }
    hex::encode(h.finalize())
}

impl ResultRecord {
    pub fn new(command: &str, inputs: &[&str], payload: serde_json::Value, reliable_range: Option<(i32, i32)>) -> Self {
        ResultRecord {
            command: command.to_string(),
            input_digest: digest(inputs),
            payload,
            reliable_range,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }
}
