//! Machine-readable command reports.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Computed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of each input file, keyed by its role.
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
    pub status: Status,
    pub tool_version: String,
}

impl Report {
    pub fn new(
        command: &str,
        inputs: BTreeMap<String, String>,
        results: Value,
        status: Status,
    ) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            results,
            status,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
