use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_SCHEMA: &str = "davlab-run/1";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub subcommand: &'static str,
    pub params: serde_json::Value,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub tool_version: &'static str,
    pub exit_code: i32,
    /// SHA-256 of the exact output bytes; absent when nothing was written.
    pub result_digest: Option<String>,
    pub output: Option<String>,
    /// Per-row timings for enumeration commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<Vec<u128>>,
}

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn start(subcommand: &'static str, params: serde_json::Value) -> Self {
        RunManifest {
            schema: MANIFEST_SCHEMA,
            subcommand,
            params,
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            tool_version: env!("CARGO_PKG_VERSION"),
            exit_code: 0,
            result_digest: None,
            output: None,
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("manifest serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("manifest serializes");
        s.push('\n');
        s
    }
}
