//! Run reports: the single JSON object every CLI command prints.
//!
//! Reports are canonical (sorted keys, no whitespace) so that identical
//! `(command, inputs, seed, version)` produce byte-identical output.

use serde_json::{json, Value};

/// Crate version stamped into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: String,
    pub digest: String,
    pub parameters: Value,
    pub result: Value,
    pub seed: u64,
    pub version: String,
}

impl RunReport {
    pub fn new(
        command: impl Into<String>,
        digest: impl Into<String>,
        parameters: Value,
        result: Value,
        seed: u64,
    ) -> Self {
        RunReport {
            command: command.into(),
            digest: digest.into(),
            parameters,
            result,
            seed,
            version: VERSION.to_string(),
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "digest": self.digest,
            "parameters": self.parameters,
            "result": self.result,
            "seed": self.seed,
            "version": self.version,
        })
    }

    /// Canonical bytes; `serde_json` objects sort keys by default.
    pub fn to_canonical_json(&self) -> String {
        self.to_value().to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_stable() {
        let r = RunReport::new("vc", "00", json!({"z": 1, "a": 2}), json!(3), 7);
        let text = r.to_canonical_json();
        assert!(text.starts_with(r#"{"command":"vc","digest":"00","parameters":{"a":2,"z":1}"#));
        assert_eq!(text, r.to_canonical_json());
    }
}
