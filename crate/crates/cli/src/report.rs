use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Envelope shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// Input role to `sha256:<hex>` of the file contents.
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
    pub version: String,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl Report {
    pub fn new(command: &str, inputs: &[(&str, &str)], results: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs: inputs
                .iter()
                .map(|(role, text)| (role.to_string(), digest(text.as_bytes())))
                .collect(),
            results,
            version: VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite JSON")
    }

    /// `key,value` rows with dotted paths into `results`.
    pub fn to_csv(&self) -> String {
        let mut rows = vec!["key,value".to_string()];
        rows.push(format!("command,{}", self.command));
        rows.push(format!("version,{}", self.version));
        for (role, d) in &self.inputs {
            rows.push(format!("inputs.{role},{d}"));
        }
        flatten("results", &self.results, &mut rows);
        rows.join("\n") + "\n"
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<String>) {
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&format!("{prefix}.{k}"), x, rows)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(&format!("{prefix}.{i}"), x, rows)),
        Value::String(s) => rows.push(format!("{prefix},{s}")),
        other => rows.push(format!("{prefix},{other}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_is_sha256_hex() {
        assert_eq!(
            digest(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn report_round_trips() {
        let r = Report::new("witness", &[("observable", "{}")], json!({"bounds": {"g_max": 1.0}}));
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_flattens_nested_results() {
        let r = Report::new("x", &[], json!({"a": {"b": [1.5, "s"]}}));
        let csv = r.to_csv();
        assert!(csv.contains("results.a.b.0,1.5"));
        assert!(csv.contains("results.a.b.1,s"));
    }
}
