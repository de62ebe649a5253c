//! Run manifests and output plumbing shared by every subcommand.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Format tag of JSON result documents.
pub const RESULT_FORMAT: &str = "mswap result v1";

/// Provenance block embedded in every output file.
///
/// The manifest pins down everything a run depends on: the command, every
/// resolved parameter (defaults included), the seed, and a content digest
/// of each input file. Two runs with identical manifests write identical
/// payloads; only the timestamp line may differ.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, Value>,
    pub version: String,
    pub timestamp: String,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            command: command.to_owned(),
            parameters: BTreeMap::new(),
            seed: None,
            inputs: BTreeMap::new(),
            version: format!("mswap {}", env!("CARGO_PKG_VERSION")),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("parameters are plain data");
        self.parameters.insert(key.to_owned(), value);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Records an input file's path and content digest under `role`.
    pub fn input(mut self, role: &str, path: &Path, bytes: &[u8]) -> Self {
        self.inputs.insert(
            role.to_owned(),
            json!({
                "path": path.display().to_string(),
                "sha256": hex::encode(Sha256::digest(bytes)),
            }),
        );
        self
    }

    /// The manifest as comment lines for text payloads. The timestamp sits
    /// on its own `# generated:` line so that payload comparisons can drop
    /// it; everything else lands on the `# manifest:` line.
    pub fn comment_block(&self) -> String {
        let mut value = serde_json::to_value(self).expect("manifest serializes");
        let timestamp = value
            .as_object_mut()
            .and_then(|map| map.remove("timestamp"))
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        format!("# manifest: {value}\n# generated: {timestamp}\n")
    }
}

/// Wraps a result in the versioned document envelope, all floats rounded
/// to 12 significant digits. Keys serialize in sorted order and the
/// timestamp gets its own line, so outputs diff cleanly across runs.
pub fn json_document(manifest: &Manifest, result: impl Serialize) -> Result<String> {
    let mut doc = Map::new();
    doc.insert("format".to_owned(), json!(RESULT_FORMAT));
    doc.insert("manifest".to_owned(), serde_json::to_value(manifest)?);
    doc.insert(
        "result".to_owned(),
        round_floats(serde_json::to_value(result)?),
    );
    let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
    text.push('\n');
    Ok(text)
}

/// Rounds every float in a JSON tree to 12 significant digits; integers
/// pass through untouched.
pub fn round_floats(value: Value) -> Value {
    match value {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                Value::from(round_sig(x))
            } else {
                Value::Number(n)
            }
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, round_floats(v)))
                .collect(),
        ),
        other => other,
    }
}

/// 12 significant decimal digits, with negative zero normalized away.
fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    format!("{x:.11e}").parse().expect("scientific notation reparses")
}

/// Writes a payload to `out`, or to stdout when no path is given.
pub fn write_payload(out: Option<&Path>, payload: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, payload)
            .with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout()
            .write_all(payload.as_bytes())
            .context("writing to stdout"),
    }
}

/// Reads a file with a path-carrying error.
pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Registers are named r1..rm in circuit files; rendered pairs follow suit.
pub fn pair_one_based(pair: (usize, usize)) -> [usize; 2] {
    [pair.0 + 1, pair.1 + 1]
}
