use std::ffi::OsString;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::Failure;

/// Writes result files into one directory, each tagged with the tool
/// versions and a hash of the effective configuration.
pub struct Output {
    dir: PathBuf,
    hash: String,
    written: Vec<String>,
}

/// SHA-256 over the effective arguments (without `--config` and `--out`,
/// which do not change results) and the contents of the input files.
pub fn config_hash(args: &[OsString], inputs: &[&Path]) -> Result<String, Failure> {
    let mut h = Sha256::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        let s = a.to_string_lossy();
        if skip {
            skip = false;
            continue;
        }
        if s == "--config" || s == "--out" {
            skip = true;
            continue;
        }
        if s.starts_with("--config=") || s.starts_with("--out=") {
            continue;
        }
        h.update(s.as_bytes());
        h.update([0]);
    }
    for p in inputs {
        let bytes = std::fs::read(p).map_err(|e| Failure::validation(format!("cannot read {}: {e}", p.display())))?;
        h.update(&bytes);
        h.update([0]);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

pub fn versions() -> Value {
    json!({
        "tevp": env!("CARGO_PKG_VERSION"),
        "tevp-core": tevp_core::VERSION,
    })
}

impl Output {
    pub fn new(dir: &Path, hash: String) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::validation(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            hash,
            written: Vec::new(),
        })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        std::fs::write(&path, body)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// CSV body preceded by `#` header lines.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<(), Failure> {
        let header = format!(
            "# tevp {} (tevp-core {})\n# config-sha256 {}\n",
            env!("CARGO_PKG_VERSION"),
            tevp_core::VERSION,
            self.hash
        );
        self.write(name, &(header + body))
    }

    /// JSON object with a `meta` entry carrying the same header.
    pub fn json(&mut self, name: &str, value: Value) -> Result<(), Failure> {
        let mut map = serde_json::Map::new();
        map.insert(
            "meta".into(),
            json!({ "versions": versions(), "config_sha256": self.hash }),
        );
        match value {
            Value::Object(o) => map.extend(o),
            other => {
                map.insert("data".into(), other);
            }
        }
        let text = serde_json::to_string_pretty(&Value::Object(map)).expect("json values serialise");
        self.write(name, &(text + "\n"))
    }
}
