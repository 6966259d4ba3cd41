//! Sidecar metadata written next to every data file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub n_max: Option<usize>,
    pub tail_bound: Option<f64>,
    pub eta: Option<f64>,
    pub tool_version: String,
    pub timestamp: String,
    pub data_file: String,
    /// Command-specific diagnostics such as fitted slopes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Value>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value) -> Self {
        let parameters = match parameters {
            Value::Object(map) => map.into_iter().collect(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        RunManifest {
            command: command.to_string(),
            parameters,
            n_max: None,
            tail_bound: None,
            eta: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            data_file: String::new(),
            results: None,
        }
    }

    pub fn truncation(mut self, n_max: usize, tail_bound: f64, eta: f64) -> Self {
        self.n_max = Some(n_max);
        self.tail_bound = Some(tail_bound);
        self.eta = Some(eta);
        self
    }

    pub fn results(mut self, results: Value) -> Self {
        self.results = Some(results);
        self
    }
}

/// `<file>.manifest.json`.
pub fn manifest_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    data.with_file_name(name)
}

/// Writes a data file through `body`, then its manifest.
pub fn emit<F>(dir: &Path, file: &str, manifest: &RunManifest, body: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(file);
    let mut out = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    body(&mut out).with_context(|| format!("writing {}", path.display()))?;
    out.flush()?;

    let mut manifest = manifest.clone();
    manifest.data_file = file.to_string();
    let mpath = manifest_path(&path);
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(&mpath, text + "\n").with_context(|| format!("writing {}", mpath.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_name() {
        assert_eq!(
            manifest_path(Path::new("out/clicks.csv")),
            PathBuf::from("out/clicks.csv.manifest.json")
        );
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = RunManifest::new("clicks", serde_json::json!({"lo": "cat+:5"})).truncation(80, 1e-13, 1.0);
        let path = emit(dir.path(), "x.csv", &m, |w| writeln!(w, "a")).unwrap();
        let text = std::fs::read_to_string(manifest_path(&path)).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back.data_file, "x.csv");
        assert_eq!(back.n_max, Some(80));
        assert_eq!(back.parameters["lo"], "cat+:5");
    }
}
