//! Stage manifests: digests of everything a stage read and wrote, plus its
//! counters. No timestamps, so re-running a stage on unchanged inputs
//! rewrites the manifest byte-identically. `report` walks the recorded
//! digests to refuse running over a stale chain.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;

use super::{io_err, PipelineError, Stage};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub config_digest: String,
    /// Label → sha256 of every file the stage read.
    pub inputs: BTreeMap<String, String>,
    /// Label → sha256 of every file the stage wrote.
    pub outputs: BTreeMap<String, String>,
    pub counts: BTreeMap<String, u64>,
}

impl Manifest {
    pub fn new(stage: Stage, config: &Config) -> Self {
        Manifest {
            stage: stage.name().to_string(),
            config_digest: config_digest(config),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            counts: BTreeMap::new(),
        }
    }

    pub fn record_input(
        &mut self,
        config: &Config,
        path: &Path,
    ) -> Result<(), PipelineError> {
        let digest = digest_file(path)?;
        self.inputs.insert(label_for(config, path), digest);
        Ok(())
    }

    pub fn record_output(
        &mut self,
        config: &Config,
        path: &Path,
    ) -> Result<(), PipelineError> {
        let digest = digest_file(path)?;
        self.outputs.insert(label_for(config, path), digest);
        Ok(())
    }

    pub fn set_count(&mut self, key: &str, value: u64) {
        self.counts.insert(key.to_string(), value);
    }
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex(&hasher.finalize())
}

pub fn digest_file(path: &Path) -> Result<String, PipelineError> {
    let bytes = fs::read(path).map_err(|e| io_err(path.display(), e))?;
    Ok(digest_bytes(&bytes))
}

fn hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// The config digest covers the typed configuration's deterministic debug
/// rendering; it records what the stage ran with, nothing enforces equality
/// across stages.
fn config_digest(config: &Config) -> String {
    digest_bytes(format!("{config:?}").as_bytes())
}

/// Manifest labels are portable: paths under the work/corpus/reports roots
/// become `<root>:<relative>`, anything else stays absolute.
pub fn label_for(config: &Config, path: &Path) -> String {
    for (root, dir) in [
        ("work", &config.work_dir),
        ("corpus", &config.corpus_dir),
        ("reports", &config.reports_dir),
    ] {
        if let Ok(rel) = path.strip_prefix(dir) {
            let rel = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            return format!("{root}:{rel}");
        }
    }
    path.display().to_string()
}

pub fn resolve_label(config: &Config, label: &str) -> PathBuf {
    for (root, dir) in [
        ("work", &config.work_dir),
        ("corpus", &config.corpus_dir),
        ("reports", &config.reports_dir),
    ] {
        if let Some(rel) = label.strip_prefix(&format!("{root}:")) {
            return dir.join(rel);
        }
    }
    PathBuf::from(label)
}

pub fn manifest_path(work_dir: &Path, stage: Stage) -> PathBuf {
    work_dir.join("manifests").join(format!("{}.json", stage.name()))
}

pub fn write_manifest(work_dir: &Path, manifest: &Manifest) -> Result<(), PipelineError> {
    let stage: Stage = manifest.stage.parse()?;
    let path = manifest_path(work_dir, stage);
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| PipelineError::BadData(format!("manifest serialize: {e}")))?;
    text.push('\n');
    atomic_write(&path, text.as_bytes())
}

pub fn load_manifest(work_dir: &Path, stage: Stage) -> Result<Option<Manifest>, PipelineError> {
    let path = manifest_path(work_dir, stage);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(io_err(path.display(), e)),
    };
    serde_json::from_str(&text)
        .map_err(|e| PipelineError::BadData(format!("{}: {e}", path.display())))
}

pub fn require_manifest(work_dir: &Path, stage: Stage) -> Result<Manifest, PipelineError> {
    load_manifest(work_dir, stage)?.ok_or_else(|| PipelineError::MissingManifest {
        stage: stage.name().to_string(),
        path: manifest_path(work_dir, stage),
    })
}

/// Re-digest every file recorded by every existing upstream manifest. Any
/// mismatch means some stage re-ran (or a file was edited) without its
/// dependents following, and the caller must refuse to proceed.
pub fn verify_chain(config: &Config, stages: &[Stage]) -> Result<(), PipelineError> {
    for &stage in stages {
        let Some(manifest) = load_manifest(&config.work_dir, stage)? else {
            continue;
        };
        for (label, expected) in manifest.inputs.iter().chain(manifest.outputs.iter()) {
            let path = resolve_label(config, label);
            let actual = digest_file(&path)?;
            if actual != *expected {
                return Err(PipelineError::StaleManifest {
                    stage: manifest.stage.clone(),
                    file: label.clone(),
                    expected: expected.clone(),
                    actual,
                });
            }
        }
    }
    Ok(())
}

/// Write via a sibling temp file and rename, creating parent directories.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent.display(), e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| io_err(tmp.display(), e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path.display(), e))
}

/// Serialize a stage artifact as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| PipelineError::BadData(format!("{}: {e}", path.display())))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path.display(), e))?;
    serde_json::from_str(&text)
        .map_err(|e| PipelineError::BadData(format!("{}: {e}", path.display())))
}
