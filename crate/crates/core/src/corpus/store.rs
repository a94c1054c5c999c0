//! On-disk corpus layout and the append-only metadata log.
//!
//! Layout under the corpus root:
//!
//! ```text
//! corpus/
//!   metadata.jsonl                  one record per (site, interval) attempt
//!   <domain>/<interval>/policy.md   extracted policy text
//! ```

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use super::interval::Interval;
use super::types::MetadataRecord;
use super::CorpusError;

/// Resolves paths inside a corpus directory.
#[derive(Clone, Debug)]
pub struct CorpusStore {
    root: PathBuf,
}

impl CorpusStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CorpusStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn metadata_path(&self) -> PathBuf {
        self.root.join("metadata.jsonl")
    }

    pub fn document_dir(&self, site: &str, interval: Interval) -> PathBuf {
        self.root.join(site).join(interval.to_string())
    }

    pub fn document_path(&self, site: &str, interval: Interval) -> PathBuf {
        self.document_dir(site, interval).join("policy.md")
    }

    /// Write a document, creating parent directories.
    pub fn write_document(
        &self,
        site: &str,
        interval: Interval,
        markdown: &str,
    ) -> Result<(), CorpusError> {
        let dir = self.document_dir(site, interval);
        fs::create_dir_all(&dir).map_err(|e| CorpusError::Io(dir.display().to_string(), e))?;
        let path = self.document_path(site, interval);
        fs::write(&path, markdown).map_err(|e| CorpusError::Io(path.display().to_string(), e))
    }

    pub fn read_document(&self, site: &str, interval: Interval) -> Result<String, CorpusError> {
        let path = self.document_path(site, interval);
        fs::read_to_string(&path).map_err(|e| CorpusError::Io(path.display().to_string(), e))
    }

    pub fn document_exists(&self, site: &str, interval: Interval) -> bool {
        self.document_path(site, interval).is_file()
    }

    /// Read every record from `metadata.jsonl`. Missing file reads as empty.
    pub fn read_metadata(&self) -> Result<Vec<MetadataRecord>, CorpusError> {
        read_metadata_log(&self.metadata_path())
    }

    /// Replace `metadata.jsonl` with the given records, one JSON object per line.
    pub fn write_metadata(&self, records: &[MetadataRecord]) -> Result<(), CorpusError> {
        fs::create_dir_all(&self.root)
            .map_err(|e| CorpusError::Io(self.root.display().to_string(), e))?;
        write_metadata_log(&self.metadata_path(), records)
    }
}

/// Read a JSONL metadata log. A missing file is an empty log.
pub fn read_metadata_log(path: &Path) -> Result<Vec<MetadataRecord>, CorpusError> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CorpusError::Io(path.display().to_string(), e)),
    };
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: MetadataRecord = serde_json::from_str(&line).map_err(|e| {
            CorpusError::BadMetadata(format!("{} line {}: {e}", path.display(), idx + 1))
        })?;
        records.push(rec);
    }
    Ok(records)
}

/// Write a JSONL metadata log atomically (write to a sibling temp file, then
/// rename over the target).
pub fn write_metadata_log(path: &Path, records: &[MetadataRecord]) -> Result<(), CorpusError> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut file = fs::File::create(&tmp)
            .map_err(|e| CorpusError::Io(tmp.display().to_string(), e))?;
        for rec in records {
            let line = serde_json::to_string(rec)
                .map_err(|e| CorpusError::BadMetadata(e.to_string()))?;
            writeln!(file, "{line}").map_err(|e| CorpusError::Io(tmp.display().to_string(), e))?;
        }
    }
    fs::rename(&tmp, path).map_err(|e| CorpusError::Io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::types::{FailureCause, Outcome};

    #[test]
    fn document_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = CorpusStore::new(dir.path());
        let iv: Interval = "2016A".parse().unwrap();
        assert!(!store.document_exists("a.com", iv));
        store.write_document("a.com", iv, "# Privacy\n\nHello.\n").unwrap();
        assert!(store.document_exists("a.com", iv));
        assert_eq!(store.read_document("a.com", iv).unwrap(), "# Privacy\n\nHello.\n");
        assert!(store.document_path("a.com", iv).ends_with("a.com/2016A/policy.md"));
    }

    #[test]
    fn metadata_round_trip_and_missing_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let store = CorpusStore::new(dir.path());
        assert!(store.read_metadata().unwrap().is_empty());

        let iv: Interval = "2016A".parse().unwrap();
        let mut ok = MetadataRecord::attempt("a.com", iv, Outcome::Success);
        ok.policy_url = Some("https://a.com/privacy".into());
        ok.classifier_score = Some(0.92);
        let fail = MetadataRecord::attempt(
            "b.com",
            iv,
            Outcome::Failure(FailureCause::NoPolicyLinkFound),
        );
        store.write_metadata(&[ok.clone(), fail.clone()]).unwrap();

        let back = store.read_metadata().unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0], ok);
        assert_eq!(back[1], fail);
    }

    #[test]
    fn metadata_rewrite_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let store = CorpusStore::new(dir.path());
        let iv: Interval = "2016A".parse().unwrap();
        let a = MetadataRecord::attempt("a.com", iv, Outcome::Success);
        store.write_metadata(&[a.clone()]).unwrap();
        store.write_metadata(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(store.read_metadata().unwrap().len(), 2);
    }

    #[test]
    fn malformed_metadata_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metadata.jsonl");
        std::fs::write(&path, "{\"not\": \"a record\"}\n").unwrap();
        assert!(read_metadata_log(&path).is_err());
    }
}
