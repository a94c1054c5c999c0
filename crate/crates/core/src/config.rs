//! Pipeline configuration: a plain-text file of `key = value` lines.
//! `[section]` headers are organizational only; keys live in one flat
//! namespace. Relative paths resolve against the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::corpus::Interval;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("line {0}: expected `key = value`, got {1:?}")]
    BadLine(usize, String),
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("key {key:?}: bad value {value:?} ({reason})")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
}

/// Raw parse result: keys in file order, before typing.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::BadLine(idx + 1, raw.to_string()));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::BadLine(idx + 1, raw.to_string()));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(ConfigError::DuplicateKey(key));
        }
    }
    Ok(map)
}

/// Typed pipeline configuration. Every field has a default; a config file
/// overrides fields by key.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    // archive client
    pub archive_endpoint: String,
    pub workers: usize,
    pub backoff_initial_secs: u64,
    pub backoff_cap_secs: u64,
    pub fetch_retries: u32,

    // target list
    pub rank_lists_dir: Option<PathBuf>,
    pub rank_cutoff: usize,
    pub interval_start: Option<Interval>,
    pub interval_end: Option<Interval>,

    // pipeline directories
    pub corpus_dir: PathBuf,
    pub work_dir: PathBuf,
    pub reports_dir: PathBuf,

    // extraction
    pub link_patterns: Option<PathBuf>,
    pub blank_min_chars: usize,
    pub site_language_check: bool,

    // classifier
    pub labels_csv: Option<PathBuf>,
    pub df_floor: f64,
    pub min_precision: f64,
    pub cv_folds: usize,
    pub seed: u64,
    pub grid_trees: Vec<usize>,
    pub grid_depth: Vec<Option<usize>>,
    pub grid_min_leaf: Vec<usize>,
    pub grid_l2: Vec<f64>,

    // curation
    pub parking_list: Option<PathBuf>,

    // analysis
    pub update_ratio_threshold: u32,
    pub pelt_penalty: Option<f64>,
    pub concentration_df_floor: f64,
    pub matcher_packs: Option<PathBuf>,
    pub gdpr_phrases: Vec<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            archive_endpoint: "https://web.archive.org".to_string(),
            workers: 8,
            backoff_initial_secs: 60,
            backoff_cap_secs: 900,
            fetch_retries: 1,
            rank_lists_dir: None,
            rank_cutoff: 100_000,
            interval_start: None,
            interval_end: None,
            corpus_dir: PathBuf::from("corpus"),
            work_dir: PathBuf::from("work"),
            reports_dir: PathBuf::from("reports"),
            link_patterns: None,
            blank_min_chars: 50,
            site_language_check: true,
            labels_csv: None,
            df_floor: 0.01,
            min_precision: 0.97,
            cv_folds: 10,
            seed: 42,
            grid_trees: vec![100, 300],
            grid_depth: vec![None, Some(16)],
            grid_min_leaf: vec![1, 5],
            grid_l2: vec![0.1, 1.0, 10.0],
            parking_list: None,
            update_ratio_threshold: 95,
            pelt_penalty: None,
            concentration_df_floor: 0.01,
            matcher_packs: None,
            gdpr_phrases: vec![
                "GDPR".to_string(),
                "General Data Protection Regulation".to_string(),
            ],
        }
    }
}

pub const MAX_WORKERS: usize = 256;

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_text(&text, base)
    }

    pub fn from_text(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let raw = parse_key_values(text)?;
        let mut cfg = Config::default();
        for (key, value) in &raw {
            cfg.apply(key, value, base_dir)?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str, base: &Path) -> Result<(), ConfigError> {
        let bad = |reason: &str| ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        let path = |v: &str| -> PathBuf {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        match key {
            "archive_endpoint" => {
                self.archive_endpoint = value.trim_end_matches('/').to_string()
            }
            "workers" => {
                let w: usize = value.parse().map_err(|_| bad("not an integer"))?;
                if w == 0 || w > MAX_WORKERS {
                    return Err(bad(&format!("must be 1..={MAX_WORKERS}")));
                }
                self.workers = w;
            }
            "backoff_initial_secs" => {
                self.backoff_initial_secs = value.parse().map_err(|_| bad("not an integer"))?
            }
            "backoff_cap_secs" => {
                self.backoff_cap_secs = value.parse().map_err(|_| bad("not an integer"))?
            }
            "fetch_retries" => {
                self.fetch_retries = value.parse().map_err(|_| bad("not an integer"))?
            }
            "rank_lists_dir" => self.rank_lists_dir = Some(path(value)),
            "rank_cutoff" => {
                self.rank_cutoff = value.parse().map_err(|_| bad("not an integer"))?
            }
            "interval_start" => {
                self.interval_start =
                    Some(value.parse().map_err(|_| bad("expected e.g. 2005A"))?)
            }
            "interval_end" => {
                self.interval_end = Some(value.parse().map_err(|_| bad("expected e.g. 2005A"))?)
            }
            "corpus_dir" => self.corpus_dir = path(value),
            "work_dir" => self.work_dir = path(value),
            "reports_dir" => self.reports_dir = path(value),
            "link_patterns" => self.link_patterns = Some(path(value)),
            "blank_min_chars" => {
                self.blank_min_chars = value.parse().map_err(|_| bad("not an integer"))?
            }
            "site_language_check" => {
                self.site_language_check = parse_bool(value).ok_or_else(|| bad("not a bool"))?
            }
            "labels_csv" => self.labels_csv = Some(path(value)),
            "df_floor" => self.df_floor = value.parse().map_err(|_| bad("not a number"))?,
            "min_precision" => {
                self.min_precision = value.parse().map_err(|_| bad("not a number"))?
            }
            "cv_folds" => {
                let f: usize = value.parse().map_err(|_| bad("not an integer"))?;
                if f < 2 {
                    return Err(bad("need at least 2 folds"));
                }
                self.cv_folds = f;
            }
            "seed" => self.seed = value.parse().map_err(|_| bad("not an integer"))?,
            "grid_trees" => {
                self.grid_trees = parse_list(value).map_err(|r| bad(&r))?;
            }
            "grid_depth" => {
                let mut out = Vec::new();
                for item in value.split(',') {
                    let item = item.trim();
                    if item.eq_ignore_ascii_case("none") {
                        out.push(None);
                    } else {
                        out.push(Some(item.parse().map_err(|_| bad("not an integer"))?));
                    }
                }
                self.grid_depth = out;
            }
            "grid_min_leaf" => {
                self.grid_min_leaf = parse_list(value).map_err(|r| bad(&r))?;
            }
            "grid_l2" => {
                self.grid_l2 = parse_list(value).map_err(|r| bad(&r))?;
            }
            "parking_list" => self.parking_list = Some(path(value)),
            "update_ratio_threshold" => {
                let t: u32 = value.parse().map_err(|_| bad("not an integer"))?;
                if t > 100 {
                    return Err(bad("ratio threshold is 0..=100"));
                }
                self.update_ratio_threshold = t;
            }
            "pelt_penalty" => {
                if value.eq_ignore_ascii_case("auto") {
                    self.pelt_penalty = None;
                } else {
                    self.pelt_penalty =
                        Some(value.parse().map_err(|_| bad("not a number or `auto`"))?);
                }
            }
            "concentration_df_floor" => {
                self.concentration_df_floor = value.parse().map_err(|_| bad("not a number"))?
            }
            "matcher_packs" => self.matcher_packs = Some(path(value)),
            "gdpr_phrases" => {
                self.gdpr_phrases = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// The inclusive interval range to crawl, if both ends are configured.
    pub fn interval_range(&self) -> Option<Vec<Interval>> {
        let (start, end) = (self.interval_start?, self.interval_end?);
        let mut out = Vec::new();
        let mut cur = start;
        while cur <= end {
            out.push(cur);
            cur = cur.next();
        }
        Some(out)
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>, String> {
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| format!("bad item {s:?}")))
        .collect()
}
