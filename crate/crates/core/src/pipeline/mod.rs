//! The staged pipeline: each stage reads its predecessors' files, writes
//! its own outputs plus a manifest, and is byte-identical on re-runs with
//! unchanged inputs. Site-level problems become metadata records, never
//! process failures.

pub mod analyze;
pub mod classify;
pub mod curate;
pub mod discover;
pub mod extract;
pub mod fetch;
pub mod manifest;
pub mod report;
pub mod train;

pub use manifest::{digest_bytes, digest_file, Manifest};

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::archive::ArchiveError;
use crate::classifier::ClassifierError;
use crate::config::{Config, ConfigError};
use crate::corpus::CorpusError;
use crate::extract::ExtractError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Discover,
    Fetch,
    Extract,
    Train,
    Classify,
    Curate,
    Analyze,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Discover,
        Stage::Fetch,
        Stage::Extract,
        Stage::Train,
        Stage::Classify,
        Stage::Curate,
        Stage::Analyze,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Discover => "discover",
            Stage::Fetch => "fetch",
            Stage::Extract => "extract",
            Stage::Train => "train",
            Stage::Classify => "classify",
            Stage::Curate => "curate",
            Stage::Analyze => "analyze",
            Stage::Report => "report",
        }
    }

    /// Stages whose manifests must exist before this one may run.
    pub fn prerequisites(self) -> &'static [Stage] {
        match self {
            Stage::Discover => &[],
            Stage::Fetch => &[Stage::Discover],
            Stage::Extract => &[Stage::Fetch],
            Stage::Train => &[],
            Stage::Classify => &[Stage::Extract, Stage::Train],
            Stage::Curate => &[Stage::Classify],
            Stage::Analyze => &[Stage::Curate, Stage::Discover],
            Stage::Report => &[Stage::Analyze],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.name() == s)
            .ok_or_else(|| PipelineError::BadData(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("archive: {0}")]
    Archive(#[from] ArchiveError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("stage `{stage}` has not run: manifest {path} is missing")]
    MissingManifest { stage: String, path: PathBuf },
    #[error(
        "stage `{stage}` is stale: {file} now digests {actual}, but its manifest \
         recorded {expected}; re-run `{stage}` and the stages after it"
    )]
    StaleManifest {
        stage: String,
        file: String,
        expected: String,
        actual: String,
    },
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("endpoint {0} is not local; pass --live to crawl a live archive")]
    LiveDisabled(String),
    #[error("{0}")]
    BadData(String),
}

pub(crate) fn io_err(path: impl fmt::Display, e: std::io::Error) -> PipelineError {
    PipelineError::Io(path.to_string(), e)
}

/// What a stage run reports back: counters for the one-line summary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSummary {
    pub stage: Stage,
    pub counts: BTreeMap<String, u64>,
}

impl StageSummary {
    fn new(stage: Stage) -> Self {
        StageSummary {
            stage,
            counts: BTreeMap::new(),
        }
    }
}

impl fmt::Display for StageSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} complete", self.stage)?;
        for (key, value) in &self.counts {
            write!(f, " {key}={value}")?;
        }
        Ok(())
    }
}

/// Shared stage context. `live` permits non-local archive endpoints.
pub struct StageContext {
    pub config: Config,
    pub live: bool,
}

impl StageContext {
    pub fn new(config: Config) -> Self {
        StageContext { config, live: false }
    }

    /// Network stages refuse non-local endpoints unless `--live` was given,
    /// so tests and offline runs can never hit a real archive by accident.
    pub(crate) fn check_endpoint(&self) -> Result<(), PipelineError> {
        if self.live {
            return Ok(());
        }
        let local = url::Url::parse(&self.config.archive_endpoint)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .map(|h| h == "127.0.0.1" || h == "localhost" || h == "::1")
            .unwrap_or(false);
        if local {
            Ok(())
        } else {
            Err(PipelineError::LiveDisabled(
                self.config.archive_endpoint.clone(),
            ))
        }
    }
}

pub fn run_stage(stage: Stage, ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    for prereq in stage.prerequisites() {
        manifest::require_manifest(&ctx.config.work_dir, *prereq)?;
    }
    match stage {
        Stage::Discover => discover::run(ctx),
        Stage::Fetch => fetch::run(ctx),
        Stage::Extract => extract::run(ctx),
        Stage::Train => train::run(ctx),
        Stage::Classify => classify::run(ctx),
        Stage::Curate => curate::run(ctx),
        Stage::Analyze => analyze::run(ctx),
        Stage::Report => report::run(ctx),
    }
}
