//! Analyze: compute every longitudinal metric over the curated corpus and
//! persist one JSON file the report stage renders to CSV.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    changepoint_concentration, detect_updates, fkgl, match_terms, outbound_policy_links,
    parse_matcher_pack, rank_bucket_stats, surface_trends, update_length, word_count,
    AnalysisDoc, Matcher, Scorer, TermKind, UpdateStatus,
};
use crate::config::Config;
use crate::corpus::{CorpusStore, Interval, PolicyDocument};
use crate::extract::strip_to_sentences;
use crate::parallel::par_map;

use super::curate::{documents_from_metadata, output_path as curation_path, CurationOutput};
use super::discover::{output_path as discover_path, DiscoverOutput};
use super::fetch::load_pattern_table;
use super::manifest::{read_json, write_json, write_manifest, Manifest};
use super::{io_err, PipelineError, Stage, StageContext, StageSummary};

/// Change-point concentration runs on these n-gram lengths.
pub const CHANGEPOINT_NGRAMS: [usize; 2] = [1, 8];
/// Ranked trend lists keep this many terms.
pub const TREND_TOP_K: usize = 20;

pub fn output_path(config: &Config) -> PathBuf {
    config.work_dir.join("analysis.json")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LengthRow {
    pub median_word_count: f64,
    pub p5: f64,
    pub p95: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UpdateRow {
    pub updated: u64,
    pub unchanged: u64,
    pub skipped: u64,
    pub pct_updated: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChangepointRow {
    pub interval: Interval,
    pub n: usize,
    pub changepoint_count: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkedPolicyRow {
    pub url: String,
    pub distinct_linking_sites: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutboundSummary {
    pub flagged_sites: u64,
    pub total_sites: u64,
    pub pct_flagged: f64,
    pub ranking: Vec<LinkedPolicyRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BucketRow {
    pub bucket: String,
    pub homepage_snapshots: u64,
    pub policies: u64,
    pub percent: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrendRow {
    pub kind: String,
    pub scorer: String,
    pub rank: usize,
    pub term: String,
    pub score: f64,
}

/// Line-delta statistics over one group of detected updates.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct UpdateLengthGroup {
    pub updates: u64,
    pub median_added_lines: f64,
    pub mean_added_lines: f64,
}

/// Update sizes split by whether the new text mentions a configured
/// regulation phrase.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhraseUpdateStats {
    pub mentioning: UpdateLengthGroup,
    pub other: UpdateLengthGroup,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisOutput {
    pub intervals: Vec<Interval>,
    pub documents: u64,
    pub lengths: BTreeMap<Interval, LengthRow>,
    pub readability: BTreeMap<Interval, f64>,
    pub updates: BTreeMap<Interval, UpdateRow>,
    pub changepoints: Vec<ChangepointRow>,
    pub matchers: BTreeMap<String, BTreeMap<Interval, f64>>,
    pub outbound: OutboundSummary,
    pub buckets: Vec<BucketRow>,
    pub trends: Vec<TrendRow>,
    pub phrase_updates: PhraseUpdateStats,
}

pub(super) fn run(ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    let config = &ctx.config;
    let store = CorpusStore::new(&config.corpus_dir);

    let curation_file = curation_path(config);
    let curation: CurationOutput = read_json(&curation_file)?;
    let discover_file = discover_path(config);
    let discovered: DiscoverOutput = read_json(&discover_file)?;
    let records = store.read_metadata()?;

    let mut manifest = Manifest::new(Stage::Analyze, config);
    manifest.record_input(config, &curation_file)?;
    manifest.record_input(config, &discover_file)?;
    manifest.record_input(config, &store.metadata_path())?;

    let kept: BTreeSet<(String, Interval)> = curation
        .kept
        .iter()
        .map(|k| (k.site.clone(), k.interval))
        .collect();
    let policies: Vec<PolicyDocument> = documents_from_metadata(config, &records)?
        .into_iter()
        .filter(|d| kept.contains(&(d.site.clone(), d.interval)))
        .collect();
    for doc in &policies {
        manifest.record_input(config, &store.document_path(&doc.site, doc.interval))?;
    }
    let docs: Vec<AnalysisDoc> = policies
        .iter()
        .map(|d| AnalysisDoc {
            site: d.site.clone(),
            interval: d.interval,
            markdown: d.markdown.clone(),
        })
        .collect();

    let by_interval = group_by_interval(&docs);
    let intervals: Vec<Interval> = by_interval.keys().copied().collect();

    let lengths = length_stats(&by_interval);
    let readability = readability_stats(&by_interval);
    let (updates, phrase_updates) = update_stats(
        &docs,
        config.update_ratio_threshold,
        &config.gdpr_phrases,
    );

    let mut changepoints = Vec::new();
    for n in CHANGEPOINT_NGRAMS {
        let concentration =
            changepoint_concentration(&docs, n, config.concentration_df_floor, config.pelt_penalty);
        for (interval, count) in concentration {
            changepoints.push(ChangepointRow { interval, n, changepoint_count: count as u64 });
        }
    }

    let matchers = match &config.matcher_packs {
        None => BTreeMap::new(),
        Some(path) => {
            let packs = load_matcher_packs(path, config, &mut manifest)?;
            match_terms(&docs, &packs)
        }
    };

    let table = load_pattern_table(config)?;
    let outbound_raw = outbound_policy_links(&docs, &table);
    let flagged = outbound_raw.flagged_sites.values().filter(|&&f| f).count() as u64;
    let total = outbound_raw.flagged_sites.len() as u64;
    let outbound = OutboundSummary {
        flagged_sites: flagged,
        total_sites: total,
        pct_flagged: if total == 0 { 0.0 } else { 100.0 * flagged as f64 / total as f64 },
        ranking: outbound_raw
            .ranking
            .into_iter()
            .map(|l| LinkedPolicyRow {
                url: l.url,
                distinct_linking_sites: l.distinct_linking_sites,
            })
            .collect(),
    };

    let buckets = rank_bucket_stats(&records, &policies, &discovered.targets)
        .into_iter()
        .map(|b| BucketRow {
            bucket: b.bucket.label().to_string(),
            homepage_snapshots: b.homepage_snapshots,
            policies: b.policies,
            percent: b.percent,
        })
        .collect();

    let trends = trend_rows(&docs, config.concentration_df_floor);

    let output = AnalysisOutput {
        intervals: intervals.clone(),
        documents: docs.len() as u64,
        lengths,
        readability,
        updates,
        changepoints,
        matchers,
        outbound,
        buckets,
        trends,
        phrase_updates,
    };
    let out_file = output_path(config);
    write_json(&out_file, &output)?;

    manifest.record_output(config, &out_file)?;
    manifest.set_count("documents", docs.len() as u64);
    manifest.set_count("intervals", intervals.len() as u64);
    manifest.set_count("matchers", output.matchers.len() as u64);
    manifest.set_count("trend_rows", output.trends.len() as u64);
    write_manifest(&config.work_dir, &manifest)?;

    let mut summary = StageSummary::new(Stage::Analyze);
    summary.counts = manifest.counts.clone();
    Ok(summary)
}

fn group_by_interval(docs: &[AnalysisDoc]) -> BTreeMap<Interval, Vec<&AnalysisDoc>> {
    let mut map: BTreeMap<Interval, Vec<&AnalysisDoc>> = BTreeMap::new();
    for doc in docs {
        map.entry(doc.interval).or_default().push(doc);
    }
    map
}

/// Percentile with linear interpolation between order statistics; `xs` must
/// be sorted and non-empty.
fn percentile(xs: &[f64], p: f64) -> f64 {
    let rank = p / 100.0 * (xs.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        xs[lo]
    } else {
        xs[lo] + (rank - lo as f64) * (xs[hi] - xs[lo])
    }
}

fn median(xs: &[f64]) -> f64 {
    percentile(xs, 50.0)
}

fn length_stats(
    by_interval: &BTreeMap<Interval, Vec<&AnalysisDoc>>,
) -> BTreeMap<Interval, LengthRow> {
    let mut out = BTreeMap::new();
    for (&interval, docs) in by_interval {
        let mut counts: Vec<f64> = par_map(docs.clone(), |doc| word_count(&doc.markdown) as f64);
        counts.sort_by(f64::total_cmp);
        out.insert(
            interval,
            LengthRow {
                median_word_count: median(&counts),
                p5: percentile(&counts, 5.0),
                p95: percentile(&counts, 95.0),
            },
        );
    }
    out
}

/// Median grade level per interval; documents whose text yields no
/// sentences are skipped, and intervals where every document is skipped are
/// absent.
fn readability_stats(
    by_interval: &BTreeMap<Interval, Vec<&AnalysisDoc>>,
) -> BTreeMap<Interval, f64> {
    let mut out = BTreeMap::new();
    for (&interval, docs) in by_interval {
        let mut grades: Vec<f64> = par_map(docs.clone(), |doc| {
            fkgl(&strip_to_sentences(&doc.markdown)).ok()
        })
        .into_iter()
        .flatten()
        .collect();
        if grades.is_empty() {
            continue;
        }
        grades.sort_by(f64::total_cmp);
        out.insert(interval, median(&grades));
    }
    out
}

/// Per-interval update shares plus the phrase-mention length comparison.
/// `pct_updated` covers only comparable documents (a previous-interval
/// version exists); intervals with no comparable documents are absent.
fn update_stats(
    docs: &[AnalysisDoc],
    threshold: u32,
    phrases: &[String],
) -> (BTreeMap<Interval, UpdateRow>, PhraseUpdateStats) {
    let mut by_site: BTreeMap<&str, BTreeMap<Interval, &str>> = BTreeMap::new();
    for doc in docs {
        by_site
            .entry(doc.site.as_str())
            .or_default()
            .insert(doc.interval, doc.markdown.as_str());
    }

    let lowered: Vec<String> = phrases.iter().map(|p| p.to_lowercase()).collect();
    let mut rows: BTreeMap<Interval, UpdateRow> = BTreeMap::new();
    let mut mentioning: Vec<f64> = Vec::new();
    let mut other: Vec<f64> = Vec::new();
    for versions in by_site.values() {
        let owned: BTreeMap<Interval, String> = versions
            .iter()
            .map(|(&iv, &text)| (iv, text.to_string()))
            .collect();
        for (interval, status) in detect_updates(&owned, threshold) {
            let row = rows.entry(interval).or_insert(UpdateRow {
                updated: 0,
                unchanged: 0,
                skipped: 0,
                pct_updated: 0.0,
            });
            match status {
                UpdateStatus::Updated => row.updated += 1,
                UpdateStatus::Unchanged => row.unchanged += 1,
                UpdateStatus::Skipped => row.skipped += 1,
            }
            if status == UpdateStatus::Updated {
                let cur = versions[&interval];
                let prev = versions[&interval.prev()];
                let delta = update_length(prev, cur) as f64;
                let cur_lower = cur.to_lowercase();
                if lowered.iter().any(|p| cur_lower.contains(p)) {
                    mentioning.push(delta);
                } else {
                    other.push(delta);
                }
            }
        }
    }
    for row in rows.values_mut() {
        let comparable = row.updated + row.unchanged;
        if comparable > 0 {
            row.pct_updated = 100.0 * row.updated as f64 / comparable as f64;
        }
    }
    rows.retain(|_, row| row.updated + row.unchanged > 0);

    let group = |mut deltas: Vec<f64>| -> UpdateLengthGroup {
        if deltas.is_empty() {
            return UpdateLengthGroup::default();
        }
        deltas.sort_by(f64::total_cmp);
        UpdateLengthGroup {
            updates: deltas.len() as u64,
            median_added_lines: median(&deltas),
            mean_added_lines: deltas.iter().sum::<f64>() / deltas.len() as f64,
        }
    };
    let stats = PhraseUpdateStats { mentioning: group(mentioning), other: group(other) };
    (rows, stats)
}

fn trend_rows(docs: &[AnalysisDoc], min_doc_freq: f64) -> Vec<TrendRow> {
    let kinds = [
        TermKind::NGram(1),
        TermKind::NGram(2),
        TermKind::NGram(3),
        TermKind::NGram(4),
        TermKind::Sentence,
        TermKind::Entity,
        TermKind::Url,
    ];
    let scorers = [Scorer::Gain, Scorer::PosSlope2];
    let ranked = surface_trends(docs, &kinds, &scorers, min_doc_freq, TREND_TOP_K);
    let mut out = Vec::new();
    for ((kind, scorer), terms) in ranked {
        for (rank, (term, score)) in terms.into_iter().enumerate() {
            out.push(TrendRow {
                kind: kind.clone(),
                scorer: scorer.clone(),
                rank: rank + 1,
                term,
                score,
            });
        }
    }
    out
}

/// A matcher-pack path may be one pack file or a directory of `*.txt`
/// packs; matchers from every pack are concatenated in path order.
fn load_matcher_packs(
    path: &std::path::Path,
    config: &Config,
    manifest: &mut Manifest,
) -> Result<Vec<Matcher>, PipelineError> {
    let mut files = Vec::new();
    if path.is_dir() {
        let entries = std::fs::read_dir(path).map_err(|e| io_err(path.display(), e))?;
        for entry in entries {
            let entry = entry.map_err(|e| io_err(path.display(), e))?;
            let p = entry.path();
            if p.extension().is_some_and(|e| e == "txt") {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    if files.is_empty() {
        return Err(PipelineError::MissingInput(format!(
            "no matcher packs under {}",
            path.display()
        )));
    }

    let mut matchers = Vec::new();
    for file in files {
        let text = std::fs::read_to_string(&file).map_err(|e| io_err(file.display(), e))?;
        manifest.record_input(config, &file)?;
        let pack = parse_matcher_pack(&text)?;
        for m in pack {
            if matchers.iter().any(|x: &Matcher| x.name == m.name) {
                return Err(PipelineError::BadData(format!(
                    "duplicate matcher {:?} in {}",
                    m.name,
                    file.display()
                )));
            }
            matchers.push(m);
        }
    }
    Ok(matchers)
}
