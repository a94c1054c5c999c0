//! Target-list construction from per-interval rank lists.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use super::interval::Interval;
use super::types::SiteRecord;
use super::CorpusError;

/// One ingested rank list: rank-ordered, deduplicated domains for an interval.
#[derive(Clone, Debug)]
pub struct RankList {
    pub interval: Interval,
    /// `(rank, domain)` sorted ascending by rank.
    pub entries: Vec<(u32, String)>,
}

impl RankList {
    /// Read a `rank,domain` CSV (UTF-8, no header required; a leading header
    /// row is tolerated and skipped). Entries are sorted by rank and
    /// deduplicated, first occurrence of a domain winning.
    pub fn from_csv_reader<R: Read>(interval: Interval, reader: R) -> Result<Self, CorpusError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut entries: Vec<(u32, String)> = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for (idx, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| CorpusError::BadRankList(format!("row {}: {e}", idx + 1)))?;
            if row.len() < 2 {
                return Err(CorpusError::BadRankList(format!(
                    "row {}: expected rank,domain",
                    idx + 1
                )));
            }
            let rank: u32 = match row[0].trim().parse() {
                Ok(r) => r,
                // tolerate a single header row
                Err(_) if idx == 0 => continue,
                Err(_) => {
                    return Err(CorpusError::BadRankList(format!(
                        "row {}: bad rank {:?}",
                        idx + 1,
                        &row[0]
                    )))
                }
            };
            let domain = normalize_domain(&row[1]);
            if domain.is_empty() {
                return Err(CorpusError::BadRankList(format!("row {}: empty domain", idx + 1)));
            }
            if seen.insert(domain.clone()) {
                entries.push((rank, domain));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        Ok(RankList { interval, entries })
    }

    pub fn from_csv_path(interval: Interval, path: &Path) -> Result<Self, CorpusError> {
        let file = std::fs::File::open(path)
            .map_err(|e| CorpusError::BadRankList(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(interval, file)
    }
}

fn normalize_domain(raw: &str) -> String {
    raw.trim().trim_end_matches('.').to_ascii_lowercase()
}

/// The union of every list's top entries, plus per-interval ranks for the
/// selected domains.
#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct TargetList {
    pub sites: BTreeMap<String, SiteRecord>,
}

impl TargetList {
    pub fn domains(&self) -> impl Iterator<Item = &str> {
        self.sites.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Union of the top `cutoff` entries of every list. Ranks are recorded from
/// each interval's own full list (beyond the cutoff too), so rank-bucket
/// statistics can reach past the selection threshold.
pub fn build_target_list(lists: &[RankList], cutoff: usize) -> TargetList {
    let mut sites: BTreeMap<String, SiteRecord> = BTreeMap::new();
    for list in lists {
        for (_, domain) in list.entries.iter().take(cutoff) {
            sites
                .entry(domain.clone())
                .or_insert_with(|| SiteRecord::new(domain.clone()));
        }
    }
    for list in lists {
        for (rank, domain) in &list.entries {
            if let Some(site) = sites.get_mut(domain) {
                site.ranks.insert(list.interval, *rank);
            }
        }
    }
    TargetList { sites }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(interval: &str, domains: &[&str]) -> RankList {
        RankList {
            interval: interval.parse().unwrap(),
            entries: domains
                .iter()
                .enumerate()
                .map(|(i, d)| (i as u32 + 1, d.to_string()))
                .collect(),
        }
    }

    #[test]
    fn union_of_tops() {
        let lists = vec![list("2015A", &["a", "b", "c"]), list("2015B", &["b", "c", "d"])];
        let t = build_target_list(&lists, 2);
        let got: Vec<&str> = t.domains().collect();
        assert_eq!(got, vec!["a", "b", "c"]);
    }

    #[test]
    fn single_list_small_cutoff() {
        let t = build_target_list(&[list("2015A", &["x"])], 100);
        assert_eq!(t.domains().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn empty_input_is_empty_set() {
        let t = build_target_list(&[], 10);
        assert!(t.is_empty());
    }

    #[test]
    fn order_of_lists_does_not_matter() {
        let l1 = list("2015A", &["a", "b", "c"]);
        let l2 = list("2015B", &["c", "d", "e"]);
        let t1 = build_target_list(&[l1.clone(), l2.clone()], 2);
        let t2 = build_target_list(&[l2, l1], 2);
        assert_eq!(
            t1.domains().collect::<Vec<_>>(),
            t2.domains().collect::<Vec<_>>()
        );
    }

    #[test]
    fn ranks_recorded_per_interval_beyond_cutoff() {
        let a = RankList {
            interval: "2015A".parse().unwrap(),
            entries: vec![(1, "a.com".into()), (2, "b.com".into()), (500_000, "c.com".into())],
        };
        let b = RankList {
            interval: "2015B".parse().unwrap(),
            entries: vec![(1, "c.com".into()), (7, "a.com".into())],
        };
        let t = build_target_list(&[a, b], 2);
        // c.com enters via list b's top-2; its 2015A rank comes from 2015A's own list
        let c = &t.sites["c.com"];
        assert_eq!(c.rank_at("2015A".parse().unwrap()), Some(500_000));
        assert_eq!(c.rank_at("2015B".parse().unwrap()), Some(1));
        let a_rec = &t.sites["a.com"];
        assert_eq!(a_rec.rank_at("2015B".parse().unwrap()), Some(7));
        // b.com never appears in 2015B's list: rank absent, not zero
        assert_eq!(t.sites["b.com"].rank_at("2015B".parse().unwrap()), None);
    }

    #[test]
    fn csv_ingest_sorts_and_dedups() {
        let csv = "3,C.example\n1,a.example\n2,b.example\n3,c.example\n";
        let l = RankList::from_csv_reader("2015A".parse().unwrap(), csv.as_bytes()).unwrap();
        assert_eq!(
            l.entries,
            vec![
                (1, "a.example".to_string()),
                (2, "b.example".to_string()),
                (3, "c.example".to_string()),
            ]
        );
    }

    #[test]
    fn csv_header_tolerated() {
        let csv = "rank,domain\n1,a.example\n";
        let l = RankList::from_csv_reader("2015A".parse().unwrap(), csv.as_bytes()).unwrap();
        assert_eq!(l.entries.len(), 1);
    }

    #[test]
    fn csv_bad_rank_rejected() {
        let csv = "1,a.example\nnope,b.example\n";
        assert!(RankList::from_csv_reader("2015A".parse().unwrap(), csv.as_bytes()).is_err());
    }
}
