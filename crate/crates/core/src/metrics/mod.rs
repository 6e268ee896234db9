//! Citation statistics over a library: the ten-row Totals/Refereed table
//! and the publication-year histogram.
//!
//! Citations are counted inside the closed corpus only. Normalized citations
//! are Σ citations / author count (ours; ADS does not document its own).
//! Averages and normalized sums are rounded half away from zero to one
//! decimal with exact rational arithmetic; medians take the lower middle.

mod render;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::corpus::{BibRecord, Corpus};

pub use render::{render_histogram, render_report, ReportFormat};

/// Who cites whom inside a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Citations {
    /// cited bibcode -> citing bibcodes; every corpus record has an entry.
    pub citers: HashMap<String, BTreeSet<String>>,
    /// References to bibcodes outside the corpus (ignored).
    pub dangling: usize,
}

impl Citations {
    pub fn citers_of(&self, bibcode: &str) -> Option<&BTreeSet<String>> {
        self.citers.get(bibcode)
    }
}

/// Inverts reference lists: b cites a iff a is in references(b).
pub fn invert_citations(corpus: &Corpus) -> Citations {
    let mut citers: HashMap<String, BTreeSet<String>> = corpus
        .records()
        .iter()
        .map(|r| (r.bibcode.clone(), BTreeSet::new()))
        .collect();
    let mut dangling = 0;
    for r in corpus.records() {
        for cited in &r.references {
            match citers.get_mut(cited) {
                Some(set) => {
                    set.insert(r.bibcode.clone());
                }
                None => dangling += 1,
            }
        }
    }
    Citations { citers, dangling }
}

/// A non-negative value with one decimal, stored as tenths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Tenths(pub u64);

impl Tenths {
    /// `numerator / denominator` rounded half away from zero; zero when the
    /// denominator is zero.
    pub fn from_ratio(numerator: u64, denominator: u64) -> Tenths {
        if denominator == 0 {
            return Tenths(0);
        }
        let (n, d) = (numerator as u128, denominator as u128);
        Tenths(((20 * n + d) / (2 * d)) as u64)
    }

    pub fn from_rational(value: &BigRational) -> Tenths {
        if value.is_zero() {
            return Tenths(0);
        }
        let scaled = (value * BigInt::from(20) + BigInt::from(1)) / BigInt::from(2);
        Tenths(scaled.floor().to_integer().to_u64().unwrap_or(u64::MAX))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl fmt::Display for Tenths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

impl Serialize for Tenths {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

/// Lower median; zero for an empty population.
pub fn lower_median(values: &[u64]) -> u64 {
    if values.is_empty() {
        return 0;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// "last, first-initial", lowercase. Names without a comma take the last
/// word as the surname. The comma is always kept, even with no initial, so
/// the result normalizes to itself.
pub fn normalize_author(name: &str) -> String {
    let lower = name.to_lowercase();
    let (last, first) = match lower.split_once(',') {
        Some((last, first)) => (last.trim().to_string(), first.trim().to_string()),
        None => {
            let mut words: Vec<&str> = lower.split_whitespace().collect();
            let last = words.pop().unwrap_or("").to_string();
            (last, words.join(" "))
        }
    };
    let last = last.split_whitespace().collect::<Vec<_>>().join(" ");
    match first.chars().find(|c| c.is_alphanumeric()) {
        Some(initial) => format!("{last}, {initial}"),
        None => format!("{last},"),
    }
}

fn shares_author(a: &BibRecord, b: &BibRecord) -> bool {
    let names: BTreeSet<String> = a.authors.iter().map(|n| normalize_author(n)).collect();
    b.authors
        .iter()
        .any(|n| names.contains(&normalize_author(n)))
}

/// The rows of the citation table, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricRow {
    CitingPapers,
    TotalCitations,
    SelfCitations,
    AverageCitations,
    MedianCitations,
    NormalizedCitations,
    RefereedCitations,
    AverageRefereedCitations,
    MedianRefereedCitations,
    NormalizedRefereedCitations,
}

impl MetricRow {
    pub const ALL: [MetricRow; 10] = [
        MetricRow::CitingPapers,
        MetricRow::TotalCitations,
        MetricRow::SelfCitations,
        MetricRow::AverageCitations,
        MetricRow::MedianCitations,
        MetricRow::NormalizedCitations,
        MetricRow::RefereedCitations,
        MetricRow::AverageRefereedCitations,
        MetricRow::MedianRefereedCitations,
        MetricRow::NormalizedRefereedCitations,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MetricRow::CitingPapers => "Number of citing papers",
            MetricRow::TotalCitations => "Total citations",
            MetricRow::SelfCitations => "Number of self-citations",
            MetricRow::AverageCitations => "Average citations",
            MetricRow::MedianCitations => "Median citations",
            MetricRow::NormalizedCitations => "Normalized citations",
            MetricRow::RefereedCitations => "Refereed citations",
            MetricRow::AverageRefereedCitations => "Average refereed citations",
            MetricRow::MedianRefereedCitations => "Median refereed citations",
            MetricRow::NormalizedRefereedCitations => "Normalized refereed citations",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MetricsColumn {
    pub member_count: usize,
    pub citing_papers: u64,
    pub total_citations: u64,
    pub self_citations: u64,
    pub average_citations: Tenths,
    pub median_citations: u64,
    pub normalized_citations: Tenths,
    pub refereed_citations: u64,
    pub average_refereed_citations: Tenths,
    pub median_refereed_citations: u64,
    pub normalized_refereed_citations: Tenths,
}

impl MetricsColumn {
    /// Display text of one row.
    pub fn value(&self, row: MetricRow) -> String {
        match row {
            MetricRow::CitingPapers => self.citing_papers.to_string(),
            MetricRow::TotalCitations => self.total_citations.to_string(),
            MetricRow::SelfCitations => self.self_citations.to_string(),
            MetricRow::AverageCitations => self.average_citations.to_string(),
            MetricRow::MedianCitations => self.median_citations.to_string(),
            MetricRow::NormalizedCitations => self.normalized_citations.to_string(),
            MetricRow::RefereedCitations => self.refereed_citations.to_string(),
            MetricRow::AverageRefereedCitations => self.average_refereed_citations.to_string(),
            MetricRow::MedianRefereedCitations => self.median_refereed_citations.to_string(),
            MetricRow::NormalizedRefereedCitations => {
                self.normalized_refereed_citations.to_string()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MetricsReport {
    /// Every library member found in the corpus.
    pub totals: MetricsColumn,
    /// Refereed members only.
    pub refereed: MetricsColumn,
    /// Members absent from the corpus, excluded from both columns.
    pub missing: Vec<String>,
}

fn column(population: &[&BibRecord], corpus: &Corpus, citations: &Citations) -> MetricsColumn {
    let empty = BTreeSet::new();
    let mut citing = BTreeSet::new();
    let mut counts = Vec::with_capacity(population.len());
    let mut refereed_counts = Vec::with_capacity(population.len());
    let mut self_citations = 0u64;
    let mut normalized = BigRational::zero();
    let mut normalized_refereed = BigRational::zero();
    for member in population {
        let citers = citations.citers_of(&member.bibcode).unwrap_or(&empty);
        let mut refereed = 0u64;
        for c in citers {
            citing.insert(c.as_str());
            let Some(citer) = corpus.get(c) else { continue };
            if citer.refereed {
                refereed += 1;
            }
            if shares_author(member, citer) {
                self_citations += 1;
            }
        }
        let n = citers.len() as u64;
        let authors = BigInt::from(member.authors.len().max(1));
        normalized += BigRational::new(BigInt::from(n), authors.clone());
        normalized_refereed += BigRational::new(BigInt::from(refereed), authors);
        counts.push(n);
        refereed_counts.push(refereed);
    }
    let total: u64 = counts.iter().sum();
    let refereed_total: u64 = refereed_counts.iter().sum();
    let members = population.len() as u64;
    MetricsColumn {
        member_count: population.len(),
        citing_papers: citing.len() as u64,
        total_citations: total,
        self_citations,
        average_citations: Tenths::from_ratio(total, members),
        median_citations: lower_median(&counts),
        normalized_citations: Tenths::from_rational(&normalized),
        refereed_citations: refereed_total,
        average_refereed_citations: Tenths::from_ratio(refereed_total, members),
        median_refereed_citations: lower_median(&refereed_counts),
        normalized_refereed_citations: Tenths::from_rational(&normalized_refereed),
    }
}

/// Citation table for `members`, with a precomputed inversion.
pub fn citation_table_with(
    members: &BTreeSet<String>,
    corpus: &Corpus,
    citations: &Citations,
) -> MetricsReport {
    let mut present = Vec::new();
    let mut missing = Vec::new();
    for b in members {
        match corpus.get(b) {
            Some(r) => present.push(r),
            None => missing.push(b.clone()),
        }
    }
    let refereed: Vec<&BibRecord> = present.iter().copied().filter(|r| r.refereed).collect();
    MetricsReport {
        totals: column(&present, corpus, citations),
        refereed: column(&refereed, corpus, citations),
        missing,
    }
}

/// Citation table for a library's members over `corpus`.
pub fn citation_table(members: &BTreeSet<String>, corpus: &Corpus) -> MetricsReport {
    citation_table_with(members, corpus, &invert_citations(corpus))
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct YearHistogram {
    pub counts: BTreeMap<u16, usize>,
    /// Members with no known year (absent from the corpus).
    pub unknown: usize,
}

impl YearHistogram {
    pub fn total(&self) -> usize {
        self.counts.values().sum::<usize>() + self.unknown
    }
}

pub fn year_histogram(members: &BTreeSet<String>, corpus: &Corpus) -> YearHistogram {
    let mut h = YearHistogram::default();
    for b in members {
        match corpus.get(b) {
            Some(r) => *h.counts.entry(r.year).or_default() += 1,
            None => h.unknown += 1,
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(b: &str, year: u16, refs: &[&str]) -> BibRecord {
        let mut r = BibRecord::new(b, b, year);
        r.references = refs.iter().map(|s| s.to_string()).collect();
        r
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn chain_inversion() {
        let corpus = Corpus::from_records(vec![
            rec("a", 2000, &["b"]),
            rec("b", 2000, &["c", "zz"]),
            rec("c", 2000, &[]),
        ])
        .unwrap();
        let c = invert_citations(&corpus);
        assert_eq!(c.citers["c"], set(&["b"]));
        assert_eq!(c.citers["b"], set(&["a"]));
        assert!(c.citers["a"].is_empty());
        assert_eq!(c.dangling, 1);
        assert!(invert_citations(&Corpus::default()).citers.is_empty());
    }

    #[test]
    fn rounding_matches_published_averages() {
        assert_eq!(Tenths::from_ratio(1329, 553).to_string(), "2.4");
        assert_eq!(Tenths::from_ratio(783, 171).to_string(), "4.6");
        assert_eq!(Tenths::from_ratio(962, 171).to_string(), "5.6");
        assert_eq!(Tenths::from_ratio(1, 4).to_string(), "0.3");
        assert_eq!(Tenths::from_ratio(1, 20).to_string(), "0.1");
        assert_eq!(Tenths::from_ratio(0, 0).to_string(), "0.0");
        let r = BigRational::new(BigInt::from(7), BigInt::from(20));
        assert_eq!(Tenths::from_rational(&r).to_string(), "0.4");
    }

    #[test]
    fn median_is_lower() {
        assert_eq!(lower_median(&[]), 0);
        assert_eq!(lower_median(&[3, 1]), 1);
        assert_eq!(lower_median(&[5, 0, 2]), 2);
        assert_eq!(lower_median(&[0, 0, 1, 9]), 0);
    }

    #[test]
    fn author_normalization() {
        assert_eq!(normalize_author("Wright, Jason T."), "wright, j");
        assert_eq!(normalize_author("WRIGHT,  J."), "wright, j");
        assert_eq!(normalize_author("Jason Wright"), "wright, j");
        assert_eq!(normalize_author("wright, j"), "wright, j");
        assert_eq!(normalize_author("Plato"), "plato,");
        assert_eq!(normalize_author(&normalize_author("- a,")), "- a,");
    }

    #[test]
    fn single_uncited_member() {
        let corpus = Corpus::from_records(vec![rec("a", 2000, &[])]).unwrap();
        let r = citation_table(&set(&["a"]), &corpus);
        assert_eq!(r.totals.member_count, 1);
        for row in MetricRow::ALL {
            let v = r.totals.value(row);
            assert!(v == "0" || v == "0.0", "{row:?} = {v}");
        }
    }

    #[test]
    fn missing_members_and_histogram() {
        let corpus = Corpus::from_records(vec![
            rec("a", 1960, &[]),
            rec("b", 2018, &[]),
            rec("c", 2018, &[]),
        ])
        .unwrap();
        let h = year_histogram(&set(&["a", "b", "c"]), &corpus);
        assert_eq!(h.counts, BTreeMap::from([(1960, 1), (2018, 2)]));
        let h = year_histogram(&set(&["a", "gone"]), &corpus);
        assert_eq!(h.unknown, 1);
        assert_eq!(h.total(), 2);
        assert!(year_histogram(&BTreeSet::new(), &corpus).counts.is_empty());
        let r = citation_table(&set(&["a", "gone"]), &corpus);
        assert_eq!(r.missing, vec!["gone"]);
        assert_eq!(r.totals.member_count, 1);
    }
}
