//! Brute-force oracles and generators shared by the integration tests.
//!
//! The oracles re-derive results straight from record text, one record at a
//! time, without touching the index, bitsets or rational arithmetic used by
//! the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use livebib::query::{FieldName, QueryNode};
use livebib::{BibRecord, Corpus, Doctype};
use proptest::prelude::*;

pub const SETI_KEY: &str = "k1BwfM56QgKbl6X-PXADqg";
pub const NOT_SETI_KEY: &str = "qazeXzDISj-d06qbiWLoXQ";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

// ---------------------------------------------------------------- text oracle

/// Hyphen groups of a text: each group is the list of its lowercase parts.
fn groups(text: &str) -> Vec<Vec<String>> {
    let lower: String = text.chars().flat_map(char::to_lowercase).collect();
    let mut out = Vec::new();
    for chunk in
        lower.split(|c: char| !(c.is_alphanumeric() || matches!(c, '-' | '\u{2010}' | '\u{2011}')))
    {
        let mut group: Vec<String> = Vec::new();
        for piece in chunk.split(['-', '\u{2010}', '\u{2011}']) {
            if piece.is_empty() {
                if !group.is_empty() {
                    out.push(std::mem::take(&mut group));
                }
            } else {
                group.push(piece.to_string());
            }
        }
        if !group.is_empty() {
            out.push(group);
        }
    }
    out
}

/// (text, start, span) occurrences of one field value.
fn occurrences(text: &str) -> Vec<(String, usize, usize)> {
    let mut occ = Vec::new();
    let mut pos = 0;
    for g in groups(text) {
        if g.len() > 1 {
            occ.push((g.concat(), pos, g.len()));
        }
        for p in g {
            occ.push((p, pos, 1));
            pos += 1;
        }
    }
    occ
}

fn sequence_in(occ: &[(String, usize, usize)], seq: &[String]) -> bool {
    fn from(occ: &[(String, usize, usize)], seq: &[String], at: usize) -> bool {
        match seq.split_first() {
            None => true,
            Some((head, rest)) => occ
                .iter()
                .any(|(t, s, span)| *s == at && t == head && from(occ, rest, s + span)),
        }
    }
    let Some((head, rest)) = seq.split_first() else {
        return false;
    };
    occ.iter()
        .any(|(t, s, span)| t == head && from(occ, rest, s + span))
}

const PREFIXES: &[&str] = &[
    "electro", "extra", "thermo", "ultra", "inter", "intra", "trans", "super", "hyper", "micro",
    "macro", "radio", "astro", "multi", "infra", "techno", "photo", "magneto", "geo", "bio", "exo",
    "non", "anti",
];

/// Acronym forms: every combination of, per part, its initial or (for a
/// part starting with a combining prefix followed by at least three
/// characters starting with a letter) the prefix initial plus the
/// remainder's initial.
fn acronym_forms(parts: &[String]) -> BTreeSet<String> {
    let mut forms = BTreeSet::from([String::new()]);
    if parts.len() < 2 {
        return BTreeSet::new();
    }
    for p in parts {
        let first = p.chars().next().unwrap();
        let mut options = BTreeSet::from([first.to_string()]);
        for pre in PREFIXES {
            if let Some(rest) = p.strip_prefix(pre) {
                let rc: Vec<char> = rest.chars().collect();
                if rc.len() >= 3 && rc[0].is_alphabetic() {
                    options.insert(format!("{first}{}", rc[0]));
                }
            }
        }
        forms = forms
            .iter()
            .flat_map(|f| options.iter().map(move |o| format!("{f}{o}")))
            .collect();
    }
    forms
}

fn term_sequences(text: &str, expand: bool) -> Vec<Vec<String>> {
    let gs = groups(text);
    let split: Vec<String> = gs.iter().flatten().cloned().collect();
    if split.is_empty() {
        return Vec::new();
    }
    let joined: Vec<String> = gs.iter().map(|g| g.concat()).collect();
    let mut seqs = vec![split.clone(), joined];
    if expand {
        seqs.extend(acronym_forms(&split).into_iter().map(|a| vec![a]));
    }
    seqs
}

fn field_values(field: FieldName, r: &BibRecord) -> Vec<&str> {
    let title = std::iter::once(r.title.as_str());
    let abs = std::iter::once(r.abstract_text.as_str());
    let kw = r.keywords.iter().map(String::as_str);
    let body = r.body.as_deref().into_iter();
    match field {
        FieldName::Abs => title.chain(abs).chain(kw).collect(),
        FieldName::Full => title.chain(abs).chain(kw).chain(body).collect(),
        FieldName::Body => body.collect(),
        FieldName::Title => title.collect(),
        FieldName::Keyword => kw.collect(),
        FieldName::Author => r.authors.iter().map(String::as_str).collect(),
        FieldName::Year | FieldName::Doctype | FieldName::Bibgroup => Vec::new(),
    }
}

fn year_form(text: &str) -> Option<(u16, u16)> {
    let t = text.trim();
    let parse = |s: &str| -> Option<u16> {
        (s.len() == 4 && s.chars().all(|c| c.is_ascii_digit()))
            .then(|| s.parse().ok())
            .flatten()
            .filter(|y| (1000..=2999).contains(y))
    };
    let (a, b) = match t.find('-') {
        Some(i) => (parse(&t[..i])?, parse(&t[i + 1..])?),
        None => (parse(t)?, parse(t)?),
    };
    (a <= b).then_some((a, b))
}

/// Libraries for the oracle: key -> (name, members).
pub type OracleLibs = BTreeMap<String, (String, BTreeSet<String>)>;

fn leaf(field: FieldName, node: &QueryNode, r: &BibRecord, libs: &OracleLibs) -> bool {
    let text = match node {
        QueryNode::Phrase { text, .. } | QueryNode::Word { text } => text.as_str(),
        QueryNode::YearRange { first, last } => return (*first..=*last).contains(&r.year),
        _ => unreachable!(),
    };
    match field {
        FieldName::Year => year_form(text).is_some_and(|(a, b)| (a..=b).contains(&r.year)),
        FieldName::Doctype => text.trim().eq_ignore_ascii_case(r.doctype.as_str()),
        FieldName::Bibgroup => libs.values().any(|(name, members)| {
            name.eq_ignore_ascii_case(text.trim()) && members.contains(&r.bibcode)
        }),
        _ => {
            let expand = matches!(node, QueryNode::Phrase { exact: false, .. });
            let seqs = term_sequences(text, expand);
            field_values(field, r).iter().any(|value| {
                let occ = occurrences(value);
                seqs.iter().any(|s| sequence_in(&occ, s))
            })
        }
    }
}

/// Does `node` hold for record `r`? Evaluated top-down on raw text.
pub fn oracle_matches(
    node: &QueryNode,
    r: &BibRecord,
    libs: &OracleLibs,
    scope: Option<FieldName>,
) -> bool {
    match node {
        QueryNode::And { children } => children.iter().all(|c| oracle_matches(c, r, libs, scope)),
        QueryNode::Or { children } => children.iter().any(|c| oracle_matches(c, r, libs, scope)),
        QueryNode::Not { child } => !oracle_matches(child, r, libs, scope),
        QueryNode::FieldScope { field, child } => oracle_matches(child, r, libs, Some(*field)),
        QueryNode::DocsRef { key } => libs
            .get(key)
            .unwrap_or_else(|| panic!("oracle: unknown library {key}"))
            .1
            .contains(&r.bibcode),
        QueryNode::YearRange { .. } => leaf(FieldName::Year, node, r, libs),
        _ => leaf(scope.unwrap_or(FieldName::Full), node, r, libs),
    }
}

/// Hits sorted year descending then bibcode descending, by full scan.
pub fn oracle_search(node: &QueryNode, corpus: &Corpus, libs: &OracleLibs) -> Vec<String> {
    let mut hits: Vec<&BibRecord> = corpus
        .records()
        .iter()
        .filter(|r| oracle_matches(node, r, libs, None))
        .collect();
    hits.sort_by(|a, b| (b.year, &b.bibcode).cmp(&(a.year, &a.bibcode)));
    hits.into_iter().map(|r| r.bibcode.clone()).collect()
}

pub fn member_map(libs: &OracleLibs) -> BTreeMap<String, BTreeSet<String>> {
    libs.iter()
        .map(|(k, (_, m))| (k.clone(), m.clone()))
        .collect()
}

// ------------------------------------------------------------- metrics oracle

fn author_key(name: &str) -> String {
    let lower = name.to_lowercase();
    let (last, rest) = if let Some(i) = lower.find(',') {
        (lower[..i].to_string(), lower[i + 1..].to_string())
    } else {
        let words: Vec<&str> = lower.split_whitespace().collect();
        match words.split_last() {
            Some((l, init)) => (l.to_string(), init.join(" ")),
            None => (String::new(), String::new()),
        }
    };
    let last = last.split_whitespace().collect::<Vec<_>>().join(" ");
    match rest.chars().find(|c| c.is_alphanumeric()) {
        Some(c) => format!("{last}, {c}"),
        None => last,
    }
}

/// Exact n/d to one decimal, half away from zero, as text.
fn one_decimal(n: u128, d: u128) -> String {
    if d == 0 {
        return "0.0".into();
    }
    let q = n * 10 / d;
    let r = n * 10 % d;
    let tenths = if 2 * r >= d { q + 1 } else { q };
    format!("{}.{}", tenths / 10, tenths % 10)
}

fn lower_median(mut v: Vec<u64>) -> u64 {
    v.sort();
    if v.is_empty() {
        0
    } else {
        v[(v.len() - 1) / 2]
    }
}

/// The ten rows, as display strings, for one member population.
pub fn oracle_column(members: &[&BibRecord], corpus: &Corpus) -> Vec<String> {
    let records = corpus.records();
    let mut citing = BTreeSet::new();
    let (mut total, mut selfc, mut refd) = (0u64, 0u64, 0u64);
    let mut per = Vec::new();
    let mut per_ref = Vec::new();
    // normalized sums over the common denominator 720720 (lcm of 1..=16)
    const LCM: u128 = 720_720;
    let (mut norm, mut norm_ref) = (0u128, 0u128);
    for m in members {
        let mut c = 0u64;
        let mut cr = 0u64;
        for r in records {
            if !r.references.contains(&m.bibcode) {
                continue;
            }
            c += 1;
            citing.insert(r.bibcode.clone());
            if r.refereed {
                cr += 1;
            }
            let mine: BTreeSet<String> = m.authors.iter().map(|a| author_key(a)).collect();
            if r.authors.iter().any(|a| mine.contains(&author_key(a))) {
                selfc += 1;
            }
        }
        let authors = m.authors.len().max(1) as u128;
        assert!(authors <= 16, "oracle supports up to 16 authors");
        norm += c as u128 * (LCM / authors);
        norm_ref += cr as u128 * (LCM / authors);
        total += c;
        refd += cr;
        per.push(c);
        per_ref.push(cr);
    }
    let n = members.len() as u128;
    vec![
        citing.len().to_string(),
        total.to_string(),
        selfc.to_string(),
        one_decimal(total as u128, n),
        lower_median(per).to_string(),
        one_decimal(norm, LCM),
        refd.to_string(),
        one_decimal(refd as u128, n),
        lower_median(per_ref).to_string(),
        one_decimal(norm_ref, LCM),
    ]
}

// ----------------------------------------------------------------- generators

pub const VOCAB: &[&str] = &[
    "seti",
    "technosignature",
    "technosignatures",
    "extraterrestrial",
    "intelligence",
    "eti",
    "ei",
    "fermi",
    "paradox",
    "pasta",
    "drake",
    "equation",
    "nepal",
    "river",
    "radio",
    "survey",
    "effector",
    "triggered",
    "immunity",
    "extra",
    "terrestrial",
    "wright",
    "2021",
    "laser",
];

const AUTHORS: &[&str] = &[
    "Wright, J.",
    "Wright, Jason",
    "J. Wright",
    "Kerr, A.",
    "Drake, F.",
    "Seti, J.",
    "Lopez, D.",
];

const DOCTYPES: &[Doctype] = &[
    Doctype::Article,
    Doctype::Eprint,
    Doctype::Bookreview,
    Doctype::Software,
];

fn text_strategy(max_words: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(
        (
            prop::sample::select(VOCAB),
            prop::sample::select(&[" ", " ", "-", ", ", ". "][..]),
        ),
        0..=max_words,
    )
    .prop_map(|ws| {
        let mut s = String::new();
        for (w, sep) in ws {
            s.push_str(w);
            s.push_str(sep);
        }
        s
    })
}

prop_compose! {
    fn record_strategy()(
        title in text_strategy(5),
        abstract_text in text_strategy(10),
        body in prop::option::of(text_strategy(14)),
        keywords in prop::collection::vec(text_strategy(2), 0..3),
        authors in prop::collection::vec(prop::sample::select(AUTHORS), 0..4),
        year in 1995u16..2026,
        doctype in prop::sample::select(DOCTYPES),
        refereed in any::<bool>(),
        refs in prop::collection::vec(0usize..200, 0..6),
    ) -> (BibRecord, Vec<usize>) {
        let mut r = BibRecord::new("", title, year);
        r.abstract_text = abstract_text;
        r.body = body;
        r.keywords = keywords;
        r.authors = authors.into_iter().map(String::from).collect();
        r.doctype = doctype;
        r.refereed = refereed;
        (r, refs)
    }
}

/// Corpora of up to `max` records; references point at other records.
pub fn corpus_strategy(max: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(record_strategy(), 0..=max).prop_map(|rs| {
        let n = rs.len();
        let bibcodes: Vec<String> = rs
            .iter()
            .enumerate()
            .map(|(i, (r, _))| format!("{}test.{i:05}", r.year))
            .collect();
        let records = rs
            .into_iter()
            .enumerate()
            .map(|(i, (mut r, refs))| {
                r.bibcode = bibcodes[i].clone();
                r.references = refs
                    .into_iter()
                    .filter(|j| *j < n && *j != i)
                    .map(|j| bibcodes[j].clone())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                r
            })
            .collect();
        Corpus::from_records(records).expect("unique bibcodes")
    })
}

/// Two libraries over (a superset of) the corpus bibcodes, named "SETI" and
/// "Not SETI".
pub fn libs_strategy() -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
    (
        prop::collection::vec(any::<bool>(), 200),
        prop::collection::vec(any::<bool>(), 200),
    )
}

pub fn make_libs(corpus: &Corpus, picks: &(Vec<bool>, Vec<bool>)) -> OracleLibs {
    let pick = |mask: &Vec<bool>| -> BTreeSet<String> {
        corpus
            .records()
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(r, _)| r.bibcode.clone())
            .chain(["1999outside.0001".to_string()])
            .collect()
    };
    BTreeMap::from([
        (SETI_KEY.to_string(), ("SETI".to_string(), pick(&picks.0))),
        (
            NOT_SETI_KEY.to_string(),
            ("Not SETI".to_string(), pick(&picks.1)),
        ),
    ])
}

const TEXT_FIELDS: &[FieldName] = &[
    FieldName::Abs,
    FieldName::Body,
    FieldName::Title,
    FieldName::Author,
    FieldName::Keyword,
    FieldName::Full,
];

fn leaf_strategy() -> impl Strategy<Value = QueryNode> {
    let word = prop::sample::select(VOCAB).prop_map(QueryNode::word);
    let phrase = (
        prop::collection::vec(prop::sample::select(VOCAB), 1..4),
        prop::sample::select(&[" ", "-"][..]),
        any::<bool>(),
    )
        .prop_map(|(ws, sep, exact)| {
            let text = ws.join(sep);
            if exact {
                QueryNode::exact_phrase(text)
            } else {
                QueryNode::phrase(text)
            }
        });
    let years = (1995u16..2026, 0u16..6).prop_map(|(a, len)| {
        QueryNode::scope(FieldName::Year, QueryNode::year(a, (a + len).min(2025)))
    });
    let year_word = (1995u16..2026)
        .prop_map(|y| QueryNode::scope(FieldName::Year, QueryNode::word(y.to_string())));
    let doctype = prop::sample::select(DOCTYPES)
        .prop_map(|d| QueryNode::scope(FieldName::Doctype, QueryNode::word(d.as_str())));
    let bibgroup = prop::sample::select(&["SETI", "not seti", "nosuch"][..])
        .prop_map(|n| QueryNode::scope(FieldName::Bibgroup, QueryNode::phrase(n)));
    let docs = prop::sample::select(&[SETI_KEY, NOT_SETI_KEY][..]).prop_map(QueryNode::docs);
    prop_oneof![
        4 => word,
        4 => phrase,
        1 => years,
        1 => year_word,
        1 => doctype,
        1 => bibgroup,
        2 => docs,
    ]
}

/// Random query trees built directly as ASTs.
pub fn query_strategy() -> impl Strategy<Value = QueryNode> {
    leaf_strategy().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(QueryNode::and),
            prop::collection::vec(inner.clone(), 2..4).prop_map(QueryNode::or),
            inner.clone().prop_map(QueryNode::not),
            (prop::sample::select(TEXT_FIELDS), inner).prop_map(|(f, q)| QueryNode::scope(f, q)),
        ]
    })
}
