//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs with `cargo test -p livebib --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use livebib::clock::ManualClock;
use livebib::curation::{
    replay_membership, BatchDecisions, CurationLibraries, DecisionLog, LogEntry,
};
use livebib::library::{Catalog, SetOp};
use livebib::metrics::{citation_table, MetricRow};
use livebib::presets::Preset;
use livebib::remote::{FakeAds, RemoteClient, RemoteConfig, RemoteError};
use livebib::{
    build_index, evaluate, load_corpus, normalize, parse, serialize, BibRecord, Corpus, Curation,
    DecisionInput, QueryNode, Verdict,
};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn clock() -> Arc<ManualClock> {
    Arc::new(ManualClock::new(
        Utc.with_ymd_and_hms(2021, 2, 1, 9, 0, 0).unwrap(),
    ))
}

fn fixture_corpus() -> Corpus {
    let file = std::fs::File::open(fixture("falsepos.jsonl")).expect("fixture present");
    load_corpus(std::io::BufReader::new(file)).expect("fixture loads")
}

const GENUINE_RADIO_SETI: &str = "2019AJ....157..122K";

/// The hand-verified strict hits of the false-positive fixture. The optical
/// search record writes "(ETI)", which is also the acronym of two excluded
/// phrases, so the exclusion removes it.
const EXPECTED_STRICT: [&str; 6] = [
    "2021ApJ...910...15L",
    "2021AcAau.180..300P",
    "2021JBIS...74...50R",
    "2020AsBio..20..500H",
    "2020Icar..340..113M",
    "2019IJAsB..18..200W",
];

fn fixture_libs() -> OracleLibs {
    BTreeMap::from([
        (
            SETI_KEY.to_string(),
            (
                "SETI".to_string(),
                BTreeSet::from([GENUINE_RADIO_SETI.to_string()]),
            ),
        ),
        (
            NOT_SETI_KEY.to_string(),
            ("Not SETI".to_string(), BTreeSet::new()),
        ),
    ])
}

fn grammar_golden() -> Outcome {
    let start = Instant::now();
    for preset in [Preset::Strict, Preset::Broad] {
        let q = parse(preset.text()).map_err(|e| format!("{}: {e}", preset.name()))?;
        let s1 = serialize(&q);
        let q2 = parse(&s1).map_err(|e| format!("{} reparse: {e}", preset.name()))?;
        ensure!(
            q2 == normalize(&q),
            "{}: parse(serialize(q)) != normalize(q)",
            preset.name()
        );
        ensure!(
            serialize(&q2) == s1,
            "{}: serialize not a fixpoint",
            preset.name()
        );
        match normalize(&q) {
            QueryNode::And { children } => {
                ensure!(
                    children.len() == 3,
                    "{}: top-level And has {} children",
                    preset.name(),
                    children.len()
                );
                ensure!(
                    matches!(&children[0], QueryNode::Or { children } if children.len() == 6),
                    "{}: first child is not a six-way Or",
                    preset.name()
                );
                let excluded: Vec<&str> = children[1..]
                    .iter()
                    .filter_map(|c| match c {
                        QueryNode::Not { child } => match child.as_ref() {
                            QueryNode::DocsRef { key } => Some(key.as_str()),
                            _ => None,
                        },
                        _ => None,
                    })
                    .collect();
                ensure!(
                    excluded == preset.excluded_keys().to_vec(),
                    "{}: exclusions {excluded:?}",
                    preset.name()
                );
            }
            other => return Err(format!("{}: top level is {other:?}", preset.name())),
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "both presets round-trip in {:.1} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

fn false_positive_fixture() -> Outcome {
    let corpus = fixture_corpus();
    ensure!(corpus.len() == 12, "fixture has {} records", corpus.len());
    let libs = fixture_libs();
    let q = Preset::Strict.query().unwrap();
    let oracle = oracle_search(&q, &corpus, &libs);
    let index = build_index(corpus);
    let got = evaluate(&q, &index, &member_map(&libs))
        .map_err(|e| e.to_string())?
        .hits;
    ensure!(got == oracle, "evaluate {got:?} != oracle {oracle:?}");
    let expected: BTreeSet<&str> = EXPECTED_STRICT.into_iter().collect();
    let got_set: BTreeSet<&str> = got.iter().map(String::as_str).collect();
    ensure!(
        got_set == expected,
        "hits {got_set:?} != expected {expected:?}"
    );
    Ok(format!(
        "{} hits, equal to hand set and brute-force oracle",
        got.len()
    ))
}

fn acronym_semantics() -> Outcome {
    let mut eti_only = BibRecord::new("2020acro.....1A", "Untitled", 2020);
    eti_only.abstract_text = "ETI models of effector-triggered immunity".into();
    let mut spelled = BibRecord::new("2020acro.....2B", "Untitled", 2020);
    spelled.abstract_text = "Signals from extraterrestrial intelligence".into();
    let index = build_index(Corpus::from_records(vec![eti_only, spelled]).unwrap());
    let run = |q: &str| -> Result<Vec<String>, String> {
        let q = parse(q).map_err(|e| e.to_string())?;
        Ok(evaluate(&q, &index, &livebib::corpus::NoLibraries)
            .map_err(|e| e.to_string())?
            .hits)
    };
    let loose = run(r#"abs:"Extraterrestrial Intelligence""#)?;
    ensure!(
        loose.contains(&"2020acro.....1A".to_string()),
        "ETI-only record not matched: {loose:?}"
    );
    ensure!(loose.len() == 2, "non-exact search: {loose:?}");
    let exact = run(r#"=abs:"Extraterrestrial Intelligence""#)?;
    ensure!(
        exact == vec!["2020acro.....2B".to_string()],
        "exact search: {exact:?}"
    );
    let word = run("abs:extraterrestrial")?;
    ensure!(
        word == vec!["2020acro.....2B".to_string()],
        "single word expanded: {word:?}"
    );
    Ok("acronym matches; exact and single-word do not expand".into())
}

fn fixpoint() -> Outcome {
    let corpus = fixture_corpus();
    let index = build_index(corpus);
    let mut catalog = Catalog::with_clock(clock());
    catalog
        .create_library_with_key(SETI_KEY, "SETI", "")
        .unwrap();
    catalog
        .create_library_with_key(NOT_SETI_KEY, "Not SETI", "")
        .unwrap();
    catalog.add_members(SETI_KEY, [GENUINE_RADIO_SETI]).unwrap();
    let libs = CurationLibraries {
        relevant: SETI_KEY.into(),
        irrelevant: NOT_SETI_KEY.into(),
        staging: None,
    };
    let mut c = Curation::new(catalog, DecisionLog::in_memory(), libs, "oracle")
        .map_err(|e| e.to_string())?;
    let text =
        std::fs::read_to_string(fixture("falsepos.labels.tsv")).map_err(|e| e.to_string())?;
    let mut labels = BatchDecisions::parse(&text).map_err(|e| e.to_string())?;
    let q = Preset::Strict.query().unwrap();
    let report = c
        .run_update_cycle(&q, &index, &mut labels)
        .map_err(|e| e.to_string())?;
    ensure!(report.converged, "not converged: {report:?}");
    let again = c.residual(&q, &index).map_err(|e| e.to_string())?;
    ensure!(again.is_empty(), "re-run returned {again:?}");
    for n in 0..=c.catalog().audit().len() {
        let state = Catalog::replay(&c.catalog().audit()[..n]).map_err(|e| e.to_string())?;
        if let (Ok(a), Ok(b)) = (state.members(SETI_KEY), state.members(NOT_SETI_KEY)) {
            ensure!(a.is_disjoint(b), "overlap after audit entry {n}");
        }
    }
    for n in 0..=c.log().entries().len() {
        let (rel, irr) = replay_membership(&c.log().entries()[..n]).map_err(|e| e.to_string())?;
        ensure!(rel.is_disjoint(&irr), "overlap after decision {n}");
    }
    Ok(format!(
        "converged in {} passes ({} relevant, {} irrelevant); re-run empty; disjoint throughout",
        report.iterations, report.classified_relevant, report.classified_irrelevant
    ))
}

fn evaluator_oracle() -> Outcome {
    let start = Instant::now();
    let config = Config {
        cases: 500,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = (corpus_strategy(200), query_strategy(), libs_strategy());
    let cases = std::cell::Cell::new(0u32);
    let hits = std::cell::Cell::new(0usize);
    let result = runner.run(&strategy, |(corpus, query, picks)| {
        let libs = make_libs(&corpus, &picks);
        let mut catalog = Catalog::new();
        for (key, (name, members)) in &libs {
            catalog.create_library_with_key(key, name, "").unwrap();
            catalog.add_members(key, members.iter().cloned()).unwrap();
        }
        let expected = oracle_search(&query, &corpus, &libs);
        let index = build_index(corpus);
        let got = evaluate(&query, &index, &catalog).unwrap().hits;
        cases.set(cases.get() + 1);
        hits.set(hits.get() + got.len());
        proptest::prop_assert_eq!(got, expected, "query {}", serialize(&query));
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{} cases, {} total hits, zero mismatches in {:.1} s",
        cases.get(),
        hits.get(),
        elapsed.as_secs_f64()
    ))
}

fn sorted_oracle(op: SetOp, a: &[String], b: &[String]) -> Vec<String> {
    let in_b = |x: &String| b.binary_search(x).is_ok();
    let mut out: Vec<String> = match op {
        SetOp::Union => a.iter().chain(b).cloned().collect(),
        SetOp::Intersection => a.iter().filter(|x| in_b(x)).cloned().collect(),
        SetOp::Difference => a.iter().filter(|x| !in_b(x)).cloned().collect(),
    };
    out.sort();
    out.dedup();
    out
}

fn set_op_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e71);
    let universe: Vec<String> = (0..20_000).map(|i| format!("2000univ.{i:06}")).collect();
    let mut checked = 0;
    for pair in 0..1000 {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<String> {
            let n = rng.random_range(0..=10_000usize);
            let mut v: Vec<String> = (0..n)
                .map(|_| universe[rng.random_range(0..universe.len())].clone())
                .collect();
            v.sort();
            v.dedup();
            v
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let mut catalog = Catalog::new();
        let ka = catalog.create_library("A", "").unwrap();
        let kb = catalog.create_library("B", "").unwrap();
        catalog.add_members(&ka, a.iter().cloned()).unwrap();
        catalog.add_members(&kb, b.iter().cloned()).unwrap();
        for op in [SetOp::Union, SetOp::Intersection, SetOp::Difference] {
            let got: Vec<String> = catalog.set_op(op, &ka, &kb).unwrap().into_iter().collect();
            ensure!(
                got == sorted_oracle(op, &a, &b),
                "pair {pair}: {op:?} differs"
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!(
        "{checked} operations on 1000 pairs in {:.1} s",
        elapsed.as_secs_f64()
    ))
}

/// 553 members (171 refereed) receiving 1329 citations, 783 of them from
/// refereed papers to refereed members.
fn fig3_shaped_corpus() -> (Corpus, BTreeSet<String>) {
    let mut records = Vec::new();
    let members: Vec<String> = (0..553).map(|i| format!("2015memb.{i:05}")).collect();
    for (i, b) in members.iter().enumerate() {
        let mut r = BibRecord::new(b.clone(), "member", 2015);
        r.refereed = i < 171;
        records.push(r);
    }
    for i in 0..783 {
        let mut r = BibRecord::new(format!("2018refc.{i:05}"), "citer", 2018);
        r.refereed = true;
        r.references = vec![members[i % 171].clone()];
        records.push(r);
    }
    for i in 0..(1329 - 783) {
        let mut r = BibRecord::new(format!("2018nref.{i:05}"), "citer", 2018);
        r.references = vec![members[171 + i % (553 - 171)].clone()];
        records.push(r);
    }
    (
        Corpus::from_records(records).unwrap(),
        members.into_iter().collect(),
    )
}

fn metrics_consistency() -> Outcome {
    let (corpus, members) = fig3_shaped_corpus();
    let report = citation_table(&members, &corpus);
    ensure!(
        report.totals.member_count == 553 && report.totals.total_citations == 1329,
        "totals column {:?}",
        report.totals
    );
    ensure!(
        report.totals.average_citations.to_string() == "2.4",
        "average {}",
        report.totals.average_citations
    );
    ensure!(
        report.refereed.member_count == 171 && report.refereed.refereed_citations == 783,
        "refereed column {:?}",
        report.refereed
    );
    ensure!(
        report.refereed.average_refereed_citations.to_string() == "4.6",
        "average refereed {}",
        report.refereed.average_refereed_citations
    );

    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let authors = [
        "Wright, J.",
        "Wright, Jason",
        "J. Wright",
        "Kerr, A.",
        "Drake, F.",
        "Lopez, D.",
        "Stone, R.",
    ];
    let records: Vec<BibRecord> = (0..50)
        .map(|i| {
            let mut r = BibRecord::new(
                format!("{}synt.{i:05}", 2000 + i % 20),
                "synthetic",
                2000 + (i % 20) as u16,
            );
            r.refereed = rng.random_bool(0.6);
            r.authors = (0..rng.random_range(0..5))
                .map(|_| authors[rng.random_range(0..authors.len())].to_string())
                .collect();
            r.references = (0..rng.random_range(0..8))
                .map(|_| rng.random_range(0..50usize))
                .filter(|j| *j != i)
                .map(|j| format!("{}synt.{j:05}", 2000 + j % 20))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            r
        })
        .collect();
    let corpus = Corpus::from_records(records).unwrap();
    let members: BTreeSet<String> = corpus
        .records()
        .iter()
        .filter(|_| rng.random_bool(0.7))
        .map(|r| r.bibcode.clone())
        .collect();
    let report = citation_table(&members, &corpus);
    let all: Vec<&BibRecord> = members.iter().filter_map(|b| corpus.get(b)).collect();
    let refereed: Vec<&BibRecord> = all.iter().copied().filter(|r| r.refereed).collect();
    for (name, col, population) in [
        ("Totals", &report.totals, all),
        ("Refereed", &report.refereed, refereed),
    ] {
        let expected = oracle_column(&population, &corpus);
        for (row, want) in MetricRow::ALL.iter().zip(&expected) {
            ensure!(
                col.value(*row) == *want,
                "{name} / {}: {} != oracle {want}",
                row.label(),
                col.value(*row)
            );
        }
    }
    Ok(format!(
        "2.4 and 4.6 reproduced; 50-record graph ({} members) matches oracle on 10 rows x 2 columns",
        members.len()
    ))
}

fn replay_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("decisions.jsonl");
    let clock = clock();
    let fresh = |clock: Arc<ManualClock>| {
        let mut catalog = Catalog::with_clock(clock);
        catalog
            .create_library_with_key(SETI_KEY, "SETI", "")
            .unwrap();
        catalog
            .create_library_with_key(NOT_SETI_KEY, "Not SETI", "")
            .unwrap();
        catalog
    };
    let libs = CurationLibraries {
        relevant: SETI_KEY.into(),
        irrelevant: NOT_SETI_KEY.into(),
        staging: None,
    };
    let mut c = Curation::new(
        fresh(clock.clone()),
        DecisionLog::open(&path).map_err(|e| e.to_string())?,
        libs.clone(),
        "curator",
    )
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bibcodes: Vec<String> = (0..60).map(|i| format!("2021repl.{i:05}")).collect();
    for _ in 0..600 {
        clock.advance(Duration::from_secs(rng.random_range(1..200_000)));
        let b = &bibcodes[rng.random_range(0..bibcodes.len())];
        let step = rng.random_range(0..10);
        let result = match step {
            0..=3 => c.decide(DecisionInput::new(b.clone(), Verdict::Relevant)),
            4..=6 => {
                c.decide(DecisionInput::new(b.clone(), Verdict::Irrelevant).note("out of scope"))
            }
            7 => c.decide(DecisionInput::new(b.clone(), Verdict::Skipped)),
            _ => c.undo(b),
        };
        if let Err(e) = result {
            ensure!(step >= 8, "decision failed: {e}");
        }
    }
    let entries: Vec<LogEntry> = DecisionLog::open(&path)
        .map_err(|e| e.to_string())?
        .entries()
        .to_vec();
    ensure!(
        entries == c.log().entries(),
        "persisted log differs from memory"
    );
    let a = Curation::replay(fresh(clock.clone()), &entries, libs.clone(), "replay")
        .map_err(|e| e.to_string())?;
    let b = Curation::replay(fresh(clock.clone()), &entries, libs, "replay")
        .map_err(|e| e.to_string())?;
    for r in [&a, &b] {
        ensure!(
            r.relevant_members() == c.relevant_members(),
            "relevant membership differs"
        );
        ensure!(
            r.irrelevant_members() == c.irrelevant_members(),
            "irrelevant membership differs"
        );
    }
    let (rel, irr) = replay_membership(&entries).map_err(|e| e.to_string())?;
    ensure!(
        &rel == c.relevant_members() && &irr == c.irrelevant_members(),
        "replay_membership differs"
    );
    Ok(format!(
        "{} log entries replayed twice; {} relevant / {} irrelevant reproduced exactly",
        entries.len(),
        rel.len(),
        irr.len()
    ))
}

fn remote_conformance() -> Outcome {
    let clock = clock();
    let records: Vec<BibRecord> = (0..470)
        .map(|i| {
            let title = if i < 450 {
                "A technosignature search"
            } else {
                "Asteroid lightcurves"
            };
            BibRecord::new(
                format!("{}remo.{i:05}", 2000 + i % 21),
                title,
                2000 + (i % 21) as u16,
            )
        })
        .collect();
    let index = Arc::new(build_index(Corpus::from_records(records).unwrap()));
    let fake = Arc::new(FakeAds::new(clock.clone()).with_index(index.clone()));
    fake.add_library(SETI_KEY, "SETI", Vec::<String>::new());
    fake.add_library(NOT_SETI_KEY, "Not SETI", Vec::<String>::new());
    let config = RemoteConfig {
        auth_token: Some(FakeAds::TOKEN.into()),
        page_size: 200,
        ..RemoteConfig::default()
    };
    let client = RemoteClient::with_clock(fake.clone(), config.clone(), clock.clone())
        .map_err(|e| e.to_string())?;

    let q = parse("technosignature").unwrap();
    let before = fake.counters().requests;
    let hits = client
        .remote_search(&q, None)
        .map_err(|e| e.to_string())?
        .payload;
    let requests = fake.counters().requests - before;
    ensure!(
        hits.len() == 450 && requests == 3,
        "{} hits in {requests} requests",
        hits.len()
    );
    let local = evaluate(&q, &index, &livebib::corpus::NoLibraries)
        .unwrap()
        .hits;
    ensure!(hits == local, "remote order differs from local evaluation");

    let added = client
        .push_add(SETI_KEY, ["a", "b"])
        .map_err(|e| e.to_string())?
        .payload;
    let pulled = client
        .pull_library(SETI_KEY)
        .map_err(|e| e.to_string())?
        .payload;
    ensure!(
        added == 2 && pulled.is_superset(&BTreeSet::from(["a".to_string(), "b".to_string()])),
        "round trip"
    );
    let again = client
        .push_add(SETI_KEY, ["a", "b"])
        .map_err(|e| e.to_string())?
        .payload;
    ensure!(
        again == 0 && client.pull_library(SETI_KEY).unwrap().payload == pulled,
        "push not idempotent"
    );
    fake.fail_after_apply(503);
    client
        .push_add(SETI_KEY, ["c"])
        .map_err(|e| e.to_string())?;
    let after_retry = client.pull_library(SETI_KEY).unwrap().payload;
    ensure!(after_retry.len() == 3, "retried push gave {after_retry:?}");
    ensure!(
        client
            .push_add(SETI_KEY, Vec::<String>::new())
            .unwrap()
            .payload
            == 0,
        "empty push"
    );
    match client.pull_library("ZZZZZZZZZZZZZZZZZZZZZZ") {
        Err(RemoteError::UnknownRemoteLibrary(_)) => {}
        other => return Err(format!("unknown key gave {other:?}")),
    }

    fake.set_quota(5, Duration::from_secs(3600));
    let limited =
        RemoteClient::with_clock(fake.clone(), config, clock.clone()).map_err(|e| e.to_string())?;
    let mut refused = 0;
    for _ in 0..10 {
        match limited.pull_library(NOT_SETI_KEY) {
            Ok(_) => {}
            Err(RemoteError::QuotaExhausted { .. }) => refused += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure!(refused == 5, "{refused} refusals");
    ensure!(
        fake.counters().quota_violations == 0,
        "{} quota violations",
        fake.counters().quota_violations
    );
    clock.advance(Duration::from_secs(3601));
    limited
        .pull_library(NOT_SETI_KEY)
        .map_err(|e| e.to_string())?;
    ensure!(
        fake.counters().quota_violations == 0,
        "violation after reset"
    );
    Ok("450 hits in 3 pages; push/pull idempotent; quota never exceeded".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("grammar-golden", grammar_golden),
        ("false-positive-fixture", false_positive_fixture),
        ("acronym-semantics", acronym_semantics),
        ("fixpoint", fixpoint),
        ("evaluator-oracle", evaluator_oracle),
        ("set-op-oracle", set_op_oracle),
        ("metrics-consistency", metrics_consistency),
        ("replay-determinism", replay_determinism),
        ("remote-conformance", remote_conformance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name:<24} {secs:>7.2} s  {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<24} {secs:>7.2} s  {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
