//! The indexed evaluator against a brute-force per-record oracle.

mod common;

use livebib::corpus::evaluate_explained;
use livebib::library::Catalog;
use livebib::presets::Preset;
use livebib::{build_index, evaluate, explain_match, Corpus};
use proptest::prelude::*;

use common::*;

fn catalog_for(libs: &OracleLibs) -> Catalog {
    let mut catalog = Catalog::new();
    for (key, (name, members)) in libs {
        catalog.create_library_with_key(key, name, "").unwrap();
        catalog.add_members(key, members.iter().cloned()).unwrap();
    }
    catalog
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluate_matches_oracle(corpus in corpus_strategy(80), q in query_strategy(), picks in libs_strategy()) {
        let libs = make_libs(&corpus, &picks);
        let expected = oracle_search(&q, &corpus, &libs);
        let index = build_index(corpus);
        let catalog = catalog_for(&libs);
        let got = evaluate(&q, &index, &catalog).unwrap();
        prop_assert_eq!(got.total, got.hits.len());
        prop_assert_eq!(got.hits, expected);
    }

    #[test]
    fn results_are_sorted_year_then_bibcode_descending(corpus in corpus_strategy(60), q in query_strategy()) {
        let libs = make_libs(&corpus, &(vec![], vec![]));
        let index = build_index(corpus.clone());
        let hits = evaluate(&q, &index, &member_map(&libs)).unwrap().hits;
        let keys: Vec<(u16, &str)> = hits
            .iter()
            .map(|b| (corpus.get(b).unwrap().year, b.as_str()))
            .collect();
        prop_assert!(keys.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn every_hit_is_explained(corpus in corpus_strategy(40), q in query_strategy(), picks in libs_strategy()) {
        let libs = make_libs(&corpus, &picks);
        let index = build_index(corpus);
        let map = member_map(&libs);
        let result = evaluate_explained(&q, &index, &map).unwrap();
        let explanations = result.explanations.unwrap();
        for hit in &result.hits {
            let direct = explain_match(hit, &q, &index, &map).unwrap();
            prop_assert_eq!(explanations.get(hit).cloned().unwrap_or_default(), direct);
        }
    }
}

fn fixture_corpus() -> Corpus {
    let file = std::fs::File::open(fixture("falsepos.jsonl")).unwrap();
    livebib::load_corpus(std::io::BufReader::new(file)).unwrap()
}

#[test]
fn presets_agree_with_oracle_on_fixture() {
    let corpus = fixture_corpus();
    let mut libs = OracleLibs::new();
    libs.insert(
        SETI_KEY.into(),
        ("SETI".into(), ["2019AJ....157..122K".to_string()].into()),
    );
    libs.insert(NOT_SETI_KEY.into(), ("Not SETI".into(), Default::default()));
    for preset in [Preset::Strict, Preset::Broad] {
        for key in preset.excluded_keys() {
            libs.entry(key.to_string())
                .or_insert_with(|| (key.to_string(), Default::default()));
        }
    }
    let index = build_index(corpus.clone());
    let map = member_map(&libs);
    for preset in [Preset::Strict, Preset::Broad] {
        let q = preset.query().unwrap();
        let expected = oracle_search(&q, &corpus, &libs);
        assert_eq!(
            evaluate(&q, &index, &map).unwrap().hits,
            expected,
            "{}",
            preset.name()
        );
    }
}

#[test]
fn explanations_name_the_matching_field() {
    let corpus = fixture_corpus();
    let index = build_index(corpus);
    let q = livebib::parse("body:technosignatures").unwrap();
    let why = explain_match(
        "2021AcAau.180..300P",
        &q,
        &index,
        &livebib::corpus::NoLibraries,
    )
    .unwrap();
    assert!(why.iter().any(|m| m.term == "technosignatures"), "{why:?}");
}
