use std::collections::BTreeMap;

use diacorp::colloc::{association_hits, concordance, dice_series, frequency_series, Scope};
use diacorp::corpus::group_frequency;
use diacorp::fixture::{generate, FixturePlan, Manifest};
use diacorp::vertical::{parse_vertical, ParseOptions};
use diacorp::{slice_equal_mass, Corpus, LemmaGroup, PositionalIndex, YearConfig};

const SMALL: &str = include_str!("../../../fixtures/small_plan.toml");
const STORAGE: &str = include_str!("../../../fixtures/storage_plan.toml");

fn load(plan: &str, seed: u64) -> (Corpus, Manifest) {
    let f = generate(&FixturePlan::from_toml_str(plan).unwrap(), seed).unwrap();
    (parse_vertical(&f.corpus, &ParseOptions::default()).unwrap().corpus, f.manifest)
}

fn g(members: &[&str]) -> LemmaGroup {
    LemmaGroup::new("g", members.iter().copied()).unwrap()
}

#[test]
fn seventeen_planted() {
    let (corpus, manifest) = load(SMALL, 42);
    assert_eq!(manifest.lemma_totals["horreum"], 17);
    assert_eq!(group_frequency(&corpus, &g(&["horreum"]), false), 17);
    assert_eq!(group_frequency(&corpus, &g(&["horreum"]), true), 17);
    assert_eq!(corpus.stats(), &manifest.stats);
}

#[test]
fn index_frequencies_equal_manifest_totals() {
    for seed in [1, 2, 3] {
        let (corpus, manifest) = load(STORAGE, seed);
        assert_eq!(corpus.stats(), &manifest.stats);
        let index = PositionalIndex::build(&corpus);
        let freqs: BTreeMap<String, u64> = index.frequencies().map(|(l, f)| (l.to_string(), f)).collect();
        assert_eq!(freqs, manifest.lemma_totals);
        assert_eq!(index.n_indexed() + manifest.punctuation_tokens, manifest.stats.n_tokens);
        let dated = index.subset_dated();
        for (lemma, &n) in &manifest.lemma_totals_dated {
            let got = index.postings(lemma).iter().filter(|p| dated.contains(p.doc)).count() as u64;
            assert_eq!(got, n, "{lemma}");
        }
    }
}

#[test]
fn association_counts_equal_planted_pairs() {
    let (corpus, manifest) = load(STORAGE, 7);
    let index = PositionalIndex::build(&corpus);
    let storage = ["horreum", "granarium", "grangia", "cellarium"];
    let grain = ["frumentum", "bladum", "annona"];
    for w in [1, 5, manifest.max_exact_window as u32] {
        for target in storage {
            let h = association_hits(&index, &g(&[target]), &g(&grain), w, Scope::Dated).unwrap();
            assert_eq!(h.occurrences, manifest.planted_in(&[target], manifest.dated_doc_ids()));
            assert_eq!(h.associations, manifest.pair_events_in(&[target], &grain, manifest.dated_doc_ids()));
        }
    }
}

#[test]
fn bins_and_series_follow_the_manifest() {
    let (corpus, manifest) = load(STORAGE, 7);
    let index = PositionalIndex::build(&corpus);
    let cfg = YearConfig::default();
    let slicing = slice_equal_mass(&corpus, 6000, &cfg).unwrap();

    // bins recomputed from the manifest's dates and token counts alone
    let mut placed: Vec<(i32, &str, u64)> = manifest
        .documents
        .iter()
        .filter_map(|d| match (d.date.year_min(), d.date.year_max()) {
            (Some(lo), Some(hi)) if hi - lo <= 100 => Some(((lo + hi).div_euclid(2), d.id.as_str(), d.tokens)),
            _ => None,
        })
        .collect();
    placed.sort();
    let mut expected: Vec<Vec<&str>> = vec![vec![]];
    let mut mass = 0;
    for (_, id, m) in placed {
        expected.last_mut().unwrap().push(id);
        mass += m;
        if mass >= 6000 {
            expected.push(vec![]);
            mass = 0;
        }
    }
    expected.retain(|b| !b.is_empty());
    let got: Vec<Vec<&str>> = slicing.bins.iter().map(|b| b.doc_ids.iter().map(String::as_str).collect()).collect();
    assert_eq!(got, expected);

    let storage = ["grangia", "granarium", "horreum"];
    let grain = ["frumentum", "bladum", "annona"];
    let freq = frequency_series(&index, &slicing, &g(&storage)).unwrap();
    let dice = dice_series(&index, &slicing, &g(&storage), &g(&grain), 5).unwrap();
    for (i, bin) in expected.iter().enumerate() {
        let f_a = manifest.planted_in(&storage, bin.iter().copied());
        let f_b = manifest.planted_in(&grain, bin.iter().copied());
        let e = manifest.pair_events_in(&storage, &grain, bin.iter().copied());
        assert_eq!(freq[i], f_a);
        assert_eq!((dice[i].f_a, dice[i].f_b, dice[i].hits_a, dice[i].hits_b), (f_a, f_b, e, e));
        assert_eq!(dice[i].dice, diacorp::Fraction::new(2 * e, f_a + f_b));
    }
    // the association rate rises across the 1100 split
    let late = slicing.bins.iter().filter(|b| b.year_start >= 1100).map(|b| dice[b.index].dice).min().unwrap();
    let early = slicing.bins.iter().filter(|b| b.year_end < 1050).map(|b| dice[b.index].dice).max().unwrap();
    assert!(late > early);
}

#[test]
fn concordance_lines_equal_frequency_in_years() {
    let (corpus, manifest) = load(STORAGE, 7);
    let index = PositionalIndex::build(&corpus);
    let cfg = YearConfig::default();
    let ids = diacorp::chrono::documents_in_years(&corpus, &cfg, 1100, 1250);
    let lines = concordance(&index, &g(&["grangia"]), 5, usize::MAX, Some((1100, 1250)), &cfg).unwrap();
    assert_eq!(lines.len() as u64, manifest.planted_in(&["grangia"], ids.iter().copied()));
    assert!(lines.iter().all(|l| l.keyword.to_lowercase().starts_with("grangia")));
}
