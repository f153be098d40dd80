use std::collections::{BTreeMap, BTreeSet};

use diacorp::{Corpus, DateSpec, Document};

/// One-character lemmas that are not letters or digits are not words.
pub fn is_punctuation(lemma: &str) -> bool {
    let mut chars = lemma.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if !c.is_alphanumeric())
}

/// Lemmas of the word tokens of a document, in order.
pub fn words(doc: &Document) -> Vec<&str> {
    doc.tokens.iter().map(|t| t.lemma.as_str()).filter(|l| !is_punctuation(l)).collect()
}

pub fn group_frequency(corpus: &Corpus, group: &[&str], dated_only: bool) -> u64 {
    corpus
        .documents()
        .iter()
        .filter(|d| !dated_only || !matches!(d.date, DateSpec::Undated))
        .flat_map(|d| d.tokens.iter())
        .filter(|t| group.contains(&t.lemma.as_str()))
        .count() as u64
}

/// (occurrences of target, occurrences with some probe within `w` words).
pub fn hits(corpus: &Corpus, keep: impl Fn(&Document) -> bool, target: &[&str], probe: &[&str], w: usize) -> (u64, u64) {
    let (mut occ, mut assoc) = (0, 0);
    for doc in corpus.documents().iter().filter(|d| keep(d)) {
        let ws = words(doc);
        for i in 0..ws.len() {
            if !target.contains(&ws[i]) {
                continue;
            }
            occ += 1;
            if (0..ws.len()).any(|j| j != i && i.abs_diff(j) <= w && probe.contains(&ws[j])) {
                assoc += 1;
            }
        }
    }
    (occ, assoc)
}

/// Dice as (numerator, denominator) = (hits_a + hits_b, f_a + f_b).
pub fn dice(corpus: &Corpus, keep: impl Fn(&Document) -> bool + Copy, a: &[&str], b: &[&str], w: usize) -> (u64, u64) {
    let (fa, ha) = hits(corpus, keep, a, b, w);
    let (fb, hb) = hits(corpus, keep, b, a, w);
    (ha + hb, fa + fb)
}

/// Ordered position pairs (p, q), p ≠ q, lemma of a at p and of b at q, within `w` words.
pub fn pair_count(corpus: &Corpus, keep: impl Fn(&Document) -> bool, a: &[&str], b: &[&str], w: usize) -> u64 {
    let mut n = 0;
    for doc in corpus.documents().iter().filter(|d| keep(d)) {
        let ws = words(doc);
        for i in 0..ws.len() {
            for j in 0..ws.len() {
                if i != j && i.abs_diff(j) <= w && a.contains(&ws[i]) && b.contains(&ws[j]) {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Vocabulary (frequency ≥ min_freq over kept documents, sorted) and the symmetric
/// count of unordered word pairs within `w` words whose lemmas are distinct vocabulary items.
pub fn cooccurrence(
    corpus: &Corpus,
    keep: impl Fn(&Document) -> bool,
    min_freq: u64,
    w: usize,
) -> (Vec<String>, BTreeMap<(String, String), u64>) {
    let docs: Vec<Vec<&str>> = corpus.documents().iter().filter(|d| keep(d)).map(words).collect();
    let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
    for ws in &docs {
        for l in ws {
            *freq.entry(l).or_insert(0) += 1;
        }
    }
    let vocab: BTreeSet<&str> = freq.iter().filter(|(_, &f)| f >= min_freq).map(|(l, _)| *l).collect();
    let mut counts = BTreeMap::new();
    for ws in &docs {
        for i in 0..ws.len() {
            for j in 0..ws.len() {
                if i != j && i.abs_diff(j) <= w && ws[i] != ws[j] && vocab.contains(ws[i]) && vocab.contains(ws[j]) {
                    // each unordered pair is seen twice, once per orientation
                    *counts.entry((ws[i].to_string(), ws[j].to_string())).or_insert(0) += 1;
                }
            }
        }
    }
    (vocab.into_iter().map(String::from).collect(), counts)
}

/// Midpoint year, `None` for undated documents or intervals wider than `max_span`.
pub fn midpoint_year(doc: &Document, max_span: i32) -> Option<i32> {
    match doc.date {
        DateSpec::Exact { year } => Some(year),
        DateSpec::Interval { min, max } if max - min <= max_span => Some((min + max).div_euclid(2)),
        _ => None,
    }
}

/// Greedy equal-mass bins as lists of document ids.
pub fn equal_mass_bins(corpus: &Corpus, target: u64, max_span: i32) -> Vec<Vec<String>> {
    let mut placed: Vec<(i32, &str, u64)> = corpus
        .documents()
        .iter()
        .filter_map(|d| midpoint_year(d, max_span).map(|y| (y, d.id.as_str(), d.tokens.len() as u64)))
        .collect();
    placed.sort();
    let mut bins = Vec::new();
    let mut current = Vec::new();
    let mut mass = 0;
    for (_, id, m) in placed {
        current.push(id.to_string());
        mass += m;
        if mass >= target {
            bins.push(std::mem::take(&mut current));
            mass = 0;
        }
    }
    if !current.is_empty() {
        bins.push(current);
    }
    bins
}

pub fn frequency_per_bin(corpus: &Corpus, bins: &[Vec<String>], group: &[&str]) -> Vec<u64> {
    bins.iter()
        .map(|ids| {
            ids.iter()
                .filter_map(|id| corpus.document(id))
                .flat_map(|d| d.tokens.iter())
                .filter(|t| group.contains(&t.lemma.as_str()))
                .count() as u64
        })
        .collect()
}

/// Dense PPMI over a dense count matrix, row sums as marginals.
pub fn dense_ppmi(counts: &[Vec<u64>]) -> Vec<Vec<f64>> {
    let rows: Vec<f64> = counts.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let total: f64 = rows.iter().sum();
    counts
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, &c)| if c == 0 { 0.0 } else { (c as f64 * total / (rows[i] * rows[j])).ln().max(0.0) })
                .collect()
        })
        .collect()
}

pub fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
