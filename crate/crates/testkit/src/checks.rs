//! Property checks shared by the integration tests and the acceptance run.
//!
//! Each check returns the first violation as text instead of panicking, so a caller
//! can either unwrap it or count it.

use std::collections::{BTreeMap, BTreeSet};

use diacorp::chrono::{assign_year, ChronoError, Placement};
use diacorp::colloc::{association_hits, dice_counts, dice_score, frequency_series, pair_count, DiceCounts, Scope};
use diacorp::corpus::group_frequency;
use diacorp::dsm::{cosine_neighbors, dsm_build, DsmConfig, DsmMatrix, Weighting};
use diacorp::{slice_equal_mass, Corpus, DateSpec, Document, Fraction, LemmaGroup, PositionalIndex, YearConfig};

use crate::oracle;
use crate::random::duplicated;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

macro_rules! ensure_eq {
    ($left:expr, $right:expr, $what:expr) => {{
        let (l, r) = (&$left, &$right);
        if l != r {
            return Err(format!("{}: {:?} != {:?}", $what, l, r));
        }
    }};
}

fn group(name: &str, members: &[String]) -> LemmaGroup {
    LemmaGroup::new(name, members.iter().map(String::as_str)).expect("non-empty group")
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn dated(d: &Document) -> bool {
    !matches!(d.date, DateSpec::Undated)
}

/// Every counting operation on `corpus` against the brute-force reference.
pub fn oracle_equivalence(corpus: &Corpus, a: &[String], b: &[String], w: u32, target_mass: u64) -> Check {
    let index = PositionalIndex::build(corpus);
    let (ga, gb) = (group("a", a), group("b", b));
    let (sa, sb) = (strs(a), strs(b));
    let wu = w as usize;

    for dated_only in [false, true] {
        ensure_eq!(
            group_frequency(corpus, &ga, dated_only),
            oracle::group_frequency(corpus, &sa, dated_only),
            format!("group frequency (dated only: {dated_only})")
        );
    }

    let h = association_hits(&index, &ga, &gb, w, Scope::All).map_err(|e| e.to_string())?;
    ensure_eq!((h.occurrences, h.associations), oracle::hits(corpus, |_| true, &sa, &sb, wu), "association hits");
    let h = association_hits(&index, &ga, &gb, w, Scope::Dated).map_err(|e| e.to_string())?;
    ensure_eq!((h.occurrences, h.associations), oracle::hits(corpus, dated, &sa, &sb, wu), "dated association hits");

    let d = dice_counts(&index, &ga, &gb, w, &index.subset_all()).map_err(|e| e.to_string())?;
    let (num, den) = oracle::dice(corpus, |_| true, &sa, &sb, wu);
    ensure_eq!((d.hits_a + d.hits_b, d.f_a + d.f_b), (num, den), "dice counts");
    ensure_eq!(d.dice(), Fraction::new(num, den), "dice");

    ensure_eq!(
        pair_count(&index, &ga, &gb, w, &index.subset_all()),
        oracle::pair_count(corpus, |_| true, &sa, &sb, wu),
        "pair count"
    );

    let cfg = YearConfig::default();
    let bins = oracle::equal_mass_bins(corpus, target_mass, cfg.max_span);
    match slice_equal_mass(corpus, target_mass, &cfg) {
        Err(ChronoError::EmptyDatedCorpus) => {
            ensure!(bins.is_empty(), "slicer found nothing to bin, reference has {} bins", bins.len())
        }
        Err(e) => return Err(e.to_string()),
        Ok(slicing) => {
            let lib_bins: Vec<Vec<String>> = slicing.bins.iter().map(|b| b.doc_ids.clone()).collect();
            ensure_eq!(lib_bins, bins, "bins");
            ensure_eq!(
                frequency_series(&index, &slicing, &ga).map_err(|e| e.to_string())?,
                oracle::frequency_per_bin(corpus, &bins, &sa),
                "frequency series"
            );
        }
    }

    let config = DsmConfig { window: w, min_freq: 2, weighting: Weighting::Raw, ..DsmConfig::default() };
    let (vocab, counts) = oracle::cooccurrence(corpus, |_| true, 2, wu);
    match dsm_build(&index, &index.subset_all(), &config) {
        Ok(m) => {
            ensure_eq!(m.vocabulary, vocab, "model vocabulary");
            let lib: BTreeMap<(String, String), u64> =
                m.counts.triplets().map(|(i, j, c)| ((m.vocabulary[i].clone(), m.vocabulary[j].clone()), c)).collect();
            ensure_eq!(lib, counts, "co-occurrence counts");
        }
        Err(_) => ensure!(vocab.is_empty(), "model failed with a non-empty reference vocabulary"),
    }
    Ok(())
}

/// Mass bound, remainder flag, partition, monotonicity, labels and determinism of one slicing.
pub fn binning_invariants(corpus: &Corpus, target: u64, cfg: &YearConfig) -> Check {
    let s = slice_equal_mass(corpus, target, cfg).map_err(|e| e.to_string())?;
    let mass_of = |id: &str| corpus.document(id).map(|d| d.tokens.len() as u64).unwrap_or(0);
    let max_doc = corpus.documents().iter().map(|d| d.tokens.len() as u64).max().unwrap_or(0);

    let last = s.bins.len() - 1;
    for (i, b) in s.bins.iter().enumerate() {
        let mass: u64 = b.doc_ids.iter().map(|id| mass_of(id)).sum();
        ensure!(mass == b.token_mass, "bin {i} reports mass {} but holds {mass}", b.token_mass);
        ensure!(
            i == last || (target <= mass && mass < target + max_doc),
            "bin {i} mass {mass} outside [{target}, {})",
            target + max_doc
        );
        ensure!(b.index == i, "bin {i} has index {}", b.index);
    }
    ensure!(
        s.bins[last].remainder == (s.bins[last].token_mass * 2 < target),
        "remainder flag disagrees with the last bin mass"
    );

    let mut placed = BTreeSet::new();
    let mut placed_mass = 0;
    for d in corpus.documents() {
        if let Ok(Placement::Assigned(_)) = assign_year(d, cfg) {
            placed.insert(d.id.clone());
            placed_mass += d.tokens.len() as u64;
        }
    }
    let binned: Vec<&String> = s.bins.iter().flat_map(|b| &b.doc_ids).collect();
    let binned_set: BTreeSet<String> = binned.iter().map(|s| s.to_string()).collect();
    ensure!(
        binned.len() == binned_set.len() && binned_set == placed,
        "bins are not a partition of the placed documents"
    );
    ensure!(
        s.bins.iter().map(|b| b.token_mass).sum::<u64>() == placed_mass,
        "bin masses do not sum to the placed mass"
    );

    let years: BTreeMap<&str, i32> = s.assignments.iter().map(|a| (a.doc_id.as_str(), a.year)).collect();
    let seq: Vec<i32> = binned.iter().map(|id| years[id.as_str()]).collect();
    ensure!(seq.windows(2).all(|w| w[0] <= w[1]), "years decrease across the bin sequence");
    for b in &s.bins {
        let (first, end) = (&b.doc_ids[0], b.doc_ids.last().expect("bins are non-empty"));
        ensure!(
            years[first.as_str()] == b.year_start && years[end.as_str()] == b.year_end,
            "bin {} label does not match its documents",
            b.index
        );
    }

    let again = slice_equal_mass(corpus, target, cfg).map_err(|e| e.to_string())?;
    ensure!(again == s && again.to_csv() == s.to_csv(), "slicing is not deterministic");
    Ok(())
}

/// Symmetry, bounds, window monotonicity for w = 1..=10, and dated hits never exceeding all hits.
pub fn dice_properties(corpus: &Corpus, a: &LemmaGroup, b: &LemmaGroup) -> Check {
    let index = PositionalIndex::build(corpus);
    let all = index.subset_all();
    let err = |e: diacorp::colloc::QueryError| e.to_string();
    let mut previous: Option<DiceCounts> = None;
    for w in 1..=10 {
        let ab = dice_score(&index, a, b, w, &all).map_err(err)?;
        let ba = dice_score(&index, b, a, w, &all).map_err(err)?;
        ensure_eq!(ab, ba, format!("symmetry at w={w}"));
        ensure!(Fraction::ZERO <= ab && ab <= Fraction::new(1, 1), "dice {ab} out of bounds at w={w}");

        let c = dice_counts(&index, a, b, w, &all).map_err(err)?;
        ensure!(c.hits_a <= c.f_a && c.hits_b <= c.f_b, "more hits than occurrences at w={w}");
        if let Some(p) = previous {
            ensure!(c.hits_a >= p.hits_a && c.hits_b >= p.hits_b, "hits shrink as the window grows to {w}");
            ensure!((c.f_a, c.f_b) == (p.f_a, p.f_b), "frequencies depend on the window");
        }
        previous = Some(c);

        let all_h = association_hits(&index, a, b, w, Scope::All).map_err(err)?;
        let dated_h = association_hits(&index, a, b, w, Scope::Dated).map_err(err)?;
        ensure!(
            dated_h.occurrences <= all_h.occurrences && dated_h.associations <= all_h.associations,
            "dated hits exceed all hits at w={w}"
        );
    }
    Ok(())
}

/// Unit self-similarity and symmetric cosine for every lemma with a non-empty row.
pub fn dsm_self_similarity(m: &DsmMatrix, tolerance: f64) -> Check {
    for i in 0..m.dim() {
        if m.weights.row(i).0.is_empty() {
            ensure!(m.cosine(i, i) == 0.0, "empty row {i} has non-zero self-similarity");
            continue;
        }
        let s = m.cosine(i, i);
        ensure!((s - 1.0).abs() <= tolerance, "self-similarity of {} is {s}", m.vocabulary[i]);
        for j in 0..m.dim() {
            ensure!((m.cosine(i, j) - m.cosine(j, i)).abs() <= tolerance, "cosine({i},{j}) is not symmetric");
        }
    }
    Ok(())
}

/// Duplicating every document leaves PPMI weights within `tolerance` and neighbour rankings identical.
/// `Ok(false)` means the corpus had no model at the given frequency floor.
pub fn dsm_duplication(corpus: &Corpus, min_freq: u64, tolerance: f64) -> Result<bool, String> {
    let twice = duplicated(corpus);
    let (i1, i2) = (PositionalIndex::build(corpus), PositionalIndex::build(&twice));
    let cfg = DsmConfig { min_freq, ..DsmConfig::default() };
    let Ok(a) = dsm_build(&i1, &i1.subset_all(), &cfg) else { return Ok(false) };
    let b =
        dsm_build(&i2, &i2.subset_all(), &DsmConfig { min_freq: 2 * min_freq, ..cfg }).map_err(|e| e.to_string())?;
    ensure_eq!(a.vocabulary, b.vocabulary, "vocabulary after duplication");
    let wa: Vec<_> = a.weights.triplets().collect();
    let wb: Vec<_> = b.weights.triplets().collect();
    ensure!(wa.len() == wb.len(), "weight sparsity changed after duplication");
    for ((i, j, x), (k, l, y)) in wa.iter().zip(&wb) {
        ensure!((i, j) == (k, l), "weight layout changed after duplication");
        ensure!((x - y).abs() <= tolerance, "weight ({i},{j}) moved from {x} to {y}");
    }
    for t in &a.vocabulary {
        let na: Vec<String> =
            cosine_neighbors(&a, t, 10).map_err(|e| e.to_string())?.into_iter().map(|n| n.lemma).collect();
        let nb: Vec<String> =
            cosine_neighbors(&b, t, 10).map_err(|e| e.to_string())?.into_iter().map(|n| n.lemma).collect();
        ensure_eq!(na, nb, format!("neighbours of {t}"));
    }
    Ok(true)
}
