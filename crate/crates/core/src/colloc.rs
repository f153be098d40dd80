//! Windowed cooccurrence queries over a [`PositionalIndex`]: frequency series,
//! association tables, Dice scores and timelines, and KWIC concordances.
//!
//! All windows are measured in word positions inside one document; a window of
//! radius `w` around position `p` covers `p-w ..= p+w`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chrono::{working_year, Slicing, YearConfig};
use crate::corpus::{GroupError, LemmaGroup};
use crate::index::{DocSubset, PositionalIndex, Posting};
use crate::ratio::Fraction;

pub const DEFAULT_WINDOW: u32 = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error(transparent)]
    Groups(#[from] GroupError),
    #[error("window radius must be at least 1")]
    ZeroWindow,
    #[error("bins were computed on a different corpus")]
    CorpusMismatch,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    #[default]
    Dated,
}

impl Scope {
    pub fn subset(&self, index: &PositionalIndex<'_>) -> DocSubset {
        match self {
            Scope::All => index.subset_all(),
            Scope::Dated => index.subset_dated(),
        }
    }
}

fn check_window(w: u32) -> Result<(), QueryError> {
    if w == 0 {
        Err(QueryError::ZeroWindow)
    } else {
        Ok(())
    }
}

fn check_slicing(index: &PositionalIndex<'_>, slicing: &Slicing) -> Result<(), QueryError> {
    if index.corpus().fingerprint() == slicing.corpus_fingerprint {
        Ok(())
    } else {
        Err(QueryError::CorpusMismatch)
    }
}

/// For each target posting, whether a probe posting lies within `w` in the same document.
/// Both inputs must be sorted; they must not share positions.
fn hit_flags(targets: &[Posting], probes: &[Posting], w: u32) -> Vec<bool> {
    let mut j = 0;
    targets
        .iter()
        .map(|t| {
            let lo = Posting { doc: t.doc, pos: t.pos.saturating_sub(w) };
            while j < probes.len() && probes[j] < lo {
                j += 1;
            }
            j < probes.len() && probes[j].doc == t.doc && probes[j].pos <= t.pos.saturating_add(w)
        })
        .collect()
}

/// Occurrences of a target group and how many of them have a probe within the window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hits {
    pub occurrences: u64,
    pub associations: u64,
}

impl Hits {
    pub fn percent(&self) -> Fraction {
        Fraction::new(100 * self.associations, self.occurrences)
    }
}

pub fn hits_in(
    index: &PositionalIndex<'_>,
    target: &LemmaGroup,
    probe: &LemmaGroup,
    w: u32,
    subset: &DocSubset,
) -> Result<Hits, QueryError> {
    check_window(w)?;
    target.check_disjoint(probe)?;
    let targets: Vec<Posting> = index.group_postings(target).into_iter().filter(|p| subset.contains(p.doc)).collect();
    let probes = index.group_postings(probe);
    let flags = hit_flags(&targets, &probes, w);
    Ok(Hits { occurrences: targets.len() as u64, associations: flags.iter().filter(|&&f| f).count() as u64 })
}

/// Target occurrences in scope, and those with at least one probe lemma within `w` words.
/// Each target occurrence counts once however many probes surround it.
pub fn association_hits(
    index: &PositionalIndex<'_>,
    target: &LemmaGroup,
    probe: &LemmaGroup,
    w: u32,
    scope: Scope,
) -> Result<Hits, QueryError> {
    hits_in(index, target, probe, w, &scope.subset(index))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoocRow {
    pub target: String,
    pub occurrences: u64,
    pub associations: u64,
    /// 100 × associations / occurrences, exact.
    pub percent: Fraction,
}

impl CoocRow {
    pub fn from_counts(target: &str, occurrences: u64, associations: u64) -> Self {
        CoocRow {
            target: target.to_string(),
            occurrences,
            associations,
            percent: Hits { occurrences, associations }.percent(),
        }
    }

    /// Percentage rounded half-up to two decimals.
    pub fn percent_display(&self) -> String {
        self.percent.round_half_up(2)
    }
}

/// Sorts rows by percentage, then occurrences, both descending; equal rows keep input order.
pub fn sort_cooc_rows(rows: &mut [CoocRow]) {
    rows.sort_by(|a, b| b.percent.cmp(&a.percent).then(b.occurrences.cmp(&a.occurrences)));
}

pub fn association_table(
    index: &PositionalIndex<'_>,
    targets: &[LemmaGroup],
    probe: &LemmaGroup,
    w: u32,
    scope: Scope,
) -> Result<Vec<CoocRow>, QueryError> {
    let subset = scope.subset(index);
    let mut rows = targets
        .iter()
        .map(|t| {
            let h = hits_in(index, t, probe, w, &subset)?;
            Ok(CoocRow::from_counts(t.name(), h.occurrences, h.associations))
        })
        .collect::<Result<Vec<_>, QueryError>>()?;
    sort_cooc_rows(&mut rows);
    Ok(rows)
}

/// Occurrences of the group in each bin.
pub fn frequency_series(
    index: &PositionalIndex<'_>,
    slicing: &Slicing,
    group: &LemmaGroup,
) -> Result<Vec<u64>, QueryError> {
    check_slicing(index, slicing)?;
    let bin_of = slicing.bin_of_documents(index.corpus());
    let mut counts = vec![0u64; slicing.bins.len()];
    for p in index.group_postings(group) {
        if let Some(b) = bin_of[p.doc as usize] {
            counts[b] += 1;
        }
    }
    Ok(counts)
}

/// Counts behind a Dice score: frequencies of both groups and their association hits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiceCounts {
    pub f_a: u64,
    pub f_b: u64,
    pub hits_a: u64,
    pub hits_b: u64,
}

impl DiceCounts {
    /// (hits_a + hits_b) / (f_a + f_b), zero when both groups are absent.
    pub fn dice(&self) -> Fraction {
        Fraction::new(self.hits_a + self.hits_b, self.f_a + self.f_b)
    }
}

pub fn dice_counts(
    index: &PositionalIndex<'_>,
    a: &LemmaGroup,
    b: &LemmaGroup,
    w: u32,
    subset: &DocSubset,
) -> Result<DiceCounts, QueryError> {
    let ha = hits_in(index, a, b, w, subset)?;
    let hb = hits_in(index, b, a, w, subset)?;
    Ok(DiceCounts { f_a: ha.occurrences, f_b: hb.occurrences, hits_a: ha.associations, hits_b: hb.associations })
}

pub fn dice_score(
    index: &PositionalIndex<'_>,
    a: &LemmaGroup,
    b: &LemmaGroup,
    w: u32,
    subset: &DocSubset,
) -> Result<Fraction, QueryError> {
    Ok(dice_counts(index, a, b, w, subset)?.dice())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DicePoint {
    pub bin_index: usize,
    pub f_a: u64,
    pub f_b: u64,
    pub hits_a: u64,
    pub hits_b: u64,
    pub dice: Fraction,
}

/// Dice score of `a` and `b` within each bin.
pub fn dice_series(
    index: &PositionalIndex<'_>,
    slicing: &Slicing,
    a: &LemmaGroup,
    b: &LemmaGroup,
    w: u32,
) -> Result<Vec<DicePoint>, QueryError> {
    check_window(w)?;
    a.check_disjoint(b)?;
    check_slicing(index, slicing)?;
    let bin_of = slicing.bin_of_documents(index.corpus());
    let mut counts = vec![DiceCounts::default(); slicing.bins.len()];

    let pa = index.group_postings(a);
    let pb = index.group_postings(b);
    for (p, hit) in pa.iter().zip(hit_flags(&pa, &pb, w)) {
        if let Some(bin) = bin_of[p.doc as usize] {
            counts[bin].f_a += 1;
            counts[bin].hits_a += hit as u64;
        }
    }
    for (p, hit) in pb.iter().zip(hit_flags(&pb, &pa, w)) {
        if let Some(bin) = bin_of[p.doc as usize] {
            counts[bin].f_b += 1;
            counts[bin].hits_b += hit as u64;
        }
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(bin_index, c)| DicePoint {
            bin_index,
            f_a: c.f_a,
            f_b: c.f_b,
            hits_a: c.hits_a,
            hits_b: c.hits_b,
            dice: c.dice(),
        })
        .collect())
}

/// Number of position pairs (p, q), p ≠ q, with a lemma of `a` at p and of `b` at q,
/// both in one subset document and at most `w` words apart.
pub fn pair_count(index: &PositionalIndex<'_>, a: &LemmaGroup, b: &LemmaGroup, w: u32, subset: &DocSubset) -> u64 {
    let pa: Vec<Posting> = index.group_postings(a).into_iter().filter(|p| subset.contains(p.doc)).collect();
    let pb = index.group_postings(b);
    let mut total = 0u64;
    let mut lo = 0;
    for p in &pa {
        let start = Posting { doc: p.doc, pos: p.pos.saturating_sub(w) };
        let end = Posting { doc: p.doc, pos: p.pos.saturating_add(w) };
        while lo < pb.len() && pb[lo] < start {
            lo += 1;
        }
        total += pb[lo..].iter().take_while(|q| **q <= end).filter(|q| *q != p).count() as u64;
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KwicLine {
    pub doc_id: String,
    /// Token index of the keyword inside its document.
    pub position: usize,
    pub left: Vec<String>,
    pub keyword: String,
    pub right: Vec<String>,
    pub year: Option<i32>,
}

impl KwicLine {
    pub fn render(&self) -> String {
        format!("{} | {} [{}] {}", self.doc_id, self.left.join(" "), self.keyword, self.right.join(" "))
    }
}

/// Keyword-in-context lines for a group, in corpus order. Contexts hold up to `w` words on
/// each side, clipped at document edges. With a year filter, only documents whose working
/// year falls in the range are searched.
pub fn concordance(
    index: &PositionalIndex<'_>,
    group: &LemmaGroup,
    w: u32,
    limit: usize,
    years: Option<(i32, i32)>,
    cfg: &YearConfig,
) -> Result<Vec<KwicLine>, QueryError> {
    check_window(w)?;
    let mut out = Vec::new();
    if limit == 0 {
        return Ok(out);
    }
    let mut current_doc: Option<(u32, Option<i32>)> = None;
    for p in index.group_postings(group) {
        let year = match current_doc {
            Some((d, y)) if d == p.doc => y,
            _ => {
                let y = working_year(index.document(p.doc), cfg);
                current_doc = Some((p.doc, y));
                y
            }
        };
        if let Some((from, to)) = years {
            if !year.is_some_and(|y| (from..=to).contains(&y)) {
                continue;
            }
        }
        let doc = index.document(p.doc);
        let n = index.stream(p.doc).len() as u32;
        let surface = |pos: u32| doc.tokens[index.token_index(p.doc, pos)].surface.clone();
        out.push(KwicLine {
            doc_id: doc.id.clone(),
            position: index.token_index(p.doc, p.pos),
            left: (p.pos.saturating_sub(w)..p.pos).map(surface).collect(),
            keyword: surface(p.pos),
            right: (p.pos + 1..n.min(p.pos.saturating_add(w).saturating_add(1))).map(surface).collect(),
            year,
        });
        if out.len() == limit {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chrono::slice_equal_mass;
    use crate::corpus::{Corpus, DateSpec, Document, EraBounds, Token};

    fn doc(id: &str, year: Option<i32>, lemmas: &[&str]) -> Document {
        Document {
            id: id.into(),
            date: year.map_or(DateSpec::Undated, |y| DateSpec::exact(y, EraBounds::default()).unwrap()),
            collection: String::new(),
            region: None,
            tokens: lemmas.iter().map(|l| Token::new(&l.to_uppercase(), l, None).unwrap()).collect(),
        }
    }

    fn g(name: &str) -> LemmaGroup {
        LemmaGroup::single(name).unwrap()
    }

    #[test]
    fn adjacent_targets_all_associate() {
        let c = Corpus::new(vec![doc("a", Some(1000), &["t", "p", "x", "t", "p"])]).unwrap();
        let idx = PositionalIndex::build(&c);
        let h = association_hits(&idx, &g("t"), &g("p"), 5, Scope::All).unwrap();
        assert_eq!(h, Hits { occurrences: 2, associations: 2 });
        assert_eq!(h.percent().round_half_up(2), "100.00");
    }

    #[test]
    fn spacing_beyond_window_never_associates() {
        let mut lemmas = Vec::new();
        for i in 0..10 {
            lemmas.push(if i % 2 == 0 { "t" } else { "p" });
            lemmas.extend(["f"; 5]);
        }
        let c = Corpus::new(vec![doc("a", None, &lemmas)]).unwrap();
        let idx = PositionalIndex::build(&c);
        let h = association_hits(&idx, &g("t"), &g("p"), 5, Scope::All).unwrap();
        assert_eq!(h, Hits { occurrences: 5, associations: 0 });
        let h = association_hits(&idx, &g("t"), &g("p"), 6, Scope::All).unwrap();
        assert_eq!(h.associations, 5);
    }

    #[test]
    fn windows_do_not_cross_documents_or_count_punctuation() {
        let c = Corpus::new(vec![
            doc("a", None, &["x", "x", "t"]),
            doc("b", None, &["p", "x"]),
            doc("c", None, &["t", ",", ",", ",", "p"]),
        ])
        .unwrap();
        let idx = PositionalIndex::build(&c);
        let h = association_hits(&idx, &g("t"), &g("p"), 1, Scope::All).unwrap();
        assert_eq!(h, Hits { occurrences: 2, associations: 1 });
    }

    #[test]
    fn scope_dated_is_a_subset() {
        let c = Corpus::new(vec![doc("a", Some(1000), &["t", "p"]), doc("b", None, &["t", "p", "t"])]).unwrap();
        let idx = PositionalIndex::build(&c);
        let dated = association_hits(&idx, &g("t"), &g("p"), 5, Scope::Dated).unwrap();
        let all = association_hits(&idx, &g("t"), &g("p"), 5, Scope::All).unwrap();
        assert_eq!(dated, Hits { occurrences: 1, associations: 1 });
        assert_eq!(all, Hits { occurrences: 3, associations: 3 });
    }

    #[test]
    fn errors() {
        let c = Corpus::new(vec![doc("a", Some(1000), &["t", "p"])]).unwrap();
        let idx = PositionalIndex::build(&c);
        assert_eq!(association_hits(&idx, &g("t"), &g("p"), 0, Scope::All), Err(QueryError::ZeroWindow));
        let ab = LemmaGroup::new("ab", ["t", "p"]).unwrap();
        assert!(matches!(association_hits(&idx, &ab, &g("p"), 5, Scope::All), Err(QueryError::Groups(_))));

        let other = Corpus::new(vec![doc("z", Some(1000), &["t"])]).unwrap();
        let s = slice_equal_mass(&other, 1, &YearConfig::default()).unwrap();
        assert_eq!(frequency_series(&idx, &s, &g("t")), Err(QueryError::CorpusMismatch));
        assert_eq!(dice_series(&idx, &s, &g("t"), &g("p"), 5), Err(QueryError::CorpusMismatch));
    }

    #[test]
    fn table_ordering_matches_published_rows() {
        let mut rows = vec![
            CoocRow::from_counts("horreum", 622, 79),
            CoocRow::from_counts("ghost", 0, 0),
            CoocRow::from_counts("granarium", 317, 85),
            CoocRow::from_counts("organeum", 476, 0),
            CoocRow::from_counts("spicarium", 64, 14),
        ];
        sort_cooc_rows(&mut rows);
        let names: Vec<_> = rows.iter().map(|r| r.target.as_str()).collect();
        assert_eq!(names, ["granarium", "spicarium", "horreum", "organeum", "ghost"]);
        let pct: Vec<_> = rows.iter().map(CoocRow::percent_display).collect();
        assert_eq!(pct, ["26.81", "21.88", "12.70", "0.00", "0.00"]);
    }

    #[test]
    fn association_table_recomputes_per_target() {
        let c = Corpus::new(vec![doc("a", Some(1000), &["t", "p", "u", "x", "x", "x", "x", "x", "x", "u"])]).unwrap();
        let idx = PositionalIndex::build(&c);
        let rows = association_table(&idx, &[g("u"), g("t"), g("zzz")], &g("p"), 5, Scope::Dated).unwrap();
        assert_eq!(rows[0], CoocRow::from_counts("t", 1, 1));
        assert_eq!(rows[1], CoocRow::from_counts("u", 2, 1));
        assert_eq!(rows[2], CoocRow::from_counts("zzz", 0, 0));
    }

    #[test]
    fn dice_basics() {
        let pairs = Corpus::new(vec![doc("a", Some(1000), &["a", "b", "x", "x", "x", "x", "x", "x", "a", "b"])]).unwrap();
        let idx = PositionalIndex::build(&pairs);
        let all = idx.subset_all();
        assert_eq!(dice_score(&idx, &g("a"), &g("b"), 5, &all).unwrap(), Fraction::new(1, 1));
        assert_eq!(dice_score(&idx, &g("a"), &g("b"), 5, &all), dice_score(&idx, &g("b"), &g("a"), 5, &all));

        let apart = Corpus::new(vec![doc("a", Some(1000), &["a", "x", "x", "b"])]).unwrap();
        let idx = PositionalIndex::build(&apart);
        assert_eq!(dice_score(&idx, &g("a"), &g("b"), 2, &idx.subset_all()).unwrap(), Fraction::ZERO);
        assert_eq!(dice_score(&idx, &g("a"), &g("zzz"), 2, &idx.subset_all()).unwrap(), Fraction::ZERO);
    }

    #[test]
    fn dice_series_per_bin() {
        let c = Corpus::new(vec![
            doc("a", Some(1000), &["a", "x", "x", "x"]),
            doc("b", Some(1050), &["a", "b", "x", "x"]),
            doc("c", Some(1100), &["a", "x", "b", "b"]),
        ])
        .unwrap();
        let idx = PositionalIndex::build(&c);
        let s = slice_equal_mass(&c, 4, &YearConfig::default()).unwrap();
        let series = dice_series(&idx, &s, &g("a"), &g("b"), 1).unwrap();
        let dice: Vec<_> = series.iter().map(|p| p.dice).collect();
        assert_eq!(dice, [Fraction::ZERO, Fraction::new(1, 1), Fraction::ZERO]);
        let series = dice_series(&idx, &s, &g("a"), &g("b"), 2).unwrap();
        assert_eq!(series[2], DicePoint { bin_index: 2, f_a: 1, f_b: 2, hits_a: 1, hits_b: 1, dice: Fraction::new(2, 3) });
        assert_eq!(frequency_series(&idx, &s, &g("b")).unwrap(), [0, 1, 2]);
    }

    #[test]
    fn pair_count_counts_position_pairs() {
        let c = Corpus::new(vec![doc("a", None, &["a", "b", "b", "x", "a"])]).unwrap();
        let idx = PositionalIndex::build(&c);
        let all = idx.subset_all();
        assert_eq!(pair_count(&idx, &g("a"), &g("b"), 1, &all), 1);
        assert_eq!(pair_count(&idx, &g("a"), &g("b"), 3, &all), 4);
        assert_eq!(pair_count(&idx, &g("b"), &g("a"), 3, &all), 4);
        assert_eq!(pair_count(&idx, &g("a"), &g("a"), 4, &all), 2);
    }

    #[test]
    fn concordance_edges_and_filters() {
        let c = Corpus::new(vec![
            doc("a", Some(900), &["k", "x", ",", "y", "z"]),
            doc("b", Some(1200), &["x", "y", "k"]),
        ])
        .unwrap();
        let idx = PositionalIndex::build(&c);
        let cfg = YearConfig::default();
        let lines = concordance(&idx, &g("k"), 2, 10, None, &cfg).unwrap();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].left.is_empty());
        assert_eq!(lines[0].right, ["X", "Y"]);
        assert_eq!(lines[1].left, ["X", "Y"]);
        assert!(lines[1].right.is_empty());
        assert_eq!((lines[1].position, lines[1].year), (2, Some(1200)));
        assert_eq!(lines[0].render(), "a |  [K] X Y");

        assert!(concordance(&idx, &g("k"), 2, 0, None, &cfg).unwrap().is_empty());
        assert_eq!(concordance(&idx, &g("k"), 2, 1, None, &cfg).unwrap().len(), 1);
        let late = concordance(&idx, &g("k"), 2, 10, Some((1000, 1300)), &cfg).unwrap();
        assert_eq!(late.len(), 1);
        assert_eq!(late[0].doc_id, "b");
    }
}
