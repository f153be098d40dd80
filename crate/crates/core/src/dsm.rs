//! Distributional model: lemma × lemma windowed cooccurrence counts, PPMI (or
//! logDice) weighting, cosine neighbourhoods and semantic field graphs.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Fingerprint;
use crate::index::{DocSubset, PositionalIndex};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Raw,
    #[default]
    Ppmi,
    LogDice,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DsmConfig {
    pub window: u32,
    pub min_freq: u64,
    pub weighting: Weighting,
    pub k: usize,
    pub edge_threshold: f64,
}

impl Default for DsmConfig {
    fn default() -> Self {
        DsmConfig { window: 5, min_freq: 10, weighting: Weighting::Ppmi, k: 30, edge_threshold: 0.5 }
    }
}

impl DsmConfig {
    pub fn validate(&self) -> Result<(), DsmError> {
        let bad = |m: &str| Err(DsmError::Config(m.to_string()));
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.min_freq == 0 {
            return bad("min_freq must be at least 1");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.edge_threshold) {
            return bad("edge_threshold must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DsmError {
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error("no lemma reaches the frequency threshold in the selected documents")]
    EmptyVocabulary,
    #[error("cooccurrence counts are all zero")]
    AllZero,
    #[error("cooccurrence counts are not symmetric")]
    NotSymmetric,
    #[error("{lemma:?} is not in the model vocabulary{}", hint(.suggestions))]
    OutOfVocabulary { lemma: String, suggestions: Vec<String> },
}

fn hint(suggestions: &[String]) -> String {
    if suggestions.is_empty() {
        String::new()
    } else {
        format!(" (did you mean {}?)", suggestions.join(", "))
    }
}

/// Square sparse matrix in compressed-row form with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<T>,
}

impl<T: Copy + PartialEq> SparseMatrix<T> {
    /// Builds from (row, col, value) entries; duplicates are not merged, so callers pass each cell once.
    pub fn from_triplets(n: usize, mut entries: Vec<(u32, u32, T)>) -> Self {
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _, _) in &entries {
            row_ptr[i as usize + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let (cols, vals) = entries.into_iter().map(|(_, j, v)| (j, v)).unzip();
        SparseMatrix { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&(j as u32)).ok().map(|k| vals[k])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j as usize, v))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.triplets().all(|(i, j, v)| self.get(j, i) == Some(v))
    }
}

impl SparseMatrix<u64> {
    /// Dense helper for small hand-built matrices; zero cells are not stored.
    pub fn from_dense(rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter().enumerate().filter(|(_, &v)| v != 0).map(move |(j, &v)| (i as u32, j as u32, v))
            })
            .collect();
        SparseMatrix::from_triplets(n, entries)
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }
}

/// Positive pointwise mutual information: max(0, ln(c·N / (r_i·r_j))) with N the total
/// mass and r the row sums. Cells without counts stay empty.
pub fn ppmi_weight(counts: &SparseMatrix<u64>) -> Result<SparseMatrix<f64>, DsmError> {
    reweight(counts, |c, ri, rj, total| (c * total / (ri * rj)).ln())
}

/// logDice on row sums: max(0, 14 + log2(2c / (r_i + r_j))).
pub fn logdice_weight(counts: &SparseMatrix<u64>) -> Result<SparseMatrix<f64>, DsmError> {
    reweight(counts, |c, ri, rj, _| 14.0 + (2.0 * c / (ri + rj)).log2())
}

fn reweight(
    counts: &SparseMatrix<u64>,
    score: impl Fn(f64, f64, f64, f64) -> f64,
) -> Result<SparseMatrix<f64>, DsmError> {
    let rows = counts.row_sums();
    let total: u64 = rows.iter().sum();
    if total == 0 {
        return Err(DsmError::AllZero);
    }
    if !counts.is_symmetric() {
        return Err(DsmError::NotSymmetric);
    }
    let entries = counts
        .triplets()
        .filter_map(|(i, j, c)| {
            let w = score(c as f64, rows[i] as f64, rows[j] as f64, total as f64);
            (w > 0.0).then_some((i as u32, j as u32, w))
        })
        .collect();
    Ok(SparseMatrix::from_triplets(counts.dim(), entries))
}

fn raw_weight(counts: &SparseMatrix<u64>) -> SparseMatrix<f64> {
    let entries = counts.triplets().map(|(i, j, c)| (i as u32, j as u32, c as f64)).collect();
    SparseMatrix::from_triplets(counts.dim(), entries)
}

#[derive(Clone, Debug)]
pub struct DsmMatrix {
    pub vocabulary: Vec<String>,
    /// Subset frequency of each vocabulary item.
    pub frequencies: Vec<u64>,
    pub counts: SparseMatrix<u64>,
    pub weights: SparseMatrix<f64>,
    pub corpus_fingerprint: Fingerprint,
    pub config: DsmConfig,
    norms: Vec<f64>,
    lookup: HashMap<String, u32>,
}

/// Counts cooccurrences within `config.window` over the subset's documents and weights them.
pub fn dsm_build(index: &PositionalIndex<'_>, subset: &DocSubset, config: &DsmConfig) -> Result<DsmMatrix, DsmError> {
    config.validate()?;

    let mut freq = vec![0u64; index.n_lemmas()];
    for d in subset.ordinals() {
        for &id in index.stream(d) {
            freq[id as usize] += 1;
        }
    }
    let mut vocab: Vec<(&str, u32)> = (0..index.n_lemmas() as u32)
        .filter(|&id| freq[id as usize] >= config.min_freq)
        .map(|id| (index.lemma(id), id))
        .collect();
    if vocab.is_empty() {
        return Err(DsmError::EmptyVocabulary);
    }
    vocab.sort_unstable();
    let mut slot = vec![u32::MAX; index.n_lemmas()];
    for (v, &(_, id)) in vocab.iter().enumerate() {
        slot[id as usize] = v as u32;
    }

    let w = config.window as usize;
    let docs: Vec<u32> = subset.ordinals().collect();
    let pairs: HashMap<(u32, u32), u64> = docs
        .par_iter()
        .fold(HashMap::new, |mut acc, &d| {
            let stream: Vec<u32> = index.stream(d).iter().map(|&id| slot[id as usize]).collect();
            for (p, &a) in stream.iter().enumerate() {
                if a == u32::MAX {
                    continue;
                }
                for &b in stream.iter().skip(p + 1).take(w) {
                    if b != u32::MAX && b != a {
                        *acc.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                    }
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let n = vocab.len();
    let entries = pairs.into_iter().flat_map(|((i, j), c)| [(i, j, c), (j, i, c)]).collect();
    let counts = SparseMatrix::from_triplets(n, entries);
    let weights = match config.weighting {
        Weighting::Raw => raw_weight(&counts),
        Weighting::Ppmi | Weighting::LogDice if counts.nnz() == 0 => SparseMatrix::from_triplets(n, Vec::new()),
        Weighting::Ppmi => ppmi_weight(&counts)?,
        Weighting::LogDice => logdice_weight(&counts)?,
    };
    let norms = (0..n).map(|i| weights.row(i).1.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let lookup = vocab.iter().enumerate().map(|(v, (l, _))| (l.to_string(), v as u32)).collect();
    Ok(DsmMatrix {
        frequencies: vocab.iter().map(|&(_, id)| freq[id as usize]).collect(),
        vocabulary: vocab.into_iter().map(|(l, _)| l.to_string()).collect(),
        counts,
        weights,
        corpus_fingerprint: index.corpus().fingerprint(),
        config: *config,
        norms,
        lookup,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub lemma: String,
    pub similarity: f64,
}

impl DsmMatrix {
    pub fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn position(&self, lemma: &str) -> Result<usize, DsmError> {
        self.lookup.get(lemma).map(|&i| i as usize).ok_or_else(|| DsmError::OutOfVocabulary {
            lemma: lemma.to_string(),
            suggestions: self.spelling_suggestions(lemma),
        })
    }

    /// Vocabulary items within edit distance 2 of `lemma`, closest first, then most frequent.
    fn spelling_suggestions(&self, lemma: &str) -> Vec<String> {
        let mut near: Vec<(usize, u64, &str)> = self
            .vocabulary
            .iter()
            .zip(&self.frequencies)
            .map(|(v, &f)| (strsim::levenshtein(lemma, v), f, v.as_str()))
            .filter(|&(d, _, _)| d <= 2)
            .collect();
        near.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(b.2)));
        near.into_iter().take(5).map(|(_, _, v)| v.to_string()).collect()
    }

    /// Cosine of two weighted rows; 0 when either row is empty.
    pub fn cosine(&self, i: usize, j: usize) -> f64 {
        let (ni, nj) = (self.norms[i], self.norms[j]);
        if ni == 0.0 || nj == 0.0 {
            return 0.0;
        }
        let (ci, vi) = self.weights.row(i);
        let (cj, vj) = self.weights.row(j);
        let (mut a, mut b, mut dot) = (0, 0, 0.0);
        while a < ci.len() && b < cj.len() {
            match ci[a].cmp(&cj[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    dot += vi[a] * vj[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        (dot / (ni * nj)).clamp(-1.0, 1.0)
    }

    pub fn similarity(&self, a: &str, b: &str) -> Result<f64, DsmError> {
        Ok(self.cosine(self.position(a)?, self.position(b)?))
    }

    /// Sparse triplet export, `i,j,weight`.
    pub fn weights_csv(&self) -> String {
        let mut out = String::from("i,j,weight\n");
        for (i, j, v) in self.weights.triplets() {
            let _ = writeln!(out, "{i},{j},{v}");
        }
        out
    }

    /// Vocabulary export, `i,lemma,frequency`.
    pub fn vocabulary_csv(&self) -> String {
        let mut out = String::from("i,lemma,frequency\n");
        for (i, (l, f)) in self.vocabulary.iter().zip(&self.frequencies).enumerate() {
            let _ = writeln!(out, "{i},{l},{f}");
        }
        out
    }
}

/// The `k` lemmas whose weighted rows are closest to the target's, by descending cosine
/// with ties broken lexicographically. The target itself is never listed.
pub fn cosine_neighbors(matrix: &DsmMatrix, target: &str, k: usize) -> Result<Vec<Neighbor>, DsmError> {
    let t = matrix.position(target)?;
    let n = matrix.dim();
    let mut dot = vec![0.0f64; n];
    let (tc, tv) = matrix.weights.row(t);
    for (&c, &wtc) in tc.iter().zip(tv) {
        let (cc, cv) = matrix.weights.row(c as usize);
        for (&j, &wcj) in cc.iter().zip(cv) {
            dot[j as usize] += wtc * wcj;
        }
    }
    let nt = matrix.norms[t];
    let mut scored: Vec<(f64, usize)> = (0..n)
        .filter(|&j| j != t)
        .map(|j| {
            let d = nt * matrix.norms[j];
            let sim = if d == 0.0 { 0.0 } else { (dot[j] / d).clamp(-1.0, 1.0) };
            (sim, j)
        })
        .collect();
    // Vocabulary is sorted, so index order is lexicographic order.
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored
        .into_iter()
        .take(k)
        .map(|(similarity, j)| Neighbor { lemma: matrix.vocabulary[j].clone(), similarity })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldNode {
    pub lemma: String,
    pub sim: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldEdge {
    pub a: String,
    pub b: String,
    pub sim: f64,
}

/// A target lemma, its nearest neighbours, and the similarity edges between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldGraph {
    pub target: String,
    /// Target first (similarity 1), then neighbours by rank.
    pub nodes: Vec<FieldNode>,
    pub edges: Vec<FieldEdge>,
}

pub fn semantic_field(matrix: &DsmMatrix, target: &str, config: &DsmConfig) -> Result<FieldGraph, DsmError> {
    config.validate()?;
    let neighbors = cosine_neighbors(matrix, target, config.k)?;
    let mut nodes = vec![FieldNode { lemma: target.to_string(), sim: 1.0 }];
    let mut edges = Vec::new();
    for n in &neighbors {
        nodes.push(FieldNode { lemma: n.lemma.clone(), sim: n.similarity });
        edges.push(FieldEdge { a: target.to_string(), b: n.lemma.clone(), sim: n.similarity });
    }
    let pos: Vec<usize> = neighbors.iter().map(|n| matrix.position(&n.lemma)).collect::<Result<_, _>>()?;
    for x in 0..neighbors.len() {
        for y in x + 1..neighbors.len() {
            let sim = matrix.cosine(pos[x], pos[y]);
            if sim >= config.edge_threshold {
                edges.push(FieldEdge { a: neighbors[x].lemma.clone(), b: neighbors[y].lemma.clone(), sim });
            }
        }
    }
    Ok(FieldGraph { target: target.to_string(), nodes, edges })
}

fn dot_id(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl FieldGraph {
    /// GraphViz rendering; similarities are printed with three decimals.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {} {{", dot_id(&format!("field_{}", self.target)));
        out.push_str("  node [shape=ellipse];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = if i == 0 { ", shape=doublecircle" } else { "" };
            let _ = writeln!(out, "  {} [label={}, sim=\"{:.3}\"{shape}];", dot_id(&n.lemma), dot_id(&n.lemma), n.sim);
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  {} -- {} [sim=\"{:.3}\", label=\"{:.3}\"];",
                dot_id(&e.a),
                dot_id(&e.b),
                e.sim,
                e.sim
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("field graph serializes") + "\n"
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldOverlap {
    /// Size of the intersection of both k-neighbourhoods.
    pub shared: usize,
    pub b_in_a: bool,
    pub a_in_b: bool,
}

pub fn field_overlap(matrix: &DsmMatrix, a: &str, b: &str, k: usize) -> Result<FieldOverlap, DsmError> {
    let na = cosine_neighbors(matrix, a, k)?;
    let nb = cosine_neighbors(matrix, b, k)?;
    let shared = na.iter().filter(|x| nb.iter().any(|y| y.lemma == x.lemma)).count();
    Ok(FieldOverlap {
        shared,
        b_in_a: na.iter().any(|x| x.lemma == b),
        a_in_b: nb.iter().any(|x| x.lemma == a),
    })
}
