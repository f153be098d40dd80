//! Working years for dated documents and equal-mass chronological binning.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, DateSpec, Document, Fingerprint};

/// The token mass per bin used when none is configured: one million words.
pub const DEFAULT_TARGET_MASS: u64 = 1_000_000;
pub const DEFAULT_MAX_SPAN: i32 = 100;

/// Where an interval-dated document is placed on the time axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatePolicy {
    #[default]
    Midpoint,
    Start,
    End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearConfig {
    pub policy: DatePolicy,
    /// Interval-dated documents wider than this many years are left out of chronological analyses.
    pub max_span: i32,
}

impl Default for YearConfig {
    fn default() -> Self {
        YearConfig { policy: DatePolicy::Midpoint, max_span: DEFAULT_MAX_SPAN }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearAssignment {
    pub doc_id: String,
    pub year: i32,
    pub span_width: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Placement {
    Assigned(YearAssignment),
    Excluded { doc_id: String, span_width: i32 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChronoError {
    #[error("document {0:?} is undated")]
    Undated(String),
    #[error("no dated documents left to bin")]
    EmptyDatedCorpus,
    #[error("target mass must be at least 1")]
    ZeroTargetMass,
}

pub fn assign_year(doc: &Document, cfg: &YearConfig) -> Result<Placement, ChronoError> {
    match doc.date {
        DateSpec::Undated => Err(ChronoError::Undated(doc.id.clone())),
        DateSpec::Exact { year } => {
            Ok(Placement::Assigned(YearAssignment { doc_id: doc.id.clone(), year, span_width: 0 }))
        }
        DateSpec::Interval { min, max } => {
            let span_width = max - min;
            if span_width > cfg.max_span {
                return Ok(Placement::Excluded { doc_id: doc.id.clone(), span_width });
            }
            let year = match cfg.policy {
                DatePolicy::Midpoint => (min + max).div_euclid(2),
                DatePolicy::Start => min,
                DatePolicy::End => max,
            };
            Ok(Placement::Assigned(YearAssignment { doc_id: doc.id.clone(), year, span_width }))
        }
    }
}

/// Working year of a document, or `None` when undated or excluded.
pub fn working_year(doc: &Document, cfg: &YearConfig) -> Option<i32> {
    match assign_year(doc, cfg) {
        Ok(Placement::Assigned(a)) => Some(a.year),
        _ => None,
    }
}

/// Ids of documents whose working year falls in `[from, to]`.
pub fn documents_in_years<'c>(corpus: &'c Corpus, cfg: &YearConfig, from: i32, to: i32) -> Vec<&'c str> {
    corpus
        .documents()
        .iter()
        .filter(|d| working_year(d, cfg).is_some_and(|y| (from..=to).contains(&y)))
        .map(|d| d.id.as_str())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChronoBin {
    pub index: usize,
    pub year_start: i32,
    pub year_end: i32,
    pub token_mass: u64,
    pub doc_ids: Vec<String>,
    /// Final bin holding less than half the target mass.
    pub remainder: bool,
}

impl ChronoBin {
    pub fn label(&self) -> String {
        bin_label(self)
    }

    pub fn midpoint(&self) -> f64 {
        (self.year_start as f64 + self.year_end as f64) / 2.0
    }
}

/// Axis label of a bin, `"{start}–{end}"`.
pub fn bin_label(bin: &ChronoBin) -> String {
    format!("{}–{}", bin.year_start, bin.year_end)
}

/// Result of binning: the bins plus everything needed to audit them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slicing {
    pub corpus_fingerprint: Fingerprint,
    pub target_mass: u64,
    pub year_config: YearConfig,
    pub bins: Vec<ChronoBin>,
    /// Assignments in binning order, i.e. sorted by (year, doc_id).
    pub assignments: Vec<YearAssignment>,
    /// Interval-dated documents left out for being too wide.
    pub excluded: Vec<String>,
}

impl Slicing {
    /// Bin index of every document of `corpus` (in corpus order); `None` for unbinned documents.
    pub fn bin_of_documents(&self, corpus: &Corpus) -> Vec<Option<usize>> {
        let mut by_id = std::collections::HashMap::new();
        for bin in &self.bins {
            for id in &bin.doc_ids {
                by_id.insert(id.as_str(), bin.index);
            }
        }
        corpus.documents().iter().map(|d| by_id.get(d.id.as_str()).copied()).collect()
    }

    /// Bin table as CSV: index, year_start, year_end, midpoint, token_mass, n_docs.
    pub fn to_csv(&self) -> String {
        crate::report::emit_csv(self)
    }
}

/// Splits the dated corpus into contiguous runs of documents, sorted by (year, id),
/// each closing as soon as it holds at least `target_mass` tokens.
pub fn slice_equal_mass(corpus: &Corpus, target_mass: u64, cfg: &YearConfig) -> Result<Slicing, ChronoError> {
    if target_mass == 0 {
        return Err(ChronoError::ZeroTargetMass);
    }
    let mut placed: Vec<(YearAssignment, u64)> = Vec::new();
    let mut excluded = Vec::new();
    for doc in corpus.documents().iter().filter(|d| d.is_dated()) {
        match assign_year(doc, cfg)? {
            Placement::Assigned(a) => placed.push((a, doc.tokens.len() as u64)),
            Placement::Excluded { doc_id, .. } => excluded.push(doc_id),
        }
    }
    if placed.is_empty() {
        return Err(ChronoError::EmptyDatedCorpus);
    }
    placed.sort_by(|(a, _), (b, _)| a.year.cmp(&b.year).then_with(|| a.doc_id.cmp(&b.doc_id)));

    let mut bins: Vec<ChronoBin> = Vec::new();
    let mut current: Option<ChronoBin> = None;
    for (a, mass) in &placed {
        let bin = current.get_or_insert_with(|| ChronoBin {
            index: bins.len(),
            year_start: a.year,
            year_end: a.year,
            token_mass: 0,
            doc_ids: Vec::new(),
            remainder: false,
        });
        bin.year_end = a.year;
        bin.token_mass += mass;
        bin.doc_ids.push(a.doc_id.clone());
        if bin.token_mass >= target_mass {
            bins.extend(current.take());
        }
    }
    if let Some(mut last) = current {
        last.remainder = last.token_mass.saturating_mul(2) < target_mass;
        bins.push(last);
    }

    Ok(Slicing {
        corpus_fingerprint: corpus.fingerprint(),
        target_mass,
        year_config: *cfg,
        bins,
        assignments: placed.into_iter().map(|(a, _)| a).collect(),
        excluded,
    })
}
