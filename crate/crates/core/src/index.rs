//! Positional inverted index over lemmas.
//!
//! Positions count words only: tokens rejected by the [`SkipPolicy`] are left out of
//! the numbering, so a window of ±w spans w words on each side regardless of
//! intervening punctuation.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chrono::{working_year, ChronoBin, YearConfig};
use crate::corpus::{Corpus, Document, LemmaGroup, SkipPolicy};

pub type LemmaId = u32;

/// One occurrence: document ordinal in corpus order and word position inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Posting {
    pub doc: u32,
    pub pos: u32,
}

#[derive(Debug)]
pub struct PositionalIndex<'c> {
    corpus: &'c Corpus,
    skip: SkipPolicy,
    lemmas: Vec<String>,
    lookup: HashMap<String, LemmaId>,
    postings: Vec<Vec<Posting>>,
    /// Per document, the lemma id at each word position.
    streams: Vec<Vec<LemmaId>>,
    /// Per document, the token index of each word position.
    offsets: Vec<Vec<u32>>,
    doc_lookup: HashMap<&'c str, u32>,
}

impl<'c> PositionalIndex<'c> {
    pub fn build(corpus: &'c Corpus) -> Self {
        Self::build_with(corpus, SkipPolicy::default())
    }

    pub fn build_with(corpus: &'c Corpus, skip: SkipPolicy) -> Self {
        let filtered: Vec<(Vec<&str>, Vec<u32>)> = corpus
            .documents()
            .par_iter()
            .map(|doc| words_of(doc, &skip))
            .collect();

        let mut lemmas: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, LemmaId> = HashMap::new();
        let mut postings: Vec<Vec<Posting>> = Vec::new();
        let mut streams = Vec::with_capacity(filtered.len());
        let mut offsets = Vec::with_capacity(filtered.len());
        for (doc, (words, offs)) in filtered.into_iter().enumerate() {
            let mut stream = Vec::with_capacity(words.len());
            for (pos, lemma) in words.into_iter().enumerate() {
                let id = match lookup.get(lemma) {
                    Some(&id) => id,
                    None => {
                        let id = lemmas.len() as LemmaId;
                        lemmas.push(lemma.to_string());
                        lookup.insert(lemma.to_string(), id);
                        postings.push(Vec::new());
                        id
                    }
                };
                postings[id as usize].push(Posting { doc: doc as u32, pos: pos as u32 });
                stream.push(id);
            }
            streams.push(stream);
            offsets.push(offs);
        }
        let doc_lookup = corpus
            .documents()
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id.as_str(), i as u32))
            .collect();
        PositionalIndex { corpus, skip, lemmas, lookup, postings, streams, offsets, doc_lookup }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn skip_policy(&self) -> &SkipPolicy {
        &self.skip
    }

    pub fn lemma_id(&self, lemma: &str) -> Option<LemmaId> {
        self.lookup.get(lemma).copied()
    }

    pub fn lemma(&self, id: LemmaId) -> &str {
        &self.lemmas[id as usize]
    }

    /// Number of distinct indexed lemmas.
    pub fn n_lemmas(&self) -> usize {
        self.lemmas.len()
    }

    pub fn postings(&self, lemma: &str) -> &[Posting] {
        self.lemma_id(lemma).map_or(&[], |id| &self.postings[id as usize])
    }

    pub fn frequency(&self, lemma: &str) -> u64 {
        self.postings(lemma).len() as u64
    }

    /// (lemma, frequency) for every indexed lemma, in first-occurrence order.
    pub fn frequencies(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.lemmas.iter().zip(&self.postings).map(|(l, p)| (l.as_str(), p.len() as u64))
    }

    /// Total number of indexed (non-skipped) tokens.
    pub fn n_indexed(&self) -> u64 {
        self.streams.iter().map(|s| s.len() as u64).sum()
    }

    pub fn n_documents(&self) -> usize {
        self.streams.len()
    }

    pub fn stream(&self, doc: u32) -> &[LemmaId] {
        &self.streams[doc as usize]
    }

    /// Token index (into `Document::tokens`) of a word position.
    pub fn token_index(&self, doc: u32, pos: u32) -> usize {
        self.offsets[doc as usize][pos as usize] as usize
    }

    pub fn doc_ordinal(&self, id: &str) -> Option<u32> {
        self.doc_lookup.get(id).copied()
    }

    pub fn document(&self, doc: u32) -> &'c Document {
        &self.corpus.documents()[doc as usize]
    }

    /// Merged postings of all group members, sorted in corpus order.
    pub fn group_postings(&self, group: &LemmaGroup) -> Vec<Posting> {
        let mut out: Vec<Posting> = group.members().iter().flat_map(|m| self.postings(m).iter().copied()).collect();
        out.sort_unstable();
        out
    }

    pub fn subset_all(&self) -> DocSubset {
        DocSubset::full(self.n_documents())
    }

    pub fn subset_dated(&self) -> DocSubset {
        DocSubset::from_mask(self.corpus.documents().iter().map(Document::is_dated).collect())
    }

    pub fn subset_of_ids<'a, I: IntoIterator<Item = &'a str>>(&self, ids: I) -> DocSubset {
        let mut mask = vec![false; self.n_documents()];
        for id in ids {
            if let Some(d) = self.doc_ordinal(id) {
                mask[d as usize] = true;
            }
        }
        DocSubset::from_mask(mask)
    }

    pub fn subset_of_bin(&self, bin: &ChronoBin) -> DocSubset {
        self.subset_of_ids(bin.doc_ids.iter().map(String::as_str))
    }

    /// Documents whose working year lies in `[from, to]`.
    pub fn subset_of_years(&self, from: i32, to: i32, cfg: &YearConfig) -> DocSubset {
        DocSubset::from_mask(
            self.corpus
                .documents()
                .iter()
                .map(|d| working_year(d, cfg).is_some_and(|y| (from..=to).contains(&y)))
                .collect(),
        )
    }
}

fn words_of<'d>(doc: &'d Document, skip: &SkipPolicy) -> (Vec<&'d str>, Vec<u32>) {
    doc.tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !skip.skips(&t.lemma))
        .map(|(i, t)| (t.lemma.as_str(), i as u32))
        .unzip()
}

/// A set of documents, addressed by ordinal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocSubset {
    mask: Vec<bool>,
}

impl DocSubset {
    pub fn full(n: usize) -> Self {
        DocSubset { mask: vec![true; n] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        DocSubset { mask }
    }

    pub fn contains(&self, doc: u32) -> bool {
        self.mask.get(doc as usize).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ordinals(&self) -> impl Iterator<Item = u32> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{DateSpec, Token};

    fn doc(id: &str, lemmas: &[&str]) -> Document {
        Document {
            id: id.into(),
            date: DateSpec::Undated,
            collection: String::new(),
            region: None,
            tokens: lemmas.iter().map(|l| Token::new(l, l, None).unwrap()).collect(),
        }
    }

    #[test]
    fn empty_corpus_gives_empty_index() {
        let c = Corpus::new(vec![]).unwrap();
        let idx = PositionalIndex::build(&c);
        assert_eq!((idx.n_lemmas(), idx.n_indexed()), (0, 0));
    }

    #[test]
    fn punctuation_is_not_numbered() {
        let c = Corpus::new(vec![doc("a", &["x", ",", "y", "x"]), doc("b", &["y", "."])]).unwrap();
        let idx = PositionalIndex::build(&c);
        assert_eq!(idx.postings("x"), [Posting { doc: 0, pos: 0 }, Posting { doc: 0, pos: 2 }]);
        assert_eq!(idx.postings("y"), [Posting { doc: 0, pos: 1 }, Posting { doc: 1, pos: 0 }]);
        assert_eq!(idx.frequency(","), 0);
        assert_eq!(idx.token_index(0, 1), 2);
        assert_eq!(idx.n_indexed(), 4);
        let total: u64 = idx.frequencies().map(|(_, f)| f).sum();
        assert_eq!(total, idx.n_indexed());

        let all = PositionalIndex::build_with(&c, SkipPolicy::none());
        assert_eq!(all.n_indexed(), 6);
    }

    #[test]
    fn group_postings_are_merged_in_corpus_order() {
        let c = Corpus::new(vec![doc("a", &["avena", "x", "civata"]), doc("b", &["civata", "avena"])]).unwrap();
        let idx = PositionalIndex::build(&c);
        let g = LemmaGroup::new("oats", ["avena", "civata"]).unwrap();
        let p: Vec<_> = idx.group_postings(&g).iter().map(|p| (p.doc, p.pos)).collect();
        assert_eq!(p, [(0, 0), (0, 2), (1, 0), (1, 1)]);
    }

    #[test]
    fn subsets() {
        let c = Corpus::new(vec![doc("a", &["x"]), doc("b", &["x"])]).unwrap();
        let idx = PositionalIndex::build(&c);
        let s = idx.subset_of_ids(["b", "missing"]);
        assert_eq!(s.ordinals().collect::<Vec<_>>(), [1]);
        assert!(idx.subset_dated().is_empty());
        assert_eq!(idx.subset_all().len(), 2);
    }
}
