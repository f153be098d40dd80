//! In-memory corpus model: dated documents of lemmatized tokens, lemma groups
//! and the frequency counts that only need the raw token stream.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Inclusive range of years a date may take. Anything outside is rejected at ingest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EraBounds {
    pub min: i32,
    pub max: i32,
}

impl Default for EraBounds {
    fn default() -> Self {
        EraBounds { min: 300, max: 1600 }
    }
}

impl EraBounds {
    pub fn contains(&self, year: i32) -> bool {
        (self.min..=self.max).contains(&year)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DateKind {
    Exact,
    Interval,
    Undated,
}

/// Year-resolution dating of a document.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DateSpec {
    Exact { year: i32 },
    Interval { min: i32, max: i32 },
    Undated,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DateError {
    #[error("year {year} outside era bounds [{min}, {max}]")]
    OutOfEra { year: i32, min: i32, max: i32 },
    #[error("interval start {min} is not before its end {max}")]
    EmptyInterval { min: i32, max: i32 },
}

impl DateSpec {
    pub fn exact(year: i32, era: EraBounds) -> Result<Self, DateError> {
        check_era(year, era)?;
        Ok(DateSpec::Exact { year })
    }

    pub fn interval(min: i32, max: i32, era: EraBounds) -> Result<Self, DateError> {
        check_era(min, era)?;
        check_era(max, era)?;
        if min >= max {
            return Err(DateError::EmptyInterval { min, max });
        }
        Ok(DateSpec::Interval { min, max })
    }

    pub fn kind(&self) -> DateKind {
        match self {
            DateSpec::Exact { .. } => DateKind::Exact,
            DateSpec::Interval { .. } => DateKind::Interval,
            DateSpec::Undated => DateKind::Undated,
        }
    }

    pub fn year_min(&self) -> Option<i32> {
        match *self {
            DateSpec::Exact { year } => Some(year),
            DateSpec::Interval { min, .. } => Some(min),
            DateSpec::Undated => None,
        }
    }

    pub fn year_max(&self) -> Option<i32> {
        match *self {
            DateSpec::Exact { year } => Some(year),
            DateSpec::Interval { max, .. } => Some(max),
            DateSpec::Undated => None,
        }
    }

    pub fn is_dated(&self) -> bool {
        !matches!(self, DateSpec::Undated)
    }
}

fn check_era(year: i32, era: EraBounds) -> Result<(), DateError> {
    if era.contains(year) {
        Ok(())
    } else {
        Err(DateError::OutOfEra { year, min: era.min, max: era.max })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TokenError {
    #[error("lemma is empty")]
    EmptyLemma,
    #[error("lemma {0:?} contains whitespace")]
    WhitespaceInLemma(String),
    #[error("{field} contains a tab or line break")]
    ControlChar { field: &'static str },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: Option<String>,
}

impl Token {
    /// Builds a token, trimming and lower-casing the lemma. The surface form is kept verbatim.
    pub fn new(surface: &str, lemma: &str, pos: Option<&str>) -> Result<Self, TokenError> {
        if surface.contains(['\t', '\n', '\r']) {
            return Err(TokenError::ControlChar { field: "surface" });
        }
        let lemma = fold_lemma(lemma)?;
        let pos = match pos {
            Some(p) if p.contains(['\t', '\n', '\r']) => {
                return Err(TokenError::ControlChar { field: "pos" })
            }
            Some(p) if !p.is_empty() => Some(p.to_string()),
            _ => None,
        };
        Ok(Token { surface: surface.to_string(), lemma, pos })
    }
}

/// Normalizes a lemma the way ingest does: trimmed and lower-cased, no inner whitespace.
pub fn fold_lemma(raw: &str) -> Result<String, TokenError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(TokenError::EmptyLemma);
    }
    if trimmed.chars().any(char::is_whitespace) {
        return Err(TokenError::WhitespaceInLemma(trimmed.to_string()));
    }
    Ok(trimmed.to_lowercase())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub date: DateSpec,
    pub collection: String,
    pub region: Option<String>,
    pub tokens: Vec<Token>,
}

impl Document {
    pub fn is_dated(&self) -> bool {
        self.date.is_dated()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_documents: u64,
    pub n_dated: u64,
    pub n_tokens: u64,
    pub n_dated_tokens: u64,
    /// Earliest and latest year over dated documents.
    pub year_span: Option<(i32, i32)>,
}

impl CorpusStats {
    pub fn compute(documents: &[Document]) -> Self {
        let mut stats = CorpusStats::default();
        for doc in documents {
            let n = doc.tokens.len() as u64;
            stats.n_documents += 1;
            stats.n_tokens += n;
            if let (Some(lo), Some(hi)) = (doc.date.year_min(), doc.date.year_max()) {
                stats.n_dated += 1;
                stats.n_dated_tokens += n;
                stats.year_span = Some(match stats.year_span {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
        }
        stats
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("document {0:?} has no tokens")]
    EmptyDocument(String),
}

/// SHA-256 over the canonical vertical serialization of a corpus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint(#[serde(with = "hex_bytes")] pub [u8; 32]);

impl Fingerprint {
    pub fn of_bytes(bytes: &[u8]) -> Self {
        Fingerprint(Sha256::digest(bytes).into())
    }

    /// First 8 hex digits, used in output file names.
    pub fn short(&self) -> String {
        hex::encode(&self.0[..4])
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", self.short())
    }
}

mod hex_bytes {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let raw = hex::decode(&text).map_err(D::Error::custom)?;
        raw.try_into().map_err(|_| D::Error::custom("fingerprint must be 32 bytes"))
    }
}

/// An immutable collection of documents with precomputed statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    stats: CorpusStats,
    fingerprint: Fingerprint,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
            if doc.tokens.is_empty() {
                return Err(CorpusError::EmptyDocument(doc.id.clone()));
            }
        }
        let stats = CorpusStats::compute(&documents);
        let fingerprint = Fingerprint::of_bytes(crate::vertical::serialize_documents(&documents).as_bytes());
        Ok(Corpus { documents, stats, fingerprint })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn stats(&self) -> &CorpusStats {
        &self.stats
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("lemma group has an empty name")]
    EmptyName,
    #[error("lemma group {0:?} has no members")]
    NoMembers(String),
    #[error("lemma group {group:?} lists {lemma:?} more than once")]
    DuplicateMember { group: String, lemma: String },
    #[error("lemma group {group:?}: {source}")]
    BadMember { group: String, source: TokenError },
    #[error("lemma {lemma:?} belongs to both {first:?} and {second:?}")]
    Overlap { lemma: String, first: String, second: String },
}

/// A named set of lemmas counted as one unit, e.g. spelling variants of one word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LemmaGroup {
    name: String,
    members: BTreeSet<String>,
}

impl LemmaGroup {
    pub fn new<I, S>(name: &str, members: I) -> Result<Self, GroupError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if name.trim().is_empty() {
            return Err(GroupError::EmptyName);
        }
        let mut set = BTreeSet::new();
        for m in members {
            let lemma = fold_lemma(m.as_ref())
                .map_err(|source| GroupError::BadMember { group: name.to_string(), source })?;
            if !set.insert(lemma.clone()) {
                return Err(GroupError::DuplicateMember { group: name.to_string(), lemma });
            }
        }
        if set.is_empty() {
            return Err(GroupError::NoMembers(name.to_string()));
        }
        Ok(LemmaGroup { name: name.to_string(), members: set })
    }

    /// Group containing a single lemma, named after it.
    pub fn single(lemma: &str) -> Result<Self, GroupError> {
        LemmaGroup::new(lemma, [lemma])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn members(&self) -> &BTreeSet<String> {
        &self.members
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.members.contains(lemma)
    }

    pub fn check_disjoint(&self, other: &LemmaGroup) -> Result<(), GroupError> {
        match self.members.intersection(&other.members).next() {
            Some(lemma) => Err(GroupError::Overlap {
                lemma: lemma.clone(),
                first: self.name.clone(),
                second: other.name.clone(),
            }),
            None => Ok(()),
        }
    }
}

/// Checks that no lemma belongs to two of the given groups.
pub fn validate_groups(groups: &[LemmaGroup]) -> Result<(), GroupError> {
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    for g in groups {
        if g.members.is_empty() {
            return Err(GroupError::NoMembers(g.name.clone()));
        }
        for m in &g.members {
            if let Some(first) = owner.insert(m, &g.name) {
                return Err(GroupError::Overlap {
                    lemma: m.clone(),
                    first: first.to_string(),
                    second: g.name.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Occurrences of the group's lemmas over all documents, or dated ones only.
pub fn group_frequency(corpus: &Corpus, group: &LemmaGroup, dated_only: bool) -> u64 {
    corpus
        .documents()
        .iter()
        .filter(|d| !dated_only || d.is_dated())
        .flat_map(|d| d.tokens.iter())
        .filter(|t| group.contains(&t.lemma))
        .count() as u64
}

/// Decides which tokens are invisible to distance counting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipPolicy {
    /// Skip tokens whose lemma is one punctuation character.
    pub single_punctuation: bool,
    /// Additional lemmas to skip.
    pub extra: BTreeSet<String>,
}

impl Default for SkipPolicy {
    fn default() -> Self {
        SkipPolicy { single_punctuation: true, extra: BTreeSet::new() }
    }
}

impl SkipPolicy {
    /// Every token counts as a word.
    pub fn none() -> Self {
        SkipPolicy { single_punctuation: false, extra: BTreeSet::new() }
    }

    pub fn skips(&self, lemma: &str) -> bool {
        if self.single_punctuation {
            let mut chars = lemma.chars();
            if let (Some(c), None) = (chars.next(), chars.next()) {
                if is_punctuation(c) {
                    return true;
                }
            }
        }
        self.extra.contains(lemma)
    }
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»' | '‹' | '›' | '“' | '”' | '„' | '‘' | '’' | '–' | '—' | '…' | '·' | '¶' | '§'
                | '¿' | '¡' | '†'
        )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconRow {
    pub name: String,
    pub all: u64,
    pub dated: u64,
}

/// Per-group mention counts over dated and all documents, with a column total.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconReport {
    pub rows: Vec<LexiconRow>,
}

impl LexiconReport {
    /// Tabulates already-known counts (for instance published figures) under the same shape.
    pub fn from_counts<'a, I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        LexiconReport {
            rows: counts
                .into_iter()
                .map(|(name, n)| LexiconRow { name: name.to_string(), all: n, dated: n })
                .collect(),
        }
    }

    pub fn total_all(&self) -> u64 {
        self.rows.iter().map(|r| r.all).sum()
    }

    pub fn total_dated(&self) -> u64 {
        self.rows.iter().map(|r| r.dated).sum()
    }
}

/// Counts each group over the whole corpus and over dated documents, sorted by total descending.
pub fn lexicon_report(corpus: &Corpus, groups: &[LemmaGroup]) -> LexiconReport {
    let mut rows: Vec<LexiconRow> = groups
        .iter()
        .map(|g| LexiconRow {
            name: g.name().to_string(),
            all: group_frequency(corpus, g, false),
            dated: group_frequency(corpus, g, true),
        })
        .collect();
    rows.sort_by(|a, b| b.all.cmp(&a.all));
    LexiconReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, date: DateSpec, lemmas: &[&str]) -> Document {
        Document {
            id: id.into(),
            date,
            collection: String::new(),
            region: None,
            tokens: lemmas.iter().map(|l| Token::new(l, l, None).unwrap()).collect(),
        }
    }

    #[test]
    fn date_invariants() {
        let era = EraBounds::default();
        assert_eq!(DateSpec::exact(1096, era).unwrap().year_min(), Some(1096));
        assert!(matches!(DateSpec::exact(200, era), Err(DateError::OutOfEra { .. })));
        assert!(matches!(DateSpec::interval(1100, 1100, era), Err(DateError::EmptyInterval { .. })));
        assert!(matches!(DateSpec::interval(1100, 1700, era), Err(DateError::OutOfEra { .. })));
        let iv = DateSpec::interval(1050, 1100, era).unwrap();
        assert_eq!((iv.kind(), iv.year_min(), iv.year_max()), (DateKind::Interval, Some(1050), Some(1100)));
        assert_eq!(DateSpec::Undated.year_min(), None);
    }

    #[test]
    fn token_lemma_rules() {
        let t = Token::new("Horrea", " Horreum ", Some("NOUN")).unwrap();
        assert_eq!(t.lemma, "horreum");
        assert_eq!(t.surface, "Horrea");
        assert_eq!(Token::new("x", "  ", None), Err(TokenError::EmptyLemma));
        assert!(matches!(Token::new("x", "a b", None), Err(TokenError::WhitespaceInLemma(_))));
        assert_eq!(Token::new("", "a", Some("")).unwrap().pos, None);
    }

    #[test]
    fn corpus_rejects_duplicates_and_empty_docs() {
        let d = doc("a", DateSpec::Undated, &["x"]);
        assert_eq!(Corpus::new(vec![d.clone(), d.clone()]), Err(CorpusError::DuplicateId("a".into())));
        let empty = Document { tokens: vec![], ..d };
        assert_eq!(Corpus::new(vec![empty]), Err(CorpusError::EmptyDocument("a".into())));
    }

    #[test]
    fn stats_cover_dated_subset() {
        let era = EraBounds::default();
        let c = Corpus::new(vec![
            doc("a", DateSpec::exact(1096, era).unwrap(), &["x", "y"]),
            doc("b", DateSpec::Undated, &["x"]),
            doc("c", DateSpec::interval(900, 950, era).unwrap(), &["z", "z", "z"]),
        ])
        .unwrap();
        let s = c.stats();
        assert_eq!((s.n_documents, s.n_dated, s.n_tokens, s.n_dated_tokens), (3, 2, 6, 5));
        assert_eq!(s.year_span, Some((900, 1096)));
        assert_eq!(*s, CorpusStats::compute(c.documents()));
    }

    #[test]
    fn validate_groups_examples() {
        let storage = LemmaGroup::new("storage", ["horreum"]).unwrap();
        let grain = LemmaGroup::new("grain", ["frumentum"]).unwrap();
        assert_eq!(validate_groups(&[storage, grain]), Ok(()));

        let a = LemmaGroup::new("a", ["x", "y"]).unwrap();
        let b = LemmaGroup::new("b", ["y"]).unwrap();
        assert_eq!(
            validate_groups(&[a, b]),
            Err(GroupError::Overlap { lemma: "y".into(), first: "a".into(), second: "b".into() })
        );
    }

    #[test]
    fn grain_groups_are_disjoint() {
        let groups = [
            LemmaGroup::new("siligo/sigale", ["siligo", "sigale"]).unwrap(),
            LemmaGroup::new("hordeum", ["hordeum"]).unwrap(),
            LemmaGroup::new("triticum/cibaria", ["triticum", "cibaria"]).unwrap(),
            LemmaGroup::new("spelta", ["spelta"]).unwrap(),
            LemmaGroup::new("avena/civata", ["avena", "civata"]).unwrap(),
            LemmaGroup::new("frumentum", ["frumentum"]).unwrap(),
            LemmaGroup::new("milium/panicum", ["milium", "panicum"]).unwrap(),
            LemmaGroup::new("bladum", ["bladum"]).unwrap(),
        ];
        assert_eq!(validate_groups(&groups), Ok(()));
    }

    #[test]
    fn group_construction_errors() {
        assert_eq!(LemmaGroup::new(" ", ["a"]), Err(GroupError::EmptyName));
        assert_eq!(LemmaGroup::new("g", Vec::<String>::new()), Err(GroupError::NoMembers("g".into())));
        assert!(matches!(LemmaGroup::new("g", ["Avena", "avena"]), Err(GroupError::DuplicateMember { .. })));
    }

    #[test]
    fn group_frequency_counts() {
        let era = EraBounds::default();
        let c = Corpus::new(vec![
            doc("a", DateSpec::exact(1000, era).unwrap(), &["avena", "x", "civata"]),
            doc("b", DateSpec::Undated, &["avena"]),
        ])
        .unwrap();
        let g = LemmaGroup::new("oats", ["avena", "civata"]).unwrap();
        assert_eq!(group_frequency(&c, &g, false), 3);
        assert_eq!(group_frequency(&c, &g, true), 2);
        assert_eq!(group_frequency(&c, &LemmaGroup::single("zzz").unwrap(), false), 0);
    }

    #[test]
    fn skip_policy_defaults() {
        let p = SkipPolicy::default();
        assert!(p.skips(","));
        assert!(p.skips("»"));
        assert!(!p.skips("et"));
        assert!(!p.skips(",,"));
        assert!(!SkipPolicy::none().skips("."));
    }

    #[test]
    fn lexicon_totals() {
        let r = LexiconReport::from_counts([("a", 2), ("b", 3)]);
        assert_eq!(r.total_all(), 5);
    }
}
