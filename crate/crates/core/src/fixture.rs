//! Synthetic corpus generator with planted, exactly known ground truth.
//!
//! A plan (TOML) lists chronological periods with document counts, planted lemma
//! counts and adjacent lemma pairs, plus distributional clusters whose members share a
//! private context vocabulary. The generator writes a vertical corpus and a manifest
//! recording every planted truth, counted while the corpus is written.
//!
//! Planted events (a lemma, an adjacent pair, a cluster block) are separated by at least
//! `min_gap` filler words, so for any window `w <= min_gap` the only cooccurrences between
//! planted lemmas are the ones inside a single event.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{fold_lemma, CorpusStats, DateSpec, EraBounds};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixturePlan {
    #[serde(default = "defaults::filler_vocabulary")]
    pub filler_vocabulary: usize,
    #[serde(default = "defaults::zipf_exponent")]
    pub zipf_exponent: f64,
    #[serde(default)]
    pub punctuation_rate: f64,
    #[serde(default = "defaults::capitalized_rate")]
    pub capitalized_lemma_rate: f64,
    #[serde(default = "defaults::min_gap")]
    pub min_gap: usize,
    #[serde(default = "defaults::id_prefix")]
    pub id_prefix: String,
    #[serde(default)]
    pub collection: String,
    pub period: Vec<PeriodPlan>,
    #[serde(default)]
    pub cluster: Vec<ClusterPlan>,
}

mod defaults {
    pub fn filler_vocabulary() -> usize {
        300
    }
    pub fn zipf_exponent() -> f64 {
        1.0
    }
    pub fn capitalized_rate() -> f64 {
        0.05
    }
    pub fn min_gap() -> usize {
        12
    }
    pub fn id_prefix() -> String {
        "doc".into()
    }
    pub fn span() -> usize {
        2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodPlan {
    pub name: String,
    pub documents: usize,
    /// Inclusive year range; absent for undated documents.
    #[serde(default)]
    pub years: Option<[i32; 2]>,
    /// Range of filler words per document.
    pub tokens: [usize; 2],
    /// Documents dated by a narrow interval (2 to 60 years).
    #[serde(default)]
    pub interval_documents: usize,
    /// Documents dated by an interval wider than 100 years.
    #[serde(default)]
    pub wide_interval_documents: usize,
    /// Lemma → number of isolated occurrences across the period.
    #[serde(default)]
    pub plant: BTreeMap<String, usize>,
    #[serde(default)]
    pub pairs: Vec<PairPlan>,
}

/// `count` occurrences of `a` immediately followed by `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairPlan {
    pub a: String,
    pub b: String,
    pub count: usize,
}

/// Members placed inside blocks of `span` context words on each side, the context words
/// drawn uniformly from a private vocabulary named `{name}_ctx{i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterPlan {
    pub name: String,
    pub members: Vec<String>,
    pub context_size: usize,
    /// Blocks per member.
    pub occurrences: usize,
    #[serde(default = "defaults::span")]
    pub span: usize,
    /// Restrict blocks to one period; otherwise any document.
    #[serde(default)]
    pub period: Option<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("plan is not valid TOML for a fixture plan: {0}")]
    Syntax(String),
    #[error("invalid plan: {0}")]
    Invalid(String),
}

/// Upper bound on filler words a plan may request, to keep generation bounded.
const MAX_WORDS: usize = 50_000_000;

impl FixturePlan {
    pub fn from_toml_str(text: &str) -> Result<Self, PlanError> {
        let plan: FixturePlan = toml::from_str(text).map_err(|e| PlanError::Syntax(e.message().to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    fn context_lemma(cluster: &str, i: usize) -> String {
        format!("{cluster}_ctx{i}")
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: String| Err(PlanError::Invalid(m));
        let era = EraBounds::default();
        if self.period.is_empty() {
            return bad("at least one [[period]] is required".into());
        }
        if self.filler_vocabulary == 0 || self.filler_vocabulary > 100_000 {
            return bad("filler_vocabulary must be in 1..=100000".into());
        }
        if !(self.zipf_exponent.is_finite() && self.zipf_exponent >= 0.0) {
            return bad("zipf_exponent must be a non-negative number".into());
        }
        for (name, rate) in [("punctuation_rate", self.punctuation_rate), ("capitalized_lemma_rate", self.capitalized_lemma_rate)] {
            if !(0.0..1.0).contains(&rate) {
                return bad(format!("{name} must lie in [0, 1)"));
            }
        }
        if self.min_gap == 0 {
            return bad("min_gap must be at least 1".into());
        }
        if self.id_prefix.is_empty() || self.id_prefix.contains(['"', '&', '<', '>', '\n', '\r', '\t']) {
            return bad("id_prefix must be non-empty plain text".into());
        }
        if self.collection.contains(['"', '&', '<', '>', '\n', '\r', '\t']) {
            return bad("collection must be plain text".into());
        }

        let mut names = BTreeSet::new();
        let mut planted: BTreeSet<String> = BTreeSet::new();
        let mut words = 0usize;
        for p in &self.period {
            if !names.insert(p.name.as_str()) {
                return bad(format!("period {:?} defined twice", p.name));
            }
            if p.documents == 0 {
                return bad(format!("period {:?} has no documents", p.name));
            }
            if p.tokens[0] == 0 || p.tokens[0] > p.tokens[1] {
                return bad(format!("period {:?}: tokens must be [min, max] with 1 <= min <= max", p.name));
            }
            words = words.saturating_add(p.documents.saturating_mul(p.tokens[1]));
            match p.years {
                Some([a, b]) if a > b || !era.contains(a) || !era.contains(b) => {
                    return bad(format!("period {:?}: years must be ordered and within [{}, {}]", p.name, era.min, era.max))
                }
                None if p.interval_documents + p.wide_interval_documents > 0 => {
                    return bad(format!("period {:?}: undated periods cannot have interval documents", p.name))
                }
                _ => {}
            }
            if p.interval_documents.saturating_add(p.wide_interval_documents) > p.documents {
                return bad(format!("period {:?}: more interval documents than documents", p.name));
            }
            for lemma in p.plant.keys().chain(p.pairs.iter().flat_map(|x| [&x.a, &x.b])) {
                check_lemma(lemma)?;
                planted.insert(lemma.clone());
            }
            for pair in &p.pairs {
                if pair.a == pair.b {
                    return bad(format!("pair {:?} pairs a lemma with itself", pair.a));
                }
            }
            let events: usize = p.plant.values().sum::<usize>() + p.pairs.iter().map(|x| x.count).sum::<usize>();
            words = words.saturating_add(events.saturating_mul(self.min_gap + 2));
        }

        let mut clustered: BTreeSet<String> = BTreeSet::new();
        for c in &self.cluster {
            if c.members.is_empty() || c.context_size == 0 || c.occurrences == 0 || c.span == 0 {
                return bad(format!("cluster {:?} needs members, context_size, occurrences and span >= 1", c.name));
            }
            if c.context_size > 10_000 {
                return bad(format!("cluster {:?}: context_size is too large", c.name));
            }
            check_lemma(&c.name)?;
            if let Some(p) = &c.period {
                if !names.contains(p.as_str()) {
                    return bad(format!("cluster {:?} refers to unknown period {p:?}", c.name));
                }
            }
            let ctx = (0..c.context_size).map(|i| Self::context_lemma(&c.name, i));
            for lemma in c.members.iter().cloned().chain(ctx) {
                check_lemma(&lemma)?;
                if planted.contains(&lemma) || !clustered.insert(lemma.clone()) {
                    return bad(format!("lemma {lemma:?} is used by more than one plant or cluster"));
                }
            }
            let blocks = c.members.len().saturating_mul(c.occurrences);
            words = words.saturating_add(blocks.saturating_mul(self.min_gap + 2 * c.span + 1));
        }
        if words > MAX_WORDS {
            return bad(format!("plan asks for more than {MAX_WORDS} words"));
        }
        Ok(())
    }
}

fn check_lemma(lemma: &str) -> Result<(), PlanError> {
    match fold_lemma(lemma) {
        Ok(f) if f == lemma && lemma.chars().all(|c| c.is_alphanumeric() || c == '_') => Ok(()),
        _ => Err(PlanError::Invalid(format!("{lemma:?} must be a lower-case alphanumeric lemma"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCount {
    pub a: String,
    pub b: String,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestDoc {
    pub id: String,
    pub date: DateSpec,
    pub tokens: u64,
    /// Tokens that are not punctuation.
    pub words: u64,
    /// Occurrences of every planted lemma (plants, pair members, cluster members) in this document.
    pub planted: BTreeMap<String, u64>,
    pub pairs: Vec<PairCount>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestCluster {
    pub name: String,
    pub members: Vec<String>,
    pub context: Vec<String>,
}

/// Ground truth of a generated fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub stats: CorpusStats,
    pub punctuation_tokens: u64,
    /// Largest window radius for which the planted cooccurrence truths are exact.
    pub max_exact_window: u64,
    pub lemma_totals: BTreeMap<String, u64>,
    pub lemma_totals_dated: BTreeMap<String, u64>,
    pub documents: Vec<ManifestDoc>,
    pub clusters: Vec<ManifestCluster>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Planted occurrences of any of `lemmas` in the given documents.
    pub fn planted_in<'a>(&self, lemmas: &[&str], docs: impl IntoIterator<Item = &'a str>) -> u64 {
        let wanted: BTreeSet<&str> = docs.into_iter().collect();
        self.documents
            .iter()
            .filter(|d| wanted.contains(d.id.as_str()))
            .flat_map(|d| lemmas.iter().map(move |l| d.planted.get(*l).copied().unwrap_or(0)))
            .sum()
    }

    /// Adjacent-pair events joining a lemma of `left` with one of `right`, either way round.
    pub fn pair_events_in<'a>(&self, left: &[&str], right: &[&str], docs: impl IntoIterator<Item = &'a str>) -> u64 {
        let wanted: BTreeSet<&str> = docs.into_iter().collect();
        self.documents
            .iter()
            .filter(|d| wanted.contains(d.id.as_str()))
            .flat_map(|d| d.pairs.iter())
            .filter(|p| {
                (left.contains(&p.a.as_str()) && right.contains(&p.b.as_str()))
                    || (left.contains(&p.b.as_str()) && right.contains(&p.a.as_str()))
            })
            .map(|p| p.count)
            .sum()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.id.as_str())
    }

    pub fn dated_doc_ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().filter(|d| d.date.is_dated()).map(|d| d.id.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub corpus: String,
    pub manifest: Manifest,
}

enum Event {
    Single(String),
    Pair(String, String),
    Block { member: String, left: Vec<String>, right: Vec<String> },
}

impl Event {
    fn lemmas(&self) -> Vec<&str> {
        match self {
            Event::Single(l) => vec![l],
            Event::Pair(a, b) => vec![a, b],
            Event::Block { member, left, right } => {
                left.iter().map(String::as_str).chain([member.as_str()]).chain(right.iter().map(String::as_str)).collect()
            }
        }
    }
}

struct DocPlan {
    period: usize,
    date: DateSpec,
    events: Vec<Event>,
}

const SYLLABLES: [&str; 12] = ["ca", "ro", "mi", "tu", "pe", "la", "ser", "vi", "do", "nu", "ge", "ri"];
const ENDINGS: [&str; 4] = ["us", "a", "um", "is"];
const SURFACE_ENDINGS: [&str; 5] = ["", "e", "i", "o", "is"];
const PUNCTUATION: [&str; 3] = [",", ".", ";"];

/// Deterministic pseudo-Latin filler word for an index.
fn filler_word(i: usize) -> String {
    let mut s = String::new();
    let mut n = i / ENDINGS.len();
    s.push_str(SYLLABLES[n % SYLLABLES.len()]);
    n /= SYLLABLES.len();
    loop {
        s.push_str(SYLLABLES[n % SYLLABLES.len()]);
        n /= SYLLABLES.len();
        if n == 0 {
            break;
        }
    }
    s.push_str(ENDINGS[i % ENDINGS.len()]);
    s
}

fn random_date(rng: &mut ChaCha8Rng, years: [i32; 2], kind: usize) -> DateSpec {
    let era = EraBounds::default();
    let [y0, y1] = years;
    match kind {
        // narrow interval
        1 if y1 - y0 >= 2 => {
            let span = rng.random_range(2..=(y1 - y0).min(60));
            let lo = rng.random_range(y0..=y1 - span);
            DateSpec::Interval { min: lo, max: lo + span }
        }
        // wide interval, excluded by the default 100-year cap
        2 => {
            let span = rng.random_range(150..=250).min(era.max - era.min);
            let centre = rng.random_range(y0..=y1);
            let lo = (centre - span / 2).clamp(era.min, era.max - span);
            DateSpec::Interval { min: lo, max: lo + span }
        }
        _ => DateSpec::Exact { year: rng.random_range(y0..=y1) },
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn generate(plan: &FixturePlan, seed: u64) -> Result<Fixture, PlanError> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let reserved: BTreeSet<String> = plan
        .period
        .iter()
        .flat_map(|p| p.plant.keys().cloned().chain(p.pairs.iter().flat_map(|x| [x.a.clone(), x.b.clone()])))
        .chain(plan.cluster.iter().flat_map(|c| {
            c.members.iter().cloned().chain((0..c.context_size).map(|i| FixturePlan::context_lemma(&c.name, i)))
        }))
        .collect();
    let mut filler = Vec::with_capacity(plan.filler_vocabulary);
    let mut i = 0;
    while filler.len() < plan.filler_vocabulary {
        let w = filler_word(i);
        if !reserved.contains(&w) {
            filler.push(w);
        }
        i += 1;
    }
    let zipf = Zipf::new(filler.len() as f64, plan.zipf_exponent)
        .map_err(|e| PlanError::Invalid(format!("zipf distribution: {e}")))?;

    let mut docs: Vec<DocPlan> = Vec::new();
    let mut period_docs: Vec<Vec<usize>> = Vec::new();
    for (pi, p) in plan.period.iter().enumerate() {
        let mut mine = Vec::new();
        for k in 0..p.documents {
            let date = match p.years {
                None => DateSpec::Undated,
                Some(years) => {
                    let kind = if k < p.interval_documents {
                        1
                    } else if k < p.interval_documents + p.wide_interval_documents {
                        2
                    } else {
                        0
                    };
                    random_date(&mut rng, years, kind)
                }
            };
            mine.push(docs.len());
            docs.push(DocPlan { period: pi, date, events: Vec::new() });
        }
        for (lemma, &n) in &p.plant {
            for _ in 0..n {
                let d = *mine.choose(&mut rng).expect("period has documents");
                docs[d].events.push(Event::Single(lemma.clone()));
            }
        }
        for pair in &p.pairs {
            for _ in 0..pair.count {
                let d = *mine.choose(&mut rng).expect("period has documents");
                docs[d].events.push(Event::Pair(pair.a.clone(), pair.b.clone()));
            }
        }
        period_docs.push(mine);
    }
    let all_docs: Vec<usize> = (0..docs.len()).collect();
    for c in &plan.cluster {
        let candidates = match &c.period {
            Some(name) => &period_docs[plan.period.iter().position(|p| &p.name == name).expect("validated")],
            None => &all_docs,
        };
        let context: Vec<String> = (0..c.context_size).map(|i| FixturePlan::context_lemma(&c.name, i)).collect();
        for member in &c.members {
            for _ in 0..c.occurrences {
                let mut side = || -> Vec<String> {
                    (0..c.span).map(|_| context.choose(&mut rng).expect("context is non-empty").clone()).collect()
                };
                let left = side();
                let right = side();
                let d = *candidates.choose(&mut rng).expect("period has documents");
                docs[d].events.push(Event::Block { member: member.clone(), left, right });
            }
        }
    }

    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.shuffle(&mut rng);
    let width = docs.len().to_string().len().max(4);

    let mut text = String::new();
    let mut manifest_docs = Vec::with_capacity(docs.len());
    let mut totals: BTreeMap<String, u64> = BTreeMap::new();
    let mut totals_dated: BTreeMap<String, u64> = BTreeMap::new();
    let mut stats = CorpusStats::default();
    let mut punct_total = 0u64;

    for (n, &d) in order.iter().enumerate() {
        let doc = &mut docs[d];
        let period = &plan.period[doc.period];
        let id = format!("{}{:0width$}", plan.id_prefix, n + 1);
        doc.events.shuffle(&mut rng);

        let m = doc.events.len();
        let required = m.saturating_sub(1) * plan.min_gap;
        let filler_n = rng.random_range(period.tokens[0]..=period.tokens[1]).max(required);
        // Bucket 0 leads, bucket m trails, buckets 1..m sit between events on top of min_gap.
        let mut buckets = vec![0usize; m + 1];
        for _ in 0..filler_n - required {
            buckets[rng.random_range(0..=m)] += 1;
        }
        for b in buckets.iter_mut().take(m).skip(1) {
            *b += plan.min_gap;
        }

        let _ = write!(text, "<doc id=\"{id}\"");
        match doc.date {
            DateSpec::Exact { year } => {
                let _ = write!(text, " date=\"{year}\"");
            }
            DateSpec::Interval { min, max } => {
                let _ = write!(text, " date_min=\"{min}\" date_max=\"{max}\"");
            }
            DateSpec::Undated => {}
        }
        if !plan.collection.is_empty() {
            let _ = write!(text, " collection=\"{}\"", plan.collection);
        }
        let _ = writeln!(text, " region=\"{}\">", period.name.replace(['"', '&', '<', '>'], "_"));

        let mut lemmas: Vec<String> = Vec::new();
        let mut n_tokens = 0u64;
        let mut n_punct = 0u64;
        let emit = |text: &mut String, rng: &mut ChaCha8Rng, lemma: &str, pos: Option<&str>| {
            let written = if rng.random_bool(plan.capitalized_lemma_rate) { capitalize(lemma) } else { lemma.to_string() };
            let mut surface = format!("{lemma}{}", SURFACE_ENDINGS.choose(rng).expect("non-empty"));
            if rng.random_bool(0.1) {
                surface = capitalize(&surface);
            }
            let _ = match pos {
                Some(p) => writeln!(text, "{surface}\t{written}\t{p}"),
                None => writeln!(text, "{surface}\t{written}"),
            };
        };
        let fill = |text: &mut String, rng: &mut ChaCha8Rng, k: usize, lemmas: &mut Vec<String>, n_tokens: &mut u64, n_punct: &mut u64| {
            for _ in 0..k {
                let idx = (zipf.sample(rng) as usize).clamp(1, filler.len()) - 1;
                emit(text, rng, &filler[idx], None);
                lemmas.push(filler[idx].clone());
                *n_tokens += 1;
                if rng.random_bool(plan.punctuation_rate) {
                    let p = *PUNCTUATION.choose(rng).expect("non-empty");
                    let _ = writeln!(text, "{p}\t{p}\tPUNCT");
                    *n_tokens += 1;
                    *n_punct += 1;
                }
            }
        };

        let mut planted: BTreeMap<String, u64> = BTreeMap::new();
        let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
        let members: BTreeSet<&str> = plan.cluster.iter().flat_map(|c| c.members.iter().map(String::as_str)).collect();
        for (k, bucket) in buckets.iter().enumerate() {
            fill(&mut text, &mut rng, *bucket, &mut lemmas, &mut n_tokens, &mut n_punct);
            if let Some(ev) = doc.events.get(k) {
                for l in ev.lemmas() {
                    let is_planted = match ev {
                        Event::Block { member, .. } => l == member,
                        _ => true,
                    };
                    if is_planted || members.contains(l) {
                        *planted.entry(l.to_string()).or_insert(0) += 1;
                    }
                    emit(&mut text, &mut rng, l, Some(if is_planted { "NOUN" } else { "X" }));
                    lemmas.push(l.to_string());
                    n_tokens += 1;
                }
                if let Event::Pair(a, b) = ev {
                    *pairs.entry((a.clone(), b.clone())).or_insert(0) += 1;
                }
            }
        }
        text.push_str("</doc>\n");

        let dated = doc.date.is_dated();
        for l in &lemmas {
            *totals.entry(l.clone()).or_insert(0) += 1;
            if dated {
                *totals_dated.entry(l.clone()).or_insert(0) += 1;
            }
        }
        stats.n_documents += 1;
        stats.n_tokens += n_tokens;
        punct_total += n_punct;
        if let (Some(lo), Some(hi)) = (doc.date.year_min(), doc.date.year_max()) {
            stats.n_dated += 1;
            stats.n_dated_tokens += n_tokens;
            stats.year_span = Some(stats.year_span.map_or((lo, hi), |(a, b)| (a.min(lo), b.max(hi))));
        }
        manifest_docs.push(ManifestDoc {
            id,
            date: doc.date,
            tokens: n_tokens,
            words: n_tokens - n_punct,
            planted,
            pairs: pairs.into_iter().map(|((a, b), count)| PairCount { a, b, count }).collect(),
        });
    }

    let clusters = plan
        .cluster
        .iter()
        .map(|c| ManifestCluster {
            name: c.name.clone(),
            members: c.members.clone(),
            context: (0..c.context_size).map(|i| FixturePlan::context_lemma(&c.name, i)).collect(),
        })
        .collect();
    Ok(Fixture {
        corpus: text,
        manifest: Manifest {
            seed,
            stats,
            punctuation_tokens: punct_total,
            max_exact_window: plan.min_gap as u64,
            lemma_totals: totals,
            lemma_totals_dated: totals_dated,
            documents: manifest_docs,
            clusters,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLAN: &str = r#"
        punctuation_rate = 0.1
        [[period]]
        name = "early"
        documents = 6
        years = [900, 950]
        tokens = [20, 40]
        interval_documents = 2
        plant = { horreum = 5 }
        [[period]]
        name = "late"
        documents = 6
        years = [1150, 1200]
        tokens = [20, 40]
        wide_interval_documents = 1
        plant = { horreum = 20 }
        pairs = [{ a = "granarium", b = "frumentum", count = 4 }]
        [[period]]
        name = "undated"
        documents = 2
        tokens = [5, 10]
        [[cluster]]
        name = "twin"
        members = ["granarium1", "granarium2"]
        context_size = 4
        occurrences = 3
    "#;

    #[test]
    fn same_seed_same_bytes() {
        let plan = FixturePlan::from_toml_str(PLAN).unwrap();
        let a = generate(&plan, 7).unwrap();
        let b = generate(&plan, 7).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.manifest, b.manifest);
        assert_ne!(generate(&plan, 8).unwrap().corpus, a.corpus);
    }

    #[test]
    fn manifest_counts_plants() {
        let plan = FixturePlan::from_toml_str(PLAN).unwrap();
        let f = generate(&plan, 1).unwrap();
        let m = &f.manifest;
        assert_eq!(m.lemma_totals["horreum"], 25);
        assert_eq!(m.lemma_totals["granarium"], 4);
        assert_eq!(m.lemma_totals["granarium1"], 3);
        assert_eq!(m.stats.n_documents, 14);
        assert_eq!(m.stats.n_dated, 12);
        assert_eq!(m.planted_in(&["horreum"], m.doc_ids()), 25);
        assert_eq!(m.pair_events_in(&["frumentum"], &["granarium"], m.doc_ids()), 4);
        let tokens: u64 = m.documents.iter().map(|d| d.tokens).sum();
        assert_eq!(tokens, m.stats.n_tokens);
        assert_eq!(f.corpus.matches("<doc ").count(), 14);
    }

    #[test]
    fn filler_words_are_distinct() {
        let words: BTreeSet<String> = (0..2000).map(filler_word).collect();
        assert_eq!(words.len(), 2000);
    }

    #[test]
    fn invalid_plans() {
        for (bad, why) in [
            ("", "no periods"),
            ("[[period]]\nname='a'\ndocuments=0\ntokens=[1,2]", "zero docs"),
            ("[[period]]\nname='a'\ndocuments=1\ntokens=[3,2]", "tokens"),
            ("[[period]]\nname='a'\ndocuments=1\ntokens=[1,2]\nyears=[100,200]", "era"),
            ("[[period]]\nname='a'\ndocuments=1\ntokens=[1,2]\ninterval_documents=1", "undated interval"),
            ("[[period]]\nname='a'\ndocuments=1\ntokens=[1,2]\nplant={ 'Horreum' = 1 }", "case"),
            ("[[period]]\nname='a'\ndocuments=1\ntokens=[1,2]\npairs=[{a='x',b='x',count=1}]", "self pair"),
            ("[[period]]\nname='a'\ndocuments=1\ntokens=[1,2]\n[[cluster]]\nname='c'\nmembers=['x']\ncontext_size=1\noccurrences=1\nperiod='zz'", "period"),
            ("[[period]]\nname='a'\ndocuments=1\ntokens=[1,2]\nplant={x=1}\n[[cluster]]\nname='c'\nmembers=['x']\ncontext_size=1\noccurrences=1", "overlap"),
            ("[[period]]\nname='a'\ndocuments=1000000\ntokens=[1,1000]", "too big"),
            ("bogus = 1\n[[period]]\nname='a'\ndocuments=1\ntokens=[1,2]", "unknown key"),
        ] {
            assert!(FixturePlan::from_toml_str(bad).is_err(), "{why}");
        }
    }
}
