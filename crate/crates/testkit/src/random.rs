use diacorp::{Corpus, DateSpec, Document, Token};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PUNCTUATION: [&str; 3] = [",", ".", ";"];

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_docs: usize,
    pub max_doc_tokens: usize,
    /// Upper bound on tokens in the whole corpus.
    pub max_tokens: usize,
    pub vocabulary: usize,
    pub punctuation_rate: f64,
    pub undated_rate: f64,
    pub interval_rate: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_docs: 40,
            max_doc_tokens: 400,
            max_tokens: 10_000,
            vocabulary: 12,
            punctuation_rate: 0.1,
            undated_rate: 0.15,
            interval_rate: 0.2,
        }
    }
}

impl Shape {
    pub fn all_dated(self) -> Self {
        Shape { undated_rate: 0.0, ..self }
    }
}

pub fn lemma(i: usize) -> String {
    format!("l{i}")
}

fn random_date(rng: &mut ChaCha8Rng, shape: &Shape) -> DateSpec {
    if rng.random_bool(shape.undated_rate) {
        DateSpec::Undated
    } else if rng.random_bool(shape.interval_rate) {
        let min = rng.random_range(800..=1300);
        DateSpec::Interval { min, max: min + rng.random_range(1..=150) }
    } else {
        DateSpec::Exact { year: rng.random_range(800..=1300) }
    }
}

/// A seeded corpus; lemma `l{i}` is drawn with weight 1/(i+1).
pub fn random_corpus(seed: u64, shape: Shape) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..shape.vocabulary).map(|i| 1.0 / (i + 1) as f64).collect();
    let total_weight: f64 = weights.iter().sum();
    let n_docs = rng.random_range(1..=shape.max_docs);
    let mut budget = shape.max_tokens;
    let mut docs = Vec::new();
    for d in 0..n_docs {
        if budget == 0 {
            break;
        }
        let n = rng.random_range(1..=shape.max_doc_tokens.min(budget));
        budget -= n;
        let tokens = (0..n)
            .map(|_| {
                if rng.random_bool(shape.punctuation_rate) {
                    let p = PUNCTUATION[rng.random_range(0..PUNCTUATION.len())];
                    return Token::new(p, p, None).unwrap();
                }
                let mut x = rng.random_range(0.0..total_weight);
                let mut i = 0;
                while i + 1 < weights.len() && x >= weights[i] {
                    x -= weights[i];
                    i += 1;
                }
                let l = lemma(i);
                Token::new(&format!("{l}x"), &l, None).unwrap()
            })
            .collect();
        docs.push(Document { id: format!("d{d:03}"), date: random_date(&mut rng, &shape), collection: String::new(), region: None, tokens });
    }
    Corpus::new(docs).unwrap()
}

/// The corpus with every document appended again under a new id.
pub fn duplicated(corpus: &Corpus) -> Corpus {
    let mut docs = corpus.documents().to_vec();
    docs.extend(corpus.documents().iter().map(|d| Document { id: format!("{}_dup", d.id), ..d.clone() }));
    Corpus::new(docs).unwrap()
}

fn arb_date() -> impl Strategy<Value = DateSpec> {
    prop_oneof![
        1 => Just(DateSpec::Undated),
        4 => (800i32..=1300).prop_map(|year| DateSpec::Exact { year }),
        1 => (800i32..=1300, 1i32..=150).prop_map(|(min, s)| DateSpec::Interval { min, max: min + s }),
    ]
}

fn arb_token(vocabulary: usize) -> impl Strategy<Value = Token> {
    prop_oneof![
        8 => (0..vocabulary, any::<bool>()).prop_map(|(i, cap)| {
            let l = lemma(i);
            let written = if cap { l.to_uppercase() } else { l.clone() };
            Token::new(&format!("{l}x"), &written, None).unwrap()
        }),
        1 => prop::sample::select(PUNCTUATION.to_vec()).prop_map(|p| Token::new(p, p, Some("PUNCT")).unwrap()),
    ]
}

/// Documents with ids `d000…`, each with 1..=max_len tokens.
pub fn arb_documents(max_docs: usize, max_len: usize, vocabulary: usize) -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec((arb_date(), prop::collection::vec(arb_token(vocabulary), 1..=max_len)), 1..=max_docs).prop_map(
        |docs| {
            docs.into_iter()
                .enumerate()
                .map(|(i, (date, tokens))| Document {
                    id: format!("d{i:03}"),
                    date,
                    collection: String::new(),
                    region: None,
                    tokens,
                })
                .collect()
        },
    )
}

pub fn arb_corpus(max_docs: usize, max_len: usize, vocabulary: usize) -> impl Strategy<Value = Corpus> {
    arb_documents(max_docs, max_len, vocabulary).prop_map(|d| Corpus::new(d).unwrap())
}

/// Corpora where every document has an exact date or a narrow interval.
pub fn arb_dated_corpus(max_docs: usize, max_len: usize) -> impl Strategy<Value = Corpus> {
    let date = prop_oneof![
        3 => (800i32..=1300).prop_map(|year| DateSpec::Exact { year }),
        1 => (800i32..=1300, 1i32..=100).prop_map(|(min, s)| DateSpec::Interval { min, max: min + s }),
    ];
    prop::collection::vec((date, 1usize..=max_len), 1..=max_docs).prop_map(|docs| {
        let docs = docs
            .into_iter()
            .enumerate()
            .map(|(i, (date, n))| Document {
                id: format!("d{i:03}"),
                date,
                collection: String::new(),
                region: None,
                tokens: (0..n).map(|k| Token::new("w", &lemma(k % 3), None).unwrap()).collect(),
            })
            .collect();
        Corpus::new(docs).unwrap()
    })
}
