use diacorp::colloc::dice_score;
use diacorp::{Corpus, DateSpec, Document, Fraction, LemmaGroup, PositionalIndex, Token};
use diacorp_testkit::checks;
use diacorp_testkit::random::{arb_corpus, lemma, random_corpus, Shape};
use proptest::prelude::*;

fn g(members: &[&str]) -> LemmaGroup {
    LemmaGroup::new("g", members.iter().copied()).unwrap()
}

fn doc(id: &str, lemmas: &[&str]) -> Document {
    Document {
        id: id.into(),
        date: DateSpec::Exact { year: 1000 },
        collection: String::new(),
        region: None,
        tokens: lemmas.iter().map(|l| Token::new(l, l, None).unwrap()).collect(),
    }
}

fn check_properties(corpus: &Corpus, a: &LemmaGroup, b: &LemmaGroup) {
    checks::dice_properties(corpus, a, b).unwrap();
}

#[test]
fn seeded_fixtures() {
    for seed in 0..50 {
        let corpus = random_corpus(seed, Shape::default());
        check_properties(&corpus, &g(&["l0"]), &g(&["l1", "l4"]));
        check_properties(&corpus, &g(&["l2", "l6"]), &g(&["l3"]));
    }
}

#[test]
fn adjacent_pairs_score_one() {
    let docs = (0..5).map(|i| doc(&format!("d{i}"), &["x", "y", "filler", "filler", "filler", "filler", "filler", "filler", "x", "y"])).collect();
    let corpus = Corpus::new(docs).unwrap();
    let index = PositionalIndex::build(&corpus);
    for w in 1..=10 {
        assert_eq!(dice_score(&index, &g(&["x"]), &g(&["y"]), w, &index.subset_all()).unwrap(), Fraction::new(1, 1));
    }
}

#[test]
fn disjoint_documents_score_zero() {
    let corpus = Corpus::new(vec![doc("a", &["x", "x", "z"]), doc("b", &["y", "z", "y"])]).unwrap();
    let index = PositionalIndex::build(&corpus);
    for w in 1..=10 {
        assert_eq!(dice_score(&index, &g(&["x"]), &g(&["y"]), w, &index.subset_all()).unwrap(), Fraction::ZERO);
    }
}

#[test]
fn distance_is_counted_in_words() {
    let corpus = Corpus::new(vec![doc("a", &["x", ",", ".", ";", "y"])]).unwrap();
    let index = PositionalIndex::build(&corpus);
    assert_eq!(dice_score(&index, &g(&["x"]), &g(&["y"]), 1, &index.subset_all()).unwrap(), Fraction::new(1, 1));
}

proptest! {
    #[test]
    fn properties_hold(corpus in arb_corpus(6, 80, 5)) {
        check_properties(&corpus, &g(&[&lemma(0)]), &g(&[&lemma(1), &lemma(3)]));
    }
}
