use diacorp::{slice_equal_mass, Corpus, YearConfig};
use diacorp_testkit::checks::binning_invariants as check_invariants;
use diacorp_testkit::random::{arb_dated_corpus, random_corpus, Shape};
use proptest::prelude::*;

#[test]
fn hundred_seeded_dated_corpora() {
    for seed in 0..100u64 {
        let corpus = random_corpus(seed, Shape::default().all_dated());
        let target = 100 + (seed * 53) % 2000;
        check_invariants(&corpus, target, &YearConfig::default()).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}

#[test]
fn shuffled_input_gives_same_bins() {
    let corpus = random_corpus(5, Shape::default().all_dated());
    let mut docs = corpus.documents().to_vec();
    docs.reverse();
    let reversed = Corpus::new(docs).unwrap();
    let a = slice_equal_mass(&corpus, 500, &YearConfig::default()).unwrap();
    let b = slice_equal_mass(&reversed, 500, &YearConfig::default()).unwrap();
    assert_eq!(a.bins, b.bins);
}

proptest! {
    #[test]
    fn invariants_hold(corpus in arb_dated_corpus(30, 50), target in 1u64..300) {
        prop_assert_eq!(check_invariants(&corpus, target, &YearConfig::default()), Ok(()));
    }

    #[test]
    fn invariants_hold_with_other_policies(corpus in arb_dated_corpus(20, 30), target in 1u64..100, start in any::<bool>()) {
        let policy = if start { diacorp::DatePolicy::Start } else { diacorp::DatePolicy::End };
        let cfg = YearConfig { policy, max_span: 50 };
        // a corpus whose documents are all wider than 50 years has nothing to slice
        let r = check_invariants(&corpus, target, &cfg);
        prop_assert!(r.is_ok() || corpus.documents().iter().all(|d| d.date.year_max().unwrap() - d.date.year_min().unwrap() > 50));
    }
}
