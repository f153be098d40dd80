use diacorp::dsm::{
    cosine_neighbors, dsm_build, field_overlap, ppmi_weight, semantic_field, DsmConfig, SparseMatrix, Weighting,
};
use diacorp::fixture::{generate, FixturePlan};
use diacorp::vertical::{parse_vertical, ParseOptions};
use diacorp::{Corpus, PositionalIndex};
use diacorp_testkit::random::{random_corpus, Shape};
use diacorp_testkit::{checks, oracle};

const TWIN_PLAN: &str = include_str!("../../../fixtures/twin_plan.toml");

fn small_config() -> DsmConfig {
    DsmConfig { min_freq: 3, ..DsmConfig::default() }
}

#[test]
fn self_similarity_and_symmetry() {
    for seed in 0..20 {
        let corpus = random_corpus(seed, Shape::default());
        let index = PositionalIndex::build(&corpus);
        let Ok(m) = dsm_build(&index, &index.subset_all(), &small_config()) else { continue };
        checks::dsm_self_similarity(&m, 1e-9).unwrap();
    }
}

#[test]
fn weights_match_dense_reference() {
    for seed in 0..20 {
        let corpus = random_corpus(seed, Shape::default());
        let index = PositionalIndex::build(&corpus);
        let Ok(m) = dsm_build(&index, &index.subset_all(), &small_config()) else { continue };
        let n = m.dim();
        let mut dense = vec![vec![0u64; n]; n];
        for (i, j, c) in m.counts.triplets() {
            dense[i][j] = c;
        }
        let reference = oracle::dense_ppmi(&dense);
        for i in 0..n {
            for j in 0..n {
                let got = m.weights.get(i, j).unwrap_or(0.0);
                assert!((got - reference[i][j]).abs() <= 1e-12, "({i},{j}) {got} vs {}", reference[i][j]);
            }
        }
        let target = &m.vocabulary[0];
        let dense_w: Vec<Vec<f64>> = reference;
        for nb in cosine_neighbors(&m, target, 5).unwrap() {
            let j = m.position(&nb.lemma).unwrap();
            assert!((nb.similarity - oracle::dense_cosine(&dense_w[0], &dense_w[j])).abs() <= 1e-12);
        }
    }
}

#[test]
fn independence_gives_zero_ppmi() {
    // c_ij = r_i r_j / N for every cell
    let counts = SparseMatrix::from_dense(&[vec![1, 2, 3], vec![2, 4, 6], vec![3, 6, 9]]);
    let w = ppmi_weight(&counts).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!(w.get(i, j).unwrap_or(0.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn duplicating_the_corpus_leaves_weights_and_rankings() {
    let built = (0..10).filter(|&seed| checks::dsm_duplication(&random_corpus(seed, Shape::default()), 2, 1e-9).unwrap()).count();
    assert!(built > 0);
}

#[test]
fn raising_min_freq_never_adds_vocabulary() {
    let corpus = random_corpus(3, Shape { vocabulary: 30, ..Shape::default() });
    let index = PositionalIndex::build(&corpus);
    let mut previous: Option<Vec<String>> = None;
    for min_freq in [1, 2, 5, 10, 50, 100] {
        let cfg = DsmConfig { min_freq, ..DsmConfig::default() };
        let v = dsm_build(&index, &index.subset_all(), &cfg).map(|m| m.vocabulary).unwrap_or_default();
        if let Some(p) = &previous {
            assert!(v.iter().all(|l| p.contains(l)));
        }
        previous = Some(v);
    }
}

#[test]
fn builds_are_deterministic() {
    let corpus = random_corpus(11, Shape::default());
    let index = PositionalIndex::build(&corpus);
    let a = dsm_build(&index, &index.subset_all(), &small_config()).unwrap();
    let b = dsm_build(&index, &index.subset_all(), &small_config()).unwrap();
    assert_eq!(a.vocabulary, b.vocabulary);
    assert_eq!(a.weights_csv(), b.weights_csv());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| dsm_build(&index, &index.subset_all(), &small_config()).unwrap());
    assert_eq!(a.weights_csv(), c.weights_csv());
    let t = &a.vocabulary[0];
    assert_eq!(cosine_neighbors(&a, t, 5).unwrap(), cosine_neighbors(&c, t, 5).unwrap());
}

fn twin_corpus(seed: u64) -> Corpus {
    let plan = FixturePlan::from_toml_str(TWIN_PLAN).unwrap();
    let fixture = generate(&plan, seed).unwrap();
    parse_vertical(&fixture.corpus, &ParseOptions::default()).unwrap().corpus
}

#[test]
fn planted_twin_is_the_nearest_neighbour() {
    let mut misses = Vec::new();
    for seed in 0..100 {
        let corpus = twin_corpus(seed);
        let index = PositionalIndex::build(&corpus);
        let m = dsm_build(&index, &index.subset_all(), &DsmConfig::default()).unwrap();
        let first = cosine_neighbors(&m, "geminus", 1).unwrap();
        if first[0].lemma != "gemella" {
            misses.push((seed, first[0].clone()));
        }
    }
    assert!(misses.is_empty(), "{misses:?}");
}

#[test]
fn fields_of_separate_clusters_do_not_overlap() {
    let corpus = twin_corpus(1);
    let index = PositionalIndex::build(&corpus);
    let m = dsm_build(&index, &index.subset_all(), &DsmConfig::default()).unwrap();
    let o = field_overlap(&m, "geminus", "alter", 3).unwrap();
    assert_eq!(o.shared, 0);
    assert!(!o.a_in_b && !o.b_in_a);
    let twins = field_overlap(&m, "geminus", "gemella", 3).unwrap();
    assert!(twins.a_in_b && twins.b_in_a);
    assert_eq!(field_overlap(&m, "geminus", "geminus", 5).unwrap().shared, 5);

    let cfg = DsmConfig { k: 30, ..DsmConfig::default() };
    let g = semantic_field(&m, "geminus", &cfg).unwrap();
    assert_eq!(g.nodes.len(), 31);
    let ld = dsm_build(&index, &index.subset_all(), &DsmConfig { weighting: Weighting::LogDice, ..cfg }).unwrap();
    assert!(ld.similarity("geminus", "gemella").unwrap() > ld.similarity("geminus", "alter").unwrap());
}
