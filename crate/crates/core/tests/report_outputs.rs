use std::path::PathBuf;

use diacorp::colloc::{association_table, dice_series, CoocRow, DicePoint, Scope};
use diacorp::dsm::{dsm_build, semantic_field, DsmConfig, FieldGraph};
use diacorp::fixture::{generate, FixturePlan};
use diacorp::report::{emit_csv, emit_field_svg, emit_timeline_svg, Series, TimelinePlotSpec, YKind};
use diacorp::vertical::{parse_vertical, ParseOptions};
use diacorp::{slice_equal_mass, Corpus, Fraction, LemmaGroup, PositionalIndex, YearConfig};

const STORAGE: &str = include_str!("../../../fixtures/storage_plan.toml");

/// Compares against a committed file; `UPDATE_GOLDEN=1` rewrites it instead.
fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "{name} differs from the golden file");
}

fn storage_corpus() -> Corpus {
    let f = generate(&FixturePlan::from_toml_str(STORAGE).unwrap(), 7).unwrap();
    parse_vertical(&f.corpus, &ParseOptions::default()).unwrap().corpus
}

fn g(name: &str, members: &[&str]) -> LemmaGroup {
    LemmaGroup::new(name, members.iter().copied()).unwrap()
}

fn field_graph(corpus: &Corpus) -> FieldGraph {
    let index = PositionalIndex::build(corpus);
    let cfg = DsmConfig { k: 10, ..DsmConfig::default() };
    let m = dsm_build(&index, &index.subset_all(), &cfg).unwrap();
    semantic_field(&m, "spicarium", &cfg).unwrap()
}

#[test]
fn field_outputs_match_golden_files() {
    let corpus = storage_corpus();
    let graph = field_graph(&corpus);
    let svg = emit_field_svg(&graph).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("text")).count(), 11);
    golden("field_spicarium.svg", &svg);
    golden("field_spicarium.dot", &graph.to_dot());
    assert_eq!(field_graph(&corpus), graph);
}

#[test]
fn dice_timeline_matches_golden_file() {
    let corpus = storage_corpus();
    let index = PositionalIndex::build(&corpus);
    let slicing = slice_equal_mass(&corpus, 6000, &YearConfig::default()).unwrap();
    let points = dice_series(&index, &slicing, &g("storage", &["grangia", "granarium"]), &g("grain", &["frumentum", "bladum"]), 5).unwrap();
    let spec = TimelinePlotSpec {
        title: "storage & grain".into(),
        y_kind: YKind::Dice,
        series: vec![Series {
            name: "dice".into(),
            points: points.iter().map(|p| (slicing.bins[p.bin_index].midpoint(), p.dice.to_f64())).collect(),
        }],
        x_range: None,
        smoothing: None,
    };
    let svg = emit_timeline_svg(&spec).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polyline")).count(), 1);
    golden("dice_storage_grain.svg", &svg);
    golden("dice_storage_grain.csv", &emit_csv(points.as_slice()));
}

#[test]
fn csv_and_json_mirrors_agree() {
    let corpus = storage_corpus();
    let index = PositionalIndex::build(&corpus);
    let targets = ["horreum", "granarium", "grangia", "cellarium"].map(|t| g(t, &[t]));
    let rows = association_table(&index, &targets, &g("grain", &["frumentum", "bladum", "annona"]), 5, Scope::Dated).unwrap();
    let csv_text = emit_csv(rows.as_slice());
    let json: Vec<CoocRow> = serde_json::from_str(&serde_json::to_string(&rows).unwrap()).unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), json.len());
    for (r, j) in records.iter().zip(&json) {
        assert_eq!(&r[0], j.target);
        assert_eq!(r[1].parse::<u64>().unwrap(), j.occurrences);
        assert_eq!(r[2].parse::<u64>().unwrap(), j.associations);
        assert_eq!(r[4].parse::<Fraction>().unwrap(), j.percent);
        assert_eq!(&r[3], j.percent.round_half_up(2));
    }

    let slicing = slice_equal_mass(&corpus, 6000, &YearConfig::default()).unwrap();
    let points = dice_series(&index, &slicing, &g("a", &["grangia"]), &g("b", &["frumentum"]), 5).unwrap();
    let json: Vec<DicePoint> = serde_json::from_str(&serde_json::to_string(&points).unwrap()).unwrap();
    let csv_text = emit_csv(points.as_slice());
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    for (r, j) in reader.records().map(Result::unwrap).zip(&json) {
        assert_eq!(r[6].parse::<Fraction>().unwrap(), j.dice);
        assert_eq!(r[6].parse::<Fraction>().unwrap(), Fraction::new(j.hits_a + j.hits_b, j.f_a + j.f_b));
    }
}

#[test]
fn fig2_rows_round_trip_through_csv() {
    let rows: Vec<CoocRow> = [("grangia", 6435, 318), ("horreum, cellarium", 1384, 143), ("\"granica\"", 3306, 1)]
        .iter()
        .map(|&(t, o, a)| CoocRow::from_counts(t, o, a))
        .collect();
    let text = emit_csv(rows.as_slice());
    assert!(text.contains("\"horreum, cellarium\""));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let back: Vec<(String, String)> = reader.records().map(|r| r.unwrap()).map(|r| (r[0].to_string(), r[3].to_string())).collect();
    assert_eq!(
        back,
        [
            ("grangia".to_string(), "4.94".to_string()),
            ("horreum, cellarium".into(), "10.33".into()),
            ("\"granica\"".into(), "0.03".into())
        ]
    );
}
