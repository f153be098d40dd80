#![no_main]

use diacorp::fixture::{generate, FixturePlan};
use diacorp::vertical::{parse_vertical, ParseOptions};
use libfuzzer_sys::fuzz_target;

const MAX_FUZZ_WORDS: usize = 20_000;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(plan) = FixturePlan::from_toml_str(text) else { return };
    let words: usize = plan.period.iter().map(|p| p.documents.saturating_mul(p.tokens[1])).sum();
    if words > MAX_FUZZ_WORDS {
        return;
    }
    if let Ok(fixture) = generate(&plan, 0) {
        let corpus = parse_vertical(&fixture.corpus, &ParseOptions::default()).expect("generated corpus parses").corpus;
        assert_eq!(corpus.stats(), &fixture.manifest.stats);
    }
});
