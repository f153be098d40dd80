#![no_main]

use diacorp::vertical::{parse_vertical, rejects_to_jsonl, ParseOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(outcome) = parse_vertical(text, &ParseOptions::lenient()) else { return };
    // every kept document also parses strictly on its own
    let strict = parse_vertical(text, &ParseOptions::default());
    if outcome.rejects.is_empty() {
        if let Ok(s) = strict {
            assert_eq!(s.corpus.documents(), outcome.corpus.documents());
        }
    }
    for line in rejects_to_jsonl(&outcome.rejects).lines() {
        assert!(line.starts_with('{') && line.ends_with('}'));
    }
});
