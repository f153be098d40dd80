#![no_main]

use diacorp::vertical::{parse_vertical, serialize_vertical, ParseOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(outcome) = parse_vertical(text, &ParseOptions::default()) {
        assert!(outcome.rejects.is_empty());
        let again = parse_vertical(&serialize_vertical(&outcome.corpus), &ParseOptions::default())
            .expect("serialized corpus parses");
        assert_eq!(again.corpus.documents(), outcome.corpus.documents());
    }
});
