#![no_main]

use diacorp::fixture::Manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(manifest) = Manifest::from_json(text) {
        let again = Manifest::from_json(&manifest.to_json()).expect("manifest round-trips");
        assert_eq!(again.to_json(), manifest.to_json());
    }
});
