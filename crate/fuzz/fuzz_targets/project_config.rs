#![no_main]

use diacorp_cli::ProjectConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = ProjectConfig::from_toml_str(text) else { return };
    let _ = config.lemma_groups();
    for name in config.groups.keys() {
        let _ = config.group(name);
    }
    let _ = config.parse.era();
    let _ = config.canonical();
});
