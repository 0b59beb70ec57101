#![no_main]

use libfuzzer_sys::fuzz_target;
use spcfmcw_cli::config::{parse_keys, ScenarioConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(keys) = parse_keys(text) else {
        return;
    };
    if let Ok(cfg) = ScenarioConfig::from_keys(&keys) {
        let again = ScenarioConfig::from_keys(&cfg.to_keys()).expect("canonical keys reload");
        assert_eq!(cfg, again);
    }
});
