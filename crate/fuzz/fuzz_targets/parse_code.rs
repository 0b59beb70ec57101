#![no_main]

use libfuzzer_sys::fuzz_target;
use spcfmcw::coding::parse_code;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(bits) = parse_code(text) {
            assert!(!bits.is_empty());
            assert!(bits.iter().all(|&b| b <= 1));
        }
    }
});
