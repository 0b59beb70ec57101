#![no_main]

use libfuzzer_sys::fuzz_target;
use spcfmcw::signal::{parse_signal_csv, parse_signal_meta};

// Input is the sidecar, a NUL byte, then the CSV.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (meta, csv) = text.split_once('\0').unwrap_or((text, ""));
    let _ = parse_signal_meta(meta);
    if let Ok(sig) = parse_signal_csv(csv, meta) {
        assert!(sig.sample_rate() > 0.0);
        assert!(sig
            .samples()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite()));
    }
});
