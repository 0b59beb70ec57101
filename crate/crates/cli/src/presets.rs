//! Built-in scenarios.

use crate::config::{parse_keys, KeyMap};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "desk",
        description: "0.25 ms / 50 MHz chirp, 10 MHz ADC, GMSK 64 chips, one target",
        text: "\
seed = 1
chirp.carrier_hz = 3.315e9
chirp.sweep_time_s = 0.25e-3
chirp.bandwidth_hz = 50e6
code.type = gmsk
code.n_chips = 64
receiver.cutoff_hz = 10e6
receiver.sample_rate_hz = 10e6
target.0.range_fraction = 0.2
chain = proposed
outputs = range_profile,metrics
",
    },
    Preset {
        name: "long-sweep",
        description: "1 ms / 200 MHz chirp, 40 MHz ADC (40000 range cells), GMSK 1024 chips",
        text: "\
seed = 1
chirp.carrier_hz = 3.315e9
chirp.sweep_time_s = 1e-3
chirp.bandwidth_hz = 200e6
chirp.tx_rate_hz = 800e6
code.type = gmsk
code.n_chips = 1024
receiver.cutoff_hz = 40e6
receiver.sample_rate_hz = 40e6
target.0.range_fraction = 0.2
chain = proposed
outputs = range_profile,metrics
",
    },
    Preset {
        name: "range-doppler",
        description: "1 ms / 40 MHz chirp, 1024 chips, 128 pulses, moving target, range-Doppler",
        text: "\
seed = 1
chirp.carrier_hz = 3.315e9
chirp.sweep_time_s = 1e-3
chirp.bandwidth_hz = 40e6
code.type = gmsk
code.n_chips = 1024
receiver.cutoff_hz = 40e6
receiver.sample_rate_hz = 40e6
receiver.window_sidelobe_db = 80
frame.n_pulses = 128
target.0.range_fraction = 0.2
target.0.velocity_mps = 14
chain = proposed
outputs = range_profile,range_doppler,metrics
",
    },
];

pub fn preset(name: &str) -> Option<KeyMap> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .map(|p| parse_keys(p.text).expect("built-in presets parse"))
}
