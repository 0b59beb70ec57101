//! Scenario configuration: a flat `key = value` grammar with dotted keys.
//!
//! ```text
//! # comment
//! chirp.sweep_time_s = 0.25e-3
//! code.type = gmsk
//! target.0.range_fraction = 0.2
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Keys may not repeat
//! within one source. Sources are layered (preset, then config file, then
//! command-line overrides); a source that mentions any `target.*` key replaces
//! all lower-layer targets, and likewise for `interferer.*`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use spcfmcw::channel::{Interferer, Target};
use spcfmcw::coding::{
    coded_envelope, compensate_phase_lag, load_code, random_code, CodedEnvelope, PhaseCode,
    PhaseType,
};
use spcfmcw::metrics::scenario_hash;
use spcfmcw::receiver::{ChainKind, ReceiverConfig, Scenario};
use spcfmcw::waveform::{ChirpParams, FrameParams};
use spcfmcw::SPEED_OF_LIGHT;

use crate::error::{CliError, Result};

/// One layer of raw keys.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyMap(BTreeMap<String, String>);

const REPLACED_GROUPS: [&str; 2] = ["target.", "interferer."];

impl KeyMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.0.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// `top` laid over `self`.
    pub fn overlay(&self, top: &KeyMap) -> KeyMap {
        let mut out = self.clone();
        for group in REPLACED_GROUPS {
            if top.0.keys().any(|k| k.starts_with(group)) {
                out.0.retain(|k, _| !k.starts_with(group));
            }
        }
        for (k, v) in &top.0 {
            out.0.insert(k.clone(), v.clone());
        }
        out
    }

    /// `key = value` lines in key order.
    pub fn to_text(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Parses one source. Syntax problems and repeated keys are errors.
pub fn parse_keys(text: &str) -> Result<KeyMap> {
    let mut map = KeyMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Syntax {
            line: idx + 1,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(CliError::Syntax {
                line: idx + 1,
                message: format!("invalid key `{k}`"),
            });
        }
        if v.is_empty() {
            return Err(CliError::Syntax {
                line: idx + 1,
                message: format!("key `{k}` has no value"),
            });
        }
        if map.0.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Syntax {
                line: idx + 1,
                message: format!("key `{k}` is set twice"),
            });
        }
    }
    Ok(map)
}

/// A code type or `none` for an uncoded chirp.
pub type CodeType = Option<PhaseType>;

fn parse_code_type(s: &str) -> std::result::Result<CodeType, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    PhaseType::from_str(s).map(Some).map_err(|e| e.to_string())
}

fn code_type_name(t: CodeType) -> &'static str {
    t.map_or("none", PhaseType::name)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RangeSpec {
    Meters(f64),
    /// Fraction of the maximum range, snapped to the nearest range bin.
    Fraction(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetSpec {
    pub range: RangeSpec,
    pub velocity: f64,
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodeSpec {
    pub code_type: CodeType,
    /// Ignored when `file` is set (the file decides).
    pub n_chips: Option<usize>,
    pub smoother_bandwidth: Option<f64>,
    pub modulation_scale: Option<f64>,
    /// Defaults to the scenario seed.
    pub seed: Option<u64>,
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfererSpec {
    /// Apparent range, i.e. where the ghost of an uncoded interferer appears.
    pub range: RangeSpec,
    pub amplitude_db: f64,
    pub sync_offset: f64,
    /// Defaults to the scenario seed plus one.
    pub code_seed: Option<u64>,
    /// `None` follows the victim's code type.
    pub code_type: Option<CodeType>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Product {
    RangeProfile,
    RangeDoppler,
    Spectrogram,
    Metrics,
    Signals,
}

impl Product {
    pub const ALL: [Product; 5] = [
        Product::RangeProfile,
        Product::RangeDoppler,
        Product::Spectrogram,
        Product::Metrics,
        Product::Signals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Product::RangeProfile => "range_profile",
            Product::RangeDoppler => "range_doppler",
            Product::Spectrogram => "spectrogram",
            Product::Metrics => "metrics",
            Product::Signals => "signals",
        }
    }
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Product {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Product::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Product::ALL.iter().map(|p| p.name()).collect();
                format!(
                    "unknown output `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// A fully resolved scenario description.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub carrier: f64,
    pub sweep_time: f64,
    pub bandwidth: f64,
    pub tx_rate: f64,
    pub code: CodeSpec,
    pub cutoff: f64,
    pub sample_rate: f64,
    pub max_beat: f64,
    pub window_sidelobe_db: f64,
    pub n_pulses: usize,
    pub pulse_repetition_interval: f64,
    pub targets: Vec<TargetSpec>,
    pub interferer: Option<InterfererSpec>,
    pub chain: ChainKind,
    pub outputs: Vec<Product>,
    pub snr_db: f64,
    pub spectrogram_window: usize,
    pub spectrogram_hop: usize,
}

const FIXED_KEYS: &[&str] = &[
    "seed",
    "chirp.carrier_hz",
    "chirp.sweep_time_s",
    "chirp.bandwidth_hz",
    "chirp.tx_rate_hz",
    "chirp.slope_hz_per_s",
    "code.type",
    "code.n_chips",
    "code.smoother_bandwidth_hz",
    "code.modulation_scale",
    "code.seed",
    "code.file",
    "receiver.cutoff_hz",
    "receiver.sample_rate_hz",
    "receiver.max_beat_hz",
    "receiver.window_sidelobe_db",
    "frame.n_pulses",
    "frame.pri_s",
    "interferer.range_m",
    "interferer.range_fraction",
    "interferer.amplitude_db",
    "interferer.sync_offset_s",
    "interferer.code_seed",
    "interferer.type",
    "chain",
    "outputs",
    "noise.snr_db",
    "spectrogram.window",
    "spectrogram.hop",
];

const TARGET_FIELDS: &[&str] = &[
    "range_m",
    "range_fraction",
    "velocity_mps",
    "amplitude",
    "phase_rad",
];

/// Index of a `target.<i>.<field>` key, or an error for unknown keys.
fn check_key(key: &str) -> Result<Option<usize>> {
    if FIXED_KEYS.contains(&key) {
        return Ok(None);
    }
    let mut parts = key.splitn(3, '.');
    if let (Some("target"), Some(idx), Some(field)) = (parts.next(), parts.next(), parts.next()) {
        if let Ok(i) = idx.parse::<usize>() {
            if TARGET_FIELDS.contains(&field) && idx == i.to_string() {
                return Ok(Some(i));
            }
        }
    }
    Err(CliError::key(key, "unknown key"))
}

struct Reader<'a>(&'a KeyMap);

impl Reader<'_> {
    fn parsed<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::key(key, format!("`{v}` is not {what}"))),
        }
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        let v: Option<f64> = self.parsed(key, "a number")?;
        match v {
            Some(x) if x.is_nan() => Err(CliError::key(key, "NaN is not allowed")),
            other => Ok(other),
        }
    }

    fn finite(&self, key: &str) -> Result<Option<f64>> {
        match self.real(key)? {
            Some(x) if !x.is_finite() => Err(CliError::key(key, format!("{x} is not finite"))),
            other => Ok(other),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        match self.finite(key)? {
            Some(x) if x <= 0.0 => Err(CliError::key(key, format!("{x} must be positive"))),
            other => Ok(other),
        }
    }

    fn required_positive(&self, key: &str) -> Result<f64> {
        self.positive(key)?
            .ok_or_else(|| CliError::key(key, "is required"))
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.parsed::<usize>(key, "a non-negative integer")? {
            Some(0) => Err(CliError::key(key, "must be at least 1")),
            other => Ok(other),
        }
    }

    fn range(&self, prefix: &str) -> Result<Option<RangeSpec>> {
        let m = format!("{prefix}.range_m");
        let f = format!("{prefix}.range_fraction");
        match (self.finite(&m)?, self.finite(&f)?) {
            (Some(_), Some(_)) => Err(CliError::key(&m, format!("conflicts with `{f}`"))),
            (Some(r), None) if r < 0.0 => Err(CliError::key(&m, "must not be negative")),
            (Some(r), None) => Ok(Some(RangeSpec::Meters(r))),
            (None, Some(x)) if !(0.0..=1.0).contains(&x) => {
                Err(CliError::key(&f, format!("{x} is outside [0, 1]")))
            }
            (None, Some(x)) => Ok(Some(RangeSpec::Fraction(x))),
            (None, None) => Ok(None),
        }
    }
}

impl ScenarioConfig {
    /// Resolves and validates a merged key set.
    pub fn from_keys(keys: &KeyMap) -> Result<Self> {
        let mut target_indices = Vec::new();
        for (k, _) in keys.iter() {
            if let Some(i) = check_key(k)? {
                target_indices.push(i);
            }
        }
        let r = Reader(keys);

        let seed = r.parsed::<u64>("seed", "an unsigned integer")?.unwrap_or(0);
        let carrier = r
            .finite("chirp.carrier_hz")?
            .ok_or_else(|| CliError::key("chirp.carrier_hz", "is required"))?;
        if carrier < 0.0 {
            return Err(CliError::key("chirp.carrier_hz", "must not be negative"));
        }
        let sweep_time = r.required_positive("chirp.sweep_time_s")?;
        let bandwidth = r.required_positive("chirp.bandwidth_hz")?;
        if let Some(k) = r.positive("chirp.slope_hz_per_s")? {
            let want = bandwidth / sweep_time;
            if (k - want).abs() > 1e-9 * want {
                return Err(CliError::key(
                    "chirp.slope_hz_per_s",
                    format!("{k} disagrees with bandwidth / sweep time = {want}"),
                ));
            }
        }

        let code_type = match keys.get("code.type") {
            None => None,
            Some(v) => parse_code_type(v).map_err(|m| CliError::key("code.type", m))?,
        };
        let file = keys.get("code.file").map(PathBuf::from);
        let n_chips = r.count("code.n_chips")?;
        if code_type.is_some() && n_chips.is_none() && file.is_none() {
            return Err(CliError::key(
                "code.n_chips",
                "is required for a coded chirp",
            ));
        }
        let code = CodeSpec {
            code_type,
            n_chips,
            smoother_bandwidth: r.positive("code.smoother_bandwidth_hz")?,
            modulation_scale: r.positive("code.modulation_scale")?,
            seed: r.parsed("code.seed", "an unsigned integer")?,
            file,
        };

        let cutoff = r.required_positive("receiver.cutoff_hz")?;
        let sample_rate = r.positive("receiver.sample_rate_hz")?.unwrap_or(cutoff);
        let max_beat = r
            .positive("receiver.max_beat_hz")?
            .unwrap_or(sample_rate / 2.0);
        if max_beat > sample_rate / 2.0 * (1.0 + 1e-12) {
            return Err(CliError::key(
                "receiver.max_beat_hz",
                format!(
                    "{max_beat} exceeds half the ADC rate ({})",
                    sample_rate / 2.0
                ),
            ));
        }
        let window_sidelobe_db = r.positive("receiver.window_sidelobe_db")?.unwrap_or(100.0);

        let tx_rate = match r.positive("chirp.tx_rate_hz")? {
            Some(v) => v,
            None => {
                let b_s = match (code.code_type, code.smoother_bandwidth, code.n_chips) {
                    (None, _, _) => 0.0,
                    (_, Some(b), _) => b,
                    (_, None, Some(n)) => 2.0 * n as f64 / sweep_time,
                    (_, None, None) => 0.0,
                };
                default_tx_rate(bandwidth, max_beat, b_s, sample_rate)
            }
        };

        let n_pulses = r.count("frame.n_pulses")?.unwrap_or(1);
        let pulse_repetition_interval = r.positive("frame.pri_s")?.unwrap_or(sweep_time);

        target_indices.sort_unstable();
        target_indices.dedup();
        if target_indices.is_empty() {
            return Err(CliError::key(
                "target.0.range_m",
                "at least one target is required",
            ));
        }
        let mut targets = Vec::new();
        for (want, &i) in target_indices.iter().enumerate() {
            let prefix = format!("target.{want}");
            if i != want {
                let key = keys
                    .iter()
                    .map(|(k, _)| k)
                    .find(|k| k.starts_with(&format!("target.{i}.")))
                    .unwrap_or("target");
                return Err(CliError::key(
                    key,
                    format!("targets must be numbered from 0 without gaps; {prefix} is missing"),
                ));
            }
            let range = r.range(&prefix)?.ok_or_else(|| {
                CliError::key(
                    format!("{prefix}.range_m"),
                    "needs range_m or range_fraction",
                )
            })?;
            targets.push(TargetSpec {
                range,
                velocity: r.finite(&format!("{prefix}.velocity_mps"))?.unwrap_or(0.0),
                amplitude: r.finite(&format!("{prefix}.amplitude"))?.unwrap_or(1.0),
                phase: r.finite(&format!("{prefix}.phase_rad"))?.unwrap_or(0.0),
            });
        }

        let interferer = if keys.iter().any(|(k, _)| k.starts_with("interferer.")) {
            let range = r.range("interferer")?.ok_or_else(|| {
                CliError::key("interferer.range_m", "needs range_m or range_fraction")
            })?;
            let code_type = match keys.get("interferer.type") {
                None => None,
                Some(v) => {
                    Some(parse_code_type(v).map_err(|m| CliError::key("interferer.type", m))?)
                }
            };
            let sync_offset = r.finite("interferer.sync_offset_s")?.unwrap_or(0.0);
            if sync_offset < 0.0 {
                return Err(CliError::key(
                    "interferer.sync_offset_s",
                    "must not be negative",
                ));
            }
            Some(InterfererSpec {
                range,
                amplitude_db: r.finite("interferer.amplitude_db")?.unwrap_or(0.0),
                sync_offset,
                code_seed: r.parsed("interferer.code_seed", "an unsigned integer")?,
                code_type,
            })
        } else {
            None
        };

        let chain = match keys.get("chain") {
            None => ChainKind::Proposed,
            Some(v) => v
                .parse()
                .map_err(|e: spcfmcw::Error| CliError::key("chain", e.to_string()))?,
        };
        if chain != ChainKind::Fmcw && code.code_type.is_none() {
            return Err(CliError::key(
                "code.type",
                format!("the {chain} chain needs a code type other than none"),
            ));
        }

        let mut outputs = Vec::new();
        for name in keys
            .get("outputs")
            .unwrap_or("range_profile,metrics")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let p: Product = name
                .parse()
                .map_err(|m: String| CliError::key("outputs", m))?;
            if !outputs.contains(&p) {
                outputs.push(p);
            }
        }
        outputs.sort();

        let snr_db = r.real("noise.snr_db")?.unwrap_or(f64::INFINITY);
        if snr_db == f64::NEG_INFINITY {
            return Err(CliError::key("noise.snr_db", "must be finite or inf"));
        }

        let cfg = ScenarioConfig {
            seed,
            carrier,
            sweep_time,
            bandwidth,
            tx_rate,
            code,
            cutoff,
            sample_rate,
            max_beat,
            window_sidelobe_db,
            n_pulses,
            pulse_repetition_interval,
            targets,
            interferer,
            chain,
            outputs,
            snr_db,
            spectrogram_window: r.count("spectrogram.window")?.unwrap_or(128),
            spectrogram_hop: r.count("spectrogram.hop")?.unwrap_or(32),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn chirp_params(&self) -> Result<ChirpParams> {
        ChirpParams::new(self.carrier, self.sweep_time, self.bandwidth, self.tx_rate)
            .map_err(|e| CliError::key("chirp.tx_rate_hz", e.to_string()))
    }

    fn receiver_config(&self) -> Result<ReceiverConfig> {
        ReceiverConfig::new(
            self.cutoff,
            self.sample_rate,
            self.max_beat,
            self.window_sidelobe_db,
        )
        .map_err(|e| CliError::key("receiver.cutoff_hz", e.to_string()))
    }

    /// Cross-field checks that do not need the code file.
    fn check(&self) -> Result<()> {
        let p = self.chirp_params()?;
        let rx = self.receiver_config()?;
        rx.decimation(&p)
            .map_err(|e| CliError::key("receiver.sample_rate_hz", e.to_string()))?;
        let n_adc = (self.sweep_time * self.sample_rate).round() as usize;
        if self.spectrogram_window > n_adc {
            return Err(CliError::key(
                "spectrogram.window",
                format!(
                    "{} exceeds the {n_adc}-sample record",
                    self.spectrogram_window
                ),
            ));
        }
        if let Some(n) = self.code.n_chips {
            if self.code.file.is_none() && p.n_samples() < 2 * n {
                return Err(CliError::key(
                    "code.n_chips",
                    format!("{n} chips need at least {} transmit samples", 2 * n),
                ));
            }
        }
        let r_max = rx.max_range(&p);
        for (i, t) in self.targets.iter().enumerate() {
            if let RangeSpec::Meters(r) = t.range {
                if r > r_max {
                    return Err(CliError::key(
                        format!("target.{i}.range_m"),
                        format!("{r} m exceeds the maximum range {r_max} m"),
                    ));
                }
            }
        }
        if let Some(intf) = &self.interferer {
            let r = self.resolve_range(intf.range, &p, &rx);
            if 2.0 * r / SPEED_OF_LIGHT + intf.sync_offset >= self.sweep_time {
                return Err(CliError::key(
                    "interferer.range_m",
                    "interferer delay plus sync offset must be shorter than the sweep",
                ));
            }
        }
        Ok(())
    }

    fn resolve_range(&self, r: RangeSpec, p: &ChirpParams, rx: &ReceiverConfig) -> f64 {
        match r {
            RangeSpec::Meters(m) => m,
            RangeSpec::Fraction(f) => rx.on_grid_range(p, f),
        }
    }

    /// Canonical key set; `from_keys(to_keys())` reproduces `self`.
    pub fn to_keys(&self) -> KeyMap {
        let mut k = KeyMap::new();
        k.set("seed", self.seed.to_string());
        k.set("chirp.carrier_hz", self.carrier.to_string());
        k.set("chirp.sweep_time_s", self.sweep_time.to_string());
        k.set("chirp.bandwidth_hz", self.bandwidth.to_string());
        k.set("chirp.tx_rate_hz", self.tx_rate.to_string());
        k.set("code.type", code_type_name(self.code.code_type));
        if let Some(n) = self.code.n_chips {
            k.set("code.n_chips", n.to_string());
        }
        if let Some(v) = self.code.smoother_bandwidth {
            k.set("code.smoother_bandwidth_hz", v.to_string());
        }
        if let Some(v) = self.code.modulation_scale {
            k.set("code.modulation_scale", v.to_string());
        }
        if let Some(v) = self.code.seed {
            k.set("code.seed", v.to_string());
        }
        if let Some(f) = &self.code.file {
            k.set("code.file", f.display().to_string());
        }
        k.set("receiver.cutoff_hz", self.cutoff.to_string());
        k.set("receiver.sample_rate_hz", self.sample_rate.to_string());
        k.set("receiver.max_beat_hz", self.max_beat.to_string());
        k.set(
            "receiver.window_sidelobe_db",
            self.window_sidelobe_db.to_string(),
        );
        k.set("frame.n_pulses", self.n_pulses.to_string());
        k.set("frame.pri_s", self.pulse_repetition_interval.to_string());
        for (i, t) in self.targets.iter().enumerate() {
            let p = format!("target.{i}");
            match t.range {
                RangeSpec::Meters(r) => k.set(format!("{p}.range_m"), r.to_string()),
                RangeSpec::Fraction(f) => k.set(format!("{p}.range_fraction"), f.to_string()),
            }
            k.set(format!("{p}.velocity_mps"), t.velocity.to_string());
            k.set(format!("{p}.amplitude"), t.amplitude.to_string());
            k.set(format!("{p}.phase_rad"), t.phase.to_string());
        }
        if let Some(intf) = &self.interferer {
            match intf.range {
                RangeSpec::Meters(r) => k.set("interferer.range_m", r.to_string()),
                RangeSpec::Fraction(f) => k.set("interferer.range_fraction", f.to_string()),
            }
            k.set("interferer.amplitude_db", intf.amplitude_db.to_string());
            k.set("interferer.sync_offset_s", intf.sync_offset.to_string());
            if let Some(s) = intf.code_seed {
                k.set("interferer.code_seed", s.to_string());
            }
            if let Some(t) = intf.code_type {
                k.set("interferer.type", code_type_name(t));
            }
        }
        k.set("chain", self.chain.name());
        let outs: Vec<_> = self.outputs.iter().map(|p| p.name()).collect();
        k.set("outputs", outs.join(","));
        k.set("noise.snr_db", self.snr_db.to_string());
        k.set("spectrogram.window", self.spectrogram_window.to_string());
        k.set("spectrogram.hop", self.spectrogram_hop.to_string());
        k
    }

    /// 16-hex-digit fingerprint of the canonical key set.
    pub fn hash(&self) -> String {
        scenario_hash(&self.to_keys().to_text())
    }

    pub fn wants(&self, p: Product) -> bool {
        self.outputs.contains(&p)
    }

    /// Builds the simulation objects, loading the code file if one is named.
    pub fn build(&self) -> Result<Built> {
        let chirp = self.chirp_params()?;
        let receiver = self.receiver_config()?;
        let code = match self.code.code_type {
            None => None,
            Some(ty) => Some(self.phase_code(ty, &chirp)?),
        };
        let targets = self
            .targets
            .iter()
            .map(|t| {
                Target::new(
                    self.resolve_range(t.range, &chirp, &receiver),
                    t.velocity,
                    Complex64::from_polar(t.amplitude, t.phase),
                )
            })
            .collect();
        let interferer = match &self.interferer {
            None => None,
            Some(spec) => Some(self.interferer(spec, &chirp, &receiver, code.as_ref())?),
        };
        let scenario = Scenario {
            chirp,
            receiver,
            code,
            chain: self.chain,
            targets,
            interferer,
        };
        scenario
            .validate()
            .map_err(|e| CliError::Config(format!("scenario: {e}")))?;
        let frame = FrameParams::new(self.n_pulses, self.pulse_repetition_interval)
            .map_err(|e| CliError::key("frame.pri_s", e.to_string()))?;
        Ok(Built { scenario, frame })
    }

    fn phase_code(&self, ty: PhaseType, p: &ChirpParams) -> Result<PhaseCode> {
        let bits = match &self.code.file {
            Some(path) => {
                let bits = load_code(path)
                    .map_err(|e| CliError::key("code.file", format!("{}: {e}", path.display())))?;
                if let Some(n) = self.code.n_chips {
                    if n != bits.len() {
                        return Err(CliError::key(
                            "code.n_chips",
                            format!(
                                "{n} disagrees with the {} chips in {}",
                                bits.len(),
                                path.display()
                            ),
                        ));
                    }
                }
                bits
            }
            None => {
                let n = self.code.n_chips.expect("checked at load");
                random_code(n, self.code.seed.unwrap_or(self.seed))
                    .map_err(|e| CliError::key("code.n_chips", e.to_string()))?
            }
        };
        self.decorate(PhaseCode::new(bits, ty, p.sweep_time()), "code.n_chips")
    }

    fn decorate(&self, code: spcfmcw::Result<PhaseCode>, key: &str) -> Result<PhaseCode> {
        let mut code = code.map_err(|e| CliError::key(key, e.to_string()))?;
        if let Some(b) = self.code.smoother_bandwidth {
            code = code
                .with_smoother_bandwidth(b)
                .map_err(|e| CliError::key("code.smoother_bandwidth_hz", e.to_string()))?;
        }
        if let Some(m) = self.code.modulation_scale {
            code = code
                .with_modulation_scale(m)
                .map_err(|e| CliError::key("code.modulation_scale", e.to_string()))?;
        }
        Ok(code)
    }

    fn interferer(
        &self,
        spec: &InterfererSpec,
        p: &ChirpParams,
        rx: &ReceiverConfig,
        victim: Option<&PhaseCode>,
    ) -> Result<Interferer> {
        let ty = spec.code_type.unwrap_or(self.code.code_type);
        let envelope = match ty {
            None => CodedEnvelope::uncoded(p.n_samples(), p.tx_rate())
                .map_err(|e| CliError::key("interferer.type", e.to_string()))?,
            Some(ty) => {
                let n = victim
                    .map(PhaseCode::n_chips)
                    .or(self.code.n_chips)
                    .ok_or_else(|| {
                        CliError::key("interferer.type", "a coded interferer needs code.n_chips")
                    })?;
                let seed = spec.code_seed.unwrap_or(self.seed.wrapping_add(1));
                let bits = random_code(n, seed)
                    .map_err(|e| CliError::key("code.n_chips", e.to_string()))?;
                let code =
                    self.decorate(PhaseCode::new(bits, ty, p.sweep_time()), "interferer.type")?;
                let env = coded_envelope(&code, p.tx_rate())
                    .map_err(|e| CliError::key("interferer.type", e.to_string()))?;
                if self.chain == ChainKind::Proposed {
                    compensate_phase_lag(&env, p.slope())
                        .map_err(|e| CliError::key("interferer.type", e.to_string()))?
                } else {
                    env
                }
            }
        };
        Ok(Interferer {
            envelope,
            delay: 2.0 * self.resolve_range(spec.range, p, rx) / SPEED_OF_LIGHT,
            amplitude: Complex64::new(10f64.powf(spec.amplitude_db / 20.0), 0.0),
            sync_offset: spec.sync_offset,
        })
    }
}

/// Simulation objects built from a [`ScenarioConfig`].
#[derive(Clone, Debug)]
pub struct Built {
    pub scenario: Scenario,
    pub frame: FrameParams,
}

/// `max(4B, 4(f_b_max + B_s))` rounded up to a whole multiple of the ADC rate.
pub fn default_tx_rate(
    bandwidth: f64,
    max_beat: f64,
    smoother_bandwidth: f64,
    sample_rate: f64,
) -> f64 {
    let want = (4.0 * bandwidth).max(4.0 * (max_beat + smoother_bandwidth));
    (want / sample_rate - 1e-9).ceil().max(1.0) * sample_rate
}

/// Preset, then config file, then overrides.
pub fn load_layers(
    preset: &KeyMap,
    file: Option<&Path>,
    overrides: &KeyMap,
) -> Result<ScenarioConfig> {
    let mut keys = preset.clone();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        keys = keys.overlay(&parse_keys(&text)?);
    }
    ScenarioConfig::from_keys(&keys.overlay(overrides))
}
