//! Binary codes, phase synthesis (BPSK / Gaussian / GMSK), phase-lag
//! compensation and closed-form instantaneous-frequency references.

pub mod erf;
mod phase;

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::signal::ComplexBaseband;

pub use phase::{
    analytic_compensated_bpsk, analytic_instantaneous_frequency, bpsk_phase, coded_envelope,
    compensate_phase_lag, gaussian_envelope_convolution, gaussian_kernel, gaussian_phase,
    gmsk_phase, phase_frequency, Impulse, InstantaneousFrequency,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseType {
    Bpsk,
    Gaussian,
    Gmsk,
}

impl PhaseType {
    pub const ALL: [PhaseType; 3] = [PhaseType::Bpsk, PhaseType::Gaussian, PhaseType::Gmsk];

    pub fn name(self) -> &'static str {
        match self {
            PhaseType::Bpsk => "bpsk",
            PhaseType::Gaussian => "gaussian",
            PhaseType::Gmsk => "gmsk",
        }
    }
}

impl fmt::Display for PhaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhaseType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bpsk" => Ok(PhaseType::Bpsk),
            "gaussian" | "gauss" => Ok(PhaseType::Gaussian),
            "gmsk" => Ok(PhaseType::Gmsk),
            other => Err(Error::InvalidParameter(format!(
                "unknown phase type `{other}` (expected bpsk, gaussian or gmsk)"
            ))),
        }
    }
}

/// A binary code bound to a sweep time and a phase-synthesis rule.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCode {
    bits: Vec<u8>,
    phase_type: PhaseType,
    sweep_time: f64,
    smoother_bandwidth: f64,
    modulation_scale: f64,
}

impl PhaseCode {
    /// Chip duration is `sweep_time / bits.len()`. The smoother bandwidth
    /// defaults to twice the chip bandwidth and the GMSK modulation scale to
    /// `1 / T_c`.
    pub fn new(bits: Vec<u8>, phase_type: PhaseType, sweep_time: f64) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter(
                "code needs at least one chip".into(),
            ));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "code bit {b} is not 0 or 1"
            )));
        }
        if !(sweep_time.is_finite() && sweep_time > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sweep time {sweep_time} s must be positive"
            )));
        }
        let t_c = sweep_time / bits.len() as f64;
        Ok(Self {
            bits,
            phase_type,
            sweep_time,
            smoother_bandwidth: 2.0 / t_c,
            modulation_scale: 1.0 / t_c,
        })
    }

    pub fn with_smoother_bandwidth(mut self, b_s: f64) -> Result<Self> {
        if !(b_s.is_finite() && b_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "smoother bandwidth {b_s} Hz must be positive"
            )));
        }
        self.smoother_bandwidth = b_s;
        Ok(self)
    }

    pub fn with_modulation_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "modulation scale {scale} must be positive"
            )));
        }
        self.modulation_scale = scale;
        Ok(self)
    }

    pub fn with_phase_type(mut self, phase_type: PhaseType) -> Self {
        self.phase_type = phase_type;
        self
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn n_chips(&self) -> usize {
        self.bits.len()
    }

    pub fn phase_type(&self) -> PhaseType {
        self.phase_type
    }

    pub fn sweep_time(&self) -> f64 {
        self.sweep_time
    }

    /// `T_c`.
    pub fn chip_duration(&self) -> f64 {
        self.sweep_time / self.bits.len() as f64
    }

    /// `B_c = 1 / T_c`.
    pub fn chip_bandwidth(&self) -> f64 {
        1.0 / self.chip_duration()
    }

    /// `B_s`, the 3-dB bandwidth of the Gaussian smoother.
    pub fn smoother_bandwidth(&self) -> f64 {
        self.smoother_bandwidth
    }

    /// `eta = sqrt(2 pi^2 B_s^2 / ln 2)`.
    pub fn eta(&self) -> f64 {
        (2.0 * PI * PI * self.smoother_bandwidth * self.smoother_bandwidth / LN_2).sqrt()
    }

    pub fn modulation_scale(&self) -> f64 {
        self.modulation_scale
    }

    /// Chip phases `pi * bit`.
    pub fn phases(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| PI * b as f64).collect()
    }
}

/// Sampled complex code term `s(t)`, optionally phase-lag compensated.
#[derive(Clone, Debug, PartialEq)]
pub struct CodedEnvelope {
    signal: ComplexBaseband,
    compensated: bool,
}

impl CodedEnvelope {
    pub fn new(signal: ComplexBaseband, compensated: bool) -> Self {
        Self {
            signal,
            compensated,
        }
    }

    /// The all-ones envelope of an uncoded chirp.
    pub fn uncoded(n: usize, sample_rate: f64) -> Result<Self> {
        let s = vec![num_complex::Complex64::new(1.0, 0.0); n];
        Ok(Self::new(ComplexBaseband::new(s, sample_rate, 0.0)?, false))
    }

    pub fn signal(&self) -> &ComplexBaseband {
        &self.signal
    }

    pub fn into_signal(self) -> ComplexBaseband {
        self.signal
    }

    pub fn compensated(&self) -> bool {
        self.compensated
    }
}

/// I.i.d. uniform bits from ChaCha8 seeded with `seed_from_u64(seed)`.
pub fn random_code(n_chips: usize, seed: u64) -> Result<Vec<u8>> {
    if n_chips == 0 {
        return Err(Error::InvalidParameter(
            "code needs at least one chip".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_chips).map(|_| rng.random_range(0..2u8)).collect())
}

/// Parses `0`/`1` tokens separated by commas and/or newlines. Lines starting
/// with `#` are comments.
pub fn parse_code(text: &str) -> Result<Vec<u8>> {
    let mut bits = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for token in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token {
                "0" => bits.push(0),
                "1" => bits.push(1),
                other => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("invalid code token `{other}` (expected 0 or 1)"),
                    })
                }
            }
        }
    }
    if bits.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "code file contains no chips".into(),
        });
    }
    Ok(bits)
}

pub fn load_code(path: &Path) -> Result<Vec<u8>> {
    parse_code(&std::fs::read_to_string(path)?)
}

/// Number of samples in `duration` at `rate`; the product must be an integer.
pub(crate) fn sample_count(duration: f64, rate: f64) -> Result<usize> {
    let x = duration * rate;
    let n = x.round();
    if n.is_nan() || n < 1.0 || (x - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "{duration} s at {rate} Hz is not a whole number of samples"
        )));
    }
    Ok(n as usize)
}
