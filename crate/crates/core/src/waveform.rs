//! FMCW chirps and PC-FMCW transmit frames in complex baseband.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::coding::{sample_count, CodedEnvelope};
use crate::error::{Error, Result};
use crate::signal::ComplexBaseband;

/// Chirp parameters. The carrier is bookkeeping for Doppler only; the
/// simulation never samples it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChirpParams {
    carrier: f64,
    sweep_time: f64,
    bandwidth: f64,
    tx_rate: f64,
    n_samples: usize,
}

impl ChirpParams {
    pub fn new(carrier: f64, sweep_time: f64, bandwidth: f64, tx_rate: f64) -> Result<Self> {
        for (name, v) in [
            ("sweep time", sweep_time),
            ("bandwidth", bandwidth),
            ("transmit sample rate", tx_rate),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} {v} must be positive"
                )));
            }
        }
        if !(carrier.is_finite() && carrier >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "carrier {carrier} Hz must be >= 0"
            )));
        }
        if tx_rate < 2.0 * bandwidth {
            return Err(Error::InvalidParameter(format!(
                "transmit sample rate {tx_rate} Hz is below twice the {bandwidth} Hz sweep"
            )));
        }
        let n_samples = sample_count(sweep_time, tx_rate)?;
        Ok(Self {
            carrier,
            sweep_time,
            bandwidth,
            tx_rate,
            n_samples,
        })
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    /// `T`.
    pub fn sweep_time(&self) -> f64 {
        self.sweep_time
    }

    /// `B`.
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// `k = B / T`.
    pub fn slope(&self) -> f64 {
        self.bandwidth / self.sweep_time
    }

    pub fn tx_rate(&self) -> f64 {
        self.tx_rate
    }

    /// Samples per chirp at the transmit rate.
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Doppler shift of a radial velocity, `2 v f_c / c` (positive = receding).
    pub fn doppler(&self, velocity: f64) -> f64 {
        2.0 * velocity * self.carrier / crate::SPEED_OF_LIGHT
    }

    /// Baseband chirp phase `-pi k t^2` at time `t` from the sweep start.
    pub(crate) fn phase(&self, t: f64) -> f64 {
        -PI * self.slope() * t * t
    }

    pub(crate) fn check_record(&self, sig: &ComplexBaseband) -> Result<()> {
        if sig.sample_rate() != self.tx_rate {
            return Err(Error::RateMismatch {
                expected: self.tx_rate,
                actual: sig.sample_rate(),
            });
        }
        if sig.len() != self.n_samples {
            return Err(Error::LengthMismatch {
                expected: self.n_samples,
                actual: sig.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameParams {
    n_pulses: usize,
    pulse_repetition_interval: f64,
}

impl FrameParams {
    pub fn new(n_pulses: usize, pulse_repetition_interval: f64) -> Result<Self> {
        if n_pulses == 0 {
            return Err(Error::InvalidParameter(
                "a frame needs at least one pulse".into(),
            ));
        }
        if !(pulse_repetition_interval.is_finite() && pulse_repetition_interval > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pulse repetition interval {pulse_repetition_interval} s must be positive"
            )));
        }
        Ok(Self {
            n_pulses,
            pulse_repetition_interval,
        })
    }

    /// Back-to-back chirps.
    pub fn back_to_back(n_pulses: usize, p: &ChirpParams) -> Result<Self> {
        Self::new(n_pulses, p.sweep_time())
    }

    pub fn n_pulses(&self) -> usize {
        self.n_pulses
    }

    pub fn pulse_repetition_interval(&self) -> f64 {
        self.pulse_repetition_interval
    }
}

fn chirp_samples(p: &ChirpParams) -> Vec<Complex64> {
    (0..p.n_samples)
        .map(|i| Complex64::from_polar(1.0, p.phase(i as f64 / p.tx_rate)))
        .collect()
}

/// `x(t) = e^{-j pi k t^2}` for `t` in `[0, T)`.
pub fn fmcw_chirp(p: &ChirpParams) -> ComplexBaseband {
    ComplexBaseband::new(chirp_samples(p), p.tx_rate, 0.0).expect("chirp params are validated")
}

/// `x_T(t) = s(t) e^{-j pi k t^2}`.
pub fn pc_fmcw(p: &ChirpParams, env: &CodedEnvelope) -> Result<ComplexBaseband> {
    p.check_record(env.signal())?;
    fmcw_chirp(p).multiply(env.signal())
}

/// One transmit record per pulse, pulse `m` starting at `m * PRI`. A single
/// envelope is used for every pulse.
pub fn frame(
    p: &ChirpParams,
    fp: &FrameParams,
    env_per_pulse: &[CodedEnvelope],
) -> Result<Vec<ComplexBaseband>> {
    if env_per_pulse.len() != 1 && env_per_pulse.len() != fp.n_pulses {
        return Err(Error::InvalidParameter(format!(
            "{} envelopes for a {}-pulse frame",
            env_per_pulse.len(),
            fp.n_pulses
        )));
    }
    (0..fp.n_pulses)
        .map(|m| {
            let env = &env_per_pulse[m.min(env_per_pulse.len() - 1)];
            pc_fmcw(p, env)?.with_t0(m as f64 * fp.pulse_repetition_interval)
        })
        .collect()
}
