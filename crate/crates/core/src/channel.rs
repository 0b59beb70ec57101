//! Point-target propagation, a synchronized interfering radar, and AWGN.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::coding::CodedEnvelope;
use crate::error::{Error, Result};
use crate::signal::{fractional_delay, ComplexBaseband};
use crate::waveform::ChirpParams;
use crate::SPEED_OF_LIGHT;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Target {
    /// `R_0` (m).
    pub range: f64,
    /// `v_0` (m/s), positive when receding.
    pub velocity: f64,
    /// `alpha_0`.
    pub amplitude: Complex64,
}

impl Target {
    pub fn new(range: f64, velocity: f64, amplitude: Complex64) -> Self {
        Self {
            range,
            velocity,
            amplitude,
        }
    }

    pub fn stationary(range: f64) -> Self {
        Self::new(range, 0.0, Complex64::new(1.0, 0.0))
    }

    /// Round-trip delay `2 R_0 / c`.
    pub fn delay(&self) -> f64 {
        2.0 * self.range / SPEED_OF_LIGHT
    }
}

/// A second radar using the same chirp with its own code.
#[derive(Clone, Debug, PartialEq)]
pub struct Interferer {
    /// Code envelope of the interferer, at the transmit rate.
    pub envelope: CodedEnvelope,
    /// `tau_2` (s).
    pub delay: f64,
    /// `alpha_2`.
    pub amplitude: Complex64,
    /// Chirp-start offset relative to the victim; 0 is the synchronized worst case.
    pub sync_offset: f64,
}

/// Echo of a code envelope: `alpha e^{j2pi f_c tau} s(t - tau) e^{-j pi k (t - tau)^2}
/// e^{j2pi f_d t_abs}`.
///
/// The code part is delayed circularly over the record, while the chirp is
/// evaluated analytically at `t - tau`, so the sweep continues smoothly before
/// `t = 0` instead of wrapping its tail into the start of the record.
fn echo(
    env: &ComplexBaseband,
    delay: f64,
    amplitude: Complex64,
    doppler: f64,
    p: &ChirpParams,
    t0: f64,
) -> Result<Vec<Complex64>> {
    if !delay.is_finite() || delay < 0.0 || delay >= env.duration() {
        return Err(Error::InvalidParameter(format!(
            "round-trip delay {delay} s must lie in [0, {}) s",
            env.duration()
        )));
    }
    let delayed = if delay == 0.0 {
        env.clone()
    } else {
        fractional_delay(env, delay)?
    };
    let gain = amplitude * Complex64::from_polar(1.0, 2.0 * PI * p.carrier() * delay);
    let rate = p.tx_rate();
    Ok(delayed
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let t = i as f64 / rate;
            let chirp = Complex64::from_polar(1.0, p.phase(t - delay));
            let tone = if doppler == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, 2.0 * PI * doppler * (t0 + t))
            };
            gain * s * chirp * tone
        })
        .collect())
}

/// Sum of target echoes of one transmitted chirp record.
///
/// The Doppler tone uses absolute time (`tx.t0()` plus the in-record time), so
/// consecutive pulses carry the slow-time progression `e^{j2pi f_d m PRI}`.
/// Envelope time dilation is neglected.
pub fn propagate(
    tx: &ComplexBaseband,
    targets: &[Target],
    p: &ChirpParams,
) -> Result<ComplexBaseband> {
    p.check_record(tx)?;
    let mut out = vec![Complex64::new(0.0, 0.0); tx.len()];
    if targets.is_empty() {
        return tx.with_samples(out);
    }
    let rate = p.tx_rate();
    let env: Vec<Complex64> = tx
        .samples()
        .iter()
        .enumerate()
        .map(|(i, x)| x * Complex64::from_polar(1.0, -p.phase(i as f64 / rate)))
        .collect();
    let env = tx.with_samples(env)?;
    for target in targets {
        let e = echo(
            &env,
            target.delay(),
            target.amplitude,
            p.doppler(target.velocity),
            p,
            tx.t0(),
        )?;
        for (o, v) in out.iter_mut().zip(e) {
            *o += v;
        }
    }
    tx.with_samples(out)
}

/// Adds the interferer's delayed PC-FMCW chirp to `rx`.
pub fn add_interferer(
    rx: &ComplexBaseband,
    intf: &Interferer,
    p: &ChirpParams,
) -> Result<ComplexBaseband> {
    p.check_record(rx)?;
    p.check_record(intf.envelope.signal())?;
    let e = echo(
        intf.envelope.signal(),
        intf.delay + intf.sync_offset,
        intf.amplitude,
        0.0,
        p,
        rx.t0(),
    )?;
    rx.with_samples(rx.samples().iter().zip(e).map(|(a, b)| a + b).collect())
}

/// Adds circularly symmetric complex Gaussian noise at `snr_db` relative to the
/// mean power of `rx`. `f64::INFINITY` returns `rx` unchanged.
pub fn add_awgn(rx: &ComplexBaseband, snr_db: f64, seed: u64) -> Result<ComplexBaseband> {
    if snr_db == f64::INFINITY {
        return Ok(rx.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "SNR {snr_db} dB must be finite or +inf"
        )));
    }
    let sigma = (rx.mean_power() / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = rx
        .samples()
        .iter()
        .map(|z| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            z + Complex64::new(re, im) * sigma
        })
        .collect();
    rx.with_samples(samples)
}
