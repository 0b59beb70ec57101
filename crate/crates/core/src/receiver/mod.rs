//! Receive chain: dechirp, brick-wall LPF and ADC, group-delay filter,
//! shift-to-max-delay, decoding, and range / range-Doppler processing.

mod chain;

use num_complex::Complex64;

use crate::coding::{coded_envelope, PhaseCode};
use crate::error::{Error, Result};
use crate::signal::{
    apply_transfer, chebyshev_window, decimate, fft_frequencies, fft_in_place, fftshift,
    fractional_delay, ComplexBaseband, TransferFunction,
};
use crate::signal::{to_db, DB_FLOOR};
use crate::waveform::{ChirpParams, FrameParams};
use crate::SPEED_OF_LIGHT;

pub use chain::{
    doppler_tolerance_sweep, fmcw_chain, legacy_chain, process_pulse, proposed_chain, receive,
    simulate_pulse, transmit_envelope, ChainKind, Scenario,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReceiverConfig {
    f_cut: f64,
    f_s: f64,
    f_b_max: f64,
    window_sidelobe_db: f64,
}

impl ReceiverConfig {
    pub fn new(f_cut: f64, f_s: f64, f_b_max: f64, window_sidelobe_db: f64) -> Result<Self> {
        for (name, v) in [
            ("cut-off frequency", f_cut),
            ("ADC rate", f_s),
            ("maximum beat frequency", f_b_max),
            ("window sidelobe level", window_sidelobe_db),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} {v} must be positive"
                )));
            }
        }
        if f_b_max > f_s / 2.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "maximum beat frequency {f_b_max} Hz exceeds f_s/2 = {} Hz",
                f_s / 2.0
            )));
        }
        Ok(Self {
            f_cut,
            f_s,
            f_b_max,
            window_sidelobe_db,
        })
    }

    /// `f_s = f_cut`, `f_b_max = f_s / 2`, 100 dB Chebyshev window.
    pub fn from_cutoff(f_cut: f64) -> Result<Self> {
        Self::new(f_cut, f_cut, f_cut / 2.0, 100.0)
    }

    pub fn with_window_sidelobe_db(self, db: f64) -> Result<Self> {
        Self::new(self.f_cut, self.f_s, self.f_b_max, db)
    }

    pub fn with_max_beat(self, f_b_max: f64) -> Result<Self> {
        Self::new(self.f_cut, self.f_s, f_b_max, self.window_sidelobe_db)
    }

    pub fn cutoff(&self) -> f64 {
        self.f_cut
    }

    pub fn sample_rate(&self) -> f64 {
        self.f_s
    }

    pub fn max_beat(&self) -> f64 {
        self.f_b_max
    }

    pub fn window_sidelobe_db(&self) -> f64 {
        self.window_sidelobe_db
    }

    /// `tau_max = f_b_max / k`.
    pub fn max_delay(&self, p: &ChirpParams) -> f64 {
        self.f_b_max / p.slope()
    }

    /// `R_max = c f_b_max / (2k)`.
    pub fn max_range(&self, p: &ChirpParams) -> f64 {
        SPEED_OF_LIGHT * self.f_b_max / (2.0 * p.slope())
    }

    /// Decimation factor from the transmit rate to the ADC rate.
    pub fn decimation(&self, p: &ChirpParams) -> Result<usize> {
        if self.f_cut > p.tx_rate() * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "cut-off {} Hz exceeds the {} Hz transmit rate",
                self.f_cut,
                p.tx_rate()
            )));
        }
        let r = p.tx_rate() / self.f_s;
        let d = r.round();
        if d < 1.0 || (r - d).abs() > 1e-9 * d {
            return Err(Error::InvalidParameter(format!(
                "transmit rate {} Hz is not an integer multiple of the ADC rate {} Hz",
                p.tx_rate(),
                self.f_s
            )));
        }
        let d = d as usize;
        if !p.n_samples().is_multiple_of(d) {
            return Err(Error::InvalidParameter(format!(
                "{} samples per chirp do not decimate by {d}",
                p.n_samples()
            )));
        }
        Ok(d)
    }

    /// Range of a target whose beat tone falls on FFT bin `bin` (0 <= bin < N/2).
    pub fn bin_range(&self, p: &ChirpParams, bin: usize) -> f64 {
        SPEED_OF_LIGHT * bin as f64 / (2.0 * p.slope() * p.sweep_time())
    }

    /// Range at `fraction * R_max` snapped to the nearest range bin.
    pub fn on_grid_range(&self, p: &ChirpParams, fraction: f64) -> f64 {
        let bin = (fraction * self.f_b_max * p.sweep_time()).round();
        self.bin_range(p, bin.max(0.0) as usize)
    }
}

/// `rx * conj(chirp)` with the uncoded chirp.
pub fn dechirp(rx: &ComplexBaseband, p: &ChirpParams) -> Result<ComplexBaseband> {
    p.check_record(rx)?;
    let rate = p.tx_rate();
    let s = rx
        .samples()
        .iter()
        .enumerate()
        .map(|(i, x)| x * Complex64::from_polar(1.0, -p.phase(i as f64 / rate)))
        .collect();
    rx.with_samples(s)
}

/// Brick-wall low-pass `rect(f / f_cut)` followed by decimation to `f_s`.
pub fn lowpass_and_sample(beat: &ComplexBaseband, cfg: &ReceiverConfig) -> Result<ComplexBaseband> {
    let r = beat.sample_rate() / cfg.f_s;
    let d = r.round();
    if d < 1.0 || (r - d).abs() > 1e-9 * d {
        return Err(Error::InvalidParameter(format!(
            "input rate {} Hz is not an integer multiple of the ADC rate {} Hz",
            beat.sample_rate(),
            cfg.f_s
        )));
    }
    if cfg.f_cut > beat.sample_rate() * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "cut-off {} Hz exceeds the {} Hz input rate",
            cfg.f_cut,
            beat.sample_rate()
        )));
    }
    let filtered = apply_transfer(beat, &TransferFunction::brick_wall(cfg.f_cut))?;
    decimate(&filtered, d as usize)
}

/// Smallest cut-off passing `k_null` spectral nulls of a BPSK code on either
/// side of the farthest beat tone: `(1/T)(2 B R_max / c + N_c k_null)`.
pub fn min_cutoff(p: &ChirpParams, max_range: f64, n_chips: usize, k_null: u32) -> f64 {
    (2.0 * p.bandwidth() * max_range / SPEED_OF_LIGHT + n_chips as f64 * k_null as f64)
        / p.sweep_time()
}

/// `H_g(f) = e^{j pi f^2 / k}`.
pub fn group_delay_filter(beat: &ComplexBaseband, k: f64) -> Result<ComplexBaseband> {
    apply_transfer(beat, &TransferFunction::group_delay(k))
}

/// Delays every code envelope to `tau_max`.
pub fn shift_to_max_delay(
    beat: &ComplexBaseband,
    cfg: &ReceiverConfig,
    p: &ChirpParams,
) -> Result<ComplexBaseband> {
    let tau = cfg.max_delay(p);
    if tau == 0.0 {
        return Ok(beat.clone());
    }
    fractional_delay(beat, tau)
}

/// Decoding reference: the uncompensated envelope delayed to `tau_max` and
/// passed through the same low-pass and ADC as the beat signal.
pub fn decode_reference(
    code: &PhaseCode,
    p: &ChirpParams,
    cfg: &ReceiverConfig,
) -> Result<ComplexBaseband> {
    let env = coded_envelope(code, p.tx_rate())?;
    let delayed = fractional_delay(env.signal(), cfg.max_delay(p))?;
    lowpass_and_sample(&delayed, cfg)
}

/// `beat * conj(reference)`.
pub fn decode_with_reference(
    beat: &ComplexBaseband,
    reference: &ComplexBaseband,
) -> Result<ComplexBaseband> {
    if beat.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: beat.len(),
            actual: reference.len(),
        });
    }
    let s = beat
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(a, b)| a * b.conj())
        .collect();
    beat.with_samples(s)
}

pub fn decode(
    beat: &ComplexBaseband,
    code: &PhaseCode,
    p: &ChirpParams,
    cfg: &ReceiverConfig,
) -> Result<ComplexBaseband> {
    decode_with_reference(beat, &decode_reference(code, p, cfg)?)
}

/// Windowed range FFT magnitude in ascending-frequency order.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeProfile {
    /// `20 log10 |X| - peak_db`; floored at -400 dB.
    pub magnitude_db: Vec<f64>,
    /// `c f / (2k)` (m).
    pub range_axis: Vec<f64>,
    /// Beat frequency of each bin (Hz).
    pub frequency_axis: Vec<f64>,
    pub mainlobe_bin: usize,
    /// Absolute peak level `20 log10 max|X|`.
    pub peak_db: f64,
}

impl RangeProfile {
    /// Index of the bin nearest to beat frequency `f`.
    pub fn bin_of_frequency(&self, f: f64) -> usize {
        let df = self.frequency_axis[1] - self.frequency_axis[0];
        let i = ((f - self.frequency_axis[0]) / df).round();
        i.clamp(0.0, (self.frequency_axis.len() - 1) as f64) as usize
    }

    pub fn len(&self) -> usize {
        self.magnitude_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitude_db.is_empty()
    }
}

fn windowed_fft(beat: &ComplexBaseband, window: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = beat
        .samples()
        .iter()
        .zip(window)
        .map(|(z, w)| z * w)
        .collect();
    fft_in_place(&mut buf);
    fftshift(&buf)
}

fn window_for(n: usize, sidelobe_db: f64) -> Result<Vec<f64>> {
    if n == 1 {
        Ok(vec![1.0])
    } else {
        chebyshev_window(n, sidelobe_db)
    }
}

fn profile_from_spectrum(spec: &[Complex64], fs: f64, p: &ChirpParams) -> RangeProfile {
    let mags: Vec<f64> = spec.iter().map(|z| z.norm()).collect();
    let (mainlobe_bin, peak) =
        mags.iter()
            .enumerate()
            .fold((0, 0.0), |a, (i, &m)| if m > a.1 { (i, m) } else { a });
    let frequency_axis = fftshift(&fft_frequencies(spec.len(), fs));
    let k = p.slope();
    RangeProfile {
        magnitude_db: mags.iter().map(|&m| to_db(m, peak)).collect(),
        range_axis: frequency_axis
            .iter()
            .map(|f| SPEED_OF_LIGHT * f / (2.0 * k))
            .collect(),
        frequency_axis,
        mainlobe_bin,
        peak_db: if peak > 0.0 {
            20.0 * peak.log10()
        } else {
            DB_FLOOR
        },
    }
}

/// Chebyshev window, FFT, peak-normalized dB.
pub fn range_profile(
    beat: &ComplexBaseband,
    cfg: &ReceiverConfig,
    p: &ChirpParams,
) -> Result<RangeProfile> {
    let w = window_for(beat.len(), cfg.window_sidelobe_db)?;
    Ok(profile_from_spectrum(
        &windowed_fft(beat, &w),
        beat.sample_rate(),
        p,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RangeDopplerMap {
    /// `magnitude_db[range_bin][doppler_bin]`, peak-normalized.
    pub magnitude_db: Vec<Vec<f64>>,
    pub range_axis: Vec<f64>,
    pub velocity_axis: Vec<f64>,
    pub doppler_axis: Vec<f64>,
    pub peak_db: f64,
}

/// Range FFT per pulse, then slow-time FFT per range bin, both windowed.
pub fn range_doppler(
    decoded_pulses: &[ComplexBaseband],
    cfg: &ReceiverConfig,
    fp: &FrameParams,
    p: &ChirpParams,
) -> Result<RangeDopplerMap> {
    let first = decoded_pulses
        .first()
        .ok_or_else(|| Error::InvalidParameter("no pulses to process".into()))?;
    let n = first.len();
    if let Some(bad) = decoded_pulses.iter().find(|x| x.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: bad.len(),
        });
    }
    let m = decoded_pulses.len();
    let w_fast = window_for(n, cfg.window_sidelobe_db)?;
    let w_slow = window_for(m, cfg.window_sidelobe_db)?;
    let fast: Vec<Vec<Complex64>> = decoded_pulses
        .iter()
        .map(|x| windowed_fft(x, &w_fast))
        .collect();
    let mut mags = vec![vec![0.0; m]; n];
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for (r, row) in mags.iter_mut().enumerate() {
        for (j, c) in col.iter_mut().enumerate() {
            *c = fast[j][r] * w_slow[j];
        }
        fft_in_place(&mut col);
        for (dst, z) in row.iter_mut().zip(fftshift(&col)) {
            *dst = z.norm();
        }
    }
    let peak = mags.iter().flatten().cloned().fold(0.0, f64::max);
    let prf = 1.0 / fp.pulse_repetition_interval();
    let doppler_axis = fftshift(&fft_frequencies(m, prf));
    let k = p.slope();
    let range_axis = fftshift(&fft_frequencies(n, first.sample_rate()))
        .iter()
        .map(|f| SPEED_OF_LIGHT * f / (2.0 * k))
        .collect();
    let velocity_axis = doppler_axis
        .iter()
        .map(|fd| {
            if p.carrier() > 0.0 {
                fd * SPEED_OF_LIGHT / (2.0 * p.carrier())
            } else {
                0.0
            }
        })
        .collect();
    Ok(RangeDopplerMap {
        magnitude_db: mags
            .into_iter()
            .map(|row| row.into_iter().map(|v| to_db(v, peak)).collect())
            .collect(),
        range_axis,
        velocity_axis,
        doppler_axis,
        peak_db: if peak > 0.0 {
            20.0 * peak.log10()
        } else {
            DB_FLOOR
        },
    })
}
