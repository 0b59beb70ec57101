//! Complex-signal container and frequency-domain machinery.
//!
//! Frequency axis convention, used everywhere in the crate: FFT bin `m` of an
//! `n`-point record at sample rate `fs` sits at `m * fs / n` for `2m < n` and at
//! `(m - n) * fs / n` otherwise.

mod io;
mod spectrogram;
mod transfer;
mod window;

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub use io::{
    meta_path, parse_signal_csv, parse_signal_meta, read_signal, signal_meta, signal_to_csv,
    write_signal, SignalMeta,
};
pub use spectrogram::{spectrogram, Spectrogram};
pub(crate) use spectrogram::{to_db, DB_FLOOR};
pub use transfer::{apply_transfer, TransferFunction};
pub use window::{chebyshev_window, mainlobe_halfwidth};

/// Uniformly sampled complex baseband signal.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBaseband {
    samples: Vec<Complex64>,
    sample_rate: f64,
    t0: f64,
}

impl ComplexBaseband {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, t0: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSignal("no samples".into()));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidSignal(format!(
                "start time {t0} is not finite"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
            t0,
        })
    }

    /// All-zero record of `n` samples.
    pub fn zeros(n: usize, sample_rate: f64, t0: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n], sample_rate, t0)
    }

    /// Same rate and start time, new samples. The length may differ.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(samples, self.sample_rate, self.t0)
    }

    pub fn with_t0(mut self, t0: f64) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::InvalidSignal(format!(
                "start time {t0} is not finite"
            )));
        }
        self.t0 = t0;
        Ok(self)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Absolute time of sample `i`.
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 / self.sample_rate
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn mean_power(&self) -> f64 {
        self.energy() / self.len() as f64
    }

    /// Samplewise product with another record of the same length and rate.
    pub fn multiply(&self, other: &ComplexBaseband) -> Result<ComplexBaseband> {
        self.check_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        self.with_samples(samples)
    }

    /// Samplewise sum with another record of the same length and rate.
    pub fn add(&self, other: &ComplexBaseband) -> Result<ComplexBaseband> {
        self.check_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        self.with_samples(samples)
    }

    pub fn scale(&self, gain: Complex64) -> ComplexBaseband {
        ComplexBaseband {
            samples: self.samples.iter().map(|z| z * gain).collect(),
            sample_rate: self.sample_rate,
            t0: self.t0,
        }
    }

    pub fn check_compatible(&self, other: &ComplexBaseband) -> Result<()> {
        if other.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        if other.sample_rate != self.sample_rate {
            return Err(Error::RateMismatch {
                expected: self.sample_rate,
                actual: other.sample_rate,
            });
        }
        Ok(())
    }
}

/// Frequency of FFT bin `m` in an `n`-point record at rate `fs`.
pub fn bin_frequency(m: usize, n: usize, fs: f64) -> f64 {
    if 2 * m < n {
        m as f64 * fs / n as f64
    } else {
        -((n - m) as f64) * fs / n as f64
    }
}

/// Index of the FFT bin nearest to frequency `f` (aliased into the record).
pub fn frequency_bin(f: f64, n: usize, fs: f64) -> usize {
    let m = (f * n as f64 / fs).round() as i64;
    m.rem_euclid(n as i64) as usize
}

/// Frequencies of all bins in natural FFT order.
pub fn fft_frequencies(n: usize, fs: f64) -> Vec<f64> {
    (0..n).map(|m| bin_frequency(m, n, fs)).collect()
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// In-place unnormalized forward DFT, `X[m] = sum x[i] e^{-j2pi mi/n}`.
pub fn fft_in_place(buf: &mut [Complex64]) {
    if buf.len() > 1 {
        plan(buf.len(), false).process(buf);
    }
}

/// In-place inverse DFT including the 1/n factor.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    if buf.len() > 1 {
        plan(buf.len(), true).process(buf);
        let s = 1.0 / buf.len() as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }
}

/// Moves the zero-frequency bin to the centre, giving ascending frequencies.
pub fn fftshift<T: Clone>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let start = n - n / 2;
    x[start..].iter().chain(&x[..start]).cloned().collect()
}

/// Inverse of [`fftshift`].
pub fn ifftshift<T: Clone>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let start = n / 2;
    x[start..].iter().chain(&x[..start]).cloned().collect()
}

/// Spectrum in ascending frequency order over `[-fs/2, fs/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub frequencies: Vec<f64>,
    pub sample_rate: f64,
    pub t0: f64,
}

impl Spectrum {
    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }
}

pub fn spectrum(sig: &ComplexBaseband) -> Spectrum {
    let mut buf = sig.samples.clone();
    fft_in_place(&mut buf);
    let n = buf.len();
    Spectrum {
        values: fftshift(&buf),
        frequencies: fftshift(&fft_frequencies(n, sig.sample_rate)),
        sample_rate: sig.sample_rate,
        t0: sig.t0,
    }
}

pub fn inverse_spectrum(spec: &Spectrum) -> Result<ComplexBaseband> {
    let mut buf = ifftshift(&spec.values);
    ifft_in_place(&mut buf);
    ComplexBaseband::new(buf, spec.sample_rate, spec.t0)
}

/// Circular delay by `tau` seconds through the linear-phase filter `e^{-j2pi f tau}`.
pub fn fractional_delay(sig: &ComplexBaseband, tau: f64) -> Result<ComplexBaseband> {
    if !tau.is_finite() || tau.abs() >= sig.duration() {
        return Err(Error::InvalidParameter(format!(
            "delay {tau} s must be shorter than the {} s record",
            sig.duration()
        )));
    }
    apply_transfer(sig, &TransferFunction::delay(tau))
}

/// Keeps every `factor`-th sample. The caller is responsible for band-limiting.
pub fn decimate(sig: &ComplexBaseband, factor: usize) -> Result<ComplexBaseband> {
    if factor == 0 {
        return Err(Error::InvalidParameter(
            "decimation factor must be positive".into(),
        ));
    }
    if !sig.len().is_multiple_of(factor) {
        return Err(Error::InvalidParameter(format!(
            "record of {} samples is not divisible by decimation factor {factor}",
            sig.len()
        )));
    }
    let samples = sig.samples.iter().step_by(factor).copied().collect();
    ComplexBaseband::new(samples, sig.sample_rate / factor as f64, sig.t0)
}
