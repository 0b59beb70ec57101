use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{bin_frequency, fft_in_place, ifft_in_place, ComplexBaseband};
use crate::error::{Error, Result};

type Evaluator = dyn Fn(f64) -> Complex64 + Send + Sync;

/// Frequency response evaluated on FFT bin frequencies.
#[derive(Clone)]
pub struct TransferFunction {
    eval: Arc<Evaluator>,
    description: String,
}

impl fmt::Debug for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransferFunction")
            .field("description", &self.description)
            .finish()
    }
}

impl TransferFunction {
    pub fn new<F>(description: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            description: description.into(),
        }
    }

    pub fn unity() -> Self {
        Self::new("unity", |_| Complex64::new(1.0, 0.0))
    }

    /// `e^{-j2pi f tau}`.
    pub fn delay(tau: f64) -> Self {
        Self::new(format!("delay({tau} s)"), move |f| {
            Complex64::from_polar(1.0, -2.0 * PI * f * tau)
        })
    }

    /// Group-delay filter `H_g(f) = e^{j pi f^2 / k}`.
    pub fn group_delay(k: f64) -> Self {
        Self::new(format!("group_delay(k={k})"), move |f| {
            Complex64::from_polar(1.0, PI * f * f / k)
        })
    }

    /// Phase-lag compensation filter `H_lag(f) = e^{-j pi f^2 / k}`.
    pub fn phase_lag(k: f64) -> Self {
        Self::new(format!("phase_lag(k={k})"), move |f| {
            Complex64::from_polar(1.0, -PI * f * f / k)
        })
    }

    /// Ideal low-pass `rect(f / f_cut)`. Bins with `|f| <= f_cut / 2` pass,
    /// including the boundary bin.
    pub fn brick_wall(f_cut: f64) -> Self {
        // Bin frequencies are computed as m*fs/n; allow for that rounding.
        let edge = 0.5 * f_cut * (1.0 + 1e-12);
        Self::new(format!("brick_wall({f_cut} Hz)"), move |f| {
            if f.abs() <= edge {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Response of the unit-area Gaussian `h(t) = (eta / sqrt(pi)) e^{-eta^2 t^2}`
    /// with 3-dB bandwidth `b_s`.
    pub fn gaussian(b_s: f64) -> Self {
        let eta2 = 2.0 * PI * PI * b_s * b_s / LN_2;
        Self::new(format!("gaussian(B_s={b_s} Hz)"), move |f| {
            Complex64::new((-PI * PI * f * f / eta2).exp(), 0.0)
        })
    }

    /// Cascade of `self` followed by `other`.
    pub fn compose(&self, other: &TransferFunction) -> TransferFunction {
        let a = Arc::clone(&self.eval);
        let b = Arc::clone(&other.eval);
        TransferFunction {
            eval: Arc::new(move |f| a(f) * b(f)),
            description: format!("{} * {}", self.description, other.description),
        }
    }

    pub fn eval(&self, f: f64) -> Complex64 {
        (self.eval)(f)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

/// Multiplies the spectrum of `sig` by `h` bin by bin (circular convolution).
/// Guard intervals are the caller's responsibility.
pub fn apply_transfer(sig: &ComplexBaseband, h: &TransferFunction) -> Result<ComplexBaseband> {
    let n = sig.len();
    let fs = sig.sample_rate();
    let mut buf = sig.samples().to_vec();
    fft_in_place(&mut buf);
    for (m, z) in buf.iter_mut().enumerate() {
        let f = bin_frequency(m, n, fs);
        let g = h.eval(f);
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::NonFiniteGain {
                description: h.description.clone(),
                frequency_hz: f,
            });
        }
        *z *= g;
    }
    ifft_in_place(&mut buf);
    sig.with_samples(buf)
}
