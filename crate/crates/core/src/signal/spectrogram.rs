use std::f64::consts::PI;

use num_complex::Complex64;

use super::{fft_frequencies, fft_in_place, fftshift, ComplexBaseband};
use crate::error::{Error, Result};

/// Lowest level reported by dB products, relative to the peak.
pub(crate) const DB_FLOOR: f64 = -400.0;

/// STFT magnitude, `magnitude_db[frame][bin]`, peak-normalized to 0 dB.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrogram {
    pub magnitude_db: Vec<Vec<f64>>,
    /// Centre time of each frame (s).
    pub times: Vec<f64>,
    /// Ascending bin frequencies (Hz).
    pub frequencies: Vec<f64>,
}

/// Short-time Fourier transform with a periodic Hann window.
pub fn spectrogram(sig: &ComplexBaseband, window_len: usize, hop: usize) -> Result<Spectrogram> {
    if hop == 0 {
        return Err(Error::InvalidParameter(
            "spectrogram hop must be positive".into(),
        ));
    }
    if window_len == 0 || window_len > sig.len() {
        return Err(Error::InvalidParameter(format!(
            "spectrogram window {window_len} must be in 1..={}",
            sig.len()
        )));
    }
    let fs = sig.sample_rate();
    let win: Vec<f64> = (0..window_len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / window_len as f64).cos())
        .collect();
    let win = if window_len == 1 { vec![1.0] } else { win };
    let mut frames = Vec::new();
    let mut times = Vec::new();
    let mut start = 0;
    while start + window_len <= sig.len() {
        let mut buf: Vec<Complex64> = sig.samples()[start..start + window_len]
            .iter()
            .zip(&win)
            .map(|(z, w)| z * w)
            .collect();
        fft_in_place(&mut buf);
        frames.push(
            fftshift(&buf)
                .iter()
                .map(|z| z.norm())
                .collect::<Vec<f64>>(),
        );
        times.push(sig.t0() + (start as f64 + window_len as f64 / 2.0) / fs);
        start += hop;
    }
    let peak = frames
        .iter()
        .flat_map(|f| f.iter())
        .cloned()
        .fold(0.0, f64::max);
    let magnitude_db = frames
        .into_iter()
        .map(|f| f.into_iter().map(|m| to_db(m, peak)).collect())
        .collect();
    Ok(Spectrogram {
        magnitude_db,
        times,
        frequencies: fftshift(&fft_frequencies(window_len, fs)),
    })
}

/// `20 log10(m / peak)`, clamped at [`DB_FLOOR`].
pub(crate) fn to_db(m: f64, peak: f64) -> f64 {
    if peak <= 0.0 {
        return DB_FLOOR;
    }
    let v = 20.0 * (m / peak).log10();
    if v.is_finite() {
        v.max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}
