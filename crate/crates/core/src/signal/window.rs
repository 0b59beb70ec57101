use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft_in_place;
use crate::error::{Error, Result};

/// Dolph-Chebyshev window of length `n` with sidelobes `sidelobe_db` below the
/// mainlobe, peak-normalized to 1.
///
/// Built from the DFT of the Chebyshev polynomial sampled on the unit circle;
/// the result is mirrored so `w[i] == w[n - 1 - i]` holds bit for bit.
pub fn chebyshev_window(n: usize, sidelobe_db: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "window length {n} must be at least 2"
        )));
    }
    if !(sidelobe_db.is_finite() && sidelobe_db > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sidelobe level {sidelobe_db} dB must be positive"
        )));
    }
    let order = (n - 1) as f64;
    let beta = ((10f64.powf(sidelobe_db / 20.0)).acosh() / order).cosh();
    let odd = n % 2 == 1;
    let mut p: Vec<Complex64> = (0..n)
        .map(|i| {
            let x = beta * (PI * i as f64 / n as f64).cos();
            let v = if x > 1.0 {
                (order * x.acosh()).cosh()
            } else if x < -1.0 {
                let sign = if odd { 1.0 } else { -1.0 };
                sign * (order * (-x).acosh()).cosh()
            } else {
                (order * x.acos()).cos()
            };
            if odd {
                Complex64::new(v, 0.0)
            } else {
                v * Complex64::from_polar(1.0, PI * i as f64 / n as f64)
            }
        })
        .collect();
    fft_in_place(&mut p);
    let re: Vec<f64> = p.iter().map(|z| z.re).collect();
    let mut w = Vec::with_capacity(n);
    if odd {
        let half = n.div_ceil(2);
        w.extend(re[1..half].iter().rev());
        w.extend(&re[..half]);
    } else {
        let half = n / 2 + 1;
        w.extend(re[1..half].iter().rev());
        w.extend(&re[1..half]);
    }
    let peak = w.iter().cloned().fold(f64::MIN, f64::max);
    for v in w.iter_mut() {
        *v /= peak;
    }
    Ok(w)
}

/// Half-width in bins of the Chebyshev window's spectral mainlobe, measured
/// where its 16x zero-padded spectrum first drops to within 0.5 dB of the
/// sidelobe floor.
pub fn mainlobe_halfwidth(n: usize, sidelobe_db: f64) -> Result<usize> {
    let w = chebyshev_window(n, sidelobe_db)?;
    let pad = 16;
    let mut buf = vec![Complex64::new(0.0, 0.0); n * pad];
    for (b, v) in buf.iter_mut().zip(&w) {
        *b = Complex64::new(*v, 0.0);
    }
    fft_in_place(&mut buf);
    let peak = buf[0].norm();
    let limit = -sidelobe_db + 0.5;
    let j = buf[..buf.len() / 2]
        .iter()
        .position(|z| 20.0 * (z.norm() / peak).log10() <= limit)
        .ok_or_else(|| {
            Error::Measurement("window mainlobe never reaches the sidelobe floor".into())
        })?;
    Ok(j.div_ceil(pad))
}
