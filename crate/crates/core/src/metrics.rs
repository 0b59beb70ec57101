//! Waveform and profile measurements.

use std::f64::consts::PI;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::receiver::{RangeDopplerMap, RangeProfile};
use crate::signal::{ComplexBaseband, Spectrum};

pub use crate::signal::mainlobe_halfwidth;

/// Null candidates must lie this far below the highest level between the
/// beat tone and the candidate, and the spectrum must recover from them.
pub const NULL_DEPTH_DB: f64 = 10.0;

/// Peak sidelobe level (dB, relative to the mainlobe) outside
/// `mainlobe_bin +- halfwidth`, with circular bin distance.
pub fn psl(profile: &RangeProfile, mainlobe_halfwidth_bins: usize) -> Result<f64> {
    let n = profile.magnitude_db.len();
    if 2 * mainlobe_halfwidth_bins + 1 >= n {
        return Err(Error::Measurement(format!(
            "mainlobe exclusion of +-{mainlobe_halfwidth_bins} bins covers the {n}-bin profile"
        )));
    }
    let peak = profile.mainlobe_bin;
    let side = profile
        .magnitude_db
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let d = i.abs_diff(peak);
            d.min(n - d) > mainlobe_halfwidth_bins
        })
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(side - profile.magnitude_db[peak])
}

/// `max |x|^2 / mean |x|^2`.
pub fn papr(sig: &ComplexBaseband) -> Result<f64> {
    let mean = sig.mean_power();
    if mean <= 0.0 {
        return Err(Error::Measurement("PAPR of an all-zero signal".into()));
    }
    let peak = sig
        .samples()
        .iter()
        .map(|z| z.norm_sqr())
        .fold(0.0, f64::max);
    Ok(peak / mean)
}

/// `10 log10(n_chips)`.
pub fn spreading_factor(n_chips: usize) -> f64 {
    10.0 * (n_chips as f64).log10()
}

/// Victim-versus-interferer levels of one processed profile or map.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossIsolation {
    /// Victim peak minus the strongest residual cell (dB).
    pub isolation_db: f64,
    /// Victim peak minus the mean residual power over the region (dB).
    pub suppression_db: f64,
    /// Residual levels over the region, relative to the victim peak (dB).
    pub residual_db: Vec<f64>,
}

fn db_mean(levels: &[f64]) -> f64 {
    let m = levels.iter().map(|v| 10f64.powf(v / 10.0)).sum::<f64>() / levels.len() as f64;
    10.0 * m.log10()
}

fn victim_level(db: &[f64], victim_bin: usize) -> Result<f64> {
    let n = db.len();
    let lo = victim_bin.saturating_sub(1);
    let hi = (victim_bin + 1).min(n - 1);
    let (i, v) =
        (lo..=hi).map(|i| (i, db[i])).fold(
            (lo, f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 { b } else { a },
        );
    let left = if i > 0 { db[i - 1] } else { f64::NEG_INFINITY };
    let right = if i + 1 < n {
        db[i + 1]
    } else {
        f64::NEG_INFINITY
    };
    if v < left || v < right || (v == left && v == right) {
        return Err(Error::Measurement(format!(
            "no victim peak within 1 bin of bin {victim_bin}"
        )));
    }
    Ok(v)
}

fn isolation_from(victim: f64, region: Vec<f64>) -> Result<CrossIsolation> {
    if region.is_empty() {
        return Err(Error::Measurement("interferer region is empty".into()));
    }
    let residual_db: Vec<f64> = region.iter().map(|v| v - victim).collect();
    let worst = residual_db
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CrossIsolation {
        isolation_db: -worst,
        suppression_db: -db_mean(&residual_db),
        residual_db,
    })
}

/// Cross-isolation on a fast-time profile. The interferer region is
/// `interferer_bin +- spread_halfwidth_bins`, minus the victim's
/// `+- victim_halfwidth_bins` mainlobe.
pub fn cross_isolation(
    profile: &RangeProfile,
    victim_bin: usize,
    interferer_bin: usize,
    spread_halfwidth_bins: usize,
    victim_halfwidth_bins: usize,
) -> Result<CrossIsolation> {
    let db = &profile.magnitude_db;
    let victim = victim_level(db, victim_bin)?;
    let region = (0..db.len())
        .filter(|&i| i.abs_diff(interferer_bin) <= spread_halfwidth_bins)
        .filter(|&i| i.abs_diff(victim_bin) > victim_halfwidth_bins)
        .map(|i| db[i])
        .collect();
    isolation_from(victim, region)
}

/// Cross-isolation on a range-Doppler map; the region spans all Doppler cells
/// of the interferer's range bins.
pub fn cross_isolation_map(
    map: &RangeDopplerMap,
    victim: (usize, usize),
    interferer_range_bin: usize,
    spread_halfwidth_bins: usize,
    victim_halfwidth_bins: usize,
) -> Result<CrossIsolation> {
    let (vr, vd) = victim;
    let row = map
        .magnitude_db
        .get(vr)
        .ok_or_else(|| Error::Measurement(format!("victim range bin {vr} out of range")))?;
    if vd >= row.len() {
        return Err(Error::Measurement(format!(
            "victim Doppler bin {vd} out of range"
        )));
    }
    let column: Vec<f64> = map.magnitude_db.iter().map(|r| r[vd]).collect();
    let level = victim_level(&column, vr)?;
    let region = map
        .magnitude_db
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(interferer_range_bin) <= spread_halfwidth_bins)
        .filter(|(i, _)| i.abs_diff(vr) > victim_halfwidth_bins)
        .flat_map(|(_, r)| r.iter().cloned())
        .collect();
    isolation_from(level, region)
}

/// Residual energy outside `center_bin +- halfwidth_bins` relative to the
/// energy inside (dB), ignoring bins in `exclude`'s `(bin, halfwidth)` zone.
pub fn spread_containment_db(
    profile: &RangeProfile,
    center_bin: usize,
    halfwidth_bins: usize,
    exclude: Option<(usize, usize)>,
) -> Result<f64> {
    let mut inside = 0.0;
    let mut outside = 0.0;
    for (i, v) in profile.magnitude_db.iter().enumerate() {
        if let Some((b, h)) = exclude {
            if i.abs_diff(b) <= h {
                continue;
            }
        }
        let p = 10f64.powf(v / 10.0);
        if i.abs_diff(center_bin) <= halfwidth_bins {
            inside += p;
        } else {
            outside += p;
        }
    }
    if inside <= 0.0 {
        return Err(Error::Measurement(
            "no energy inside the spread region".into(),
        ));
    }
    Ok(10.0 * (outside / inside).log10())
}

/// Power spectrum on an ascending frequency axis.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSpectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
}

impl PowerSpectrum {
    pub fn from_spectrum(s: &Spectrum) -> Self {
        Self {
            frequencies: s.frequencies.clone(),
            power: s.power(),
        }
    }

    /// Adds another spectrum on the same axis (ensemble averaging).
    pub fn accumulate(&mut self, other: &PowerSpectrum) -> Result<()> {
        if other.power.len() != self.power.len() {
            return Err(Error::LengthMismatch {
                expected: self.power.len(),
                actual: other.power.len(),
            });
        }
        for (a, b) in self.power.iter_mut().zip(&other.power) {
            *a += b;
        }
        Ok(())
    }

    fn nearest_bin(&self, f: f64) -> usize {
        let df = self.frequencies[1] - self.frequencies[0];
        ((f - self.frequencies[0]) / df)
            .round()
            .clamp(0.0, (self.frequencies.len() - 1) as f64) as usize
    }

    /// Fraction of power above `f_lo` (dB).
    pub fn leakage_above_db(&self, f_lo: f64) -> Result<f64> {
        let total: f64 = self.power.iter().sum();
        let above: f64 = self
            .frequencies
            .iter()
            .zip(&self.power)
            .filter(|(f, _)| **f > f_lo)
            .map(|(_, p)| p)
            .sum();
        if total <= 0.0 {
            return Err(Error::Measurement("empty spectrum".into()));
        }
        Ok(10.0 * (above / total).log10())
    }
}

/// Frequency of the first spectral null above `f_b`.
///
/// The spectrum is converted to dB relative to its peak (floored at -200 dB)
/// and smoothed over 3 bins. A null is the first 3-point local minimum above
/// `f_b` that sits at least [`NULL_DEPTH_DB`] below the highest smoothed level
/// between `f_b` and itself, and after which the level climbs back by at
/// least 3 dB before Nyquist.
pub fn first_null(spec: &PowerSpectrum, f_b: f64) -> Result<f64> {
    let n = spec.power.len();
    if n < 4 {
        return Err(Error::Measurement(
            "spectrum too short for null search".into(),
        ));
    }
    let peak = spec.power.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::Measurement("empty spectrum".into()));
    }
    let db: Vec<f64> = spec
        .power
        .iter()
        .map(|&p| {
            let v = 10.0 * (p / peak).log10();
            if v.is_finite() {
                v.max(-200.0)
            } else {
                -200.0
            }
        })
        .collect();
    let sm: Vec<f64> = (0..n)
        .map(|i| (db[(i + n - 1) % n] + db[i] + db[(i + 1) % n]) / 3.0)
        .collect();
    let start = spec.nearest_bin(f_b);
    let mut run_max = sm[start];
    for j in start + 1..n - 1 {
        run_max = run_max.max(sm[j]);
        let is_min = sm[j] < sm[j - 1] && sm[j] <= sm[j + 1];
        if !is_min || sm[j] > run_max - NULL_DEPTH_DB {
            continue;
        }
        let recovers = sm[j + 1..].iter().any(|&v| v >= sm[j] + 3.0);
        if recovers {
            return Ok(spec.frequencies[j]);
        }
    }
    Err(Error::Measurement(format!(
        "no spectral null above {f_b} Hz before Nyquist"
    )))
}

/// Unwrapped phase of `decoded * e^{-j2pi f_b t}` with its mean removed (rad).
pub fn residual_phase_error(decoded: &ComplexBaseband, f_b: f64) -> Vec<f64> {
    let rate = decoded.sample_rate();
    let raw: Vec<f64> = decoded
        .samples()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let t = i as f64 / rate;
            (z * num_complex::Complex64::from_polar(1.0, -2.0 * PI * f_b * t)).arg()
        })
        .collect();
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    for (i, &p) in raw.iter().enumerate() {
        if i > 0 {
            let d = p - raw[i - 1];
            if d > PI {
                offset -= 2.0 * PI;
            } else if d < -PI {
                offset += 2.0 * PI;
            }
        }
        out.push(p + offset);
    }
    let mean = out.iter().sum::<f64>() / out.len() as f64;
    out.iter().map(|p| p - mean).collect()
}

/// One row of the results ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub name: String,
    pub value: f64,
    pub unit: String,
    pub scenario_hash: String,
    pub seed: u64,
}

impl MetricReport {
    pub const CSV_HEADER: &'static str = "name,value,unit,scenario_hash,seed";

    pub fn new(
        name: impl Into<String>,
        value: f64,
        unit: impl Into<String>,
        scenario_hash: impl Into<String>,
        seed: u64,
    ) -> Result<Self> {
        let name = name.into();
        if !value.is_finite() {
            return Err(Error::Measurement(format!(
                "metric `{name}` is not finite ({value})"
            )));
        }
        Ok(Self {
            name,
            value,
            unit: unit.into(),
            scenario_hash: scenario_hash.into(),
            seed,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.name, self.value, self.unit, self.scenario_hash, self.seed
        )
    }
}

/// First 16 hex digits of the SHA-256 of a canonical scenario description.
pub fn scenario_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
