//! Stretch processing against a full-bandwidth matched filter.

use std::fmt::Write as _;

use num_complex::Complex64;
use spcfmcw::signal::{fft_in_place, ifft_in_place};

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::run::simulate;

/// Both responses over the range bins `0..=f_b_max T`.
#[derive(Clone, Debug, PartialEq)]
pub struct MfComparison {
    pub range_axis: Vec<f64>,
    /// Proposed-chain profile, peak-normalized (dB).
    pub proposed_db: Vec<f64>,
    /// Matched-filter magnitude at the same ranges, peak-normalized (dB).
    pub matched_db: Vec<f64>,
}

impl MfComparison {
    pub fn peak_bins(&self) -> (usize, usize) {
        let argmax = |v: &[f64]| {
            v.iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |a, (i, &x)| if x > a.1 { (i, x) } else { a },
                )
                .0
        };
        (argmax(&self.proposed_db), argmax(&self.matched_db))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("range_m,proposed_db,matched_db\n");
        for ((r, a), b) in self
            .range_axis
            .iter()
            .zip(&self.proposed_db)
            .zip(&self.matched_db)
        {
            let _ = writeln!(s, "{r},{a},{b}");
        }
        s
    }
}

fn db(mags: &[f64]) -> Vec<f64> {
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    mags.iter()
        .map(|&m| {
            if peak > 0.0 && m > 0.0 {
                (20.0 * (m / peak).log10()).max(-400.0)
            } else {
                -400.0
            }
        })
        .collect()
}

/// Runs the scenario's chain and a circular cross-correlation of the
/// received pulse with the transmitted one at the transmit rate. Range bin
/// `m` (beat `m / T`) corresponds to lag `m * tx_rate / B` samples, which
/// must be an integer.
pub fn compare_matched_filter(cfg: &ScenarioConfig) -> Result<MfComparison> {
    if cfg.targets.len() != 1 {
        return Err(CliError::key(
            "target.1.range_m",
            format!(
                "matched-filter comparison needs one target, got {}",
                cfg.targets.len()
            ),
        ));
    }
    let ratio = cfg.tx_rate / cfg.bandwidth;
    let step = ratio.round();
    if step < 1.0 || (ratio - step).abs() > 1e-9 * step {
        return Err(CliError::key(
            "chirp.tx_rate_hz",
            format!(
                "transmit rate / bandwidth = {ratio} must be an integer for the matched filter"
            ),
        ));
    }
    let step = step as usize;
    let sim = simulate(cfg)?;

    let mut rx: Vec<Complex64> = sim.rx.samples().to_vec();
    let mut tx: Vec<Complex64> = sim.tx.samples().to_vec();
    fft_in_place(&mut rx);
    fft_in_place(&mut tx);
    let mut corr: Vec<Complex64> = rx.iter().zip(&tx).map(|(a, b)| a * b.conj()).collect();
    ifft_in_place(&mut corr);

    let p = &sim.profile;
    let zero = p.bin_of_frequency(0.0);
    let n_bins = (cfg.max_beat * cfg.sweep_time).floor() as usize;
    let last = (zero + n_bins).min(p.len() - 1);
    let bins = zero..=last;
    let matched: Vec<f64> = (0..=last - zero)
        .map(|m| corr.get(m * step).map_or(0.0, |z| z.norm()))
        .collect();
    Ok(MfComparison {
        range_axis: p.range_axis[bins.clone()].to_vec(),
        proposed_db: p.magnitude_db[bins].to_vec(),
        matched_db: db(&matched),
    })
}
