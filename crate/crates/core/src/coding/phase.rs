use std::f64::consts::PI;

use num_complex::Complex64;

use super::erf::erfi;
use super::{sample_count, CodedEnvelope, PhaseCode, PhaseType};
use crate::error::{Error, Result};
use crate::signal::{apply_transfer, ComplexBaseband, TransferFunction};

/// A code transition: first sample of the new chip and the phase jump.
#[derive(Clone, Copy, Debug)]
struct Step {
    sample: usize,
    jump: f64,
}

fn chip_layout(code: &PhaseCode, rate: f64) -> Result<usize> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample rate {rate} Hz must be positive"
        )));
    }
    if rate * code.chip_duration() < 2.0 - 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "{rate} Hz gives {:.3} samples per chip; at least 2 are required",
            rate * code.chip_duration()
        )));
    }
    sample_count(code.sweep_time(), rate)
}

/// Chip index of sample `i` among `n` samples; the sample on a boundary
/// belongs to the later chip.
fn chip_of(i: usize, n: usize, n_chips: usize) -> usize {
    ((i as u128 * n_chips as u128) / n as u128) as usize
}

fn steps(values: &[f64], n: usize) -> Vec<Step> {
    let n_chips = values.len();
    (1..n_chips)
        .filter(|&c| values[c] != values[c - 1])
        .map(|c| Step {
            sample: (c as u128 * n as u128).div_ceil(n_chips as u128) as usize,
            jump: values[c] - values[c - 1],
        })
        .collect()
}

/// Piecewise-constant `pi * bit(chip)` on the `rate` grid over `[0, T)`.
pub fn bpsk_phase(code: &PhaseCode, rate: f64) -> Result<Vec<f64>> {
    let n = chip_layout(code, rate)?;
    let phases = code.phases();
    Ok((0..n)
        .map(|i| phases[chip_of(i, n, code.n_chips())])
        .collect())
}

/// Sampled, unit-sum Gaussian kernel truncated at `+-5/eta`; index `j`
/// holds lag `j - half`.
pub fn gaussian_kernel(eta: f64, rate: f64) -> Vec<f64> {
    let half = (5.0 * rate / eta).floor() as usize;
    let mut k: Vec<f64> = (0..=2 * half)
        .map(|j| {
            let t = (j as f64 - half as f64) / rate;
            (-(eta * t) * (eta * t)).exp()
        })
        .collect();
    let sum: f64 = k.iter().sum();
    for v in k.iter_mut() {
        *v /= sum;
    }
    k
}

/// Same-length convolution of a step signal with `kernel`, edges replicated.
///
/// The input is `base` (already containing the full steps); each step is
/// softened by replacing its unit step with the kernel's running sum. This is
/// the direct convolution rearranged so only samples near a step are touched.
fn smooth_steps(base: &[f64], steps: &[Step], kernel: &[f64]) -> Vec<f64> {
    let half = kernel.len() / 2;
    let mut cdf = Vec::with_capacity(kernel.len());
    let mut acc = 0.0;
    for v in kernel {
        acc += v;
        cdf.push(acc);
    }
    let n = base.len() as isize;
    let mut out = base.to_vec();
    for s in steps {
        for (j, c) in cdf.iter().enumerate() {
            let d = j as isize - half as isize;
            let i = s.sample as isize + d;
            if i < 0 || i >= n {
                continue;
            }
            let unit = if d >= 0 { 1.0 } else { 0.0 };
            out[i as usize] += s.jump * (c - unit);
        }
    }
    out
}

fn smoothed(code: &PhaseCode, rate: f64, chip_values: &[f64]) -> Result<Vec<f64>> {
    let n = chip_layout(code, rate)?;
    let kernel = gaussian_kernel(code.eta(), rate);
    if kernel.len() > n {
        return Err(Error::InvalidParameter(format!(
            "Gaussian kernel of {} taps is longer than the {n}-sample record",
            kernel.len()
        )));
    }
    let base: Vec<f64> = (0..n)
        .map(|i| chip_values[chip_of(i, n, code.n_chips())])
        .collect();
    Ok(smooth_steps(&base, &steps(chip_values, n), &kernel))
}

/// `phi_bpsk` convolved with the unit-area Gaussian of sharpness `eta`.
pub fn gaussian_phase(code: &PhaseCode, rate: f64) -> Result<Vec<f64>> {
    smoothed(code, rate, &code.phases())
}

/// `modulation_scale` times the cumulative trapezoid integral of `phi_gauss`.
pub fn gmsk_phase(code: &PhaseCode, rate: f64) -> Result<Vec<f64>> {
    let g = gaussian_phase(code, rate)?;
    let k = code.modulation_scale() / (2.0 * rate);
    let mut out = Vec::with_capacity(g.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in g.windows(2) {
        acc += k * (w[0] + w[1]);
        out.push(acc);
    }
    Ok(out)
}

/// `s(t) = exp(j phi(t))` for the code's phase type, uncompensated.
pub fn coded_envelope(code: &PhaseCode, rate: f64) -> Result<CodedEnvelope> {
    let phi = match code.phase_type() {
        PhaseType::Bpsk => bpsk_phase(code, rate)?,
        PhaseType::Gaussian => gaussian_phase(code, rate)?,
        PhaseType::Gmsk => gmsk_phase(code, rate)?,
    };
    let s = phi.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    Ok(CodedEnvelope::new(
        ComplexBaseband::new(s, rate, 0.0)?,
        false,
    ))
}

/// Complex-envelope smoothing `c(t) * h(t)` with `c = exp(j phi_bpsk)`.
/// Spectral-analysis helper only; the transmitter uses phase smoothing.
pub fn gaussian_envelope_convolution(code: &PhaseCode, rate: f64) -> Result<ComplexBaseband> {
    let levels: Vec<f64> = code.phases().iter().map(|p| p.cos()).collect();
    let v = smoothed(code, rate, &levels)?;
    ComplexBaseband::new(
        v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        rate,
        0.0,
    )
}

/// Multiplies the envelope spectrum by `e^{-j pi f^2 / k}` over the full record.
pub fn compensate_phase_lag(env: &CodedEnvelope, k: f64) -> Result<CodedEnvelope> {
    if env.compensated() {
        return Err(Error::AlreadyCompensated);
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "chirp slope {k} Hz/s must be positive"
        )));
    }
    let s = apply_transfer(env.signal(), &TransferFunction::phase_lag(k))?;
    Ok(CodedEnvelope::new(s, true))
}

/// A Dirac term `weight * delta(t - time)` of the instantaneous frequency;
/// `weight` is the phase jump in cycles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Impulse {
    pub time: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstantaneousFrequency {
    Impulses(Vec<Impulse>),
    Sampled(Vec<f64>),
}

/// Closed-form instantaneous frequency (Hz) of the code's phase.
///
/// BPSK gives the impulse list of the transitions. The Gaussian type gives
/// `(eta / 2 pi sqrt(pi)) sum dphi_n e^{-eta^2 (t - n T_c)^2}`. GMSK gives
/// `(scale / 4 pi) (phi_first + phi_last + sum dphi_n erf(eta (t - n T_c)))`;
/// the constant comes from the leading unit step of the phase sequence.
pub fn analytic_instantaneous_frequency(code: &PhaseCode, t: &[f64]) -> InstantaneousFrequency {
    let phases = code.phases();
    let t_c = code.chip_duration();
    let jumps: Vec<(f64, f64)> = (1..phases.len())
        .filter(|&n| phases[n] != phases[n - 1])
        .map(|n| (n as f64 * t_c, phases[n] - phases[n - 1]))
        .collect();
    let eta = code.eta();
    match code.phase_type() {
        PhaseType::Bpsk => InstantaneousFrequency::Impulses(
            jumps
                .iter()
                .map(|&(time, d)| Impulse {
                    time,
                    weight: d / (2.0 * PI),
                })
                .collect(),
        ),
        PhaseType::Gaussian => {
            let a = eta / (2.0 * PI * PI.sqrt());
            InstantaneousFrequency::Sampled(
                t.iter()
                    .map(|&ti| {
                        a * jumps
                            .iter()
                            .map(|&(tn, d)| d * (-(eta * (ti - tn)).powi(2)).exp())
                            .sum::<f64>()
                    })
                    .collect(),
            )
        }
        PhaseType::Gmsk => {
            let a = code.modulation_scale() / (4.0 * PI);
            let offset = phases[0] + phases[phases.len() - 1];
            InstantaneousFrequency::Sampled(
                t.iter()
                    .map(|&ti| {
                        a * (offset
                            + jumps
                                .iter()
                                .map(|&(tn, d)| d * libm::erf(eta * (ti - tn)))
                                .sum::<f64>())
                    })
                    .collect(),
            )
        }
    }
}

/// Backward-difference instantaneous frequency `(phi[i] - phi[i-1]) rate / 2pi`;
/// the first sample repeats the second.
pub fn phase_frequency(phase: &[f64], rate: f64) -> Vec<f64> {
    let mut f: Vec<f64> = phase
        .windows(2)
        .map(|w| (w[1] - w[0]) * rate / (2.0 * PI))
        .collect();
    if let Some(&first) = f.first() {
        f.insert(0, first);
    } else {
        f.push(0.0);
    }
    f
}

/// Closed form of the phase-lag compensated BPSK code, treating the code as
/// zero outside `[0, T)`:
///
/// `s_new(t) = -(j/2) sum_{n=0}^{N_c} c_n erfi(sqrt(j pi k) (t - n T_c))`
///
/// with `c_0 = e^{j phi_1}`, `c_n = e^{j phi_{n+1}} - e^{j phi_n}` and
/// `c_{N_c} = -e^{j phi_{N_c}}`. Each term is the response of
/// `e^{-j pi f^2 / k}` to one step of the code.
pub fn analytic_compensated_bpsk(code: &PhaseCode, k: f64, t: &[f64]) -> Result<Vec<Complex64>> {
    if code.phase_type() != PhaseType::Bpsk {
        return Err(Error::InvalidParameter(format!(
            "closed form exists for BPSK only, got {}",
            code.phase_type()
        )));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "chirp slope {k} Hz/s must be positive"
        )));
    }
    let e: Vec<Complex64> = code
        .phases()
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .collect();
    let n_chips = e.len();
    let mut coeffs = Vec::with_capacity(n_chips + 1);
    coeffs.push((0.0, e[0]));
    for n in 1..n_chips {
        let c = e[n] - e[n - 1];
        if c.norm() > 0.0 {
            coeffs.push((n as f64 * code.chip_duration(), c));
        }
    }
    coeffs.push((code.sweep_time(), -e[n_chips - 1]));
    let arg = Complex64::new(0.0, PI * k).sqrt();
    let half_j = Complex64::new(0.0, -0.5);
    Ok(t.iter()
        .map(|&ti| {
            coeffs
                .iter()
                .map(|&(tn, c)| c * erfi(arg * (ti - tn)))
                .sum::<Complex64>()
                * half_j
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(bits: &[u8], ty: PhaseType, t: f64) -> PhaseCode {
        PhaseCode::new(bits.to_vec(), ty, t).unwrap()
    }

    #[test]
    fn bpsk_construction() {
        let c = code(&[0, 1], PhaseType::Bpsk, 1.0);
        let p = bpsk_phase(&c, 8.0).unwrap();
        assert_eq!(p, vec![0.0, 0.0, 0.0, 0.0, PI, PI, PI, PI]);
        assert!(bpsk_phase(&c, 3.0).is_err());
        assert!(bpsk_phase(&c, 4.0).is_ok());
    }

    #[test]
    fn boundary_sample_takes_new_chip() {
        let c = code(&[0, 1, 0], PhaseType::Bpsk, 3.0);
        let p = bpsk_phase(&c, 2.0).unwrap();
        // 6 samples, boundaries at samples 2 and 4.
        assert_eq!(p, vec![0.0, 0.0, PI, PI, 0.0, 0.0]);
    }

    #[test]
    fn step_smoothing_equals_direct_convolution() {
        let bits = [0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1];
        let c = code(&bits, PhaseType::Gaussian, 12e-6)
            .with_smoother_bandwidth(0.7e6)
            .unwrap();
        let rate = 16e6;
        let fast = gaussian_phase(&c, rate).unwrap();
        let pb = bpsk_phase(&c, rate).unwrap();
        let k = gaussian_kernel(c.eta(), rate);
        let h = k.len() / 2;
        let n = pb.len() as isize;
        for (i, &want) in fast.iter().enumerate() {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                let x = (i as isize - (j as isize - h as isize)).clamp(0, n - 1);
                acc += kj * pb[x as usize];
            }
            assert!((acc - want).abs() < 1e-12, "{i}: {acc} vs {want}");
        }
    }

    #[test]
    fn wide_smoother_reproduces_bpsk() {
        let c = code(&[0, 1, 1, 0, 1], PhaseType::Gaussian, 5e-6)
            .with_smoother_bandwidth(1e12)
            .unwrap();
        assert_eq!(
            gaussian_phase(&c, 8e6).unwrap(),
            bpsk_phase(&c, 8e6).unwrap()
        );
    }

    #[test]
    fn kernel_longer_than_record_is_an_error() {
        let c = code(&[0, 1], PhaseType::Gaussian, 2e-6)
            .with_smoother_bandwidth(1e3)
            .unwrap();
        assert!(gaussian_phase(&c, 8e6).is_err());
    }

    #[test]
    fn single_transition_matches_erf() {
        let c = code(&[0, 1], PhaseType::Gaussian, 2e-6);
        let rate = 512e6;
        let phi = gaussian_phase(&c, rate).unwrap();
        let edge = phi.len() / 2;
        let t_edge = (edge as f64 - 0.5) / rate;
        // The sampled kernel's running sum is a midpoint rule for the erf
        // integral; its error is about pi g'(t) / 24 with g the kernel in
        // sample units, and |g'| peaks at sqrt(2/e) eta_s^2 / sqrt(pi).
        let eta_s = c.eta() / rate;
        let tol = 1.5 * PI * (2.0 / std::f64::consts::E).sqrt() * eta_s * eta_s / PI.sqrt() / 24.0;
        for (i, &p) in phi.iter().enumerate() {
            let t = i as f64 / rate;
            let want = 0.5 * PI * (1.0 + libm::erf(c.eta() * (t - t_edge)));
            assert!((p - want).abs() < tol, "{i}: {p} vs {want}");
        }
    }

    #[test]
    fn gmsk_zero_bits_and_continuity() {
        let c = code(&[0; 8], PhaseType::Gmsk, 8e-6);
        assert!(gmsk_phase(&c, 16e6).unwrap().iter().all(|&p| p == 0.0));
        let c = code(&[0, 1, 1, 0, 1, 0, 1, 1], PhaseType::Gmsk, 8e-6);
        let rate = 16e6;
        let p = gmsk_phase(&c, rate).unwrap();
        let bound = PI * c.modulation_scale() / (rate * c.chip_duration()) * 1.1;
        for w in p.windows(2) {
            assert!((w[1] - w[0]).abs() < bound);
        }
    }

    #[test]
    fn uncompensated_envelopes_have_unit_modulus() {
        let bits = super::super::random_code(64, 9).unwrap();
        for ty in PhaseType::ALL {
            let env = coded_envelope(&code(&bits, ty, 64e-6), 8e6).unwrap();
            assert!(!env.compensated());
            let worst = env
                .signal()
                .samples()
                .iter()
                .map(|z| (z.norm() - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "{ty}: {worst}");
        }
    }

    #[test]
    fn double_compensation_rejected() {
        let env = coded_envelope(&code(&[0, 1, 1, 0], PhaseType::Bpsk, 4e-6), 8e6).unwrap();
        let once = compensate_phase_lag(&env, 1e11).unwrap();
        assert!(once.compensated());
        assert!(matches!(
            compensate_phase_lag(&once, 1e11),
            Err(Error::AlreadyCompensated)
        ));
    }

    #[test]
    fn vanishing_slope_is_identity() {
        let env = coded_envelope(&code(&[0, 1, 1, 0], PhaseType::Gmsk, 4e-6), 8e6).unwrap();
        let out = compensate_phase_lag(&env, 1e30).unwrap();
        for (a, b) in env.signal().samples().iter().zip(out.signal().samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_bits_have_no_frequency() {
        for ty in PhaseType::ALL {
            let c = code(&[1; 4], ty, 4e-6);
            match analytic_instantaneous_frequency(&c, &[0.0, 1e-6, 2e-6]) {
                InstantaneousFrequency::Impulses(v) => assert!(v.is_empty()),
                InstantaneousFrequency::Sampled(v) if ty == PhaseType::Gaussian => {
                    assert!(v.iter().all(|&x| x == 0.0))
                }
                InstantaneousFrequency::Sampled(v) => {
                    // GMSK at a sustained pi level: scale * pi / 2pi.
                    let want = c.modulation_scale() / 2.0;
                    assert!(v.iter().all(|&x| (x - want).abs() < 1e-9 * want));
                }
            }
        }
    }

    #[test]
    fn gaussian_peak_value() {
        let c = code(&[0, 1], PhaseType::Gaussian, 2e-6);
        match analytic_instantaneous_frequency(&c, &[1e-6]) {
            InstantaneousFrequency::Sampled(v) => {
                let want = c.eta() * PI / (2.0 * PI * PI.sqrt());
                assert!((v[0] - want).abs() < 1e-9 * want);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn erfi_form_rejects_non_bpsk() {
        let c = code(&[0, 1], PhaseType::Gmsk, 2e-6);
        assert!(analytic_compensated_bpsk(&c, 1e11, &[0.0]).is_err());
    }

    #[test]
    fn erfi_form_tends_to_code_for_steep_slope() {
        // With k -> infinity the filter vanishes and the closed form returns
        // the rectangular code. The erfi tails decay like
        // 1 / (pi sqrt(k) |t - n T_c|), about 6e-5 here.
        let c = code(&[0, 1, 1, 0], PhaseType::Bpsk, 4e-6);
        let t = [0.5e-6, 1.5e-6, 2.5e-6, 3.5e-6, 4.5e-6, -0.5e-6];
        let v = analytic_compensated_bpsk(&c, 1e20, &t).unwrap();
        let want = [1.0, -1.0, -1.0, 1.0, 0.0, 0.0];
        let tol = 4.0 / (PI * 1e10 * 0.5e-6);
        for (a, b) in v.iter().zip(want) {
            assert!((a - Complex64::new(b, 0.0)).norm() < tol, "{a} vs {b}");
        }
    }
}
