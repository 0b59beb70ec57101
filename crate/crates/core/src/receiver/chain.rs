use std::fmt;
use std::str::FromStr;

use crate::channel::{add_interferer, propagate, Interferer, Target};
use crate::coding::{coded_envelope, compensate_phase_lag, CodedEnvelope, PhaseCode};
use crate::error::{Error, Result};
use crate::signal::ComplexBaseband;
use crate::waveform::{pc_fmcw, ChirpParams};
use crate::SPEED_OF_LIGHT;

use super::{
    dechirp, decode_reference, decode_with_reference, group_delay_filter, lowpass_and_sample,
    range_profile, shift_to_max_delay, RangeProfile, ReceiverConfig,
};

/// Which transceiver is simulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainKind {
    /// Phase-lag compensated code at the transmitter.
    Proposed,
    /// Same receiver, uncompensated code.
    Legacy,
    /// Uncoded chirp; dechirp and low-pass only.
    Fmcw,
}

impl ChainKind {
    pub fn name(self) -> &'static str {
        match self {
            ChainKind::Proposed => "proposed",
            ChainKind::Legacy => "legacy",
            ChainKind::Fmcw => "fmcw",
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" => Ok(ChainKind::Proposed),
            "legacy" => Ok(ChainKind::Legacy),
            "fmcw" => Ok(ChainKind::Fmcw),
            other => Err(Error::InvalidParameter(format!(
                "unknown chain `{other}` (expected proposed, legacy or fmcw)"
            ))),
        }
    }
}

/// One simulated radar scene.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub chirp: ChirpParams,
    pub receiver: ReceiverConfig,
    /// Required unless `chain` is `Fmcw`.
    pub code: Option<PhaseCode>,
    pub chain: ChainKind,
    pub targets: Vec<Target>,
    pub interferer: Option<Interferer>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.receiver.decimation(&self.chirp)?;
        if self.chain != ChainKind::Fmcw {
            let code = self.code.as_ref().ok_or_else(|| {
                Error::InvalidParameter(format!("the {} chain needs a code", self.chain))
            })?;
            let t = self.chirp.sweep_time();
            if (code.sweep_time() - t).abs() > 1e-12 * t {
                return Err(Error::InvalidParameter(format!(
                    "code spans {} s but the sweep is {t} s",
                    code.sweep_time()
                )));
            }
        }
        let r_max = self.receiver.max_range(&self.chirp);
        for (i, tg) in self.targets.iter().enumerate() {
            if !(tg.range >= 0.0 && tg.range <= r_max * (1.0 + 1e-9)) {
                return Err(Error::InvalidParameter(format!(
                    "target {i} range {} m is outside [0, {r_max}] m",
                    tg.range
                )));
            }
        }
        Ok(())
    }

    fn active_code(&self) -> Option<&PhaseCode> {
        match self.chain {
            ChainKind::Fmcw => None,
            _ => self.code.as_ref(),
        }
    }
}

/// Transmit envelope for the scenario's chain.
pub fn transmit_envelope(s: &Scenario) -> Result<CodedEnvelope> {
    let p = &s.chirp;
    match (s.chain, s.active_code()) {
        (ChainKind::Fmcw, _) | (_, None) => CodedEnvelope::uncoded(p.n_samples(), p.tx_rate()),
        (ChainKind::Legacy, Some(code)) => coded_envelope(code, p.tx_rate()),
        (ChainKind::Proposed, Some(code)) => {
            compensate_phase_lag(&coded_envelope(code, p.tx_rate())?, p.slope())
        }
    }
}

/// Received record of one pulse starting at absolute time `t0`.
pub fn simulate_pulse(s: &Scenario, env: &CodedEnvelope, t0: f64) -> Result<ComplexBaseband> {
    let tx = pc_fmcw(&s.chirp, env)?.with_t0(t0)?;
    let rx = propagate(&tx, &s.targets, &s.chirp)?;
    match &s.interferer {
        Some(intf) => add_interferer(&rx, intf, &s.chirp),
        None => Ok(rx),
    }
}

/// Dechirp, low-pass and sample; then, if a decoding reference is given,
/// group-delay filter, shift to `tau_max` and decode.
pub fn receive(
    rx: &ComplexBaseband,
    p: &ChirpParams,
    cfg: &ReceiverConfig,
    reference: Option<&ComplexBaseband>,
) -> Result<ComplexBaseband> {
    let beat = lowpass_and_sample(&dechirp(rx, p)?, cfg)?;
    match reference {
        None => Ok(beat),
        Some(r) => {
            let aligned = shift_to_max_delay(&group_delay_filter(&beat, p.slope())?, cfg, p)?;
            decode_with_reference(&aligned, r)
        }
    }
}

/// Runs the scenario's receiver on `rx`.
pub fn process_pulse(s: &Scenario, rx: &ComplexBaseband) -> Result<ComplexBaseband> {
    let reference = match s.active_code() {
        Some(code) => Some(decode_reference(code, &s.chirp, &s.receiver)?),
        None => None,
    };
    receive(rx, &s.chirp, &s.receiver, reference.as_ref())
}

/// Range profile from the compensated transceiver. The receiver stages are
/// the same as [`legacy_chain`]; only the transmitted code differs.
pub fn proposed_chain(
    rx: &ComplexBaseband,
    p: &ChirpParams,
    cfg: &ReceiverConfig,
    code: &PhaseCode,
) -> Result<RangeProfile> {
    let reference = decode_reference(code, p, cfg)?;
    range_profile(&receive(rx, p, cfg, Some(&reference))?, cfg, p)
}

/// Range profile from the uncompensated transceiver.
pub fn legacy_chain(
    rx: &ComplexBaseband,
    p: &ChirpParams,
    cfg: &ReceiverConfig,
    code: &PhaseCode,
) -> Result<RangeProfile> {
    proposed_chain(rx, p, cfg, code)
}

/// Range profile of an uncoded FMCW receiver.
pub fn fmcw_chain(
    rx: &ComplexBaseband,
    p: &ChirpParams,
    cfg: &ReceiverConfig,
) -> Result<RangeProfile> {
    range_profile(&receive(rx, p, cfg, None)?, cfg, p)
}

/// Range profile of a single-target scenario for each Doppler shift (Hz).
/// Decoding always uses the nominal zero-Doppler reference.
pub fn doppler_tolerance_sweep(s: &Scenario, doppler_grid: &[f64]) -> Result<Vec<RangeProfile>> {
    if s.targets.len() != 1 {
        return Err(Error::InvalidParameter(format!(
            "Doppler sweep needs exactly one target, got {}",
            s.targets.len()
        )));
    }
    if s.chirp.carrier() <= 0.0 {
        return Err(Error::InvalidParameter(
            "Doppler sweep needs a positive carrier".into(),
        ));
    }
    let env = transmit_envelope(s)?;
    let reference = match s.active_code() {
        Some(code) => Some(decode_reference(code, &s.chirp, &s.receiver)?),
        None => None,
    };
    doppler_grid
        .iter()
        .map(|&fd| {
            let mut sc = s.clone();
            sc.targets[0].velocity = fd * SPEED_OF_LIGHT / (2.0 * s.chirp.carrier());
            let rx = simulate_pulse(&sc, &env, 0.0)?;
            let d = receive(&rx, &sc.chirp, &sc.receiver, reference.as_ref())?;
            range_profile(&d, &sc.receiver, &sc.chirp)
        })
        .collect()
}
