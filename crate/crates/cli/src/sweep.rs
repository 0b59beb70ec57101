//! Parameter sweeps over one axis, each point run for every waveform.

use std::fmt::Write as _;

use rayon::prelude::*;
use spcfmcw::metrics::{mainlobe_halfwidth, papr, psl};
use spcfmcw::receiver::ChainKind;
use spcfmcw::SPEED_OF_LIGHT;

use crate::config::{KeyMap, ScenarioConfig};
use crate::error::{CliError, Result, StageExt};
use crate::run::simulate;

pub const AXES: [&str; 4] = [
    "n_chips",
    "target_range_fraction",
    "doppler_hz",
    "phase_type",
];

/// Waveforms run at every point of a non-`phase_type` sweep.
pub const WAVEFORMS: [&str; 4] = ["fmcw", "bpsk", "gaussian", "gmsk"];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub waveform: String,
    pub psl_db: f64,
    pub papr: f64,
    pub peak_range_m: f64,
    pub scenario_hash: String,
    pub seed: u64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "axis,value,waveform,psl_db,papr,peak_range_m,scenario_hash,seed";
}

fn bad_value(axis: &str, v: &str, what: &str) -> CliError {
    CliError::Config(format!("sweep value `{v}` for axis {axis} is not {what}"))
}

fn set_waveform(keys: &mut KeyMap, base_chain: ChainKind, waveform: &str) -> Result<()> {
    match waveform {
        "fmcw" | "none" => keys.set("chain", "fmcw"),
        other => {
            keys.set("code.type", other);
            if base_chain == ChainKind::Fmcw {
                keys.set("chain", "proposed");
            }
        }
    }
    Ok(())
}

fn point_keys(base: &ScenarioConfig, axis: &str, value: &str, waveform: &str) -> Result<KeyMap> {
    let mut k = base.to_keys();
    k.set("outputs", "metrics");
    k.set("frame.n_pulses", "1");
    match axis {
        "n_chips" => {
            value
                .parse::<usize>()
                .map_err(|_| bad_value(axis, value, "a chip count"))?;
            k.set("code.n_chips", value);
            k.remove("code.file");
            k.remove("code.smoother_bandwidth_hz");
            k.remove("code.modulation_scale");
        }
        "target_range_fraction" => {
            value
                .parse::<f64>()
                .map_err(|_| bad_value(axis, value, "a number"))?;
            k.remove("target.0.range_m");
            k.set("target.0.range_fraction", value);
        }
        "doppler_hz" => {
            let fd: f64 = value
                .parse()
                .map_err(|_| bad_value(axis, value, "a number"))?;
            if base.carrier <= 0.0 {
                return Err(CliError::key(
                    "chirp.carrier_hz",
                    "a Doppler sweep needs a positive carrier",
                ));
            }
            k.set(
                "target.0.velocity_mps",
                (fd * SPEED_OF_LIGHT / (2.0 * base.carrier)).to_string(),
            );
        }
        "phase_type" => {}
        other => {
            return Err(CliError::Config(format!(
                "unsupported sweep axis `{other}` (supported: {})",
                AXES.join(", ")
            )))
        }
    }
    set_waveform(&mut k, base.chain, waveform)?;
    Ok(k)
}

fn run_point(base: &ScenarioConfig, axis: &str, value: &str, waveform: &str) -> Result<SweepRow> {
    let cfg = ScenarioConfig::from_keys(&point_keys(base, axis, value, waveform)?)?;
    let sim = simulate(&cfg)?;
    let hw = mainlobe_halfwidth(sim.profile.len(), cfg.window_sidelobe_db).stage("metrics")?;
    Ok(SweepRow {
        axis: axis.to_string(),
        value: value.to_string(),
        waveform: waveform.to_string(),
        psl_db: psl(&sim.profile, hw).stage("metrics")?,
        papr: papr(&sim.tx).stage("metrics")?,
        peak_range_m: sim.profile.range_axis[sim.profile.mainlobe_bin],
        scenario_hash: cfg.hash(),
        seed: cfg.seed,
    })
}

/// One row per (value, waveform). Points run on the current rayon pool.
/// Every point is a single pulse with only metrics computed.
pub fn sweep(base: &ScenarioConfig, axis: &str, values: &[String]) -> Result<Vec<SweepRow>> {
    if !AXES.contains(&axis) {
        return Err(CliError::Config(format!(
            "unsupported sweep axis `{axis}` (supported: {})",
            AXES.join(", ")
        )));
    }
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let points: Vec<(String, String)> = values
        .iter()
        .flat_map(|v| {
            if axis == "phase_type" {
                vec![(v.clone(), v.to_ascii_lowercase())]
            } else {
                WAVEFORMS
                    .iter()
                    .map(|w| (v.clone(), w.to_string()))
                    .collect()
            }
        })
        .collect();
    points
        .par_iter()
        .map(|(v, w)| run_point(base, axis, v, w))
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{}\n", SweepRow::CSV_HEADER);
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.axis, r.value, r.waveform, r.psl_db, r.papr, r.peak_range_m, r.scenario_hash, r.seed
        );
    }
    s
}
