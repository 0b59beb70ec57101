//! Single-scenario pipeline and its CSV products.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use spcfmcw::channel::add_awgn;
use spcfmcw::metrics::{
    cross_isolation, mainlobe_halfwidth, papr, psl, residual_phase_error, spreading_factor,
    MetricReport,
};
use spcfmcw::receiver::{
    dechirp, group_delay_filter, lowpass_and_sample, process_pulse, range_doppler, range_profile,
    shift_to_max_delay, simulate_pulse, transmit_envelope, ChainKind, RangeDopplerMap,
    RangeProfile,
};
use spcfmcw::signal::{spectrogram, write_signal, ComplexBaseband, Spectrogram};
use spcfmcw::waveform::pc_fmcw;
use spcfmcw::SPEED_OF_LIGHT;

use crate::config::{Built, Product, ScenarioConfig};
use crate::error::{CliError, Result, StageExt};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything one run computes before anything is written.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub built: Built,
    /// First transmitted pulse.
    pub tx: ComplexBaseband,
    /// First received pulse, noise included.
    pub rx: ComplexBaseband,
    pub decoded: Vec<ComplexBaseband>,
    pub profile: RangeProfile,
    pub range_doppler: Option<RangeDopplerMap>,
}

fn noise_seed(seed: u64, pulse: usize) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(pulse as u64 + 1)
}

/// Runs every pulse of the scenario (in parallel) and forms the products.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Simulation> {
    let built = cfg.build()?;
    let s = &built.scenario;
    let env = transmit_envelope(s).stage("transmit")?;
    let tx = pc_fmcw(&s.chirp, &env).stage("transmit")?;
    let pri = built.frame.pulse_repetition_interval();
    let receive_pulse = |m: usize| -> Result<(ComplexBaseband, ComplexBaseband)> {
        let rx = simulate_pulse(s, &env, m as f64 * pri).stage("propagate")?;
        let rx = add_awgn(&rx, cfg.snr_db, noise_seed(cfg.seed, m)).stage("noise")?;
        let d = process_pulse(s, &rx).stage("receive")?;
        Ok((rx, d))
    };
    let pulses: Vec<(ComplexBaseband, ComplexBaseband)> = (0..built.frame.n_pulses())
        .into_par_iter()
        .map(receive_pulse)
        .collect::<Result<_>>()?;
    let rx = pulses[0].0.clone();
    let decoded: Vec<ComplexBaseband> = pulses.into_iter().map(|(_, d)| d).collect();
    let profile = range_profile(&decoded[0], &s.receiver, &s.chirp).stage("range_profile")?;
    let range_doppler = if cfg.wants(Product::RangeDoppler) {
        Some(range_doppler(&decoded, &s.receiver, &built.frame, &s.chirp).stage("range_doppler")?)
    } else {
        None
    };
    Ok(Simulation {
        built,
        tx,
        rx,
        decoded,
        profile,
        range_doppler,
    })
}

/// Beat signal of the first pulse after the group-delay filter and shift
/// (before decoding); the plain low-passed beat for the FMCW chain.
pub fn aligned_beat(sim: &Simulation) -> Result<ComplexBaseband> {
    let s = &sim.built.scenario;
    let beat = lowpass_and_sample(&dechirp(&sim.rx, &s.chirp).stage("dechirp")?, &s.receiver)
        .stage("lowpass")?;
    if s.chain == ChainKind::Fmcw {
        return Ok(beat);
    }
    let g = group_delay_filter(&beat, s.chirp.slope()).stage("group_delay")?;
    shift_to_max_delay(&g, &s.receiver, &s.chirp).stage("group_delay")
}

/// Metric rows of one simulation.
pub fn metrics(cfg: &ScenarioConfig, sim: &Simulation) -> Result<Vec<MetricReport>> {
    let s = &sim.built.scenario;
    let hash = cfg.hash();
    let mut out = Vec::new();
    let mut push = |name: &str, value: f64, unit: &str| -> Result<()> {
        out.push(MetricReport::new(name, value, unit, hash.clone(), cfg.seed).stage("metrics")?);
        Ok(())
    };
    let n = sim.profile.len();
    let hw = mainlobe_halfwidth(n, s.receiver.window_sidelobe_db()).stage("metrics")?;
    push("psl_db", psl(&sim.profile, hw).stage("metrics")?, "dB")?;
    push(
        "peak_range_m",
        sim.profile.range_axis[sim.profile.mainlobe_bin],
        "m",
    )?;
    push("papr", papr(&sim.tx).stage("metrics")?, "ratio")?;
    if let Some(code) = s.code.as_ref().filter(|_| s.chain != ChainKind::Fmcw) {
        push(
            "spreading_factor_db",
            spreading_factor(code.n_chips()),
            "dB",
        )?;
    }
    let k = s.chirp.slope();
    let f_b = |range: f64| 2.0 * k * range / SPEED_OF_LIGHT;
    if s.targets.len() == 1 && s.interferer.is_none() && cfg.snr_db == f64::INFINITY {
        let eps = residual_phase_error(&sim.decoded[0], f_b(s.targets[0].range));
        let worst = eps.iter().map(|e| e.abs()).fold(0.0, f64::max);
        push("residual_phase_max_rad", worst, "rad")?;
    }
    if let (Some(intf), Some(target)) = (&s.interferer, s.targets.first()) {
        let victim = sim.profile.bin_of_frequency(f_b(target.range));
        let f_b2 = k * (intf.delay + intf.sync_offset);
        let ghost = sim.profile.bin_of_frequency(f_b2);
        let df = sim.profile.frequency_axis[1] - sim.profile.frequency_axis[0];
        let spread = match s.code.as_ref().filter(|_| s.chain != ChainKind::Fmcw) {
            Some(code) => ((0.5 * code.chip_bandwidth() / df).round() as usize).max(hw),
            None => hw,
        };
        let iso = cross_isolation(&sim.profile, victim, ghost, spread, hw).stage("metrics")?;
        push("isolation_db", iso.isolation_db, "dB")?;
        push("suppression_db", iso.suppression_db, "dB")?;
    }
    if let Some(map) = &sim.range_doppler {
        let (r, d, _) = map
            .magnitude_db
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(d, v)| (r, d, *v)))
            .fold(
                (0, 0, f64::NEG_INFINITY),
                |a, b| if b.2 > a.2 { b } else { a },
            );
        push("rd_peak_range_m", map.range_axis[r], "m")?;
        push("rd_peak_velocity_mps", map.velocity_axis[d], "m/s")?;
    }
    Ok(out)
}

pub fn range_profile_csv(p: &RangeProfile) -> String {
    let mut s = String::from("range_m,beat_hz,magnitude_db\n");
    for ((r, f), m) in p
        .range_axis
        .iter()
        .zip(&p.frequency_axis)
        .zip(&p.magnitude_db)
    {
        let _ = writeln!(s, "{r},{f},{m}");
    }
    s
}

/// First row: `range_m\velocity_mps` then the velocity axis; one row per range bin.
pub fn range_doppler_csv(map: &RangeDopplerMap) -> String {
    let mut s = String::from("range_m\\velocity_mps");
    for v in &map.velocity_axis {
        let _ = write!(s, ",{v}");
    }
    s.push('\n');
    for (r, row) in map.range_axis.iter().zip(&map.magnitude_db) {
        let _ = write!(s, "{r}");
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// First row: `time_s\frequency_hz` then the frequency axis; one row per frame.
pub fn spectrogram_csv(sg: &Spectrogram) -> String {
    let mut s = String::from("time_s\\frequency_hz");
    for f in &sg.frequencies {
        let _ = write!(s, ",{f}");
    }
    s.push('\n');
    for (t, row) in sg.times.iter().zip(&sg.magnitude_db) {
        let _ = write!(s, "{t}");
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn metrics_csv(rows: &[MetricReport]) -> String {
    let mut s = format!("{}\n", MetricReport::CSV_HEADER);
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Resolved keys plus derived quantities as comments; loadable as a config.
pub fn manifest(cfg: &ScenarioConfig, built: &Built) -> String {
    let s = &built.scenario;
    let mut m = format!(
        "# spcfmcw {VERSION}\n# scenario_hash = {}\n# seed = {}\n",
        cfg.hash(),
        cfg.seed
    );
    m.push_str(&cfg.to_keys().to_text());
    let _ = writeln!(m, "# derived.slope_hz_per_s = {}", s.chirp.slope());
    let _ = writeln!(m, "# derived.tx_samples = {}", s.chirp.n_samples());
    let _ = writeln!(
        m,
        "# derived.max_range_m = {}",
        s.receiver.max_range(&s.chirp)
    );
    if let Some(code) = &s.code {
        let _ = writeln!(m, "# derived.code.n_chips = {}", code.n_chips());
        let _ = writeln!(
            m,
            "# derived.code.chip_duration_s = {}",
            code.chip_duration()
        );
        let _ = writeln!(
            m,
            "# derived.code.smoother_bandwidth_hz = {}",
            code.smoother_bandwidth()
        );
        let _ = writeln!(
            m,
            "# derived.code.modulation_scale = {}",
            code.modulation_scale()
        );
    }
    for (i, t) in s.targets.iter().enumerate() {
        let _ = writeln!(m, "# derived.target.{i}.range_m = {}", t.range);
    }
    if let Some(intf) = &s.interferer {
        let _ = writeln!(m, "# derived.interferer.delay_s = {}", intf.delay);
    }
    m
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

fn dump(sig: &ComplexBaseband, path: PathBuf, written: &mut Vec<PathBuf>) -> Result<()> {
    write_signal(sig, &path).map_err(|e| match e {
        spcfmcw::Error::Io(source) => CliError::Io {
            path: path.clone(),
            source,
        },
        other => CliError::Stage {
            stage: "write",
            source: other,
        },
    })?;
    written.push(path);
    Ok(())
}

pub(crate) fn create_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })
}

/// Runs the scenario and writes the requested products plus `manifest.txt`
/// into `out`. Returns the written paths.
pub fn run(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let sim = simulate(cfg)?;
    create_dir(out)?;
    let mut written = Vec::new();
    if cfg.wants(Product::RangeProfile) {
        write(
            out.join("range_profile.csv"),
            &range_profile_csv(&sim.profile),
            &mut written,
        )?;
    }
    if let Some(map) = &sim.range_doppler {
        write(
            out.join("range_doppler.csv"),
            &range_doppler_csv(map),
            &mut written,
        )?;
    }
    if cfg.wants(Product::Spectrogram) {
        let sg = spectrogram(
            &aligned_beat(&sim)?,
            cfg.spectrogram_window,
            cfg.spectrogram_hop,
        )
        .stage("spectrogram")?;
        write(
            out.join("spectrogram.csv"),
            &spectrogram_csv(&sg),
            &mut written,
        )?;
    }
    if cfg.wants(Product::Metrics) {
        write(
            out.join("metrics.csv"),
            &metrics_csv(&metrics(cfg, &sim)?),
            &mut written,
        )?;
    }
    if cfg.wants(Product::Signals) {
        dump(&sim.tx, out.join("tx.csv"), &mut written)?;
        dump(&sim.rx, out.join("rx.csv"), &mut written)?;
        dump(&sim.decoded[0], out.join("decoded.csv"), &mut written)?;
    }
    write(
        out.join("manifest.txt"),
        &manifest(cfg, &sim.built),
        &mut written,
    )?;
    Ok(written)
}

/// Writes the first transmitted pulse and its code envelope.
pub fn generate(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let built = cfg.build()?;
    let env = transmit_envelope(&built.scenario).stage("transmit")?;
    let tx = pc_fmcw(&built.scenario.chirp, &env).stage("transmit")?;
    create_dir(out)?;
    let mut written = Vec::new();
    dump(&tx, out.join("tx.csv"), &mut written)?;
    dump(env.signal(), out.join("envelope.csv"), &mut written)?;
    write(
        out.join("manifest.txt"),
        &manifest(cfg, &built),
        &mut written,
    )?;
    Ok(written)
}
