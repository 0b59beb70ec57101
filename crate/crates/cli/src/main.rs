use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spcfmcw_cli::config::{load_layers, KeyMap, ScenarioConfig};
use spcfmcw_cli::mf::compare_matched_filter;
use spcfmcw_cli::presets::{preset, PRESETS};
use spcfmcw_cli::run::{generate, run};
use spcfmcw_cli::sweep::{sweep, sweep_csv};
use spcfmcw_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "spcfmcw", version, about = "Phase-coded FMCW radar simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Built-in scenario the config file is layered on.
    #[arg(long, default_value = "desk")]
    preset: String,
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the first transmitted pulse and its code envelope.
    Generate(Common),
    /// Run one scenario and write the requested products.
    Run(Common),
    /// Sweep one parameter for every waveform and write sweep.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// n_chips, target_range_fraction, doppler_hz or phase_type.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Compare the chain's range profile with a matched filter.
    CompareMf(Common),
    /// List the built-in presets, or print one with --show.
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
}

fn load(c: &Common) -> Result<ScenarioConfig> {
    let base = preset(&c.preset).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        CliError::Config(format!(
            "unknown preset `{}` (available: {})",
            c.preset,
            names.join(", ")
        ))
    })?;
    let mut overrides = KeyMap::new();
    if let Some(s) = c.seed {
        overrides.set("seed", s.to_string());
    }
    load_layers(&base, c.config.as_deref(), &overrides)
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        b = b.num_threads(j);
    }
    b.build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate(c) => {
            let cfg = load(&c)?;
            report(&pool(c.jobs)?.install(|| generate(&cfg, &c.out))?);
        }
        Command::Run(c) => {
            let cfg = load(&c)?;
            report(&pool(c.jobs)?.install(|| run(&cfg, &c.out))?);
        }
        Command::Sweep {
            common,
            axis,
            values,
        } => {
            let cfg = load(&common)?;
            let rows = pool(common.jobs)?.install(|| sweep(&cfg, &axis, &values))?;
            let path = common.out.join("sweep.csv");
            write_file(&path, &sweep_csv(&rows))?;
            report(&[path]);
        }
        Command::CompareMf(c) => {
            let cfg = load(&c)?;
            let cmp = pool(c.jobs)?.install(|| compare_matched_filter(&cfg))?;
            let path = c.out.join("compare_mf.csv");
            write_file(&path, &cmp.to_csv())?;
            let (a, b) = cmp.peak_bins();
            println!("{}", path.display());
            println!("peak bin: chain {a}, matched filter {b}");
        }
        Command::Presets { show: None } => {
            for p in PRESETS {
                println!("{:<10} {}", p.name, p.description);
            }
        }
        Command::Presets { show: Some(name) } => {
            let p = PRESETS
                .iter()
                .find(|p| p.name == name)
                .ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
            print!("{}", p.text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
