//! Batch front end: `simulate`, `analyze`, `jstat`, `optimize`, `threshold`
//! and `feasibility`.
//!
//! Structured reports are JSON on stdout (or `--out`), tables are CSV, and
//! diagnostics go to stderr. Exit codes: 0 success, 2 invalid input or
//! configuration, 1 internal failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::counting::{eberhard_j_reduced, normalized_j, ReducedCounts, SettingPair, SettingsQuad};
use crate::error::Error;
use crate::event_sim::{accumulate_counts, blocked_counts, simulate_run, EventStream, RunConfig, RunStreams};
use crate::optimizer::{critical_efficiency, optimize, JnModel, OptimizationProblem, ThresholdQuery};
use crate::qkd_feasibility::{feasibility, feasibility_with_source};
use crate::quantum_model::{ArmParams, NoiseModel, Side, SourceParams};
use crate::statistics::{blocked_significance, blocks_from_counts, write_block_csv, BlockSeries, SignificanceReport};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Simulation configuration file. Every key is optional; defaults reproduce
/// the published 300 s/setting configuration with zero background.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub r: f64,
    pub visibility: f64,
    pub noise_model: NoiseModel,
    pub pair_rate_hz: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub eta_e_a: f64,
    pub eta_e_b: f64,
    pub background_a_hz: f64,
    pub background_b_hz: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub duration_s: f64,
    pub seed: u64,
    pub jitter_ns: u64,
    pub window_ns: u64,
    pub delay_b_ns: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            r: 0.297,
            visibility: 1.0,
            noise_model: NoiseModel::CoherenceDamping,
            // 24.2e6 pairs per 300 s setting
            pair_rate_hz: 24.2e6 / 300.0,
            eta_a: 0.7377,
            eta_b: 0.7859,
            eta_e_a: 0.0,
            eta_e_b: 0.0,
            background_a_hz: 0.0,
            background_b_hz: 0.0,
            alpha1: 85.6,
            alpha2: 118.0,
            beta1: -5.4,
            beta2: 25.9,
            duration_s: 300.0,
            seed: 42,
            jitter_ns: 0,
            window_ns: 1000,
            delay_b_ns: 0,
        }
    }
}

impl Config {
    pub fn from_json_file(path: impl AsRef<Path>) -> crate::Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Config = serde_json::from_str(&text)?;
        cfg.run_config()?;
        Ok(cfg)
    }

    pub fn run_config(&self) -> crate::Result<RunConfig> {
        let rc = RunConfig {
            source: SourceParams::new(self.r, self.visibility, self.noise_model, self.pair_rate_hz)?,
            arm_a: ArmParams::new(self.eta_a, self.eta_e_a, self.background_a_hz)?,
            arm_b: ArmParams::new(self.eta_b, self.eta_e_b, self.background_b_hz)?,
            settings: SettingsQuad::from_degrees(self.alpha1, self.alpha2, self.beta1, self.beta2),
            duration_s: self.duration_s,
            seed: self.seed,
            timing_jitter_ns: self.jitter_ns,
            window_ns: self.window_ns,
            delay_b_ns: self.delay_b_ns,
        };
        rc.validate()?;
        Ok(rc)
    }
}

/// Written next to the event files by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: Config,
    pub duration_ns: u64,
    pub expected_pairs_per_setting: f64,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub window_ns: u64,
    /// Whole-run counts.
    pub counts: ReducedCounts,
    pub j: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jn: Option<f64>,
    /// Sum of the per-block counts; differs from `counts` only by
    /// coincidences straddling block boundaries.
    pub block_counts_total: ReducedCounts,
    pub block_series: BlockSeries,
    pub significance: SignificanceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JstatReport {
    pub j: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jn: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub critical_efficiency: f64,
    pub background_per_pair: f64,
    pub visibility: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fix_r: Option<f64>,
    pub tolerance: f64,
}

#[derive(Parser, Debug)]
#[command(
    name = "eberhard",
    version,
    about = "Eberhard-inequality Bell test simulator and analyzer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a four-setting run and write event CSVs plus a manifest.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed of the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Count coincidences in an event directory and estimate significance.
    Analyze {
        #[arg(long)]
        events: PathBuf,
        /// Defaults to the manifest's window, else 1000.
        #[arg(long)]
        window_ns: Option<u64>,
        #[arg(long, default_value_t = 30)]
        blocks: usize,
        /// Measurement time per setting; defaults to the manifest's.
        #[arg(long)]
        duration_s: Option<f64>,
        /// Pairs per setting for J/N; defaults to the manifest's expectation.
        #[arg(long)]
        pairs: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-block CSV; defaults to `<out>.blocks.csv` when `--out` is set.
        #[arg(long)]
        blocks_csv: Option<PathBuf>,
    },
    /// Evaluate J (and J/N) from a counts JSON file.
    Jstat {
        #[arg(long)]
        counts: PathBuf,
    },
    /// Optimize the state parameter and analyzer angles.
    Optimize {
        #[arg(long)]
        eta_a: f64,
        #[arg(long)]
        eta_b: f64,
        #[arg(long, default_value_t = 1.0)]
        visibility: f64,
        /// Background counts per produced pair, Alice.
        #[arg(long, default_value_t = 0.0)]
        background_a: f64,
        /// Background counts per produced pair, Bob.
        #[arg(long, default_value_t = 0.0)]
        background_b: f64,
        #[arg(long)]
        fix_r: Option<f64>,
        #[arg(long, value_parser = parse_noise, default_value = "coherence-damping")]
        noise_model: NoiseModel,
        #[arg(long, default_value_t = 16)]
        multistarts: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Critical symmetric arm efficiency for a violation.
    Threshold {
        #[arg(long, default_value_t = 1.0)]
        visibility: f64,
        /// Background counts per produced pair in each arm.
        #[arg(long, default_value_t = 0.0)]
        background: f64,
        #[arg(long)]
        fix_r: Option<f64>,
        #[arg(long, value_parser = parse_noise, default_value = "coherence-damping")]
        noise_model: NoiseModel,
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
    },
    /// DI-QKD and one-sided DI-QKD efficiency feasibility.
    Feasibility {
        #[arg(long)]
        eta_a: f64,
        #[arg(long)]
        eta_b: f64,
        /// With --visibility, also report model basis visibilities.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        visibility: Option<f64>,
        #[arg(long, value_parser = parse_noise, default_value = "coherence-damping")]
        noise_model: NoiseModel,
    },
}

fn parse_noise(s: &str) -> Result<NoiseModel, String> {
    match s {
        "coherence-damping" => Ok(NoiseModel::CoherenceDamping),
        "white-noise" => Ok(NoiseModel::WhiteNoise),
        other => Err(format!(
            "unknown noise model `{other}` (coherence-damping | white-noise)"
        )),
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::Io { source, .. } if source.kind() != std::io::ErrorKind::NotFound => {
                Failure::Internal(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn emit<T: Serialize>(value: &T, out_path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    match out_path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Failure::Internal(format!("{}: {e}", p.display()))),
        None => writeln!(stdout, "{text}").map_err(|e| Failure::Internal(e.to_string())),
    }
}

fn read_manifest(dir: &Path) -> Result<Option<Manifest>, Failure> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::from(Error::io(&path, e)))?;
    let m = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Some(m))
}

fn simulate(config: Option<PathBuf>, out: PathBuf, seed: Option<u64>, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = match config {
        Some(p) => Config::from_json_file(p)?,
        None => Config::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let rc = cfg.run_config()?;
    let run = simulate_run(&rc)?;
    run.write_dir(&out).map_err(|e| Failure::Internal(e.to_string()))?;
    let mut files = Vec::new();
    for pair in SettingPair::ALL {
        for side in [Side::A, Side::B] {
            files.push(EventStream::file_name(side, pair));
        }
    }
    let manifest = Manifest {
        config: cfg,
        duration_ns: rc.duration_ns(),
        expected_pairs_per_setting: rc.pairs_per_setting(),
        files,
    };
    emit(&manifest, Some(&out.join(MANIFEST_FILE)), stdout)?;
    emit(&manifest, None, stdout)
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    events: PathBuf,
    window_ns: Option<u64>,
    blocks: usize,
    duration_s: Option<f64>,
    pairs: Option<f64>,
    out: Option<PathBuf>,
    blocks_csv: Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let manifest = read_manifest(&events)?;
    let duration_ns = match (duration_s, &manifest) {
        (Some(d), _) if d.is_finite() && d > 0.0 => Some((d * 1e9).round() as u64),
        (Some(d), _) => return Err(Failure::Input(format!("--duration-s {d} must be > 0"))),
        (None, Some(m)) => Some(m.duration_ns),
        (None, None) => None,
    };
    let window = window_ns
        .or(manifest.as_ref().map(|m| m.config.window_ns))
        .unwrap_or(1000);
    if window == 0 {
        return Err(Failure::Input("--window-ns must be > 0".into()));
    }
    let pairs = pairs.or(manifest
        .as_ref()
        .map(|m| m.expected_pairs_per_setting)
        .filter(|&n| n > 0.0));

    let run = RunStreams::read_dir(&events, duration_ns)?;
    let counts = accumulate_counts(&run, window)?;
    let block_counts = blocked_counts(&run, blocks, window)?;
    let series = blocks_from_counts(&block_counts)?;
    let significance = blocked_significance(&series)?;
    let block_total = block_counts
        .iter()
        .fold(ReducedCounts::default(), |acc, b| acc.merged(b));
    let j = eberhard_j_reduced(&counts);
    let report = AnalysisReport {
        window_ns: window,
        counts,
        j,
        jn: pairs.map(|n| normalized_j(j, n)).transpose()?,
        block_counts_total: block_total,
        block_series: BlockSeries {
            block_duration_s: duration_ns.map(|d| d as f64 * 1e-9 / blocks as f64),
            ..series
        },
        significance,
    };

    let csv_path = blocks_csv.or_else(|| {
        out.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".blocks.csv");
            PathBuf::from(s)
        })
    });
    if let Some(p) = csv_path {
        write_block_csv(&p, &block_counts).map_err(|e| Failure::Internal(e.to_string()))?;
    }
    emit(&report, out.as_deref(), stdout)
}

fn jstat(counts: PathBuf, stdout: &mut dyn Write) -> Result<(), Failure> {
    let c = ReducedCounts::from_json_file(counts)?;
    let j = eberhard_j_reduced(&c);
    let jn = c.pairs_per_setting.map(|n| normalized_j(j, n)).transpose()?;
    emit(&JstatReport { j, jn }, None, stdout)
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Simulate { config, out, seed } => simulate(config, out, seed, stdout),
        Command::Analyze {
            events,
            window_ns,
            blocks,
            duration_s,
            pairs,
            out,
            blocks_csv,
        } => analyze(events, window_ns, blocks, duration_s, pairs, out, blocks_csv, stdout),
        Command::Jstat { counts } => jstat(counts, stdout),
        Command::Optimize {
            eta_a,
            eta_b,
            visibility,
            background_a,
            background_b,
            fix_r,
            noise_model,
            multistarts,
            seed,
        } => {
            let problem = OptimizationProblem {
                model: JnModel {
                    eta_a,
                    eta_b,
                    background_a,
                    background_b,
                    visibility,
                    noise_model,
                },
                fix_r,
                multistart_count: multistarts,
                seed,
                ..OptimizationProblem::new(JnModel::symmetric(1.0, 0.0, 1.0))
            };
            emit(&optimize(&problem)?, None, stdout)
        }
        Command::Threshold {
            visibility,
            background,
            fix_r,
            noise_model,
            tolerance,
        } => {
            let query = ThresholdQuery {
                fix_r,
                noise_model,
                tolerance,
                ..ThresholdQuery::new(background, visibility)
            };
            let eta = critical_efficiency(&query)?;
            emit(
                &ThresholdReport {
                    critical_efficiency: eta,
                    background_per_pair: background,
                    visibility,
                    fix_r,
                    tolerance,
                },
                None,
                stdout,
            )
        }
        Command::Feasibility {
            eta_a,
            eta_b,
            r,
            visibility,
            noise_model,
        } => {
            let report = match (r, visibility) {
                (None, None) => feasibility(eta_a, eta_b)?,
                (r, v) => {
                    let source = SourceParams::new(r.unwrap_or(1.0), v.unwrap_or(1.0), noise_model, 0.0)?;
                    feasibility_with_source(eta_a, eta_b, &source)?
                }
            };
            emit(&report, None, stdout)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(stderr, "internal error: {msg}");
            1
        }
    }
}

pub fn run_subcommand<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
