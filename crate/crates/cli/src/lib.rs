//! Command implementations behind the `beamtrace` binary.
//!
//! Each `cmd_*` function performs one subcommand and reports failures as a
//! [`CliError`], whose [`CliError::exit_code`] is the process exit status.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use beamtrace_core::phased_array::{gain_map, multi_beam_weights, separation_gain_map, ArrayError};
use beamtrace_core::scenario::{build_scenario, RunMetrics, RunOutput, SampleResult, ScenarioError};
use beamtrace_core::trace::{
    parse_trace, resample, synthesize_trace, write_trace, MovementTrace, RandomWalkParams, SynthSpec, TraceError,
    TraceKind,
};
use beamtrace_core::{to_db, ArrayGeometry, BeamSpec, GainMap, NormalizationMode, ReceptionMode, ScenarioConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("trace error: {0}")]
    Trace(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("refusing to overwrite {} (pass --force)", .0.display())]
    Overwrite(PathBuf),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => 1,
            Self::Config(_) => 2,
            Self::Trace(_) => 3,
            Self::Geometry(_) => 4,
            Self::Overwrite(_) => 5,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::GeometryInfeasible(_) | ScenarioError::Geometry(_) => Self::Geometry(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "beamtrace", version, about = "Trace-driven mmWave multi-AP link simulator for VR headsets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario over a movement trace.
    Run(RunArgs),
    /// Sweep the AP separation angle across reception modes.
    Sweep(SweepArgs),
    /// Export a beamforming gain map.
    Gainmap(GainmapArgs),
    /// Generate a synthetic movement trace.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario config (JSON). Defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trace: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, default_value = "sep_deg")]
    pub param: String,
    /// Comma-separated parameter values.
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
    #[arg(long, default_value = "quasi,single,dual")]
    pub modes: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    AmplitudeSum,
    ElementwiseConstantModulus,
    UnitPower,
}

impl From<NormalizationArg> for NormalizationMode {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::AmplitudeSum => Self::AmplitudeSum,
            NormalizationArg::ElementwiseConstantModulus => Self::ElementwiseConstantModulus,
            NormalizationArg::UnitPower => Self::UnitPower,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GainmapArgs {
    /// Array size as `MxN`.
    #[arg(long, default_value = "8x8")]
    pub array: String,
    /// Beams as `theta,phi,eta` triples separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub beams: Option<String>,
    /// Map the first-beam gain over (theta1, separation) instead of a fixed pattern.
    #[arg(long)]
    pub separation_map: bool,
    /// Row grid `start:stop:step` in degrees (theta, or theta1 for a separation map).
    #[arg(long, default_value = "-90:90:1", allow_hyphen_values = true)]
    pub grid: String,
    /// Column grid for pattern maps; defaults to `--grid`.
    #[arg(long, allow_hyphen_values = true)]
    pub phi_grid: Option<String>,
    /// Column grid for separation maps.
    #[arg(long, default_value = "0:180:2", allow_hyphen_values = true)]
    pub sep_grid: String,
    #[arg(long, value_enum, default_value = "amplitude-sum")]
    pub normalization: NormalizationArg,
    /// Write 10·log10 of the gain instead of linear values.
    #[arg(long)]
    pub db: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Static,
    YawSweep,
    RandomWalk,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 60.0)]
    pub duration_s: f64,
    #[arg(long, default_value_t = 320)]
    pub period_ms: u64,
    /// Final yaw for `yaw-sweep` (default 360) or yaw bound for `random-walk` (default 30).
    #[arg(long, allow_hyphen_values = true)]
    pub max_yaw: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub yaw_step: Option<f64>,
    #[arg(long)]
    pub max_tilt: Option<f64>,
    #[arg(long)]
    pub tilt_step: Option<f64>,
    #[arg(long)]
    pub max_offset: Option<f64>,
    #[arg(long)]
    pub offset_step: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

/// Provenance record written next to every run or sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config: ScenarioConfig,
    pub trace_path: String,
    pub trace_sha256: String,
    pub trace_samples: usize,
    pub outputs: Vec<String>,
    pub wall_clock_ms: u64,
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Gainmap(a) => cmd_gainmap(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

pub fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    let Some(path) = path else {
        return Ok(ScenarioConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Loaded trace plus the SHA-256 of the file bytes.
struct TraceInput {
    trace: MovementTrace,
    sha256: String,
}

fn load_trace_input(path: &Path, cfg: &ScenarioConfig) -> Result<TraceInput, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Trace(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let trace = parse_trace(bytes.as_slice(), path.display().to_string()).map_err(trace_err)?;
    let trace = match cfg.sample_period_ms {
        Some(p) if trace.nominal_period_ms() < p => resample(&trace, p).map_err(trace_err)?,
        _ => trace,
    };
    Ok(TraceInput { trace, sha256 })
}

fn trace_err(e: TraceError) -> CliError {
    CliError::Trace(e.to_string())
}

fn guard(path: &Path, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::Overwrite(path.to_path_buf()));
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn prepare_dir(dir: &Path, files: &[&str], force: bool) -> Result<(), CliError> {
    for f in files {
        guard(&dir.join(f), force)?;
    }
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Time-series CSV with per-AP column groups sized to the serving set.
pub fn timeseries_csv(results: &[SampleResult]) -> String {
    let aps = results.first().map_or(0, |r| r.aps.len());
    let mut header = vec!["t_ms".to_string()];
    for l in 1..=aps {
        header.push(format!("theta_mis_{l}"));
        header.push(format!("phi_mis_{l}"));
    }
    for l in 1..=aps {
        header.push(format!("aoa_az_{l}"));
        header.push(format!("aoa_el_{l}"));
    }
    header.extend((1..=aps).map(|l| format!("in_fov_{l}")));
    header.extend((1..=aps).map(|l| format!("g_tx_{l}_db")));
    header.extend((1..=aps).map(|l| format!("g_rx_{l}_db")));
    header.extend(["rx_dbm", "snr_db", "outage"].map(String::from));

    let mut out = header.join(",");
    out.push('\n');
    for r in results {
        let mut row = vec![r.t_ms.to_string()];
        for a in &r.aps {
            row.push(a.misalignment.theta_mis.to_string());
            row.push(a.misalignment.phi_mis.to_string());
        }
        for a in &r.aps {
            row.push(a.aoa.theta.to_string());
            row.push(a.aoa.phi.to_string());
        }
        row.extend(r.aps.iter().map(|a| bit(a.in_fov).to_string()));
        row.extend(r.aps.iter().map(|a| to_db(a.g_tx).to_string()));
        row.extend(r.aps.iter().map(|a| to_db(a.g_rx).to_string()));
        row.push(r.rx_power_dbm.to_string());
        row.push(r.snr_db.to_string());
        row.push(bit(r.outage).to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis().try_into().unwrap_or(u64::MAX)
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = load_config(args.config.as_deref())?;
    let input = load_trace_input(&args.trace, &cfg)?;
    let scenario = build_scenario(&cfg)?;
    let RunOutput { results, metrics } = scenario.run(&input.trace)?;

    let files = [TIMESERIES_FILE, METRICS_FILE, MANIFEST_FILE];
    prepare_dir(&args.out, &files, args.force)?;
    write_file(&args.out.join(TIMESERIES_FILE), &timeseries_csv(&results))?;
    write_file(&args.out.join(METRICS_FILE), &to_json(&metrics))?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "run".into(),
        config: cfg,
        trace_path: args.trace.display().to_string(),
        trace_sha256: input.sha256,
        trace_samples: input.trace.len(),
        outputs: files.iter().map(|f| f.to_string()).collect(),
        wall_clock_ms: elapsed_ms(start),
    };
    write_file(&args.out.join(MANIFEST_FILE), &to_json(&manifest))
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mode: ReceptionMode,
    pub ap_count: usize,
    pub sep_deg: f64,
    pub metrics: RunMetrics,
}

pub const SWEEP_HEADER: &str = "mode,ap_count,sep_deg,outage_rate,rx_mean_dbm,rx_median_dbm,rx_p5_dbm,rx_p95_dbm";

fn parse_values(raw: &str) -> Result<Vec<f64>, CliError> {
    let mut values = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::Config(format!("bad sweep value `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Config("sweep value list is empty".into()));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

fn parse_modes(raw: &str) -> Result<Vec<ReceptionMode>, CliError> {
    let mut modes = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| ReceptionMode::parse(s).ok_or_else(|| CliError::Config(format!("unknown mode `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    if modes.is_empty() {
        return Err(CliError::Config("mode list is empty".into()));
    }
    modes.sort();
    modes.dedup();
    Ok(modes)
}

/// Runs every sweep point. Single-beam reception does not depend on the
/// separation, so it contributes one row with one AP at boresight.
pub fn sweep_rows(
    base: &ScenarioConfig,
    trace: &MovementTrace,
    seps: &[f64],
    modes: &[ReceptionMode],
) -> Result<Vec<SweepRow>, CliError> {
    let mut points = Vec::new();
    for &mode in modes {
        if mode == ReceptionMode::SingleBeamSteered {
            let mut cfg = base.clone().with_mode(mode).with_separation(0.0);
            cfg.ap_count = 1;
            cfg.power_coefficients = None;
            points.push(cfg);
        } else {
            points.extend(seps.iter().map(|&s| base.clone().with_mode(mode).with_separation(s)));
        }
    }
    points
        .par_iter()
        .map(|cfg| {
            let scenario = build_scenario(cfg)?;
            let out = scenario.run(trace)?;
            Ok(SweepRow {
                mode: cfg.mode,
                ap_count: scenario.ap_positions().len(),
                sep_deg: cfg.separation_deg,
                metrics: out.metrics,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let stats = r.metrics.rx_level_dbm.map_or([f64::NEG_INFINITY; 4], |s| [s.mean, s.median, s.p5, s.p95]);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.mode.as_str(),
            r.ap_count,
            r.sep_deg,
            r.metrics.outage_rate,
            stats[0],
            stats[1],
            stats[2],
            stats[3]
        );
    }
    out
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let start = Instant::now();
    if !matches!(args.param.as_str(), "sep_deg" | "separation_deg") {
        return Err(CliError::Config(format!("unsupported sweep parameter `{}`", args.param)));
    }
    let seps = parse_values(&args.values)?;
    let modes = parse_modes(&args.modes)?;
    let cfg = load_config(args.config.as_deref())?;
    let input = load_trace_input(&args.trace, &cfg)?;
    let rows = sweep_rows(&cfg, &input.trace, &seps, &modes)?;

    let files = [SWEEP_FILE, MANIFEST_FILE];
    prepare_dir(&args.out, &files, args.force)?;
    write_file(&args.out.join(SWEEP_FILE), &sweep_csv(&rows))?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "sweep".into(),
        config: cfg,
        trace_path: args.trace.display().to_string(),
        trace_sha256: input.sha256,
        trace_samples: input.trace.len(),
        outputs: files.iter().map(|f| f.to_string()).collect(),
        wall_clock_ms: elapsed_ms(start),
    };
    write_file(&args.out.join(MANIFEST_FILE), &to_json(&manifest))
}

/// Parses `MxN`.
pub fn parse_array(spec: &str) -> Result<ArrayGeometry, CliError> {
    let bad = || CliError::Config(format!("bad array spec `{spec}`, expected MxN"));
    let (m, n) = spec.trim().split_once(['x', 'X', '×']).ok_or_else(bad)?;
    let m = m.trim().parse().map_err(|_| bad())?;
    let n = n.trim().parse().map_err(|_| bad())?;
    ArrayGeometry::new(m, n).map_err(|e| CliError::Config(e.to_string()))
}

/// Parses `theta,phi,eta;theta,phi,eta;...`.
pub fn parse_beams(spec: &str) -> Result<Vec<BeamSpec>, CliError> {
    spec.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|b| {
            let v = b
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Config(format!("bad beam `{b}`")))?;
            match v[..] {
                [t, p, e] => Ok(BeamSpec::new(t, p, e)),
                _ => Err(CliError::Config(format!("beam `{b}` needs theta,phi,eta"))),
            }
        })
        .collect()
}

/// Parses an inclusive `start:stop:step` grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Config(format!("bad grid `{spec}`: {why}"));
    let parts = spec
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad("expected start:stop:step"))?;
    let [start, stop, step] = parts[..] else {
        return Err(bad("expected start:stop:step"));
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(bad("need finite start <= stop and step > 0"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(bad("too many points"));
    }
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

pub fn gainmap_csv(map: &GainMap, corner: &str, db: bool) -> String {
    let mut out = String::from(corner);
    for c in &map.cols {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for (i, r) in map.rows.iter().enumerate() {
        let _ = write!(out, "{r}");
        for &v in map.row(i) {
            let v = if db { to_db(v) } else { v };
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn build_gainmap(args: &GainmapArgs) -> Result<(GainMap, &'static str), CliError> {
    let geo = parse_array(&args.array)?;
    let rows = parse_grid(&args.grid)?;
    let mode = NormalizationMode::from(args.normalization);
    let cfg_err = |e: ArrayError| CliError::Config(e.to_string());
    if args.separation_map {
        let seps = parse_grid(&args.sep_grid)?;
        let map = separation_gain_map(&geo, &rows, &seps, mode).map_err(cfg_err)?;
        return Ok((map, "theta1_deg"));
    }
    let beams = parse_beams(args.beams.as_deref().ok_or_else(|| CliError::Config("--beams is required".into()))?)?;
    let cols = match &args.phi_grid {
        Some(g) => parse_grid(g)?,
        None => rows.clone(),
    };
    let w = multi_beam_weights(&geo, &beams, mode).map_err(cfg_err)?;
    Ok((gain_map(&w, &geo, &rows, &cols).map_err(cfg_err)?, "theta_deg"))
}

pub fn cmd_gainmap(args: &GainmapArgs) -> Result<(), CliError> {
    let (map, corner) = build_gainmap(args)?;
    guard(&args.out, args.force)?;
    write_file(&args.out, &gainmap_csv(&map, corner, args.db))
}

pub fn synth_spec(args: &SynthArgs) -> Result<SynthSpec, CliError> {
    if !args.duration_s.is_finite() || args.duration_s <= 0.0 {
        return Err(CliError::Config("duration must be positive".into()));
    }
    let duration_ms = (args.duration_s * 1000.0).round() as u64;
    let kind = match args.kind {
        SynthKind::Static => TraceKind::Static,
        SynthKind::YawSweep => TraceKind::YawSweep { max_yaw_deg: args.max_yaw.unwrap_or(360.0) },
        SynthKind::RandomWalk => {
            let d = RandomWalkParams::default();
            TraceKind::RandomWalk(RandomWalkParams {
                seed: args.seed.unwrap_or(d.seed),
                max_yaw_deg: args.max_yaw.unwrap_or(d.max_yaw_deg),
                yaw_step_deg: args.yaw_step.unwrap_or(d.yaw_step_deg),
                max_tilt_deg: args.max_tilt.unwrap_or(d.max_tilt_deg),
                tilt_step_deg: args.tilt_step.unwrap_or(d.tilt_step_deg),
                max_offset_m: args.max_offset.unwrap_or(d.max_offset_m),
                offset_step_m: args.offset_step.unwrap_or(d.offset_step_m),
            })
        }
    };
    Ok(SynthSpec { kind, duration_ms, period_ms: args.period_ms })
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let spec = synth_spec(args)?;
    let trace = synthesize_trace(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    guard(&args.out, args.force)?;
    let mut buf = Vec::new();
    write_trace(&mut buf, &trace).expect("writing to memory");
    fs::write(&args.out, buf).map_err(|source| CliError::Io { path: args.out.clone(), source })
}
