//! 6DOF HMD movement traces: CSV interchange, validation, decimation and
//! synthetic generators.
//!
//! CSV schema (UTF-8, comma separated, lines starting with `#` ignored):
//!
//! ```text
//! t_ms,px_m,py_m,pz_m,yaw_deg,pitch_deg,roll_deg
//! ```
//!
//! `t_ms` is a non-negative integer and strictly increasing. Translations
//! are metres relative to the initial position; Euler angles are absolute
//! orientations relative to the initial facing, canonicalized to
//! `(−180, 180]` on load.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{EulerAngles, Pose6DOF, Position3};

pub const CSV_HEADER: &str = "# t_ms,px_m,py_m,pz_m,yaw_deg,pitch_deg,roll_deg";
const COLUMNS: [&str; 7] = ["t_ms", "px_m", "py_m", "pz_m", "yaw_deg", "pitch_deg", "roll_deg"];

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: u64, column: usize, message: String },
    #[error("time does not increase at sample {index} (t = {t_ms} ms after {previous_ms} ms)")]
    NonMonotoneTime { index: usize, t_ms: u64, previous_ms: u64 },
    #[error("trace has {count} samples, need at least 2")]
    TooShort { count: usize },
    #[error("non-finite value in sample {index}")]
    NonFinite { index: usize },
    #[error("bad resampling period {period_ms} ms: {reason}")]
    BadPeriod { period_ms: u64, reason: &'static str },
    #[error("bad synthesis parameters: {0}")]
    BadParams(String),
}

/// One timestamped head pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSample {
    pub t_ms: u64,
    pub pose: Pose6DOF<f64>,
}

impl MotionSample {
    pub fn new(t_ms: u64, translation: Position3<f64>, euler: EulerAngles<f64>) -> Self {
        Self { t_ms, pose: Pose6DOF { translation, rotation: euler } }
    }

    pub fn translation(&self) -> Position3<f64> {
        self.pose.translation
    }

    pub fn euler(&self) -> EulerAngles<f64> {
        self.pose.rotation
    }
}

/// Validated, time-ordered sequence of motion samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MovementTrace {
    samples: Vec<MotionSample>,
    source: String,
    nominal_period_ms: u64,
}

impl MovementTrace {
    /// Validates the samples and canonicalizes their angles. The nominal
    /// period is the median spacing between consecutive samples.
    pub fn new(mut samples: Vec<MotionSample>, source: impl Into<String>) -> Result<Self, TraceError> {
        if samples.len() < 2 {
            return Err(TraceError::TooShort { count: samples.len() });
        }
        for (index, s) in samples.iter_mut().enumerate() {
            if !s.pose.is_finite() {
                return Err(TraceError::NonFinite { index });
            }
            s.pose.rotation = s.pose.rotation.canonical();
        }
        for (index, w) in samples.windows(2).enumerate() {
            if w[1].t_ms <= w[0].t_ms {
                return Err(TraceError::NonMonotoneTime { index: index + 1, t_ms: w[1].t_ms, previous_ms: w[0].t_ms });
            }
        }
        let mut gaps: Vec<u64> = samples.windows(2).map(|w| w[1].t_ms - w[0].t_ms).collect();
        gaps.sort_unstable();
        let nominal_period_ms = gaps[(gaps.len() - 1) / 2];
        Ok(Self { samples, source: source.into(), nominal_period_ms })
    }

    pub fn samples(&self) -> &[MotionSample] {
        &self.samples
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn nominal_period_ms(&self) -> u64 {
        self.nominal_period_ms
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_ms(&self) -> u64 {
        self.samples[self.samples.len() - 1].t_ms - self.samples[0].t_ms
    }
}

/// Parses the trace CSV from any reader.
pub fn parse_trace<R: Read>(reader: R, source: impl Into<String>) -> Result<MovementTrace, TraceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            TraceError::Parse { line, column: 0, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != COLUMNS.len() {
            return Err(TraceError::Parse {
                line,
                column: record.len().min(COLUMNS.len()) + 1,
                message: format!("expected {} columns, found {}", COLUMNS.len(), record.len()),
            });
        }
        let t_ms: u64 = record[0].parse().map_err(|_| TraceError::Parse {
            line,
            column: 1,
            message: format!("{} must be a non-negative integer, got {:?}", COLUMNS[0], &record[0]),
        })?;
        let mut vals = [0.0f64; 6];
        for (k, v) in vals.iter_mut().enumerate() {
            let field = &record[k + 1];
            *v = field.parse().map_err(|_| TraceError::Parse {
                line,
                column: k + 2,
                message: format!("{} must be a number, got {field:?}", COLUMNS[k + 1]),
            })?;
            if !v.is_finite() {
                return Err(TraceError::Parse { line, column: k + 2, message: format!("{} is not finite", COLUMNS[k + 1]) });
            }
        }
        samples.push(MotionSample::new(
            t_ms,
            Position3::new(vals[0], vals[1], vals[2]),
            EulerAngles::new(vals[3], vals[4], vals[5]),
        ));
    }
    MovementTrace::new(samples, source)
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<MovementTrace, TraceError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| TraceError::Io { path: path.display().to_string(), source })?;
    parse_trace(io::BufReader::new(file), path.display().to_string())
}

/// Writes the trace in the interchange schema with a `#` header line.
/// Floats use the shortest representation that parses back exactly.
pub fn write_trace<W: Write>(mut w: W, trace: &MovementTrace) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in &trace.samples {
        let (p, e) = (s.translation(), s.euler());
        writeln!(w, "{},{},{},{},{},{},{}", s.t_ms, p.x, p.y, p.z, e.yaw, e.pitch, e.roll)?;
    }
    w.flush()
}

pub fn save_trace(path: impl AsRef<Path>, trace: &MovementTrace) -> io::Result<()> {
    write_trace(io::BufWriter::new(File::create(path)?), trace)
}

/// Decimates onto the grid `t0 + k·period_ms` by picking, for every grid
/// point, the sample with the nearest timestamp (earlier on ties). Sample
/// values are copied unchanged.
pub fn resample(trace: &MovementTrace, period_ms: u64) -> Result<MovementTrace, TraceError> {
    if period_ms == 0 {
        return Err(TraceError::BadPeriod { period_ms, reason: "must be positive" });
    }
    if period_ms < trace.nominal_period_ms {
        return Err(TraceError::BadPeriod { period_ms, reason: "shorter than the trace's nominal period" });
    }
    let samples = &trace.samples;
    let t0 = samples[0].t_ms;
    let grid_points = trace.duration_ms() / period_ms + 1;

    let mut picked: Vec<MotionSample> = Vec::with_capacity(grid_points as usize);
    let mut cursor = 0usize;
    for k in 0..grid_points {
        let target = t0 + k * period_ms;
        while cursor + 1 < samples.len() && samples[cursor + 1].t_ms <= target {
            cursor += 1;
        }
        let mut best = cursor;
        if cursor + 1 < samples.len() {
            let before = target - samples[cursor].t_ms;
            let after = samples[cursor + 1].t_ms - target;
            if after < before {
                best = cursor + 1;
            }
        }
        if picked.last().is_none_or(|last| last.t_ms < samples[best].t_ms) {
            picked.push(samples[best]);
        }
    }
    if picked.len() < 2 {
        return Err(TraceError::BadPeriod { period_ms, reason: "longer than the trace" });
    }
    let mut out = MovementTrace::new(picked, trace.source.clone())?;
    out.nominal_period_ms = period_ms;
    Ok(out)
}

/// Parameters of a seeded bounded random walk. Each step adds a uniform
/// increment in `[−step, step]` and clamps to `[−bound, bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomWalkParams {
    pub seed: u64,
    pub max_yaw_deg: f64,
    pub yaw_step_deg: f64,
    pub max_tilt_deg: f64,
    pub tilt_step_deg: f64,
    pub max_offset_m: f64,
    pub offset_step_m: f64,
}

impl Default for RandomWalkParams {
    fn default() -> Self {
        Self {
            seed: 1,
            max_yaw_deg: 30.0,
            yaw_step_deg: 5.0,
            max_tilt_deg: 10.0,
            tilt_step_deg: 2.0,
            max_offset_m: 0.3,
            offset_step_m: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceKind {
    Static,
    /// Yaw rising linearly from 0 at the first sample to `max_yaw_deg` at
    /// the last; no translation.
    YawSweep { max_yaw_deg: f64 },
    RandomWalk(RandomWalkParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub kind: TraceKind,
    pub duration_ms: u64,
    pub period_ms: u64,
}

impl SynthSpec {
    /// 60 s at 320 ms.
    pub fn new(kind: TraceKind) -> Self {
        Self { kind, duration_ms: 60_000, period_ms: 320 }
    }
}

/// Generates a synthetic trace on the grid `k·period_ms`,
/// `k = 0..=⌊duration/period⌋`.
pub fn synthesize_trace(spec: &SynthSpec) -> Result<MovementTrace, TraceError> {
    if spec.period_ms == 0 {
        return Err(TraceError::BadParams("period must be positive".into()));
    }
    if spec.duration_ms < spec.period_ms {
        return Err(TraceError::BadParams("duration must cover at least one period".into()));
    }
    let count = (spec.duration_ms / spec.period_ms + 1) as usize;
    let times = (0..count).map(|k| k as u64 * spec.period_ms);

    let samples: Vec<MotionSample> = match spec.kind {
        TraceKind::Static => times.map(|t| MotionSample::new(t, Position3::zero(), EulerAngles::zero())).collect(),
        TraceKind::YawSweep { max_yaw_deg } => {
            if !max_yaw_deg.is_finite() {
                return Err(TraceError::BadParams("max_yaw must be finite".into()));
            }
            let last = ((count - 1) as u64 * spec.period_ms) as f64;
            times
                .map(|t| {
                    let yaw = max_yaw_deg * t as f64 / last;
                    MotionSample::new(t, Position3::zero(), EulerAngles::new(yaw, 0.0, 0.0))
                })
                .collect()
        }
        TraceKind::RandomWalk(p) => random_walk(times, &p)?,
    };
    MovementTrace::new(samples, format!("synthetic:{}", kind_name(&spec.kind)))
}

pub fn kind_name(kind: &TraceKind) -> &'static str {
    match kind {
        TraceKind::Static => "static",
        TraceKind::YawSweep { .. } => "yaw_sweep",
        TraceKind::RandomWalk(_) => "random_walk",
    }
}

fn random_walk(times: impl Iterator<Item = u64>, p: &RandomWalkParams) -> Result<Vec<MotionSample>, TraceError> {
    let limits = [p.max_yaw_deg, p.yaw_step_deg, p.max_tilt_deg, p.tilt_step_deg, p.max_offset_m, p.offset_step_m];
    if limits.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(TraceError::BadParams("random-walk bounds and steps must be finite and non-negative".into()));
    }
    if p.max_yaw_deg > 180.0 || p.max_tilt_deg > 180.0 {
        return Err(TraceError::BadParams("angle bounds must not exceed 180 degrees".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut step = |x: f64, size: f64, bound: f64| -> f64 {
        if size == 0.0 {
            return x.clamp(-bound, bound);
        }
        (x + rng.gen_range(-size..=size)).clamp(-bound, bound)
    };

    let mut offset = [0.0f64; 3];
    let mut angles = [0.0f64; 3];
    let mut out = Vec::new();
    for (k, t) in times.enumerate() {
        if k > 0 {
            for o in offset.iter_mut() {
                *o = step(*o, p.offset_step_m, p.max_offset_m);
            }
            angles[0] = step(angles[0], p.yaw_step_deg, p.max_yaw_deg);
            angles[1] = step(angles[1], p.tilt_step_deg, p.max_tilt_deg);
            angles[2] = step(angles[2], p.tilt_step_deg, p.max_tilt_deg);
        }
        out.push(MotionSample::new(
            t,
            Position3::new(offset[0], offset[1], offset[2]),
            EulerAngles::new(angles[0], angles[1], angles[2]),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<MovementTrace, TraceError> {
        parse_trace(text.as_bytes(), "test")
    }

    #[test]
    fn minimal_file() {
        let t = parse("0,0,0,0,0,0,0\n40,0,0,0,10,0,0").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.samples()[0].euler().yaw, 0.0);
        assert_eq!(t.samples()[1].euler().yaw, 10.0);
        assert_eq!(t.nominal_period_ms(), 40);
    }

    #[test]
    fn header_and_angle_canonicalization() {
        let t = parse("# t_ms,px_m,py_m,pz_m,yaw_deg,pitch_deg,roll_deg\n0,0,0,0,270,0,-180\n40, 0.1 ,0,0,-190,0,0\n")
            .unwrap();
        assert_eq!(t.samples()[0].euler().yaw, -90.0);
        assert_eq!(t.samples()[0].euler().roll, 180.0);
        assert_eq!(t.samples()[1].euler().yaw, 170.0);
        assert_eq!(t.samples()[1].translation().x, 0.1);
    }

    #[test]
    fn backwards_time_rejected() {
        let err = parse("0,0,0,0,0,0,0\n40,0,0,0,0,0,0\n20,0,0,0,0,0,0").unwrap_err();
        assert!(matches!(err, TraceError::NonMonotoneTime { index: 2, t_ms: 20, previous_ms: 40 }));
        assert!(matches!(parse("0,0,0,0,0,0,0\n0,0,0,0,0,0,0").unwrap_err(), TraceError::NonMonotoneTime { .. }));
    }

    #[test]
    fn header_only_is_too_short() {
        assert!(matches!(parse(CSV_HEADER).unwrap_err(), TraceError::TooShort { count: 0 }));
        assert!(matches!(parse("0,0,0,0,0,0,0").unwrap_err(), TraceError::TooShort { count: 1 }));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse("0,0,0,0,0,0,0\n40,0,zero,0,0,0,0").unwrap_err() {
            TraceError::Parse { line, column, .. } => assert_eq!((line, column), (2, 3)),
            e => panic!("unexpected {e}"),
        }
        match parse("0,0,0,0,0,0\n").unwrap_err() {
            TraceError::Parse { line, .. } => assert_eq!(line, 1),
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(parse("-5,0,0,0,0,0,0\n0,0,0,0,0,0,0").unwrap_err(), TraceError::Parse { column: 1, .. }));
        assert!(matches!(parse("0,0,0,0,inf,0,0\n1,0,0,0,0,0,0").unwrap_err(), TraceError::Parse { column: 5, .. }));
    }

    fn regular(period: u64, count: u64) -> MovementTrace {
        let samples =
            (0..count).map(|k| MotionSample::new(k * period, Position3::zero(), EulerAngles::new(k as f64, 0.0, 0.0)));
        MovementTrace::new(samples.collect(), "regular").unwrap()
    }

    #[test]
    fn resample_every_eighth() {
        let t = regular(40, 1501);
        let r = resample(&t, 320).unwrap();
        assert_eq!(r.len(), 188);
        for (k, s) in r.samples().iter().enumerate() {
            assert_eq!(*s, t.samples()[8 * k]);
        }
        assert_eq!(r.nominal_period_ms(), 320);
    }

    #[test]
    fn resample_identity_and_errors() {
        let t = regular(40, 50);
        assert_eq!(resample(&t, 40).unwrap().samples(), t.samples());
        assert!(matches!(resample(&t, 30), Err(TraceError::BadPeriod { .. })));
        assert!(matches!(resample(&t, 0), Err(TraceError::BadPeriod { .. })));
        assert!(matches!(resample(&t, 10_000), Err(TraceError::BadPeriod { .. })));
    }

    #[test]
    fn resample_jittered_picks_nearest() {
        let times = [0u64, 41, 79, 122, 158, 201, 239, 280, 321, 362, 398, 441, 480, 519, 562, 600, 641];
        let samples: Vec<_> = times
            .iter()
            .enumerate()
            .map(|(k, &t)| MotionSample::new(t, Position3::zero(), EulerAngles::new(k as f64, 0.0, 0.0)))
            .collect();
        let t = MovementTrace::new(samples, "jitter").unwrap();
        let r = resample(&t, 320).unwrap();
        let picked: Vec<u64> = r.samples().iter().map(|s| s.t_ms).collect();
        assert_eq!(picked, vec![0, 321, 641]);
    }

    #[test]
    fn synth_static() {
        let t = synthesize_trace(&SynthSpec::new(TraceKind::Static)).unwrap();
        assert_eq!(t.len(), 188);
        assert!(t.samples().iter().all(|s| s.pose == Pose6DOF::default()));
    }

    #[test]
    fn synth_yaw_sweep_linear() {
        let spec = SynthSpec { kind: TraceKind::YawSweep { max_yaw_deg: 360.0 }, duration_ms: 60_000, period_ms: 40 };
        let t = synthesize_trace(&spec).unwrap();
        let at_30s = t.samples().iter().find(|s| s.t_ms == 30_000).unwrap();
        assert_eq!(at_30s.euler().yaw, 180.0);
        assert_eq!(t.samples().last().unwrap().euler().yaw, 0.0);

        let t = synthesize_trace(&SynthSpec::new(TraceKind::YawSweep { max_yaw_deg: 360.0 })).unwrap();
        assert_eq!(t.len(), 188);
        assert_eq!(t.samples().last().unwrap().euler().yaw, 0.0);
    }

    #[test]
    fn synth_random_walk_deterministic_and_bounded() {
        let spec = SynthSpec::new(TraceKind::RandomWalk(RandomWalkParams { seed: 7, ..Default::default() }));
        let a = synthesize_trace(&spec).unwrap();
        let b = synthesize_trace(&spec).unwrap();
        assert_eq!(a, b);
        for s in a.samples() {
            assert!(s.euler().yaw.abs() <= 30.0);
            assert!(s.euler().pitch.abs() <= 10.0);
            assert!(s.translation().norm() <= 0.3 * 3f64.sqrt() + 1e-12);
        }
        let other = SynthSpec::new(TraceKind::RandomWalk(RandomWalkParams { seed: 8, ..Default::default() }));
        assert_ne!(synthesize_trace(&other).unwrap(), a);
    }

    #[test]
    fn synth_bad_params() {
        let bad = SynthSpec { kind: TraceKind::Static, duration_ms: 100, period_ms: 320 };
        assert!(matches!(synthesize_trace(&bad), Err(TraceError::BadParams(_))));
        let bad = SynthSpec::new(TraceKind::RandomWalk(RandomWalkParams { yaw_step_deg: -1.0, ..Default::default() }));
        assert!(matches!(synthesize_trace(&bad), Err(TraceError::BadParams(_))));
        let bad = SynthSpec::new(TraceKind::YawSweep { max_yaw_deg: f64::NAN });
        assert!(matches!(synthesize_trace(&bad), Err(TraceError::BadParams(_))));
    }

    #[test]
    fn save_load_round_trip() {
        let spec = SynthSpec::new(TraceKind::RandomWalk(RandomWalkParams::default()));
        let t = synthesize_trace(&spec).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, &t).unwrap();
        let back = parse_trace(buf.as_slice(), t.source()).unwrap();
        assert_eq!(back, t);
    }
}
