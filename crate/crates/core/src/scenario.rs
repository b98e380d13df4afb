//! Per-time-step emulation of the AP↔HMD links over a movement trace.
//!
//! The HMD starts at the room centre facing body azimuth 0. `L` APs are
//! placed at equal range `d` and azimuths spread evenly over
//! `[+Δθ/2, −Δθ/2]` (AP-1 at `+Δθ/2`). At every step each AP steers a
//! single beam at the HMD, the HMD builds its receive weights according to
//! the [`ReceptionMode`], and the in-FoV links are combined coherently.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    apply_rotation, apply_translation, body_frame_aoa, misalignment, orientation_from_positions, rotation_matrix,
    GeometryError, MisalignmentVector, OrientationVector, Position3,
};
use crate::link::{coherent_rx_power, in_field_of_view, LinkError, LinkSample, RadioConfig};
use crate::phased_array::{
    gain, multi_beam_weights, ArrayError, ArrayGeometry, BeamSpec, ComplexVector, NormalizationMode,
    POWER_SUM_TOLERANCE,
};
use crate::trace::{MotionSample, MovementTrace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario configuration: {0}")]
    Config(String),
    #[error("geometry infeasible: {0}")]
    GeometryInfeasible(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Array(#[from] ArrayError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("no results to summarize")]
    EmptyResults,
    #[error("every sample is in outage")]
    AllOutage,
}

/// HMD receive strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReceptionMode {
    /// Small array with a fixed boresight beam; all APs serve.
    #[serde(rename = "quasi", alias = "quasi_omni")]
    QuasiOmniFixed,
    /// One steered beam toward AP-1, the only serving AP.
    #[serde(rename = "single")]
    SingleBeamSteered,
    /// One combined weight vector steering a lobe at every AP.
    #[serde(rename = "dual", alias = "multi")]
    DualBeamSteered,
}

impl ReceptionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::QuasiOmniFixed => "quasi",
            Self::SingleBeamSteered => "single",
            Self::DualBeamSteered => "dual",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "quasi" | "quasi_omni" => Some(Self::QuasiOmniFixed),
            "single" => Some(Self::SingleBeamSteered),
            "dual" | "multi" => Some(Self::DualBeamSteered),
            _ => None,
        }
    }
}

/// Full scenario description. Every field defaults to the reference indoor
/// setup, so `{}` is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub room_size_m: [f64; 2],
    pub ap_height_m: f64,
    pub hmd_height_m: f64,
    pub hmd_ap_distance_m: f64,
    pub separation_deg: f64,
    pub ap_count: usize,
    pub radio: RadioConfig<f64>,
    pub hmd_array: ArrayGeometry<f64>,
    pub ap_array: ArrayGeometry<f64>,
    pub quasi_omni_array: ArrayGeometry<f64>,
    pub mode: ReceptionMode,
    pub normalization: NormalizationMode,
    /// Multi-beam power split; `None` means equal shares.
    pub power_coefficients: Option<Vec<f64>>,
    /// Decimation period applied to input traces; `None` keeps the trace as is.
    pub sample_period_ms: Option<u64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let upa8 = ArrayGeometry { m_count: 8, n_count: 8, dx_wavelengths: 0.5, dy_wavelengths: 0.5 };
        Self {
            room_size_m: [20.0, 20.0],
            ap_height_m: 4.0,
            hmd_height_m: 1.5,
            hmd_ap_distance_m: 10.0,
            separation_deg: 20.0,
            ap_count: 2,
            radio: RadioConfig::default(),
            hmd_array: upa8,
            ap_array: upa8,
            quasi_omni_array: ArrayGeometry { m_count: 2, n_count: 4, dx_wavelengths: 0.5, dy_wavelengths: 0.5 },
            mode: ReceptionMode::DualBeamSteered,
            normalization: NormalizationMode::AmplitudeSum,
            power_coefficients: None,
            sample_period_ms: Some(320),
        }
    }
}

impl ScenarioConfig {
    pub fn with_mode(mut self, mode: ReceptionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_separation(mut self, separation_deg: f64) -> Self {
        self.separation_deg = separation_deg;
        self
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let cfg_err = |m: &str| Err(ScenarioError::Config(m.to_string()));
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !self.room_size_m.iter().all(|&v| finite_pos(v)) {
            return cfg_err("room_size_m entries must be positive");
        }
        if !finite_pos(self.ap_height_m) || !self.hmd_height_m.is_finite() || self.hmd_height_m < 0.0 {
            return cfg_err("heights must be finite and non-negative (AP height positive)");
        }
        if !finite_pos(self.hmd_ap_distance_m) {
            return cfg_err("hmd_ap_distance_m must be positive");
        }
        if !self.separation_deg.is_finite() || !(0.0..=180.0).contains(&self.separation_deg) {
            return cfg_err("separation_deg must lie in [0, 180]");
        }
        if self.ap_count == 0 {
            return cfg_err("ap_count must be at least 1");
        }
        if self.sample_period_ms == Some(0) {
            return cfg_err("sample_period_ms must be positive");
        }
        self.radio.validate()?;
        self.hmd_array.validate()?;
        self.ap_array.validate()?;
        self.quasi_omni_array.validate()?;
        if let Some(eta) = &self.power_coefficients {
            if eta.len() != self.serving_count() {
                return Err(ScenarioError::Config(format!(
                    "power_coefficients has {} entries for {} serving APs",
                    eta.len(),
                    self.serving_count()
                )));
            }
            let sum: f64 = eta.iter().sum();
            if eta.iter().any(|e| !(0.0..=1.0).contains(e)) || (sum - 1.0).abs() > POWER_SUM_TOLERANCE {
                return Err(ArrayError::BadPowerCoefficients { sum }.into());
            }
        }
        Ok(())
    }

    fn serving_count(&self) -> usize {
        match self.mode {
            ReceptionMode::SingleBeamSteered => 1,
            _ => self.ap_count,
        }
    }
}

/// Room-frame azimuth of AP `l` as seen from the initial HMD pose.
fn ap_azimuth(separation_deg: f64, l: usize, count: usize) -> f64 {
    if count == 1 {
        separation_deg / 2.0
    } else {
        separation_deg / 2.0 - l as f64 * separation_deg / (count - 1) as f64
    }
}

/// Built scenario; immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Scenario {
    cfg: ScenarioConfig,
    hmd_start: Position3<f64>,
    aps: Vec<Position3<f64>>,
    initial: Vec<OrientationVector<f64>>,
    power: Vec<f64>,
    /// Fixed weights for the quasi-omni mode.
    fixed_rx: Option<ComplexVector<f64>>,
}

/// Per-AP outcome at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApSample {
    /// Body-frame angle of arrival at the HMD.
    pub aoa: OrientationVector<f64>,
    /// Room-frame angle of departure at the AP.
    pub aod: OrientationVector<f64>,
    pub misalignment: MisalignmentVector<f64>,
    pub in_fov: bool,
    pub g_tx: f64,
    pub g_rx: f64,
    pub channel_magnitude: f64,
}

impl ApSample {
    pub fn distance_m(&self) -> f64 {
        self.aoa.r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub t_ms: u64,
    pub aps: Vec<ApSample>,
    /// `−∞` during outage.
    pub rx_power_dbm: f64,
    pub snr_db: f64,
    pub outage: bool,
}

/// Order statistics of the Rx level over non-outage samples, dBm.
/// Percentiles use the nearest-rank rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RxLevelStats {
    pub min: f64,
    pub p5: f64,
    pub median: f64,
    pub mean: f64,
    pub p95: f64,
    pub max: f64,
}

impl RxLevelStats {
    /// Summarizes finite levels. Returns `None` for an empty slice.
    pub fn from_levels(levels: &[f64]) -> Option<Self> {
        if levels.is_empty() {
            return None;
        }
        let mut sorted = levels.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let rank = |p: f64| -> f64 {
            let k = ((p / 100.0) * n as f64).ceil() as usize;
            sorted[k.clamp(1, n) - 1]
        };
        Some(Self {
            min: sorted[0],
            p5: rank(5.0),
            median: rank(50.0),
            mean: levels.iter().sum::<f64>() / n as f64,
            p95: rank(95.0),
            max: sorted[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub outage_rate: f64,
    pub samples: usize,
    pub outage_samples: usize,
    /// `None` when every sample is in outage.
    pub rx_level_dbm: Option<RxLevelStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub results: Vec<SampleResult>,
    pub metrics: RunMetrics,
}

/// Places the APs and records their initial orientation vectors.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    cfg.validate()?;
    let dh = cfg.ap_height_m - cfg.hmd_height_m;
    let d = cfg.hmd_ap_distance_m;
    let rho_sq = d * d - dh * dh;
    if rho_sq < 0.0 {
        return Err(ScenarioError::GeometryInfeasible(format!(
            "HMD-AP distance {d} m is shorter than the height difference {} m",
            dh.abs()
        )));
    }
    let rho = rho_sq.sqrt();
    let [width, depth] = cfg.room_size_m;
    let hmd_start = Position3::new(width / 2.0, depth / 2.0, cfg.hmd_height_m);

    let mut aps = Vec::with_capacity(cfg.serving_count());
    let mut initial = Vec::with_capacity(cfg.serving_count());
    for l in 0..cfg.serving_count() {
        let az = ap_azimuth(cfg.separation_deg, l, cfg.ap_count).to_radians();
        // orientation is taken from hmd − ap, so the AP sits opposite that vector
        let ap = Position3::new(hmd_start.x - rho * az.cos(), hmd_start.y - rho * az.sin(), cfg.ap_height_m);
        let slack = 1e-9;
        if ap.x < -slack || ap.x > width + slack || ap.y < -slack || ap.y > depth + slack {
            return Err(ScenarioError::GeometryInfeasible(format!(
                "AP-{} at ({:.3}, {:.3}) lies outside the {width} x {depth} m room",
                l + 1,
                ap.x,
                ap.y
            )));
        }
        let q0 = orientation_from_positions(hmd_start, ap)
            .map_err(|e| ScenarioError::GeometryInfeasible(format!("AP-{}: {e}", l + 1)))?;
        aps.push(ap);
        initial.push(q0);
    }

    let serving = aps.len();
    let power = cfg.power_coefficients.clone().unwrap_or_else(|| vec![1.0 / serving as f64; serving]);
    let fixed_rx = match cfg.mode {
        ReceptionMode::QuasiOmniFixed => Some(multi_beam_weights(
            &cfg.quasi_omni_array,
            &[BeamSpec::new(0.0, 0.0, 1.0)],
            cfg.normalization,
        )?),
        _ => None,
    };
    Ok(Scenario { cfg: cfg.clone(), hmd_start, aps, initial, power, fixed_rx })
}

impl Scenario {
    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn hmd_start(&self) -> Position3<f64> {
        self.hmd_start
    }

    pub fn ap_positions(&self) -> &[Position3<f64>] {
        &self.aps
    }

    /// Initial HMD↔AP orientation vectors, one per serving AP.
    pub fn initial_orientations(&self) -> &[OrientationVector<f64>] {
        &self.initial
    }

    fn rx_array(&self) -> &ArrayGeometry<f64> {
        match self.cfg.mode {
            ReceptionMode::QuasiOmniFixed => &self.cfg.quasi_omni_array,
            _ => &self.cfg.hmd_array,
        }
    }

    /// Evaluates one motion sample.
    pub fn step(&self, sample: &MotionSample) -> Result<SampleResult, ScenarioError> {
        let hmd = self.hmd_start + sample.translation();
        let head = sample.euler();
        let rot = rotation_matrix(head);
        let radio = &self.cfg.radio;

        let mut geometry = Vec::with_capacity(self.aps.len());
        for (&ap, &q0) in self.aps.iter().zip(&self.initial) {
            let aod = orientation_from_positions(hmd, ap)?;
            let aoa = body_frame_aoa(hmd, head, ap)?;
            let q_trn = apply_translation(self.hmd_start, sample.translation(), ap)?;
            let q_rot = apply_rotation(q0, &rot);
            geometry.push((aoa, aod, misalignment(q0, q_trn, q_rot)));
        }

        let steered;
        let rx_weights = match (&self.fixed_rx, self.cfg.mode) {
            (Some(w), _) => w,
            (None, ReceptionMode::SingleBeamSteered) => {
                let aoa = geometry[0].0;
                steered = multi_beam_weights(
                    self.rx_array(),
                    &[BeamSpec::new(aoa.theta, aoa.phi, 1.0)],
                    self.cfg.normalization,
                )?;
                &steered
            }
            (None, _) => {
                let beams: Vec<BeamSpec<f64>> = geometry
                    .iter()
                    .zip(&self.power)
                    .map(|((aoa, _, _), &eta)| BeamSpec::new(aoa.theta, aoa.phi, eta))
                    .collect();
                steered = multi_beam_weights(self.rx_array(), &beams, self.cfg.normalization)?;
                &steered
            }
        };

        let mut links = Vec::with_capacity(self.aps.len());
        let mut aps = Vec::with_capacity(self.aps.len());
        for &(aoa, aod, mis) in &geometry {
            let tx_weights = multi_beam_weights(
                &self.cfg.ap_array,
                &[BeamSpec::new(aod.theta, aod.phi, 1.0)],
                NormalizationMode::UnitPower,
            )?;
            let g_tx = gain(&tx_weights, &self.cfg.ap_array, aod.theta, aod.phi)?;
            let g_rx = gain(rx_weights, self.rx_array(), aoa.theta, aoa.phi)?;
            let in_fov = in_field_of_view(aoa.theta, radio);
            links.push(LinkSample { distance_m: aoa.r, g_tx, g_rx, in_fov });
            aps.push(ApSample { aoa, aod, misalignment: mis, in_fov, g_tx, g_rx, channel_magnitude: 0.0 });
        }

        let outcome = coherent_rx_power(radio, &links)?;
        for (ap, &h) in aps.iter_mut().zip(&outcome.channel_magnitudes) {
            ap.channel_magnitude = h;
        }
        let outage = outcome.outage || outcome.snr_outage;
        Ok(SampleResult {
            t_ms: sample.t_ms,
            aps,
            rx_power_dbm: if outage { f64::NEG_INFINITY } else { outcome.rx_power_dbm },
            snr_db: if outage { f64::NEG_INFINITY } else { outcome.snr_db },
            outage,
        })
    }

    /// Steps through the trace in time order and summarizes the run.
    pub fn run(&self, trace: &MovementTrace) -> Result<RunOutput, ScenarioError> {
        let results = trace.samples().iter().map(|s| self.step(s)).collect::<Result<Vec<_>, _>>()?;
        let metrics = run_metrics(&results)?;
        Ok(RunOutput { results, metrics })
    }
}

/// Outage samples over total samples.
pub fn outage_rate(results: &[SampleResult]) -> Result<f64, ScenarioError> {
    if results.is_empty() {
        return Err(ScenarioError::EmptyResults);
    }
    let outages = results.iter().filter(|r| r.outage).count();
    Ok(outages as f64 / results.len() as f64)
}

/// Rx-level statistics over the non-outage samples.
pub fn rx_level_stats(results: &[SampleResult]) -> Result<RxLevelStats, ScenarioError> {
    if results.is_empty() {
        return Err(ScenarioError::EmptyResults);
    }
    let levels: Vec<f64> = results.iter().filter(|r| !r.outage).map(|r| r.rx_power_dbm).collect();
    RxLevelStats::from_levels(&levels).ok_or(ScenarioError::AllOutage)
}

pub fn run_metrics(results: &[SampleResult]) -> Result<RunMetrics, ScenarioError> {
    let outage_rate = outage_rate(results)?;
    let rx_level_dbm = match rx_level_stats(results) {
        Ok(s) => Some(s),
        Err(ScenarioError::AllOutage) => None,
        Err(e) => return Err(e),
    };
    Ok(RunMetrics {
        outage_rate,
        samples: results.len(),
        outage_samples: results.iter().filter(|r| r.outage).count(),
        rx_level_dbm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EulerAngles;
    use crate::link::{free_space_path_loss_db, noise_power_dbm, Side};
    use crate::trace::{synthesize_trace, SynthSpec, TraceKind};

    fn still(t_ms: u64) -> MotionSample {
        MotionSample::new(t_ms, Position3::zero(), EulerAngles::zero())
    }

    fn yawed(yaw: f64) -> MotionSample {
        MotionSample::new(0, Position3::zero(), EulerAngles::new(yaw, 0.0, 0.0))
    }

    #[test]
    fn colocated_aps_at_zero_separation() {
        let scn = build_scenario(&ScenarioConfig::default().with_separation(0.0)).unwrap();
        let expected_phi = -(2.5f64 / 10.0).asin().to_degrees();
        assert!((expected_phi + 14.477_512_185_929_925).abs() < 1e-9);
        for q in scn.initial_orientations() {
            assert!((q.r - 10.0).abs() < 1e-12);
            assert!(q.theta.abs() < 1e-12);
            assert!((q.phi - expected_phi).abs() < 1e-9);
        }
        assert_eq!(scn.ap_positions()[0], scn.ap_positions()[1]);
    }

    #[test]
    fn wide_separation_in_body_frame() {
        let scn = build_scenario(&ScenarioConfig::default().with_separation(140.0)).unwrap();
        let q = scn.initial_orientations();
        assert!((q[0].theta - 70.0).abs() < 1e-9);
        assert!((q[1].theta + 70.0).abs() < 1e-9);
        assert!(((q[0].theta - q[1].theta).abs() - 140.0).abs() < 1e-9);
        assert!((q[0].phi - q[1].phi).abs() < 1e-12);
    }

    #[test]
    fn infeasible_geometry() {
        let cfg = ScenarioConfig { hmd_ap_distance_m: 2.0, ..Default::default() };
        assert!(matches!(build_scenario(&cfg), Err(ScenarioError::GeometryInfeasible(_))));
        let cfg = ScenarioConfig { hmd_ap_distance_m: 30.0, ..Default::default() };
        assert!(matches!(build_scenario(&cfg), Err(ScenarioError::GeometryInfeasible(_))));
    }

    #[test]
    fn config_errors() {
        let cfg = ScenarioConfig { separation_deg: 200.0, ..Default::default() };
        assert!(matches!(build_scenario(&cfg), Err(ScenarioError::Config(_))));
        let cfg = ScenarioConfig { power_coefficients: Some(vec![0.7, 0.7]), ..Default::default() };
        assert!(matches!(build_scenario(&cfg), Err(ScenarioError::Array(ArrayError::BadPowerCoefficients { .. }))));
        let cfg = ScenarioConfig { power_coefficients: Some(vec![1.0]), ..Default::default() };
        assert!(matches!(build_scenario(&cfg), Err(ScenarioError::Config(_))));
    }

    #[test]
    fn zero_motion_budget_matches_closed_form() {
        let scn = build_scenario(&ScenarioConfig::default().with_separation(20.0)).unwrap();
        let r = scn.step(&still(0)).unwrap();
        assert!(!r.outage);

        // independent recomputation: amplitudes c/(4π f d)·√(g_tx g_rx)
        // added in phase, scaled by √p
        let p_mw = 10f64.powf(1.0);
        let amp: f64 = r
            .aps
            .iter()
            .map(|a| 10f64.powf(-free_space_path_loss_db(28e9, a.distance_m()) / 20.0) * (a.g_tx * a.g_rx).sqrt())
            .sum();
        let expected = 10.0 * (p_mw * amp * amp).log10();
        assert!((r.rx_power_dbm - expected).abs() < 1e-9);
        assert!((r.snr_db - (expected - noise_power_dbm(&RadioConfig::<f64>::default(), Side::Hmd))).abs() < 1e-9);
        // regression pin
        assert!((r.rx_power_dbm - -33.927_172_744_005_5).abs() < 1e-6, "{}", r.rx_power_dbm);
    }

    #[test]
    fn facing_away_is_outage() {
        let scn = build_scenario(&ScenarioConfig::default()).unwrap();
        let r = scn.step(&yawed(180.0)).unwrap();
        assert!(r.outage);
        assert_eq!(r.rx_power_dbm, f64::NEG_INFINITY);
        assert!(r.aps.iter().all(|a| !a.in_fov));
    }

    #[test]
    fn one_ap_survives_wide_separation() {
        let scn = build_scenario(&ScenarioConfig::default().with_separation(140.0)).unwrap();
        let r = scn.step(&yawed(100.0)).unwrap();
        // body azimuth = initial azimuth + yaw
        assert!((r.aps[0].aoa.theta - 170.0).abs() < 1e-9);
        assert!((r.aps[1].aoa.theta - 30.0).abs() < 1e-9);
        assert!(!r.aps[0].in_fov && r.aps[1].in_fov);
        assert!(!r.outage && r.rx_power_dbm.is_finite());
    }

    #[test]
    fn single_beam_serves_ap1_only() {
        let scn = build_scenario(&ScenarioConfig::default().with_mode(ReceptionMode::SingleBeamSteered)).unwrap();
        let r = scn.step(&still(0)).unwrap();
        assert_eq!(r.aps.len(), 1);
        assert!((r.aps[0].aoa.theta - 10.0).abs() < 1e-9);
        assert!((r.aps[0].g_rx - 64.0).abs() < 1e-9);
        assert!((r.aps[0].g_tx - 64.0).abs() < 1e-9);
    }

    #[test]
    fn static_run_is_flat() {
        let scn = build_scenario(&ScenarioConfig::default()).unwrap();
        let trace = synthesize_trace(&SynthSpec::new(TraceKind::Static)).unwrap();
        let out = scn.run(&trace).unwrap();
        assert_eq!(out.metrics.outage_rate, 0.0);
        let first = out.results[0].rx_power_dbm;
        assert!(out.results.iter().all(|r| (r.rx_power_dbm - first).abs() < 1e-12));
        let stats = out.metrics.rx_level_dbm.unwrap();
        assert_eq!(stats.p5, stats.p95);
        assert!((stats.mean - first).abs() < 1e-12);
    }

    #[test]
    fn outage_rate_arithmetic() {
        let mk = |outage: bool| SampleResult {
            t_ms: 0,
            aps: vec![],
            rx_power_dbm: if outage { f64::NEG_INFINITY } else { -40.0 },
            snr_db: 0.0,
            outage,
        };
        assert_eq!(outage_rate(&[]), Err(ScenarioError::EmptyResults));
        assert_eq!(outage_rate(&[mk(false), mk(false)]).unwrap(), 0.0);
        assert_eq!(outage_rate(&[mk(true), mk(true)]).unwrap(), 1.0);
        let half: Vec<_> = (0..188).map(|k| mk(k < 94)).collect();
        assert_eq!(outage_rate(&half).unwrap(), 0.5);
        assert_eq!(rx_level_stats(&[mk(true)]), Err(ScenarioError::AllOutage));
        let s = rx_level_stats(&[mk(true), mk(false)]).unwrap();
        assert_eq!((s.min, s.p5, s.median, s.mean, s.p95, s.max), (-40.0, -40.0, -40.0, -40.0, -40.0, -40.0));
    }

    #[test]
    fn nearest_rank_percentiles() {
        let levels: Vec<f64> = (1..=20).map(f64::from).collect();
        let s = RxLevelStats::from_levels(&levels).unwrap();
        assert_eq!((s.min, s.p5, s.median, s.p95, s.max), (1.0, 1.0, 10.0, 19.0, 20.0));
        assert_eq!(s.mean, 10.5);
    }

    #[test]
    fn config_defaults_from_empty_json() {
        let cfg: ScenarioConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        let cfg: ScenarioConfig =
            serde_json::from_str(r#"{"mode":"single","hmd_array":{"m":4,"n":4},"radio":{"bandwidth_hz":1e8}}"#).unwrap();
        assert_eq!(cfg.mode, ReceptionMode::SingleBeamSteered);
        assert_eq!(cfg.hmd_array.dx_wavelengths, 0.5);
        assert_eq!(cfg.radio.bandwidth_hz, 1e8);
        assert_eq!(cfg.radio.carrier_hz, 28e9);
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"sepration_deg":20}"#).is_err());
    }
}
