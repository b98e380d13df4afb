//! LoS link budget: channel amplitude, MRT precoding, thermal noise,
//! coherent multi-AP combining and the field-of-view rule.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::wrap_deg;
use crate::scalar::{from_db, to_db, Real};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error("link distance must be positive (got {0} m)")]
    NonPositiveDistance(f64),
    #[error("cannot precode a zero channel")]
    ZeroChannel,
    #[error("link set is empty")]
    EmptyLinkSet,
    #[error("invalid radio configuration: {0}")]
    BadConfig(&'static str),
}

/// Radio parameters shared by every AP and the HMD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>", serialize = "T: Serialize"))]
pub struct RadioConfig<T> {
    pub carrier_hz: T,
    pub bandwidth_hz: T,
    pub temperature_k: T,
    pub noise_figure_db_hmd: T,
    pub noise_figure_db_ap: T,
    pub tx_power_dbm_per_ap: T,
    pub fov_half_angle_deg: T,
    /// When set, samples whose SNR falls below this value are also flagged.
    pub snr_outage_threshold_db: Option<T>,
}

impl<T: Real> Default for RadioConfig<T> {
    fn default() -> Self {
        Self {
            carrier_hz: T::lit(28e9),
            bandwidth_hz: T::lit(200e6),
            temperature_k: T::lit(290.0),
            noise_figure_db_hmd: T::lit(7.0),
            noise_figure_db_ap: T::lit(7.0),
            tx_power_dbm_per_ap: T::lit(10.0),
            fov_half_angle_deg: T::lit(90.0),
            snr_outage_threshold_db: None,
        }
    }
}

impl<T: Real> RadioConfig<T> {
    pub fn validate(&self) -> Result<(), LinkError> {
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(self.carrier_hz) {
            return Err(LinkError::BadConfig("carrier_hz must be positive"));
        }
        if !positive(self.bandwidth_hz) {
            return Err(LinkError::BadConfig("bandwidth_hz must be positive"));
        }
        if !positive(self.temperature_k) {
            return Err(LinkError::BadConfig("temperature_k must be positive"));
        }
        let nf_ok = |v: T| v.is_finite() && v >= T::zero();
        if !nf_ok(self.noise_figure_db_hmd) || !nf_ok(self.noise_figure_db_ap) {
            return Err(LinkError::BadConfig("noise figures must be finite and non-negative"));
        }
        if !self.tx_power_dbm_per_ap.is_finite() {
            return Err(LinkError::BadConfig("tx_power_dbm_per_ap must be finite"));
        }
        if !positive(self.fov_half_angle_deg) || self.fov_half_angle_deg > T::lit(180.0) {
            return Err(LinkError::BadConfig("fov_half_angle_deg must lie in (0, 180]"));
        }
        if self.snr_outage_threshold_db.is_some_and(|v| !v.is_finite()) {
            return Err(LinkError::BadConfig("snr_outage_threshold_db must be finite"));
        }
        Ok(())
    }
}

/// Receiver side for noise computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Hmd,
    Ap,
}

/// One AP→HMD LoS link at a time step. Gains are linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample<T> {
    pub distance_m: T,
    pub g_tx: T,
    pub g_rx: T,
    pub in_fov: bool,
}

/// Combined reception result.
#[derive(Debug, Clone, PartialEq)]
pub struct RxOutcome<T> {
    /// `−∞` during outage.
    pub rx_power_dbm: T,
    pub snr_db: T,
    /// No in-FoV link with positive gain.
    pub outage: bool,
    /// SNR below the configured threshold; always false without one.
    pub snr_outage: bool,
    /// `|h_l|` for every link in input order.
    pub channel_magnitudes: Vec<T>,
}

/// `10·log10(k_B·T·B) + 30 + F`, dBm.
pub fn noise_power_dbm<T: Real>(cfg: &RadioConfig<T>, side: Side) -> T {
    let ktb_mw = T::lit(BOLTZMANN) * cfg.temperature_k * cfg.bandwidth_hz * T::lit(1000.0);
    let nf = match side {
        Side::Hmd => cfg.noise_figure_db_hmd,
        Side::Ap => cfg.noise_figure_db_ap,
    };
    to_db(ktb_mw) + nf
}

/// Free-space path loss `20·log10(4π·d·f_c/c)`, dB.
pub fn free_space_path_loss_db<T: Real>(carrier_hz: T, distance_m: T) -> T {
    T::lit(20.0) * (T::lit(4.0) * T::PI() * distance_m * carrier_hz / T::lit(SPEED_OF_LIGHT)).log10()
}

/// `c/(4π·f_c·d) · √(g_tx·g_rx) · exp(−j·2π·f_c·d/c)`; exactly zero when the
/// AP is outside the field of view.
pub fn los_channel<T: Real>(cfg: &RadioConfig<T>, link: &LinkSample<T>) -> Result<Complex<T>, LinkError> {
    let d = link.distance_m;
    if d <= T::zero() || !d.is_finite() {
        return Err(LinkError::NonPositiveDistance(d.as_f64()));
    }
    if !link.in_fov {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let c = T::lit(SPEED_OF_LIGHT);
    let magnitude = c / (T::lit(4.0) * T::PI() * cfg.carrier_hz * d) * (link.g_tx * link.g_rx).sqrt();
    // reduce the cycle count before taking the phase
    let cycles = cfg.carrier_hz * d / c;
    let phase = -T::TAU() * (cycles - cycles.floor());
    Ok(Complex::from_polar(magnitude, phase))
}

/// `h/|h|`.
pub fn mrt_precoder<T: Real>(h: Complex<T>) -> Result<Complex<T>, LinkError> {
    let magnitude = h.norm();
    if magnitude == T::zero() || !magnitude.is_finite() {
        return Err(LinkError::ZeroChannel);
    }
    Ok(h / magnitude)
}

/// Coherent sum of all in-FoV links under MRT precoding with perfect
/// reciprocal CSI (the uplink estimate is `conj(h_DL)`).
pub fn coherent_rx_power<T: Real>(cfg: &RadioConfig<T>, links: &[LinkSample<T>]) -> Result<RxOutcome<T>, LinkError> {
    if links.is_empty() {
        return Err(LinkError::EmptyLinkSet);
    }
    let amplitude = from_db(cfg.tx_power_dbm_per_ap).sqrt();
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut magnitudes = Vec::with_capacity(links.len());
    let mut contributing = 0usize;
    for link in links {
        let h = los_channel(cfg, link)?;
        magnitudes.push(h.norm());
        if h.norm() == T::zero() {
            continue;
        }
        let v = mrt_precoder(h.conj())?;
        let term = v * h * amplitude;
        debug_assert!(
            term.re >= T::zero() && term.im.abs() <= T::epsilon() * T::lit(64.0) * term.re,
            "MRT term not phase aligned: {term:?}"
        );
        sum = sum + term;
        contributing += 1;
    }

    let noise = noise_power_dbm(cfg, Side::Hmd);
    if contributing == 0 {
        return Ok(RxOutcome {
            rx_power_dbm: T::neg_infinity(),
            snr_db: T::neg_infinity(),
            outage: true,
            snr_outage: cfg.snr_outage_threshold_db.is_some(),
            channel_magnitudes: magnitudes,
        });
    }
    let rx_power_dbm = to_db(sum.norm_sqr());
    let snr_db = rx_power_dbm - noise;
    Ok(RxOutcome {
        rx_power_dbm,
        snr_db,
        outage: false,
        snr_outage: cfg.snr_outage_threshold_db.is_some_and(|th| snr_db < th),
        channel_magnitudes: magnitudes,
    })
}

/// `|wrap(azimuth)| ≤ fov_half_angle`, boundary inclusive. Elevation plays
/// no part.
pub fn in_field_of_view<T: Real>(body_frame_azimuth: T, cfg: &RadioConfig<T>) -> bool {
    wrap_deg(body_frame_azimuth).abs() <= cfg.fov_half_angle_deg
}
