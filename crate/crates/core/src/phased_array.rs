//! Uniform planar array (UPA) steering vectors, single- and multi-beam
//! analog weights, and beamforming gain.
//!
//! Element `(m, n)` is stored at flat index `m·N + n`. The steering phase
//! follows the `(θ, φ)` parametrization
//! `exp(−j·2π·(m·dx·sinθ·cosφ + n·dy·sinθ·sinφ))` with spacings in
//! wavelengths. Elements are isotropic.

use std::ops::Index;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArrayError {
    #[error("array must have at least one element per axis (got {m}x{n})")]
    EmptyArray { m: usize, n: usize },
    #[error("element spacing must be positive and finite")]
    BadSpacing,
    #[error("beam set is empty")]
    EmptyBeamSet,
    #[error("{beams} beams exceed the {elements} available elements")]
    TooManyBeams { beams: usize, elements: usize },
    #[error("power coefficients must lie in [0, 1] and sum to 1 (sum = {sum})")]
    BadPowerCoefficients { sum: f64 },
    #[error("weight vector has {found} entries, array has {expected} elements")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("angle grid is empty")]
    EmptyGrid,
    #[error("angle grid must be strictly increasing")]
    UnsortedGrid,
}

fn half_wavelength<T: Real>() -> T {
    T::lit(0.5)
}

/// `M × N` planar array with spacings expressed in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>", serialize = "T: Serialize"))]
pub struct ArrayGeometry<T> {
    #[serde(rename = "m")]
    pub m_count: usize,
    #[serde(rename = "n")]
    pub n_count: usize,
    #[serde(rename = "dx", default = "half_wavelength")]
    pub dx_wavelengths: T,
    #[serde(rename = "dy", default = "half_wavelength")]
    pub dy_wavelengths: T,
}

impl<T: Real> ArrayGeometry<T> {
    /// Half-wavelength spaced `m × n` array.
    pub fn new(m_count: usize, n_count: usize) -> Result<Self, ArrayError> {
        Self::with_spacing(m_count, n_count, half_wavelength(), half_wavelength())
    }

    pub fn with_spacing(m_count: usize, n_count: usize, dx: T, dy: T) -> Result<Self, ArrayError> {
        let geo = Self { m_count, n_count, dx_wavelengths: dx, dy_wavelengths: dy };
        geo.validate()?;
        Ok(geo)
    }

    pub fn validate(&self) -> Result<(), ArrayError> {
        if self.m_count == 0 || self.n_count == 0 {
            return Err(ArrayError::EmptyArray { m: self.m_count, n: self.n_count });
        }
        let ok = |d: T| d.is_finite() && d > T::zero();
        if !ok(self.dx_wavelengths) || !ok(self.dy_wavelengths) {
            return Err(ArrayError::BadSpacing);
        }
        Ok(())
    }

    pub fn element_count(&self) -> usize {
        self.m_count * self.n_count
    }
}

/// One intended steering direction (degrees) and its power coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec<T> {
    pub theta_b: T,
    pub phi_b: T,
    pub eta: T,
}

impl<T: Real> BeamSpec<T> {
    pub fn new(theta_b: T, phi_b: T, eta: T) -> Self {
        Self { theta_b, phi_b, eta }
    }
}

/// How the combined multi-beam weight vector is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Divide by `Σ √η_l · ‖W_l‖₂`.
    #[default]
    AmplitudeSum,
    /// Keep only each entry's phase, at modulus `1/√(MN)`.
    ElementwiseConstantModulus,
    /// Divide by the Euclidean norm of the combined vector.
    UnitPower,
}

/// Complex amplitudes, one per array element.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector<T>(Vec<Complex<T>>);

impl<T: Real> ComplexVector<T> {
    pub fn from_vec(v: Vec<Complex<T>>) -> Self {
        Self(v)
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex<T>> {
        self.0.iter()
    }

    pub fn norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    /// Non-conjugating inner product `Σ aᵢ·bᵢ`.
    pub fn dot(&self, other: &Self) -> Complex<T> {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
    }
}

impl<T> Index<usize> for ComplexVector<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.0[i]
    }
}

/// Per-element phase `2π·(m·dx·sinθ·cosφ + n·dy·sinθ·sinφ)` for every
/// element, in flat order.
fn element_phases<T: Real>(geo: &ArrayGeometry<T>, theta_deg: T, phi_deg: T) -> impl Iterator<Item = T> + '_ {
    let sin_theta = theta_deg.to_radians().sin();
    let (sin_phi, cos_phi) = phi_deg.to_radians().sin_cos();
    let two_pi = T::TAU();
    let kx = two_pi * geo.dx_wavelengths * sin_theta * cos_phi;
    let ky = two_pi * geo.dy_wavelengths * sin_theta * sin_phi;
    (0..geo.m_count).flat_map(move |m| {
        let mx = T::from_usize_lossy(m) * kx;
        (0..geo.n_count).map(move |n| mx + T::from_usize_lossy(n) * ky)
    })
}

/// Array response toward `(theta, phi)` degrees. Every entry has unit modulus.
pub fn steering_vector<T: Real>(geo: &ArrayGeometry<T>, theta: T, phi: T) -> ComplexVector<T> {
    ComplexVector(
        element_phases(geo, theta, phi)
            .map(|ph| {
                let (s, c) = ph.sin_cos();
                Complex::new(c, -s)
            })
            .collect(),
    )
}

/// Conjugate-matched weights toward `(theta_b, phi_b)`, unit modulus per
/// entry and not power-normalized.
pub fn single_beam_weights<T: Real>(geo: &ArrayGeometry<T>, theta_b: T, phi_b: T) -> ComplexVector<T> {
    ComplexVector(
        element_phases(geo, theta_b, phi_b)
            .map(|ph| {
                let (s, c) = ph.sin_cos();
                Complex::new(c, s)
            })
            .collect(),
    )
}

/// Tolerance on `Σ η = 1`.
pub const POWER_SUM_TOLERANCE: f64 = 1e-9;

fn check_beams<T: Real>(geo: &ArrayGeometry<T>, beams: &[BeamSpec<T>]) -> Result<(), ArrayError> {
    if beams.is_empty() {
        return Err(ArrayError::EmptyBeamSet);
    }
    if beams.len() > geo.element_count() {
        return Err(ArrayError::TooManyBeams { beams: beams.len(), elements: geo.element_count() });
    }
    let sum = beams.iter().fold(T::zero(), |acc, b| acc + b.eta);
    let in_range = beams.iter().all(|b| b.eta >= T::zero() && b.eta <= T::one());
    if !in_range || !sum.is_finite() || (sum.as_f64() - 1.0).abs() > POWER_SUM_TOLERANCE {
        return Err(ArrayError::BadPowerCoefficients { sum: sum.as_f64() });
    }
    Ok(())
}

/// Combined analog weights steering one lobe toward each beam:
/// `Σ √η_l · W_l(θ_l, φ_l)` scaled according to `mode`.
pub fn multi_beam_weights<T: Real>(
    geo: &ArrayGeometry<T>,
    beams: &[BeamSpec<T>],
    mode: NormalizationMode,
) -> Result<ComplexVector<T>, ArrayError> {
    geo.validate()?;
    check_beams(geo, beams)?;

    let zero = Complex::new(T::zero(), T::zero());
    let mut sum = vec![zero; geo.element_count()];
    for beam in beams {
        let amp = beam.eta.sqrt();
        for (acc, w) in sum.iter_mut().zip(single_beam_weights(geo, beam.theta_b, beam.phi_b).iter()) {
            *acc = *acc + w * amp;
        }
    }
    let sum = ComplexVector(sum);
    let root_mn = T::from_usize_lossy(geo.element_count()).sqrt();

    let out = match mode {
        NormalizationMode::AmplitudeSum => {
            // each single-beam vector has norm √(MN)
            let denom = beams.iter().fold(T::zero(), |acc, b| acc + b.eta.sqrt()) * root_mn;
            sum.scale(T::one() / denom)
        }
        NormalizationMode::ElementwiseConstantModulus => {
            let floor = T::lit(1e-12);
            ComplexVector(
                sum.iter()
                    .map(|z| {
                        let modulus = z.norm();
                        if modulus < floor {
                            zero
                        } else {
                            z / (modulus * root_mn)
                        }
                    })
                    .collect(),
            )
        }
        NormalizationMode::UnitPower => {
            let norm = sum.norm();
            if norm == T::zero() {
                sum
            } else {
                sum.scale(T::one() / norm)
            }
        }
    };
    Ok(out)
}

/// `|Wᵀ·A(θ, φ)|²`, linear.
pub fn gain<T: Real>(weights: &ComplexVector<T>, geo: &ArrayGeometry<T>, theta: T, phi: T) -> Result<T, ArrayError> {
    if weights.len() != geo.element_count() {
        return Err(ArrayError::DimensionMismatch { expected: geo.element_count(), found: weights.len() });
    }
    Ok(weights.dot(&steering_vector(geo, theta, phi)).norm_sqr())
}

/// Linear gains over a rectangular angle grid. Row `i` is `rows[i]`,
/// column `j` is `cols[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMap<T> {
    pub rows: Vec<T>,
    pub cols: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> GainMap<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols.len() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let w = self.cols.len();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Location of the maximum. Cells within `tie_tolerance` of the maximum
    /// count as ties; among ties the cell nearest the grid origin `(0, 0)`
    /// wins, then the lowest flat index.
    pub fn peak(&self, tie_tolerance: T) -> (usize, usize, T) {
        let max = self.max();
        let w = self.cols.len();
        let mut best: Option<(usize, T)> = None;
        for (k, &v) in self.values.iter().enumerate() {
            if v < max - tie_tolerance {
                continue;
            }
            let (r, c) = (self.rows[k / w], self.cols[k % w]);
            let dist = r * r + c * c;
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((k, dist));
            }
        }
        let (k, _) = best.expect("map is non-empty");
        (k / w, k % w, self.values[k])
    }
}

fn check_grid<T: Real>(grid: &[T]) -> Result<(), ArrayError> {
    if grid.is_empty() {
        return Err(ArrayError::EmptyGrid);
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|v| !v.is_finite()) {
        return Err(ArrayError::UnsortedGrid);
    }
    Ok(())
}

/// Beam pattern `g(θ, φ)` of fixed weights over `theta_grid × phi_grid`.
pub fn gain_map<T: Real>(
    weights: &ComplexVector<T>,
    geo: &ArrayGeometry<T>,
    theta_grid: &[T],
    phi_grid: &[T],
) -> Result<GainMap<T>, ArrayError> {
    check_grid(theta_grid)?;
    check_grid(phi_grid)?;
    let mut values = Vec::with_capacity(theta_grid.len() * phi_grid.len());
    for &theta in theta_grid {
        for &phi in phi_grid {
            values.push(gain(weights, geo, theta, phi)?);
        }
    }
    Ok(GainMap { rows: theta_grid.to_vec(), cols: phi_grid.to_vec(), values })
}

/// Dual-beam gain in the first beam's direction as a function of the first
/// beam azimuth `θ₁` (rows) and the separation `Δθ` (columns), with the
/// second beam at `θ₁ − Δθ`, both elevations 0 and equal power split.
pub fn separation_gain_map<T: Real>(
    geo: &ArrayGeometry<T>,
    theta1_grid: &[T],
    separation_grid: &[T],
    mode: NormalizationMode,
) -> Result<GainMap<T>, ArrayError> {
    check_grid(theta1_grid)?;
    check_grid(separation_grid)?;
    let half = T::lit(0.5);
    let mut values = Vec::with_capacity(theta1_grid.len() * separation_grid.len());
    for &theta1 in theta1_grid {
        for &sep in separation_grid {
            let beams = [BeamSpec::new(theta1, T::zero(), half), BeamSpec::new(theta1 - sep, T::zero(), half)];
            let w = multi_beam_weights(geo, &beams, mode)?;
            values.push(gain(&w, geo, theta1, T::zero())?);
        }
    }
    Ok(GainMap { rows: theta1_grid.to_vec(), cols: separation_grid.to_vec(), values })
}
