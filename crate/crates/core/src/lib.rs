//! Trace-driven simulation of coordinated multi-point mmWave links to a
//! moving VR head-mounted display.
//!
//! The numeric kernels ([`geometry`], [`phased_array`], [`link`]) are
//! generic over [`Real`] and instantiated for `f32` and `f64`; the aliases
//! below fix them to `f64`. [`trace`] and [`scenario`] work in `f64`.

pub mod geometry;
pub mod link;
pub mod phased_array;
pub mod scalar;
pub mod scenario;
pub mod trace;

pub use scalar::{from_db, to_db, Real};

pub type Position3 = geometry::Position3<f64>;
pub type OrientationVector = geometry::OrientationVector<f64>;
pub type EulerAngles = geometry::EulerAngles<f64>;
pub type RotationMatrix = geometry::RotationMatrix<f64>;
pub type Pose6DOF = geometry::Pose6DOF<f64>;
pub type MisalignmentVector = geometry::MisalignmentVector<f64>;
pub type ArrayGeometry = phased_array::ArrayGeometry<f64>;
pub type BeamSpec = phased_array::BeamSpec<f64>;
pub type ComplexVector = phased_array::ComplexVector<f64>;
pub type GainMap = phased_array::GainMap<f64>;
pub type RadioConfig = link::RadioConfig<f64>;
pub type LinkSample = link::LinkSample<f64>;
pub type RxOutcome = link::RxOutcome<f64>;

pub type Position3F32 = geometry::Position3<f32>;
pub type OrientationVectorF32 = geometry::OrientationVector<f32>;
pub type EulerAnglesF32 = geometry::EulerAngles<f32>;
pub type ArrayGeometryF32 = phased_array::ArrayGeometry<f32>;
pub type BeamSpecF32 = phased_array::BeamSpec<f32>;
pub type ComplexVectorF32 = phased_array::ComplexVector<f32>;
pub type RadioConfigF32 = link::RadioConfig<f32>;

pub use phased_array::NormalizationMode;
pub use scenario::{ReceptionMode, ScenarioConfig};
