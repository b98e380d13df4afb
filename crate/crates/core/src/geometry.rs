//! Head-movement kinematics: HMD↔AP orientation vectors, yaw/pitch/roll
//! rotation matrices, and the beam-misalignment vector.
//!
//! Conventions:
//! - Angles are degrees at every public boundary and radians internally.
//! - An [`OrientationVector`] is computed from the difference `hmd − ap`.
//!   Azimuth and elevation use the full-quadrant arctangent.
//! - Rotations act on row vectors, `q' = q · R`, with `R = R_x · R_y · R_z`.
//!   Under this convention a positive yaw `α` moves a body-frame azimuth
//!   from `θ` to `θ + α`.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Positions closer than this are treated as coincident.
pub const COINCIDENT_TOLERANCE_M: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("HMD and AP positions coincide (distance {distance_m} m)")]
    ZeroDistance { distance_m: f64 },
}

/// Wraps an angle in degrees into `(−180, 180]`. Values already in range are
/// returned unchanged, so the operation is idempotent.
pub fn wrap_deg<T: Real>(angle: T) -> T {
    let half = T::lit(180.0);
    if angle > -half && angle <= half {
        return angle;
    }
    let full = T::lit(360.0);
    let mut r = angle % full;
    if r < T::zero() {
        r = r + full;
    }
    if r > half {
        r = r - full;
    }
    // `r` lands on -180 only through rounding of huge inputs.
    if r <= -half {
        r = r + full;
    }
    r
}

/// Returns `angle + k·360` for the integer `k` that brings it nearest to
/// `reference`.
pub fn unwrap_near<T: Real>(angle: T, reference: T) -> T {
    reference + wrap_deg(angle - reference)
}

/// Cartesian position in the room frame, metres, `z` up.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Position3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Real> Add for Position3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Real> Sub for Position3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// Spherical HMD↔AP relation: range in metres, azimuth in `(−180, 180]`
/// degrees, elevation in `[−90, 90]` degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OrientationVector<T> {
    pub r: T,
    pub theta: T,
    pub phi: T,
}

impl<T: Real> OrientationVector<T> {
    pub fn new(r: T, theta: T, phi: T) -> Self {
        Self { r, theta, phi }
    }

    /// Converts a Cartesian vector to spherical form. A vector on the
    /// vertical axis gets azimuth 0.
    pub fn from_cartesian(v: [T; 3]) -> Self {
        let [x, y, z] = v;
        let horizontal = (x * x + y * y).sqrt();
        let r = (horizontal * horizontal + z * z).sqrt();
        let theta = if x == T::zero() && y == T::zero() {
            T::zero()
        } else {
            wrap_deg(y.atan2(x).to_degrees())
        };
        let phi = if r == T::zero() {
            T::zero()
        } else {
            z.atan2(horizontal).to_degrees()
        };
        Self { r, theta, phi }
    }

    pub fn to_cartesian(&self) -> [T; 3] {
        let (st, ct) = self.theta.to_radians().sin_cos();
        let (sp, cp) = self.phi.to_radians().sin_cos();
        [self.r * cp * ct, self.r * cp * st, self.r * sp]
    }
}

/// Yaw (about z), pitch (about y) and roll (about x), degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles<T> {
    pub yaw: T,
    pub pitch: T,
    pub roll: T,
}

impl<T: Real> EulerAngles<T> {
    pub fn new(yaw: T, pitch: T, roll: T) -> Self {
        Self { yaw, pitch, roll }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.yaw.is_finite() && self.pitch.is_finite() && self.roll.is_finite()
    }

    /// Each angle wrapped into `(−180, 180]`.
    pub fn canonical(&self) -> Self {
        Self::new(wrap_deg(self.yaw), wrap_deg(self.pitch), wrap_deg(self.roll))
    }
}

/// 6DOF head pose: translation `p′` relative to the initial position and
/// absolute orientation relative to the initial facing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose6DOF<T> {
    pub translation: Position3<T>,
    pub rotation: EulerAngles<T>,
}

impl<T: Real> Pose6DOF<T> {
    pub fn is_finite(&self) -> bool {
        self.translation.is_finite() && self.rotation.is_finite()
    }
}

/// Row-major 3×3 matrix acting on row vectors from the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix<T>(pub [[T; 3]; 3]);

impl<T: Real> RotationMatrix<T> {
    pub fn identity() -> Self {
        let (o, l) = (T::zero(), T::one());
        Self([[l, o, o], [o, l, o], [o, o, l]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[j][i];
            }
        }
        Self(out)
    }

    pub fn determinant(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Row vector times matrix, `v · R`.
    pub fn apply_row(&self, v: [T; 3]) -> [T; 3] {
        let m = &self.0;
        let mut out = [T::zero(); 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = v[0] * m[0][j] + v[1] * m[1][j] + v[2] * m[2][j];
        }
        out
    }
}

impl<T: Real> Mul for RotationMatrix<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Self(out)
    }
}

/// Distance, azimuth and elevation discrepancies relative to the initial
/// orientation. `r_dis` may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MisalignmentVector<T> {
    pub r_dis: T,
    pub theta_mis: T,
    pub phi_mis: T,
}

/// Orientation of the HMD relative to the AP, from the difference `hmd − ap`.
pub fn orientation_from_positions<T: Real>(
    hmd: Position3<T>,
    ap: Position3<T>,
) -> Result<OrientationVector<T>, GeometryError> {
    let diff = hmd - ap;
    let distance = diff.norm();
    if distance.as_f64() <= COINCIDENT_TOLERANCE_M {
        return Err(GeometryError::ZeroDistance { distance_m: distance.as_f64() });
    }
    Ok(OrientationVector::from_cartesian(diff.to_array()))
}

/// Orientation after moving the HMD by `delta`.
pub fn apply_translation<T: Real>(
    hmd: Position3<T>,
    delta: Position3<T>,
    ap: Position3<T>,
) -> Result<OrientationVector<T>, GeometryError> {
    orientation_from_positions(hmd + delta, ap)
}

/// `R = R_x(roll) · R_y(pitch) · R_z(yaw)`.
pub fn rotation_matrix<T: Real>(angles: EulerAngles<T>) -> RotationMatrix<T> {
    let (o, l) = (T::zero(), T::one());
    let (sa, ca) = angles.yaw.to_radians().sin_cos();
    let (sb, cb) = angles.pitch.to_radians().sin_cos();
    let (sg, cg) = angles.roll.to_radians().sin_cos();

    let rx = RotationMatrix([[l, o, o], [o, cg, sg], [o, -sg, cg]]);
    let ry = RotationMatrix([[cb, o, -sb], [o, l, o], [sb, o, cb]]);
    let rz = RotationMatrix([[ca, sa, o], [-sa, ca, o], [o, o, l]]);
    rx * ry * rz
}

/// Rotates `q` as a row vector, `q · R`, and converts back to spherical form.
pub fn apply_rotation<T: Real>(q: OrientationVector<T>, rot: &RotationMatrix<T>) -> OrientationVector<T> {
    OrientationVector::from_cartesian(rot.apply_row(q.to_cartesian()))
}

/// `2·q0 − (q_trn + q_rot)`, componentwise.
///
/// Angles of `q_trn` and `q_rot` are first unwrapped to the branch nearest
/// `q0`; the resulting angles are wrapped into `(−180, 180]`.
pub fn misalignment<T: Real>(
    q0: OrientationVector<T>,
    q_trn: OrientationVector<T>,
    q_rot: OrientationVector<T>,
) -> MisalignmentVector<T> {
    let two = T::lit(2.0);
    let theta_trn = unwrap_near(q_trn.theta, q0.theta);
    let theta_rot = unwrap_near(q_rot.theta, q0.theta);
    let phi_trn = unwrap_near(q_trn.phi, q0.phi);
    let phi_rot = unwrap_near(q_rot.phi, q0.phi);
    MisalignmentVector {
        r_dis: two * q0.r - (q_trn.r + q_rot.r),
        theta_mis: wrap_deg(two * q0.theta - (theta_trn + theta_rot)),
        phi_mis: wrap_deg(two * q0.phi - (phi_trn + phi_rot)),
    }
}

/// HMD↔AP direction expressed in the rotated head frame: the room-frame
/// `hmd − ap` vector right-multiplied by `rotation_matrix(head)`.
pub fn body_frame_aoa<T: Real>(
    hmd: Position3<T>,
    head: EulerAngles<T>,
    ap: Position3<T>,
) -> Result<OrientationVector<T>, GeometryError> {
    let room = orientation_from_positions(hmd, ap)?;
    let rotated = rotation_matrix(head).apply_row((hmd - ap).to_array());
    let mut out = OrientationVector::from_cartesian(rotated);
    out.r = room.r;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Position3<f64> {
        Position3::new(x, y, z)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn wrap_is_idempotent_and_in_range() {
        for &a in &[-720.0, -540.0, -180.0, -179.5, 0.0, 180.0, 181.0, 360.0, 539.0, 1e6] {
            let w = wrap_deg(a);
            assert!(w > -180.0 && w <= 180.0, "{a} -> {w}");
            assert_eq!(wrap_deg(w), w);
        }
        assert_eq!(wrap_deg(-180.0), 180.0);
        assert_eq!(wrap_deg(360.0), 0.0);
    }

    #[test]
    fn unwrap_picks_nearest_branch() {
        assert!(close(unwrap_near(-170.0, 170.0), 190.0, 1e-12));
        assert!(close(unwrap_near(170.0, -170.0), -190.0, 1e-12));
        assert!(close(unwrap_near(10.0, 0.0), 10.0, 1e-12));
    }

    #[test]
    fn orientation_diagonal() {
        let q = orientation_from_positions(p(0.0, 0.0, 0.0), p(-1.0, -1.0, 0.0)).unwrap();
        assert!(close(q.r, 2f64.sqrt(), 1e-12));
        assert!(close(q.theta, 45.0, 1e-12));
        assert!(close(q.phi, 0.0, 1e-12));
    }

    #[test]
    fn orientation_elevated_ap() {
        let q = orientation_from_positions(p(0.0, 0.0, 1.5), p(10.0, 0.0, 4.0)).unwrap();
        // difference (-10, 0, -2.5)
        assert!(close(q.r, 106.25f64.sqrt(), 1e-12));
        assert!(close(q.phi, (-2.5f64).atan2(10.0).to_degrees(), 1e-12));
        assert!(close(q.phi, -14.036_243_467_926_479, 1e-9));
        assert!(close(q.theta, 180.0, 1e-12));
    }

    #[test]
    fn orientation_vertical_axis() {
        let q = orientation_from_positions(p(0.0, 0.0, 0.0), p(0.0, 0.0, -5.0)).unwrap();
        assert_eq!(q.theta, 0.0);
        assert!(close(q.phi, 90.0, 1e-12));
        assert!(close(q.r, 5.0, 1e-12));
    }

    #[test]
    fn orientation_coincident_is_error() {
        let err = orientation_from_positions(p(1.0, 2.0, 3.0), p(1.0, 2.0, 3.0 + 1e-10)).unwrap_err();
        assert!(matches!(err, GeometryError::ZeroDistance { .. }));
    }

    #[test]
    fn translation_cases() {
        let hmd = p(0.0, 0.0, 0.0);
        let ap = p(-1.0, 0.0, 0.0);
        assert_eq!(
            apply_translation(hmd, Position3::zero(), ap).unwrap(),
            orientation_from_positions(hmd, ap).unwrap()
        );

        let q = apply_translation(hmd, p(1.0, 0.0, 0.0), p(2.0, 0.0, 0.0)).unwrap();
        assert!(close(q.r, 1.0, 1e-12));

        let before = orientation_from_positions(hmd, ap).unwrap();
        let after = apply_translation(hmd, p(0.0, 1.0, 0.0), ap).unwrap();
        assert!(close(after.r, 2f64.sqrt(), 1e-12));
        assert!(close(after.theta - before.theta, 45.0, 1e-12));
        assert_eq!(
            apply_translation(p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(1.0, 0.0, 0.0)).unwrap_err(),
            GeometryError::ZeroDistance { distance_m: 0.0 }
        );
    }

    #[test]
    fn rotation_identity_and_yaw_90() {
        assert_eq!(rotation_matrix(EulerAngles::<f64>::zero()), RotationMatrix::identity());
        let r = rotation_matrix(EulerAngles::new(90.0, 0.0, 0.0));
        let expected = [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(r.0[i][j], expected[i][j], 1e-15), "({i},{j})");
            }
        }
    }

    #[test]
    fn rotation_yaw_moves_azimuth_positive() {
        let q = OrientationVector::new(1.0, 0.0, 0.0);
        let out = apply_rotation(q, &rotation_matrix(EulerAngles::new(30.0, 0.0, 0.0)));
        assert!(close(out.r, 1.0, 1e-12));
        assert!(close(out.theta, 30.0, 1e-12));
        assert!(close(out.phi, 0.0, 1e-12));
    }

    #[test]
    fn rotation_pitch_sign_golden() {
        // (1,0,0)·R_y = (cos β, 0, −sin β) with the printed R_y.
        let q = OrientationVector::new(1.0, 0.0, 0.0);
        let out = apply_rotation(q, &rotation_matrix(EulerAngles::new(0.0, 45.0, 0.0)));
        assert!(close(out.r, 1.0, 1e-12));
        assert!(close(out.theta, 0.0, 1e-12));
        assert!(close(out.phi, -45.0, 1e-12));
    }

    #[test]
    fn rotation_identity_keeps_vector() {
        let q = OrientationVector::new(3.0, -120.0, 20.0);
        let out = apply_rotation(q, &RotationMatrix::identity());
        assert!(close(out.r, q.r, 1e-12));
        assert!(close(out.theta, q.theta, 1e-12));
        assert!(close(out.phi, q.phi, 1e-12));
    }

    #[test]
    fn misalignment_cases() {
        let q0 = OrientationVector::new(10.0, 0.0, 0.0);
        let zero = misalignment(q0, q0, q0);
        assert_eq!(zero, MisalignmentVector { r_dis: 0.0, theta_mis: 0.0, phi_mis: 0.0 });

        let q_rot = apply_rotation(q0, &rotation_matrix(EulerAngles::new(30.0, 0.0, 0.0)));
        let m = misalignment(q0, q0, q_rot);
        assert!(close(m.r_dis, 0.0, 1e-12));
        assert!(close(m.theta_mis, -30.0, 1e-12));
        assert!(close(m.phi_mis, 0.0, 1e-12));

        let q0 = OrientationVector::new(10.0, 12.0, -14.0);
        let q_trn = OrientationVector::new(9.5, 15.5, -13.0);
        let m = misalignment(q0, q_trn, q0);
        assert_eq!(m.theta_mis, q0.theta - q_trn.theta);
        assert!(close(m.r_dis, 0.5, 1e-12));
    }

    #[test]
    fn misalignment_across_branch_cut() {
        let q0 = OrientationVector::new(10.0, 175.0, 0.0);
        let q_rot = OrientationVector::new(10.0, -175.0, 0.0);
        let m = misalignment(q0, q0, q_rot);
        assert!(close(m.theta_mis, -10.0, 1e-12));
    }

    #[test]
    fn body_frame_cases() {
        let hmd = p(0.0, 0.0, 0.0);
        // hmd − ap = (1, 0, 0): azimuth 0, "dead ahead".
        let ap = p(-1.0, 0.0, 0.0);
        assert_eq!(
            body_frame_aoa(hmd, EulerAngles::zero(), ap).unwrap(),
            orientation_from_positions(hmd, ap).unwrap()
        );
        let q = body_frame_aoa(hmd, EulerAngles::new(90.0, 0.0, 0.0), ap).unwrap();
        assert!(close(q.theta, 90.0, 1e-12));
        let q = body_frame_aoa(hmd, EulerAngles::new(180.0, 0.0, 0.0), ap).unwrap();
        assert!(close(q.theta.abs(), 180.0, 1e-12));
    }

    #[test]
    fn f32_instantiation() {
        let q = orientation_from_positions(Position3::<f32>::new(0.0, 0.0, 0.0), Position3::new(-1.0, -1.0, 0.0))
            .unwrap();
        assert!((q.theta - 45.0).abs() < 1e-4);
        let r = rotation_matrix(EulerAngles::<f32>::new(33.0, -12.0, 71.0));
        assert!((r.determinant() - 1.0).abs() < 1e-5);
    }
}
