//! Process orientation frames and rotation calculus.
//!
//! The process orientation frame is an adapted Frenet frame: the tangent
//! follows the path, the normal is prescribed by the surface (pressing
//! direction of the tool) and the binormal closes the right-handed triad.
//! Orientation bookkeeping for the trajectory uses Tait-Bryan angles with
//! rotation order X-Y-Z, composed as `R = R_x(alpha) * R_y(beta) * R_z(gamma)`
//! (intrinsic x-y'-z'').

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spline::BSplineCurve;

/// Residual-norm threshold for the normal/tangent orthogonalization.
pub const EPS_ANGLE: f64 = 1e-3;
/// Vanishing-tangent threshold, relative to the curve's length scale.
pub const EPS_TANGENT_REL: f64 = 1e-8;
/// Distance of the middle angle from +-pi/2 below which extraction fails.
pub const GIMBAL_LOCK_MARGIN: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("matrix is not a valid rotation (orthonormality/determinant check failed)")]
    InvalidRotation,
    #[error("vanishing tangent at sigma = {sigma}: |dr/dsigma| = {norm:.3e} (cusp or degenerate parameterization)")]
    VanishingTangent { sigma: f64, norm: f64 },
    #[error("surface normal nearly collinear with tangent at sigma = {sigma}")]
    NormalParallelToTangent { sigma: f64 },
    #[error("gimbal lock: middle Tait-Bryan angle within {GIMBAL_LOCK_MARGIN} of +-pi/2")]
    GimbalLock,
    #[error(transparent)]
    Spline(#[from] crate::spline::SplineError),
}

/// Proper orthonormal 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates `R R^T = I` and `det R = 1` within 1e-9.
    pub fn new(m: Matrix3<f64>) -> Result<Self, FrameError> {
        let ortho = (m * m.transpose() - Matrix3::identity()).norm();
        if ortho > 1e-9 || (m.determinant() - 1.0).abs() > 1e-9 {
            return Err(FrameError::InvalidRotation);
        }
        Ok(Self(m))
    }

    /// For internal constructions that are orthonormal by algebra.
    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Geodesic angle between two rotations, in radians.
    ///
    /// Computed as atan2 of the skew-part norm against the trace, which
    /// stays accurate for tiny angles where acos of the trace loses half
    /// the significant digits.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let rel = self.0.transpose() * other.0;
        let axis = Vector3::new(
            rel[(2, 1)] - rel[(1, 2)],
            rel[(0, 2)] - rel[(2, 0)],
            rel[(1, 0)] - rel[(0, 1)],
        );
        let s = 0.5 * axis.norm();
        let c = (rel.trace() - 1.0) / 2.0;
        s.atan2(c)
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }
}

impl std::ops::Mul for RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

pub fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Tait-Bryan angles, rotation order X-Y-Z, wrapped to (-pi, pi] with the
/// |beta| <= pi/2 branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaitBryanAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl TaitBryanAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.alpha, self.beta, self.gamma)
    }
}

/// `R = R_x(alpha) * R_y(beta) * R_z(gamma)`.
pub fn taitbryan_to_rotation(angles: &TaitBryanAngles) -> RotationMatrix {
    RotationMatrix::from_matrix_unchecked(
        rot_x(angles.alpha) * rot_y(angles.beta) * rot_z(angles.gamma),
    )
}

/// Inverse of [`taitbryan_to_rotation`]; errors near `beta = +-pi/2`.
///
/// Silent branch flips at gimbal lock would corrupt the velocity chain rule,
/// so lock is a hard error.
pub fn rotation_to_taitbryan(r: &RotationMatrix) -> Result<TaitBryanAngles, FrameError> {
    let m = r.matrix();
    let beta = m[(0, 2)].clamp(-1.0, 1.0).asin();
    if (beta.abs() - std::f64::consts::FRAC_PI_2).abs() < GIMBAL_LOCK_MARGIN {
        return Err(FrameError::GimbalLock);
    }
    let alpha = (-m[(1, 2)]).atan2(m[(2, 2)]);
    let gamma = (-m[(0, 1)]).atan2(m[(0, 0)]);
    Ok(TaitBryanAngles::new(alpha, beta, gamma))
}

/// Mapping matrix `E` with `omega = E(alpha, beta) * [alpha', beta', gamma']`.
///
/// Columns are the inertial-frame axes about which each Tait-Bryan rate acts:
/// `[e_x, R_x(alpha) e_y, R_x(alpha) R_y(beta) e_z]`. Defined for all angles;
/// it is singular at gimbal lock but never inverted here.
pub fn euler_rate_mapping(angles: &TaitBryanAngles) -> Matrix3<f64> {
    let (sa, ca) = angles.alpha.sin_cos();
    let (sb, cb) = angles.beta.sin_cos();
    Matrix3::new(
        1.0, 0.0, sb, //
        0.0, ca, -sa * cb, //
        0.0, sa, ca * cb,
    )
}

/// Time derivative of [`euler_rate_mapping`] along an angle path with the
/// given rates.
pub fn euler_rate_mapping_derivative(angles: &TaitBryanAngles, rates: &Vector3<f64>) -> Matrix3<f64> {
    let (sa, ca) = angles.alpha.sin_cos();
    let (sb, cb) = angles.beta.sin_cos();
    let da = Matrix3::new(
        0.0, 0.0, 0.0, //
        0.0, -sa, -ca * cb, //
        0.0, ca, -sa * cb,
    );
    let db = Matrix3::new(
        0.0, 0.0, cb, //
        0.0, 0.0, sa * sb, //
        0.0, 0.0, -ca * sb,
    );
    da * rates.x + db * rates.y
}

/// Angular velocity from Tait-Bryan angles and their time rates.
pub fn euler_rate_to_angular_velocity(angles: &TaitBryanAngles, rates: &Vector3<f64>) -> Vector3<f64> {
    euler_rate_mapping(angles) * rates
}

/// Angular acceleration from angles, rates and second derivatives
/// (product rule on the rate mapping, no finite differences).
pub fn euler_accel_to_angular_acceleration(
    angles: &TaitBryanAngles,
    rates: &Vector3<f64>,
    accels: &Vector3<f64>,
) -> Vector3<f64> {
    euler_rate_mapping_derivative(angles, rates) * rates + euler_rate_mapping(angles) * accels
}

/// Path-adapted frame at parameter `sigma`: columns of `rotation` are
/// `[tangent, normal, binormal]`.
#[derive(Debug, Clone)]
pub struct ProcessFrameSample {
    pub sigma: f64,
    pub position: Vector3<f64>,
    pub tangent: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub binormal: Vector3<f64>,
    pub rotation: RotationMatrix,
}

/// Normalized first derivative of the curve at `sigma`.
///
/// The degeneracy threshold scales with the curve's control-polygon length
/// over its domain span, so it is unit-robust.
pub fn compute_tangent(curve: &BSplineCurve, sigma: f64) -> Result<Vector3<f64>, FrameError> {
    let d = curve.derivative_curve(1)?;
    tangent_from_derivative(curve, &d, sigma)
}

pub(crate) fn tangent_from_derivative(
    curve: &BSplineCurve,
    derivative: &BSplineCurve,
    sigma: f64,
) -> Result<Vector3<f64>, FrameError> {
    let v = derivative.evaluate(sigma)?;
    let (a, b) = curve.domain();
    let scale = curve.control_polygon_length() / (b - a);
    let norm = v.norm();
    if norm <= EPS_TANGENT_REL * scale {
        return Err(FrameError::VanishingTangent { sigma, norm });
    }
    Ok(v / norm)
}

/// Builds the process orientation frame at `sigma` with the prescribed
/// surface normal `n_s`.
///
/// Real data makes `n_s` slightly non-orthogonal to the tangent, so it is
/// projected onto the plane normal to `t` and renormalized before the cross
/// product closes the frame.
pub fn compute_process_frame(
    curve: &BSplineCurve,
    sigma: f64,
    surface_normal: &Vector3<f64>,
) -> Result<ProcessFrameSample, FrameError> {
    let d = curve.derivative_curve(1)?;
    process_frame_from_derivative(curve, &d, sigma, surface_normal)
}

pub(crate) fn process_frame_from_derivative(
    curve: &BSplineCurve,
    derivative: &BSplineCurve,
    sigma: f64,
    surface_normal: &Vector3<f64>,
) -> Result<ProcessFrameSample, FrameError> {
    let tangent = tangent_from_derivative(curve, derivative, sigma)?;
    let ns_norm = surface_normal.norm();
    if ns_norm == 0.0 {
        return Err(FrameError::NormalParallelToTangent { sigma });
    }
    let projected = surface_normal - tangent * surface_normal.dot(&tangent);
    if projected.norm() < EPS_ANGLE * ns_norm {
        return Err(FrameError::NormalParallelToTangent { sigma });
    }
    let normal = projected.normalize();
    let binormal = tangent.cross(&normal);
    let rotation = RotationMatrix::from_matrix_unchecked(Matrix3::from_columns(&[
        tangent, normal, binormal,
    ]));
    Ok(ProcessFrameSample {
        sigma,
        position: curve.evaluate(sigma)?,
        tangent,
        normal,
        binormal,
        rotation,
    })
}
