//! Rotation-group helpers and the orientation charts used to command tilt.
//!
//! Two charts are provided. Both agree with the identity to first order, so
//! either one parameterises the same tilt workspace:
//!
//! * [`OrientationChart::EulerXyz`]: `R = R_x(θx)·R_y(θy)·R_z(ψ)`.
//! * [`OrientationChart::TiltAxis`]: `R = exp([θx, θy, 0]^)·R_z(ψ)`, a tilt of
//!   magnitude `|θ|` about the horizontal axis `θ/|θ|` followed by torsion.
//!   It commutes with rotations about z, so the mechanism's 120° symmetry
//!   maps grid commands onto grid commands exactly.

use nalgebra::{Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

const SMALL_ANGLE: f64 = 1e-5;

pub fn rot_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Skew-symmetric matrix with `hat(w) * v == w × v`.
pub fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`hat`], reading the skew part of `m`.
pub fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Exponential map `so(3) -> SO(3)` (Rodrigues).
pub fn exp_so3(w: &Vector3<f64>) -> Matrix3<f64> {
    Rotation3::from_scaled_axis(*w).into_inner()
}

/// Left Jacobian of SO(3): `d/dt exp(w) = hat(J_l(w)·ẇ)·exp(w)`.
pub fn left_jacobian(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = w.norm_squared();
    let theta = theta2.sqrt();
    let k = hat(w);
    let (a, b) = if theta < SMALL_ANGLE {
        (0.5 - theta2 / 24.0, 1.0 / 6.0 - theta2 / 120.0)
    } else {
        (
            (1.0 - theta.cos()) / theta2,
            (theta - theta.sin()) / (theta2 * theta),
        )
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Inverse of the left Jacobian, used to pull stage slopes back to the
/// Lie algebra in Munthe-Kaas Runge–Kutta.
pub fn left_jacobian_inv(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = w.norm_squared();
    let theta = theta2.sqrt();
    let k = hat(w);
    let c = if theta < SMALL_ANGLE {
        1.0 / 12.0 + theta2 / 720.0
    } else {
        let half = 0.5 * theta;
        (1.0 - half * half.cos() / half.sin()) / theta2
    };
    Matrix3::identity() - k * 0.5 + k * k * c
}

/// `R_x(θx)·R_y(θy)·R_z(ψ)`.
pub fn rotation_from_tilt(theta_x: f64, theta_y: f64, torsion: f64) -> Matrix3<f64> {
    rot_x(theta_x) * rot_y(theta_y) * rot_z(torsion)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationChart {
    EulerXyz,
    #[default]
    TiltAxis,
}

impl OrientationChart {
    pub fn name(self) -> &'static str {
        match self {
            Self::EulerXyz => "euler-xyz: R = Rx(theta_x) Ry(theta_y) Rz(torsion)",
            Self::TiltAxis => "tilt-axis: R = exp([theta_x, theta_y, 0]^) Rz(torsion)",
        }
    }

    pub fn rotation(self, theta_x: f64, theta_y: f64, torsion: f64) -> Matrix3<f64> {
        match self {
            Self::EulerXyz => rotation_from_tilt(theta_x, theta_y, torsion),
            Self::TiltAxis => exp_so3(&Vector3::new(theta_x, theta_y, 0.0)) * rot_z(torsion),
        }
    }

    /// Chart coordinates `(θx, θy, ψ)` of a rotation. Inverse of [`Self::rotation`]
    /// away from the chart's own singularities (|θy| = 90° or a 180° tilt).
    pub fn coordinates(self, r: &Matrix3<f64>) -> (f64, f64, f64) {
        match self {
            Self::EulerXyz => {
                let theta_y = r[(0, 2)].clamp(-1.0, 1.0).asin();
                let theta_x = (-r[(1, 2)]).atan2(r[(2, 2)]);
                let torsion = (-r[(0, 1)]).atan2(r[(0, 0)]);
                (theta_x, theta_y, torsion)
            }
            Self::TiltAxis => {
                let n = r.column(2).into_owned();
                let axis = Vector3::z().cross(&n);
                let s = axis.norm();
                let angle = s.atan2(n.z);
                let w = if s < 1e-300 {
                    Vector3::zeros()
                } else {
                    axis * (angle / s)
                };
                let rest = exp_so3(&-w) * r;
                let torsion = rest[(1, 0)].atan2(rest[(0, 0)]);
                (w.x, w.y, torsion)
            }
        }
    }

    /// Columns map chart rates `(θ̇x, θ̇y, ψ̇)` to the spatial angular velocity.
    pub fn angular_velocity_basis(self, theta_x: f64, theta_y: f64, torsion: f64) -> Matrix3<f64> {
        let _ = torsion;
        match self {
            Self::EulerXyz => {
                let rx = rot_x(theta_x);
                let rxy = rx * rot_y(theta_y);
                Matrix3::from_columns(&[Vector3::x(), rx * Vector3::y(), rxy * Vector3::z()])
            }
            Self::TiltAxis => {
                let w = Vector3::new(theta_x, theta_y, 0.0);
                let jl = left_jacobian(&w);
                Matrix3::from_columns(&[
                    jl * Vector3::x(),
                    jl * Vector3::y(),
                    exp_so3(&w) * Vector3::z(),
                ])
            }
        }
    }
}
