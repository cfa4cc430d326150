//! Analytic inverse Jacobian with actuation and constraint rows.
//!
//! Twists are stacked `[v; ω]`: `v` is the velocity of the platform origin
//! O′ and `ω` the spatial angular velocity, both in base coordinates. Rows of
//! `Gᵀ` are read against that twist.
//!
//! Moment parts are written `a_i × l_i` and `a_i × s2_i`. Both follow from
//! differentiating the closure equations at the spherical centre
//! `c_i = p + a_i`, since `ċ_i = v + ω × a_i` and `u·(ω × a) = (a × u)·ω`.
//! The opposite cross-product order negates the angular columns and fails
//! the finite-difference checks in this crate's tests.

use nalgebra::{Matrix3, Matrix3x2, Matrix6, Matrix6x3, Vector2, Vector3, Vector6};

use crate::config::ManipulatorConfig;
use crate::error::{Error, Result};
use crate::kinematics::Pose;

pub const ACTUATION_SINGULAR: f64 = 1e-9;
pub const CONSTRAINT_RANK_CUTOFF: f64 = 1e-10;
pub const PARASITIC_SINGULAR: f64 = 1e12;
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-9;

/// Column order of the parasitic/independent partition:
/// `(v_x, v_y, ω_z | v_z, ω_x, ω_y)`.
pub const RESHUFFLE_ORDER: [usize; 6] = [0, 1, 5, 2, 3, 4];

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianBundle {
    /// Rows 0–2 actuation, rows 3–5 constraint.
    pub gt: Matrix6<f64>,
    /// Actuation columns of `G = Gtᵀ`.
    pub ga: Matrix6x3<f64>,
    /// Constraint columns of `G = Gtᵀ`.
    pub gc: Matrix6x3<f64>,
    pub c1: Matrix3<f64>,
    pub c2: Matrix3x2<f64>,
    /// `[C1⁻¹C2 | 0]` acting on `(ω_x, ω_y, v_z)`, yielding `(v_x, v_y, ω_z)`.
    pub m: Matrix3<f64>,
}

impl JacobianBundle {
    /// `G = Gtᵀ`, columns are the limb wrenches.
    pub fn g(&self) -> Matrix6<f64> {
        self.gt.transpose()
    }

    /// Actuated joint rates `G_aᵀ·twist` for a constraint-compatible twist.
    pub fn actuation_rates(&self, twist: &Vector6<f64>) -> Result<Vector3<f64>> {
        let residual = (self.gc.transpose() * twist).amax();
        if !(residual < COMPATIBILITY_TOLERANCE) {
            return Err(Error::ConstraintViolation { residual });
        }
        Ok(self.ga.transpose() * twist)
    }

    /// Full twist from the independent rates, parasitic part filled in by `M`.
    pub fn compatible_twist(&self, omega_x: f64, omega_y: f64, v_z: f64) -> Vector6<f64> {
        let dependent = self.m * Vector3::new(omega_x, omega_y, v_z);
        Vector6::new(dependent.x, dependent.y, v_z, omega_x, omega_y, dependent.z)
    }
}

pub fn inverse_jacobian(pose: &Pose, config: &ManipulatorConfig) -> Result<JacobianBundle> {
    let frames = config.limb_frames();
    let mut gt = Matrix6::zeros();
    for (i, f) in frames.iter().enumerate() {
        let l = &pose.l[i];
        let a = &pose.a[i];
        let projection = l.dot(&f.s1);
        if projection.abs() < ACTUATION_SINGULAR {
            return Err(Error::ActuationSingularity {
                limb: f.index,
                projection,
            });
        }
        let moment = a.cross(l);
        for k in 0..3 {
            gt[(i, k)] = l[k] / projection;
            gt[(i, k + 3)] = moment[k] / projection;
        }
        let moment = a.cross(&f.s2);
        for k in 0..3 {
            gt[(i + 3, k)] = f.s2[k];
            gt[(i + 3, k + 3)] = moment[k];
        }
    }
    let g = gt.transpose();
    let (c1, c2, m) = parasitic_coupling(pose, config)?;
    Ok(JacobianBundle {
        gt,
        ga: g.fixed_columns::<3>(0).into_owned(),
        gc: g.fixed_columns::<3>(3).into_owned(),
        c1,
        c2,
        m,
    })
}

/// Joint rates of the actuated prismatic joints for a compatible twist.
pub fn actuation_rates(
    pose: &Pose,
    config: &ManipulatorConfig,
    twist: &Vector6<f64>,
) -> Result<Vector3<f64>> {
    inverse_jacobian(pose, config)?.actuation_rates(twist)
}

/// `P = I − Gc·Gc⁺`, the projector onto twists the constraints admit.
///
/// Rank is judged on the singular values; the projector itself is built as
/// `I − Q·Qᵀ` from a thin QR of `Gc`, which keeps `P² = P` at round-off where
/// the iterative SVD's vectors can drift by ~1e-7 at some poses.
pub fn projection_matrix(gc: &Matrix6x3<f64>) -> Result<Matrix6<f64>> {
    let sv = gc.singular_values();
    let ratio = sv.min() / sv.max();
    if !(ratio >= CONSTRAINT_RANK_CUTOFF) {
        return Err(Error::ConstraintSingularity { ratio });
    }
    let q = gc.qr().q();
    Ok(Matrix6::identity() - q * q.transpose())
}

/// Coupling `C1·(v_x, v_y, ω_z) = C2·(ω_x, ω_y)` from the constraint rows,
/// and `M = [C1⁻¹C2 | 0]`.
pub fn parasitic_coupling(
    pose: &Pose,
    config: &ManipulatorConfig,
) -> Result<(Matrix3<f64>, Matrix3x2<f64>, Matrix3<f64>)> {
    coupling_from_attachments(&pose.a, config)
}

/// [`parasitic_coupling`] from the rotated attachment vectors `a_i = R·a_home_i`.
pub fn coupling_from_attachments(
    a: &[Vector3<f64>; 3],
    config: &ManipulatorConfig,
) -> Result<(Matrix3<f64>, Matrix3x2<f64>, Matrix3<f64>)> {
    let frames = config.limb_frames();
    let mut c1 = Matrix3::zeros();
    let mut c2 = Matrix3x2::zeros();
    for (i, f) in frames.iter().enumerate() {
        let (s, c) = f.xi.sin_cos();
        let a = &a[i];
        c1[(i, 0)] = -s;
        c1[(i, 1)] = c;
        c1[(i, 2)] = a.x * c + a.y * s;
        c2[(i, 0)] = a.z * c;
        c2[(i, 1)] = a.z * s;
    }
    let sv = c1.singular_values();
    let condition = sv.max() / sv.min();
    if !(condition < PARASITIC_SINGULAR) {
        return Err(Error::ParasiticSingularity { condition });
    }
    let inv = c1
        .try_inverse()
        .ok_or(Error::ParasiticSingularity { condition })?;
    let coupling = inv * c2;
    let mut m = Matrix3::zeros();
    m.fixed_columns_mut::<2>(0).copy_from(&coupling);
    Ok((c1, c2, m))
}

/// Parasitic rates `(v_x, v_y, ω_z)` for independent rates `(ω_x, ω_y)`.
pub fn parasitic_rates(m: &Matrix3<f64>, independent: Vector2<f64>) -> Vector3<f64> {
    m * Vector3::new(independent.x, independent.y, 0.0)
}

/// `Gᵀ` with columns regrouped into parasitic `(v_x, v_y, ω_z)` and
/// independent `(v_z, ω_x, ω_y)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReshuffledJacobian {
    pub g_ad: Matrix3<f64>,
    pub g_af: Matrix3<f64>,
    pub g_cd: Matrix3<f64>,
    pub g_cf: Matrix3<f64>,
}

pub fn reshuffle(gt: &Matrix6<f64>) -> ReshuffledJacobian {
    let permuted = permute_columns(gt);
    ReshuffledJacobian {
        g_ad: permuted.fixed_view::<3, 3>(0, 0).into_owned(),
        g_af: permuted.fixed_view::<3, 3>(0, 3).into_owned(),
        g_cd: permuted.fixed_view::<3, 3>(3, 0).into_owned(),
        g_cf: permuted.fixed_view::<3, 3>(3, 3).into_owned(),
    }
}

impl ReshuffledJacobian {
    /// The permuted 6×6 matrix `[[G_ad, G_af], [G_cd, G_cf]]`.
    pub fn assembled(&self) -> Matrix6<f64> {
        let mut out = Matrix6::zeros();
        out.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.g_ad);
        out.fixed_view_mut::<3, 3>(0, 3).copy_from(&self.g_af);
        out.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.g_cd);
        out.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.g_cf);
        out
    }

    /// Undo the column permutation.
    pub fn to_gt(&self) -> Matrix6<f64> {
        let permuted = self.assembled();
        let mut gt = Matrix6::zeros();
        for (new, &old) in RESHUFFLE_ORDER.iter().enumerate() {
            gt.set_column(old, &permuted.column(new));
        }
        gt
    }
}

pub(crate) fn permute_columns(m: &Matrix6<f64>) -> Matrix6<f64> {
    Matrix6::from_fn(|r, c| m[(r, RESHUFFLE_ORDER[c])])
}
