//! Cartesian stiffness `K = G·𝒦·Gᵀ` from series-spring limb models.
//!
//! Each limb contributes one actuation spring (carriage, revolute joint and
//! limb body in series) and one constraint spring (spherical joint and
//! fixed-length link in series, measured about the revolute axis). The six
//! coefficients form the diagonal 𝒦; the Jacobian columns carry them to the
//! platform.
//!
//! Bending compliance of the fixed-length link has no coefficients of its
//! own and is folded into `k_limb_body_t`.

use nalgebra::{Matrix3, Matrix6, SymmetricEigen, Vector3, Vector6};
use serde::Serialize;

use crate::config::{ComplianceModel, ManipulatorConfig};
use crate::error::{Error, Result};
use crate::jacobian::{inverse_jacobian, JacobianBundle, RESHUFFLE_ORDER};
use crate::kinematics::{spherical_joint_angles, Pose};
use crate::rotation::hat;

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStiffness {
    /// Overall axial coefficient per limb, N/m.
    pub k_axial: [f64; 3],
    /// Overall torsional coefficient per limb, N·m/rad.
    pub k_torsional: [f64; 3],
    /// Spherical-joint stiffness of each limb in base coordinates, N·m/rad.
    pub k_s: [Matrix3<f64>; 3],
    /// `diag(k_a1, k_a2, k_a3, k_c1, k_c2, k_c3)`.
    pub k_diag: Matrix6<f64>,
}

/// Axial series stiffness of one limb at actuator height `d_i`.
pub fn limb_axial_stiffness(d_i: f64, config: &ManipulatorConfig) -> Result<f64> {
    let axial = &config.axial;
    let (carriage, limb_body) = match &config.compliance_model {
        ComplianceModel::Lumped => (axial.k_carriage, axial.k_limb_body),
        ComplianceModel::Parametric(p) => {
            if !(d_i >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "lead screw length d_i",
                    value: d_i,
                });
            }
            positive("parametric.ea_leadscrew", p.ea_leadscrew)?;
            positive("parametric.ea_link", p.ea_link)?;
            positive("parametric.k_guiderail", p.k_guiderail)?;
            positive("parametric.k_slider", p.k_slider)?;
            let carriage = series(&[p.ea_leadscrew / d_i, p.k_guiderail, p.k_slider]);
            (carriage, p.ea_link / config.link_length)
        }
    };
    positive("axial.k_carriage", carriage)?;
    positive("axial.k_revolute", axial.k_revolute)?;
    positive("axial.k_limb_body", limb_body)?;
    Ok(series(&[carriage, axial.k_revolute, limb_body]))
}

/// Spherical-joint stiffness rotated into base coordinates.
///
/// `r_f` holds the joint frame's axes as columns, so the base-frame tensor
/// is `r_f·K̄_s·r_fᵀ`.
pub fn rotated_spherical_stiffness(r_f: &Matrix3<f64>, axes: &Vector3<f64>) -> Matrix3<f64> {
    let k = r_f * Matrix3::from_diagonal(axes) * r_f.transpose();
    0.5 * (k + k.transpose())
}

/// Torsional series stiffness of limb `limb` (0-based) about its revolute axis.
pub fn limb_torsional_stiffness(
    pose: &Pose,
    limb: usize,
    config: &ManipulatorConfig,
) -> Result<f64> {
    Ok(torsional_parts(pose, limb, config)?.0)
}

fn torsional_parts(
    pose: &Pose,
    limb: usize,
    config: &ManipulatorConfig,
) -> Result<(f64, Matrix3<f64>)> {
    let joint = spherical_joint_angles(pose, limb, config)?;
    let k_s = rotated_spherical_stiffness(&joint.r_f, &config.spherical_axes.diagonal());
    let s2 = config.limb_frames()[limb].s2;
    let k_si = s2.dot(&(k_s * s2));
    positive("spherical joint k_si", k_si)?;
    positive("torsional.k_limb_body_t", config.torsional.k_limb_body_t)?;
    Ok((series(&[k_si, config.torsional.k_limb_body_t]), k_s))
}

pub fn component_stiffness(pose: &Pose, config: &ManipulatorConfig) -> Result<ComponentStiffness> {
    let mut k_axial = [0.0; 3];
    let mut k_torsional = [0.0; 3];
    let mut k_s = [Matrix3::zeros(); 3];
    for i in 0..3 {
        k_axial[i] = limb_axial_stiffness(pose.d[i], config)?;
        let (kc, ks) = torsional_parts(pose, i, config)?;
        k_torsional[i] = kc;
        k_s[i] = ks;
    }
    let k_diag = Matrix6::from_diagonal(&Vector6::new(
        k_axial[0],
        k_axial[1],
        k_axial[2],
        k_torsional[0],
        k_torsional[1],
        k_torsional[2],
    ));
    Ok(ComponentStiffness {
        k_axial,
        k_torsional,
        k_s,
        k_diag,
    })
}

/// 6×6 Cartesian stiffness acting on `[δr; δα]` and returning `[f; m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianStiffness {
    pub k: Matrix6<f64>,
    /// Reference point relative to the platform origin O′, metres.
    pub reference: Vector3<f64>,
    /// Characteristic length applied to the angular blocks, if any.
    pub length_scale: Option<f64>,
}

impl CartesianStiffness {
    pub fn new(k: Matrix6<f64>) -> Self {
        Self {
            k,
            reference: Vector3::zeros(),
            length_scale: None,
        }
    }

    pub fn k_a_parallel(&self) -> Matrix3<f64> {
        self.k.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn k_a_perp(&self) -> Matrix3<f64> {
        self.k.fixed_view::<3, 3>(0, 3).into_owned()
    }

    pub fn k_c_parallel(&self) -> Matrix3<f64> {
        self.k.fixed_view::<3, 3>(3, 0).into_owned()
    }

    pub fn k_c_perp(&self) -> Matrix3<f64> {
        self.k.fixed_view::<3, 3>(3, 3).into_owned()
    }

    /// `‖K − Kᵀ‖ / ‖K‖` (Frobenius).
    pub fn asymmetry(&self) -> f64 {
        (self.k - self.k.transpose()).norm() / self.k.norm()
    }

    pub fn eigenvalues(&self) -> Vector6<f64> {
        SymmetricEigen::new(self.k).eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().min()
    }

    pub fn diagonal(&self) -> DiagonalStiffness {
        diagonal_stiffness(&self.k)
    }

    /// Rows and columns regrouped as `(v_x, v_y, ω_z | v_z, ω_x, ω_y)`.
    pub fn reshuffled(&self) -> Matrix6<f64> {
        Matrix6::from_fn(|r, c| self.k[(RESHUFFLE_ORDER[r], RESHUFFLE_ORDER[c])])
    }
}

/// Stiffness at the platform origin for a closed pose.
pub fn assemble_cartesian_stiffness(
    pose: &Pose,
    config: &ManipulatorConfig,
) -> Result<CartesianStiffness> {
    let bundle = inverse_jacobian(pose, config)?;
    let components = component_stiffness(pose, config)?;
    let mut out = CartesianStiffness::new(congruence(&bundle, &components.k_diag));
    if let Some(lc) = config.stiffness_length_scale {
        out = scale_by_length(&out, lc);
    }
    Ok(out)
}

/// `G·𝒦·Gᵀ` as a sum of rank-one terms, exactly symmetric in floating point.
pub fn congruence(bundle: &JacobianBundle, k_diag: &Matrix6<f64>) -> Matrix6<f64> {
    let mut k = Matrix6::zeros();
    for j in 0..6 {
        let g = bundle.gt.row(j).transpose();
        k += g * g.transpose() * k_diag[(j, j)];
    }
    k
}

/// 6×6 adjoint mapping a twist expressed at `O′ + offset` to one at O′.
pub fn translation_adjoint(offset: &Vector3<f64>) -> Matrix6<f64> {
    let mut ad = Matrix6::identity();
    ad.fixed_view_mut::<3, 3>(0, 3).copy_from(&hat(offset));
    ad
}

/// Re-expresses `K` at a reference point displaced by `offset` (base frame).
pub fn shift_reference(k: &CartesianStiffness, offset: &Vector3<f64>) -> CartesianStiffness {
    let effective = match k.length_scale {
        Some(lc) => offset / lc,
        None => *offset,
    };
    let ad = translation_adjoint(&effective);
    let shifted = ad.transpose() * k.k * ad;
    CartesianStiffness {
        k: 0.5 * (shifted + shifted.transpose()),
        reference: k.reference + offset,
        length_scale: k.length_scale,
    }
}

/// Divides the angular rows and columns by `lc` so every block is in N/m.
pub fn scale_by_length(k: &CartesianStiffness, lc: f64) -> CartesianStiffness {
    let s = Vector6::new(1.0, 1.0, 1.0, 1.0 / lc, 1.0 / lc, 1.0 / lc);
    let scaled = Matrix6::from_fn(|r, c| k.k[(r, c)] * s[r] * s[c]);
    CartesianStiffness {
        k: scaled,
        reference: k.reference,
        length_scale: Some(k.length_scale.map_or(lc, |old| old * lc)),
    }
}

/// Diagonal of K in base order `v_x, v_y, v_z, ω_x, ω_y, ω_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalStiffness {
    pub kpx: f64,
    pub kpy: f64,
    pub kpz: f64,
    pub kax: f64,
    pub kay: f64,
    pub kaz: f64,
}

impl DiagonalStiffness {
    pub const NAMES: [&'static str; 6] = ["kpx", "kpy", "kpz", "kax", "kay", "kaz"];

    pub fn to_array(self) -> [f64; 6] {
        [self.kpx, self.kpy, self.kpz, self.kax, self.kay, self.kaz]
    }
}

pub fn diagonal_stiffness(k: &Matrix6<f64>) -> DiagonalStiffness {
    DiagonalStiffness {
        kpx: k[(0, 0)],
        kpy: k[(1, 1)],
        kpz: k[(2, 2)],
        kax: k[(3, 3)],
        kay: k[(4, 4)],
        kaz: k[(5, 5)],
    }
}

fn series(parts: &[f64]) -> f64 {
    1.0 / parts.iter().map(|k| 1.0 / k).sum::<f64>()
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
