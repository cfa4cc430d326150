//! Position-level closure of the three PRS loops.
//!
//! Each revolute axis `s2_i` is tangent to the base circle, so the spherical
//! centre `c_i = p + R·a_home_i` must stay in the vertical plane spanned by
//! the limb's radial direction and `s1`. That gives three scalar equations
//! `s2_i·c_i = 0`, solved by Newton's method for the parasitic unknowns
//! `(x, y, ψ)` once tilt and heave are commanded.

use nalgebra::{Matrix3, Vector3};

use crate::config::{AssemblyMode, LimbFrame, ManipulatorConfig};
use crate::error::{Error, Result};
use crate::rotation::{rot_y, rot_z};

pub const CLOSURE_TOLERANCE: f64 = 1e-12;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
pub const SINGULAR_CONDITION: f64 = 1e12;
const WORKSPACE_SLACK: f64 = 1e-9;
const GIMBAL_TOLERANCE: f64 = 1e-9;

/// A closed configuration of the mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    /// Platform origin O′; `x` and `y` are parasitic.
    pub p: Vector3<f64>,
    pub r: Matrix3<f64>,
    pub theta_x: f64,
    pub theta_y: f64,
    /// Parasitic rotation about z, in the config's orientation chart.
    pub torsion: f64,
    /// Actuated prismatic heights.
    pub d: [f64; 3],
    /// Revolute centre → spherical centre.
    pub l: [Vector3<f64>; 3],
    /// O′ → spherical centre, base coordinates (`R·a_home_i`).
    pub a: [Vector3<f64>; 3],
    pub iterations: usize,
    /// Largest closure residual at exit, metres.
    pub residual: f64,
}

impl Pose {
    pub fn parasitic(&self) -> [f64; 3] {
        [self.p.x, self.p.y, self.torsion]
    }

    /// Spherical-joint centre of limb `i` (0-based).
    pub fn sphere_center(&self, i: usize) -> Vector3<f64> {
        self.p + self.a[i]
    }
}

/// `s2_i·(p + R·a_home_i)` for each limb.
pub fn closure_residuals(
    p: &Vector3<f64>,
    r: &Matrix3<f64>,
    frames: &[LimbFrame; 3],
) -> Vector3<f64> {
    Vector3::from_fn(|i, _| frames[i].s2.dot(&(p + r * frames[i].a_home)))
}

pub fn solve_closure(
    theta_x: f64,
    theta_y: f64,
    z: f64,
    config: &ManipulatorConfig,
) -> Result<Pose> {
    solve_closure_from(theta_x, theta_y, z, config, [0.0; 3])
}

/// [`solve_closure`] with an explicit initial guess for `(x, y, ψ)`.
pub fn solve_closure_from(
    theta_x: f64,
    theta_y: f64,
    z: f64,
    config: &ManipulatorConfig,
    guess: [f64; 3],
) -> Result<Pose> {
    let limit = config.tilt_limit + WORKSPACE_SLACK;
    if !(theta_x.abs() <= limit && theta_y.abs() <= limit) {
        return Err(Error::OutsideWorkspace {
            theta_x,
            theta_y,
            limit: config.tilt_limit,
        });
    }
    let frames = config.limb_frames();
    let chart = config.orientation_chart;
    let mut q = Vector3::from(guess);
    let mut residual = f64::INFINITY;

    for iteration in 0..=MAX_NEWTON_ITERATIONS {
        let r = chart.rotation(theta_x, theta_y, q.z);
        let p = Vector3::new(q.x, q.y, z);
        let res = closure_residuals(&p, &r, &frames);
        residual = res.amax();
        if residual < CLOSURE_TOLERANCE {
            return finish(
                theta_x, theta_y, q.z, p, r, &frames, config, iteration, residual,
            );
        }
        if iteration == MAX_NEWTON_ITERATIONS {
            break;
        }
        let jac = Matrix3::from_fn(|i, k| match k {
            0 => frames[i].s2.x,
            1 => frames[i].s2.y,
            _ => frames[i]
                .s2
                .dot(&(r * Vector3::z().cross(&frames[i].a_home))),
        });
        let sv = jac.singular_values();
        let condition = sv.max() / sv.min();
        if !(condition < SINGULAR_CONDITION) {
            return Err(Error::ClosureSingularity { condition });
        }
        let step = jac.lu().solve(&res).ok_or(Error::ClosureSingularity {
            condition: f64::INFINITY,
        })?;
        q -= step;
    }
    Err(Error::Closure {
        iterations: MAX_NEWTON_ITERATIONS,
        residual,
    })
}

/// Prismatic heights placing each revolute joint one link length from its
/// spherical centre, for a platform that satisfies closure.
pub fn actuator_heights(
    p: &Vector3<f64>,
    r: &Matrix3<f64>,
    frames: &[LimbFrame; 3],
    config: &ManipulatorConfig,
) -> Result<[f64; 3]> {
    let link = config.link_length;
    let mut d = [0.0; 3];
    for (i, f) in frames.iter().enumerate() {
        let c = p + r * f.a_home;
        let offset = (c - f.b).dot(&f.radial);
        if offset.abs() >= link {
            return Err(Error::Unreachable {
                limb: f.index,
                offset,
                link_length: link,
            });
        }
        let rise = (link * link - offset * offset).sqrt();
        d[i] = match config.assembly_mode {
            AssemblyMode::ElbowBelow => c.z - rise,
            AssemblyMode::ElbowAbove => c.z + rise,
        };
    }
    Ok(d)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    theta_x: f64,
    theta_y: f64,
    torsion: f64,
    p: Vector3<f64>,
    r: Matrix3<f64>,
    frames: &[LimbFrame; 3],
    config: &ManipulatorConfig,
    iterations: usize,
    residual: f64,
) -> Result<Pose> {
    let d = actuator_heights(&p, &r, frames, config)?;
    let a: [Vector3<f64>; 3] = std::array::from_fn(|i| r * frames[i].a_home);
    let l = std::array::from_fn(|i| p + a[i] - (frames[i].b + frames[i].s1 * d[i]));
    Ok(Pose {
        p,
        r,
        theta_x,
        theta_y,
        torsion,
        d,
        l,
        a,
        iterations,
        residual,
    })
}

/// Joint angles of limb `limb` (0-based) in the chain
/// `R_z(ξ)·T_x(r_b)·T_z(d)·R_y(θ2)·T_z(L)·R_y(θ3)·R_x(θ4)·R_z(θ5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalJointAngles {
    /// Elevation of the fixed-length link from vertical, about the revolute axis.
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    pub theta5: f64,
    /// Rotation the spherical joint realises, extracted from the limb chain.
    pub relative: Matrix3<f64>,
    /// Orientation of the spherical joint's distal frame w.r.t. the base;
    /// columns are its x, y, z axes in base coordinates.
    pub r_f: Matrix3<f64>,
}

/// The platform side of joint `i` is the platform frame turned by `R_z(ξ_i)`,
/// so that all three joints read zero angles (up to link elevation) at home.
pub fn spherical_joint_angles(
    pose: &Pose,
    limb: usize,
    config: &ManipulatorConfig,
) -> Result<SphericalJointAngles> {
    let f = &config.limb_frames()[limb];
    let li = &pose.l[limb];
    let theta2 = li.dot(&f.radial).atan2(li.dot(&f.s1));
    let prismatic_revolute = rot_z(f.xi) * rot_y(theta2);
    let distal = pose.r * rot_z(f.xi);
    let relative = prismatic_revolute.transpose() * distal;

    let cos_theta4 = relative[(1, 0)].hypot(relative[(1, 1)]);
    if cos_theta4 < GIMBAL_TOLERANCE {
        return Err(Error::DegenerateDecomposition {
            limb: f.index,
            cos_theta4,
        });
    }
    let theta3 = relative[(0, 2)].atan2(relative[(2, 2)]);
    let theta4 = (-relative[(1, 2)]).atan2(cos_theta4);
    let theta5 = relative[(1, 0)].atan2(relative[(1, 1)]);
    Ok(SphericalJointAngles {
        theta2,
        theta3,
        theta4,
        theta5,
        relative,
        r_f: distal,
    })
}
