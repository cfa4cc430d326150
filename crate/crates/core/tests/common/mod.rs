//! Reference computations that share no code with the crate under test.

#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use prs_core::ManipulatorConfig;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Rodrigues' formula.
pub fn rodrigues(w: &Vector3<f64>) -> Matrix3<f64> {
    let angle = w.norm();
    if angle == 0.0 {
        return Matrix3::identity();
    }
    let k = skew(&(w / angle));
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

pub fn spin_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Tilt about the horizontal axis `(θx, θy, 0)`, then spin `ψ` about the
/// platform normal.
pub fn tilt_rotation(theta_x: f64, theta_y: f64, torsion: f64) -> Matrix3<f64> {
    rodrigues(&Vector3::new(theta_x, theta_y, 0.0)) * spin_z(torsion)
}

pub struct Limb {
    pub base: Vector3<f64>,
    pub platform: Vector3<f64>,
    /// Normal of the limb's motion plane.
    pub normal: Vector3<f64>,
}

pub fn limbs(config: &ManipulatorConfig) -> Vec<Limb> {
    (0..3)
        .map(|i| {
            let xi = 2.0 * std::f64::consts::PI * i as f64 / 3.0;
            let (s, c) = xi.sin_cos();
            Limb {
                base: Vector3::new(c, s, 0.0) * config.r_base,
                platform: Vector3::new(c, s, 0.0) * config.r_platform,
                normal: Vector3::new(-s, c, 0.0),
            }
        })
        .collect()
}

/// Actuator heights for an arbitrary platform placement: the carriage sits
/// a link length below the sphere centre, revolute under the sphere.
pub fn ik_heights(p: &Vector3<f64>, r: &Matrix3<f64>, config: &ManipulatorConfig) -> [f64; 3] {
    let limbs = limbs(config);
    std::array::from_fn(|i| {
        let c = p + r * limbs[i].platform;
        let dx = c.x - limbs[i].base.x;
        let dy = c.y - limbs[i].base.y;
        c.z - (config.link_length.powi(2) - dx * dx - dy * dy).sqrt()
    })
}

/// Closure by elimination: for fixed ψ the plane conditions of limbs 1 and 2
/// are linear in `(x, y)`; limb 3's condition is then a scalar function of
/// ψ, bracketed by a dense scan and bisected to machine precision.
pub fn closure_by_bisection(theta_x: f64, theta_y: f64, config: &ManipulatorConfig) -> [f64; 3] {
    let limbs = limbs(config);
    let xy_at = |psi: f64| {
        let r = tilt_rotation(theta_x, theta_y, psi);
        let rhs: Vec<f64> = limbs
            .iter()
            .map(|l| -l.normal.dot(&(r * l.platform)))
            .collect();
        let (a, b, c, d) = (
            limbs[0].normal.x,
            limbs[0].normal.y,
            limbs[1].normal.x,
            limbs[1].normal.y,
        );
        let det = a * d - b * c;
        let x = (rhs[0] * d - b * rhs[1]) / det;
        let y = (a * rhs[1] - c * rhs[0]) / det;
        (x, y, r)
    };
    let f = |psi: f64| {
        let (x, y, r) = xy_at(psi);
        limbs[2]
            .normal
            .dot(&(Vector3::new(x, y, 0.0) + r * limbs[2].platform))
    };
    let samples = 4001;
    let span = 0.6;
    let mut bracket = None;
    let mut best = f64::INFINITY;
    for k in 0..samples - 1 {
        let lo = -span + 2.0 * span * k as f64 / (samples - 1) as f64;
        let hi = -span + 2.0 * span * (k + 1) as f64 / (samples - 1) as f64;
        if f(lo) * f(hi) <= 0.0 && lo.abs().min(hi.abs()) < best {
            best = lo.abs().min(hi.abs());
            bracket = Some((lo, hi));
        }
    }
    let (mut lo, mut hi) = bracket.expect("torsion root bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let psi = 0.5 * (lo + hi);
    let (x, y, _) = xy_at(psi);
    [x, y, psi]
}

/// Angular velocity from two nearby rotations, `(R₊R₋ᵀ)` ≈ `exp(2h·ω)`.
pub fn angular_difference(plus: &Matrix3<f64>, minus: &Matrix3<f64>, h: f64) -> Vector3<f64> {
    let q = plus * minus.transpose();
    let s = 0.5 * (q - q.transpose());
    Vector3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)]) / (2.0 * h)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform tilt in the ±`limit` box.
pub fn random_tilt(rng: &mut StdRng, limit: f64) -> (f64, f64) {
    (rng.gen_range(-limit..=limit), rng.gen_range(-limit..=limit))
}
