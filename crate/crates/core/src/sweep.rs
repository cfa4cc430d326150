//! Grid sweeps over the tilt workspace and velocity-level trajectory
//! integration.
//!
//! Grid rows (fixed `θx`) are independent and run on the rayon pool when the
//! `parallel` feature is on. Inside a row, Newton is warm-started from the
//! neighbouring node, marching outward from the `θy = 0` column. The row
//! chain is the same in both execution modes, so outputs are bit-identical.

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::Serialize;

use crate::config::ManipulatorConfig;
use crate::error::{Error, Result};
use crate::jacobian::coupling_from_attachments;
use crate::kinematics::{
    actuator_heights, closure_residuals, solve_closure, solve_closure_from, Pose,
};
use crate::rotation::{exp_so3, left_jacobian_inv};
use crate::stiffness::{assemble_cartesian_stiffness, DiagonalStiffness};

/// Uniform `(θx, θy)` grid over `[−limit, limit]²` at fixed heave.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationGrid {
    pub theta_x_samples: Vec<f64>,
    pub theta_y_samples: Vec<f64>,
    pub z: f64,
    pub resolution: usize,
}

impl OrientationGrid {
    pub fn new(resolution: usize, tilt_limit: f64, z: f64) -> Result<Self> {
        if resolution < 3 || resolution.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "resolution must be odd and at least 3, got {resolution}"
            )));
        }
        if !(tilt_limit > 0.0 && tilt_limit.is_finite()) {
            return Err(Error::Grid(format!(
                "tilt limit must be positive, got {tilt_limit}"
            )));
        }
        if !z.is_finite() {
            return Err(Error::Grid(format!("heave must be finite, got {z}")));
        }
        let span = (resolution - 1) as f64;
        // symmetric by construction: samples k and n-1-k are exact negatives
        let samples: Vec<f64> = (0..resolution)
            .map(|k| tilt_limit * ((2 * k) as f64 - span) / span)
            .collect();
        Ok(Self {
            theta_x_samples: samples.clone(),
            theta_y_samples: samples,
            z,
            resolution,
        })
    }

    pub fn for_config(resolution: usize, config: &ManipulatorConfig) -> Result<Self> {
        Self::new(resolution, config.tilt_limit, config.heave)
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.resolution == 0
    }

    pub fn center_index(&self) -> usize {
        let c = self.resolution / 2;
        self.index(c, c)
    }

    /// Node index of `(θx sample i, θy sample j)`; `θx` is the outer axis.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.resolution + j
    }

    pub fn coordinates(&self, index: usize) -> (usize, usize) {
        (index / self.resolution, index % self.resolution)
    }

    pub fn cell(&self) -> f64 {
        self.theta_x_samples[1] - self.theta_x_samples[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceSample {
    pub theta_x: f64,
    pub theta_y: f64,
    pub x_par: f64,
    pub y_par: f64,
    pub torsion: f64,
    pub stiffness: Option<DiagonalStiffness>,
    /// Smallest eigenvalue of the full K.
    pub min_eigenvalue: Option<f64>,
    /// `‖K − Kᵀ‖ / ‖K‖`.
    pub asymmetry: Option<f64>,
    pub residual: f64,
    pub converged: bool,
    pub failure: Option<String>,
}

impl SurfaceSample {
    fn failed(theta_x: f64, theta_y: f64, err: &Error) -> Self {
        Self {
            theta_x,
            theta_y,
            x_par: f64::NAN,
            y_par: f64::NAN,
            torsion: f64::NAN,
            stiffness: None,
            min_eigenvalue: None,
            asymmetry: None,
            residual: f64::NAN,
            converged: false,
            failure: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecutionMode {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for ExecutionMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Self::Parallel
        } else {
            Self::Sequential
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers.
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(_threads: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fields {
    Kinematics,
    Stiffness,
}

/// Parasitic `(x, y, ψ)` at every grid node. Failures are flagged per node.
pub fn parasitic_map(grid: &OrientationGrid, config: &ManipulatorConfig) -> Vec<SurfaceSample> {
    parasitic_map_with(grid, config, ExecutionMode::default())
}

pub fn parasitic_map_with(
    grid: &OrientationGrid,
    config: &ManipulatorConfig,
    mode: ExecutionMode,
) -> Vec<SurfaceSample> {
    run_grid(grid, config, Fields::Kinematics, mode)
}

/// Parasitic coordinates plus the six diagonal stiffness entries per node.
pub fn stiffness_surfaces(
    grid: &OrientationGrid,
    config: &ManipulatorConfig,
) -> Vec<SurfaceSample> {
    stiffness_surfaces_with(grid, config, ExecutionMode::default())
}

pub fn stiffness_surfaces_with(
    grid: &OrientationGrid,
    config: &ManipulatorConfig,
    mode: ExecutionMode,
) -> Vec<SurfaceSample> {
    run_grid(grid, config, Fields::Stiffness, mode)
}

fn run_grid(
    grid: &OrientationGrid,
    config: &ManipulatorConfig,
    fields: Fields,
    mode: ExecutionMode,
) -> Vec<SurfaceSample> {
    let row = |i: usize| solve_row(grid, config, fields, i);
    let rows: Vec<Vec<SurfaceSample>> = match mode {
        #[cfg(feature = "parallel")]
        ExecutionMode::Parallel => {
            use rayon::prelude::*;
            (0..grid.resolution).into_par_iter().map(row).collect()
        }
        _ => (0..grid.resolution).map(row).collect(),
    };
    rows.into_iter().flatten().collect()
}

fn solve_row(
    grid: &OrientationGrid,
    config: &ManipulatorConfig,
    fields: Fields,
    i: usize,
) -> Vec<SurfaceSample> {
    let n = grid.resolution;
    let centre = n / 2;
    let theta_x = grid.theta_x_samples[i];
    let mut out: Vec<Option<SurfaceSample>> = vec![None; n];

    let upward = centre..n;
    let downward = (0..centre).rev();
    for columns in [upward.collect::<Vec<_>>(), downward.collect()] {
        let mut guess = if columns.first() == Some(&centre) || columns.is_empty() {
            [0.0; 3]
        } else {
            out[centre]
                .as_ref()
                .filter(|s| s.converged)
                .map_or([0.0; 3], |s| [s.x_par, s.y_par, s.torsion])
        };
        for j in columns {
            let theta_y = grid.theta_y_samples[j];
            let sample = evaluate_node(theta_x, theta_y, grid.z, config, fields, guess);
            guess = if sample.converged {
                [sample.x_par, sample.y_par, sample.torsion]
            } else {
                [0.0; 3]
            };
            out[j] = Some(sample);
        }
    }
    out.into_iter()
        .map(|s| s.expect("every column visited"))
        .collect()
}

fn evaluate_node(
    theta_x: f64,
    theta_y: f64,
    z: f64,
    config: &ManipulatorConfig,
    fields: Fields,
    guess: [f64; 3],
) -> SurfaceSample {
    let pose = match solve_closure_from(theta_x, theta_y, z, config, guess) {
        Ok(p) => p,
        Err(e) => return SurfaceSample::failed(theta_x, theta_y, &e),
    };
    let mut sample = SurfaceSample {
        theta_x,
        theta_y,
        x_par: pose.p.x,
        y_par: pose.p.y,
        torsion: pose.torsion,
        stiffness: None,
        min_eigenvalue: None,
        asymmetry: None,
        residual: pose.residual,
        converged: true,
        failure: None,
    };
    if fields == Fields::Stiffness {
        match assemble_cartesian_stiffness(&pose, config) {
            Ok(k) => {
                sample.stiffness = Some(k.diagonal());
                sample.min_eigenvalue = Some(k.min_eigenvalue());
                sample.asymmetry = Some(k.asymmetry());
            }
            Err(e) => {
                sample.converged = false;
                sample.failure = Some(e.to_string());
            }
        }
    }
    sample
}

/// Location and value of one surface's extrema over converged nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extremum {
    pub column: &'static str,
    pub argmax: usize,
    pub max: f64,
    pub argmin: usize,
    pub min: f64,
}

/// Relative band within which two surface values count as the same extremum.
pub const EXTREMUM_TIE: f64 = 1e-12;

/// Extrema of the six stiffness columns, indices into `samples`.
///
/// A surface can be flat along a whole line (kpy along `θx = 0`) or
/// everywhere (kpz with lumped axial springs). Values within
/// [`EXTREMUM_TIE`] of the extremum are ties, and the tied node nearest
/// zero tilt is reported.
pub fn surface_extrema(samples: &[SurfaceSample]) -> Vec<Extremum> {
    DiagonalStiffness::NAMES
        .iter()
        .enumerate()
        .filter_map(|(k, &column)| {
            let values: Vec<(usize, f64, f64)> = samples
                .iter()
                .enumerate()
                .filter_map(|(i, s)| {
                    s.stiffness
                        .map(|d| (i, d.to_array()[k], s.theta_x.hypot(s.theta_y)))
                })
                .collect();
            let max = values.iter().map(|v| v.1).reduce(f64::max)?;
            let min = values.iter().map(|v| v.1).reduce(f64::min)?;
            let pick = |target: f64| {
                let band = EXTREMUM_TIE * target.abs();
                values
                    .iter()
                    .filter(|v| (v.1 - target).abs() <= band)
                    .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
                    .map(|v| v.0)
                    .expect("the extremum itself is in its band")
            };
            Some(Extremum {
                column,
                argmax: pick(max),
                max,
                argmin: pick(min),
                min,
            })
        })
        .collect()
}

/// Extent of a planar point set: bounding box and convex hull.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Footprint {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub bbox_area: f64,
    pub hull_area: f64,
}

impl Footprint {
    /// Share of the bounding box covered by the convex hull.
    pub fn fill_ratio(&self) -> f64 {
        self.hull_area / self.bbox_area
    }
}

pub fn footprint(points: &[[f64; 2]]) -> Footprint {
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    let hull = convex_hull(points);
    let hull_area = 0.5
        * hull
            .iter()
            .zip(hull.iter().cycle().skip(1))
            .map(|(a, b)| a[0] * b[1] - b[0] * a[1])
            .sum::<f64>()
            .abs();
    Footprint {
        min,
        max,
        bbox_area: (max[0] - min[0]) * (max[1] - min[1]),
        hull_area,
    }
}

/// Andrew's monotone chain, counter-clockwise.
fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

/// One cell of a parasitic-space regridding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegridCell {
    pub x: f64,
    pub y: f64,
    /// Index of the nearest scattered sample.
    pub source: usize,
    pub stiffness: DiagonalStiffness,
}

/// Nearest-neighbour resampling of scattered `(x_par, y_par, k)` samples onto
/// a `resolution²` lattice over their bounding box. Cells farther than one
/// cell diagonal from every sample are left out.
pub fn regrid_nearest(samples: &[SurfaceSample], resolution: usize) -> Vec<RegridCell> {
    let points: Vec<(usize, [f64; 2], DiagonalStiffness)> = samples
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            s.stiffness
                .filter(|_| s.converged)
                .map(|k| (i, [s.x_par, s.y_par], k))
        })
        .collect();
    if points.is_empty() || resolution < 2 {
        return Vec::new();
    }
    let fp = footprint(&points.iter().map(|p| p.1).collect::<Vec<_>>());
    let step = [
        (fp.max[0] - fp.min[0]) / (resolution - 1) as f64,
        (fp.max[1] - fp.min[1]) / (resolution - 1) as f64,
    ];
    let reach2 = step[0] * step[0] + step[1] * step[1];
    let mut cells = Vec::new();
    for iy in 0..resolution {
        for ix in 0..resolution {
            let x = fp.min[0] + step[0] * ix as f64;
            let y = fp.min[1] + step[1] * iy as f64;
            let nearest = points
                .iter()
                .map(|(i, p, k)| ((p[0] - x).powi(2) + (p[1] - y).powi(2), *i, *k))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if let Some((dist2, source, stiffness)) = nearest {
                if dist2 <= reach2 {
                    cells.push(RegridCell {
                        x,
                        y,
                        source,
                        stiffness,
                    });
                }
            }
        }
    }
    cells
}

/// Commanded tilt and its rate at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltSample {
    pub theta: Vector2<f64>,
    pub rate: Vector2<f64>,
}

/// Built-in smooth tilt trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TiltPath {
    /// Quintic smoothstep from zero tilt to `target` over `duration`.
    Ramp { target: Vector2<f64>, duration: f64 },
    /// Out to `target` and back to zero along `target·sin²(πt/T)`.
    OutAndBack { target: Vector2<f64>, duration: f64 },
    /// `amplitude·(cos 2πt/T, sin 2πt/T)`, one full loop.
    Circle { amplitude: f64, duration: f64 },
}

impl TiltPath {
    pub fn duration(&self) -> f64 {
        match *self {
            Self::Ramp { duration, .. }
            | Self::OutAndBack { duration, .. }
            | Self::Circle { duration, .. } => duration,
        }
    }

    pub fn sample(&self, t: f64) -> TiltSample {
        match *self {
            Self::Ramp { target, duration } => {
                let s = (t / duration).clamp(0.0, 1.0);
                let shape = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
                let slope = if (0.0..=1.0).contains(&(t / duration)) {
                    30.0 * s * s * (1.0 - s) * (1.0 - s) / duration
                } else {
                    0.0
                };
                TiltSample {
                    theta: target * shape,
                    rate: target * slope,
                }
            }
            Self::OutAndBack { target, duration } => {
                let w = std::f64::consts::PI / duration;
                let (s, c) = (w * t).sin_cos();
                TiltSample {
                    theta: target * (s * s),
                    rate: target * (2.0 * s * c * w),
                }
            }
            Self::Circle {
                amplitude,
                duration,
            } => {
                let w = 2.0 * std::f64::consts::PI / duration;
                let (s, c) = (w * t).sin_cos();
                TiltSample {
                    theta: Vector2::new(c, s) * amplitude,
                    rate: Vector2::new(-s, c) * (amplitude * w),
                }
            }
        }
    }
}

/// Integrator state at one recorded instant.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub theta_x: f64,
    pub theta_y: f64,
    pub x: f64,
    pub y: f64,
    pub torsion: f64,
    pub r: Matrix3<f64>,
    /// Largest closure residual, metres.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub points: Vec<TrajectoryPoint>,
    pub method: &'static str,
    pub step: f64,
    pub z: f64,
}

impl TrajectoryResult {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points
            .last()
            .expect("trajectory has its initial point")
    }

    pub fn first(&self) -> &TrajectoryPoint {
        &self.points[0]
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

pub const INTEGRATION_RESIDUAL_LIMIT: f64 = 1e-7;

/// Integrates the parasitic state along a commanded tilt path.
///
/// The state is the platform translation `(x, y)` and rotation `R`. At every
/// stage the commanded tilt rates fix `(ω_x, ω_y)` up to the torsion rate,
/// which the coupling map `ω_z = M₃·(ω_x, ω_y)` then determines; `M` also
/// gives `(v_x, v_y)`. Runge–Kutta–Munthe-Kaas of order four advances `R`
/// through the exponential map, so it stays orthogonal.
pub fn integrate_trajectory<F>(
    tilt_path: F,
    duration: f64,
    z: f64,
    step: f64,
    config: &ManipulatorConfig,
) -> Result<TrajectoryResult>
where
    F: Fn(f64) -> TiltSample,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Step(step));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "duration",
            value: duration,
        });
    }
    let frames = config.limb_frames();
    let chart = config.orientation_chart;
    let start = tilt_path(0.0);
    let initial: Pose = solve_closure(start.theta.x, start.theta.y, z, config)?;

    let steps = (duration / step)
        .round()
        .max(if duration > 0.0 { 1.0 } else { 0.0 }) as usize;
    let h = if steps > 0 {
        duration / steps as f64
    } else {
        step
    };

    let rates =
        |t: f64, xy: &Vector2<f64>, r: &Matrix3<f64>| -> Result<(Vector2<f64>, Vector3<f64>)> {
            let _ = xy;
            let cmd = tilt_path(t);
            let (tx, ty, psi) = chart.coordinates(r);
            let basis = chart.angular_velocity_basis(tx, ty, psi);
            let a: [Vector3<f64>; 3] = std::array::from_fn(|i| r * frames[i].a_home);
            let (_, _, m) = coupling_from_attachments(&a, config)?;
            let base = basis.column(0) * cmd.rate.x + basis.column(1) * cmd.rate.y;
            let spin = basis.column(2).into_owned();
            let (m20, m21) = (m[(2, 0)], m[(2, 1)]);
            let torsion_rate =
                (m20 * base.x + m21 * base.y - base.z) / (spin.z - m20 * spin.x - m21 * spin.y);
            let omega = base + spin * torsion_rate;
            let dependent = m * Vector3::new(omega.x, omega.y, 0.0);
            Ok((Vector2::new(dependent.x, dependent.y), omega))
        };

    let record = |t: f64, xy: &Vector2<f64>, r: &Matrix3<f64>| {
        let (tx, ty, psi) = chart.coordinates(r);
        let p = Vector3::new(xy.x, xy.y, z);
        TrajectoryPoint {
            t,
            theta_x: tx,
            theta_y: ty,
            x: xy.x,
            y: xy.y,
            torsion: psi,
            r: *r,
            residual: closure_residuals(&p, r, &frames).amax(),
        }
    };

    let mut xy = Vector2::new(initial.p.x, initial.p.y);
    let mut r = initial.r;
    let mut points = Vec::with_capacity(steps + 1);
    points.push(record(0.0, &xy, &r));

    for n in 0..steps {
        let t = n as f64 * h;
        let at = |e: Error| match e {
            Error::Integration { .. } => e,
            other => Error::Trajectory {
                time: t,
                reason: other.to_string(),
            },
        };
        let step_once = || -> Result<(Vector2<f64>, Matrix3<f64>)> {
            let (v1, w1) = rates(t, &xy, &r)?;

            let u2 = w1 * (0.5 * h);
            let (v2, w2) = rates(t + 0.5 * h, &(xy + v1 * (0.5 * h)), &(exp_so3(&u2) * r))?;
            let w2 = left_jacobian_inv(&u2) * w2;

            let u3 = w2 * (0.5 * h);
            let (v3, w3) = rates(t + 0.5 * h, &(xy + v2 * (0.5 * h)), &(exp_so3(&u3) * r))?;
            let w3 = left_jacobian_inv(&u3) * w3;

            let u4 = w3 * h;
            let (v4, w4) = rates(t + h, &(xy + v3 * h), &(exp_so3(&u4) * r))?;
            let w4 = left_jacobian_inv(&u4) * w4;

            Ok((
                xy + (v1 + v2 * 2.0 + v3 * 2.0 + v4) * (h / 6.0),
                exp_so3(&((w1 + w2 * 2.0 + w3 * 2.0 + w4) * (h / 6.0))) * r,
            ))
        };
        (xy, r) = step_once().map_err(at)?;

        let point = record(if n + 1 == steps { duration } else { t + h }, &xy, &r);
        actuator_heights(&Vector3::new(xy.x, xy.y, z), &r, &frames, config).map_err(|e| {
            Error::Trajectory {
                time: point.t,
                reason: e.to_string(),
            }
        })?;
        if !(point.residual <= INTEGRATION_RESIDUAL_LIMIT) {
            return Err(Error::Integration {
                time: point.t,
                residual: point.residual,
            });
        }
        points.push(point);
    }

    Ok(TrajectoryResult {
        points,
        method: "RKMK4 (Runge-Kutta-Munthe-Kaas, exponential map on SO(3))",
        step: h,
        z,
    })
}

/// [`integrate_trajectory`] along one of the built-in paths.
pub fn integrate_path(
    path: &TiltPath,
    z: f64,
    step: f64,
    config: &ManipulatorConfig,
) -> Result<TrajectoryResult> {
    integrate_trajectory(|t| path.sample(t), path.duration(), z, step, config)
}
