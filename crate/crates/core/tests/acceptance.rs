//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use nalgebra::{Vector2, Vector3, Vector6};
use prs_core::config::PER_DEG_TO_PER_RAD;
use prs_core::jacobian::{inverse_jacobian, parasitic_coupling, projection_matrix};
use prs_core::kinematics::solve_closure;
use prs_core::stiffness::{limb_axial_stiffness, limb_torsional_stiffness};
use prs_core::sweep::{
    footprint, integrate_path, stiffness_surfaces, surface_extrema, OrientationGrid, SurfaceSample,
    TiltPath,
};
use prs_core::ManipulatorConfig;

const H: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn closure_twist(
    q: [f64; 3],
    coordinate: usize,
    c: &ManipulatorConfig,
) -> (Vector6<f64>, [f64; 3]) {
    let at = |s: f64| {
        let mut q = q;
        q[coordinate] += s;
        solve_closure(q[0], q[1], q[2], c).expect("pose inside the workspace")
    };
    let (plus, minus) = (at(H), at(-H));
    let v = (plus.p - minus.p) / (2.0 * H);
    let w = angular_difference(&plus.r, &minus.r, H);
    let dd = std::array::from_fn(|i| (plus.d[i] - minus.d[i]) / (2.0 * H));
    (Vector6::new(v.x, v.y, v.z, w.x, w.y, w.z), dd)
}

/// Actuation rows of Gᵀ against central differences of the heights, both
/// entry by entry (unit twists through the inverse kinematics) and along the
/// closed-loop directions `θx`, `θy`, `z` through the closure solver.
fn jacobian_oracle(c: &ManipulatorConfig) -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let (tx, ty) = random_tilt(&mut r, c.tilt_limit);
        let pose = solve_closure(tx, ty, c.heave, c).unwrap();
        let bundle = inverse_jacobian(&pose, c).unwrap();
        for k in 0..6 {
            let e = Vector6::<f64>::ith(k, 1.0);
            let (v, w) = (
                e.fixed_rows::<3>(0).into_owned(),
                e.fixed_rows::<3>(3).into_owned(),
            );
            let plus = ik_heights(&(pose.p + v * H), &(rodrigues(&(w * H)) * pose.r), c);
            let minus = ik_heights(&(pose.p - v * H), &(rodrigues(&(w * -H)) * pose.r), c);
            for i in 0..3 {
                let fd = (plus[i] - minus[i]) / (2.0 * H);
                worst = worst.max((bundle.gt[(i, k)] - fd).abs() / bundle.gt.row(i).amax());
            }
        }
        for coordinate in 0..3 {
            let (twist, dd) = closure_twist([tx, ty, c.heave], coordinate, c);
            let predicted = bundle.ga.transpose() * twist;
            let scale = dd.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for i in 0..3 {
                worst = worst.max((predicted[i] - dd[i]).abs() / scale);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-5 && elapsed < Duration::from_secs(10),
        format!("25 poses, max relative error {worst:.2e}, {elapsed:.2?}"),
    )
}

fn projector_laws(c: &ManipulatorConfig) -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (tx, ty) = random_tilt(&mut r, c.tilt_limit);
        let pose = solve_closure(tx, ty, c.heave, c).unwrap();
        let gc = inverse_jacobian(&pose, c).unwrap().gc;
        let p = projection_matrix(&gc).unwrap();
        worst = worst
            .max((p * p - p).amax())
            .max((p - p.transpose()).amax())
            .max((gc.transpose() * p).amax());
    }
    outcome(
        worst < 1e-12,
        format!("100 poses, max violation {worst:.2e}"),
    )
}

fn parasitic_coupling_check(c: &ManipulatorConfig) -> Outcome {
    let home = solve_closure(0.0, 0.0, c.heave, c).unwrap();
    let m_home = parasitic_coupling(&home, c).unwrap().2.amax();
    let mut r = rng(3);
    let mut third_column: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let (tx, ty) = random_tilt(&mut r, c.tilt_limit);
        let pose = solve_closure(tx, ty, c.heave, c).unwrap();
        let m = parasitic_coupling(&pose, c).unwrap().2;
        third_column = third_column.max(m.column(2).amax());
        for coordinate in 0..3 {
            let (t, _) = closure_twist([tx, ty, c.heave], coordinate, c);
            let predicted = m * Vector3::new(t[3], t[4], t[2]);
            worst = worst.max((predicted - Vector3::new(t[0], t[1], t[5])).amax());
        }
    }
    outcome(
        third_column == 0.0 && m_home == 0.0 && worst < 1e-6,
        format!("|M(:,3)| = {third_column:.1e}, |M_home| = {m_home:.1e}, 25 poses max error {worst:.2e}"),
    )
}

fn velocity_position(c: &ManipulatorConfig) -> Outcome {
    let start = Instant::now();
    let step = 1e-3;
    let target = Vector2::new(30f64.to_radians(), 0.0);
    let ramp = integrate_path(
        &TiltPath::Ramp {
            target,
            duration: 1.0,
        },
        c.heave,
        step,
        c,
    )
    .unwrap();
    let end = ramp.last();
    let oracle = solve_closure(target.x, target.y, c.heave, c).unwrap();
    let position = (end.x - oracle.p.x).abs().max((end.y - oracle.p.y).abs());
    let angle = (end.torsion - oracle.torsion)
        .abs()
        .max((end.theta_x - target.x).abs())
        .max((end.theta_y - target.y).abs());

    let loops = [
        TiltPath::OutAndBack {
            target: Vector2::new(30f64.to_radians(), 15f64.to_radians()),
            duration: 1.0,
        },
        TiltPath::Circle {
            amplitude: 25f64.to_radians(),
            duration: 1.0,
        },
    ];
    let mut drift: f64 = 0.0;
    for path in &loops {
        let run = integrate_path(path, c.heave, step, c).unwrap();
        let (a, b) = (run.first(), run.last());
        drift = drift.max((a.x - b.x).abs()).max((a.y - b.y).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        position < 1e-6 && angle < 1e-6 && drift < 1e-8 && elapsed < Duration::from_secs(5),
        format!(
            "ramp to (30°, 0°): {position:.2e} m / {angle:.2e} rad; loop drift {drift:.2e} m; {elapsed:.2?}"
        ),
    )
}

fn stiffness_scalars(c: &ManipulatorConfig) -> Outcome {
    let home = solve_closure(0.0, 0.0, c.heave, c).unwrap();
    let k_a = limb_axial_stiffness(home.d[0], c).unwrap();
    let k_c = limb_torsional_stiffness(&home, 0, c).unwrap() / PER_DEG_TO_PER_RAD;
    let (ea, ec) = (rel(k_a, 3.6163e7), rel(k_c, 4.1569e5));
    outcome(
        ea < 1e-3 && ec < 1e-3,
        format!(
            "k_a = {k_a:.5e} N/m ({:.3}%), k_c = {k_c:.5e} N·m/deg ({:.3}%)",
            ea * 100.0,
            ec * 100.0
        ),
    )
}

fn k_structure(grid: &OrientationGrid, samples: &[SurfaceSample]) -> Outcome {
    let failed = samples.iter().filter(|s| !s.converged).count();
    let asym = samples
        .iter()
        .filter_map(|s| s.asymmetry)
        .fold(0.0, f64::max);
    let min_eig = samples
        .iter()
        .filter_map(|s| s.min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let centre = samples[grid.center_index()].stiffness.unwrap();
    let iso = rel(centre.kpx, centre.kpy);
    outcome(
        failed == 0 && asym <= 1e-12 && min_eig > 0.0 && iso < 1e-9,
        format!(
            "{} nodes, {failed} failed, asymmetry {asym:.1e}, min eigenvalue {min_eig:.3e}, centre kpx/kpy rel {iso:.1e}",
            samples.len()
        ),
    )
}

fn figure_shape(grid: &OrientationGrid, samples: &[SurfaceSample], elapsed: Duration) -> Outcome {
    let (ci, cj) = grid.coordinates(grid.center_index());
    let near = |index: usize| {
        let (i, j) = grid.coordinates(index);
        i.abs_diff(ci) <= 1 && j.abs_diff(cj) <= 1
    };
    let mut surfaces_ok = true;
    let mut parts = Vec::new();
    for e in surface_extrema(samples) {
        let max_near = near(e.argmax);
        let min_near = near(e.argmin);
        let ok = max_near || min_near;
        surfaces_ok &= ok;
        let at = |index: usize| {
            let (i, j) = grid.coordinates(index);
            format!("({i},{j})")
        };
        parts.push(format!(
            "{}:{} max{} min{}",
            e.column,
            if ok { "ok" } else { "off-centre" },
            at(e.argmax),
            at(e.argmin)
        ));
    }
    let points: Vec<[f64; 2]> = samples
        .iter()
        .filter(|s| s.converged)
        .map(|s| [s.x_par, s.y_par])
        .collect();
    let fp = footprint(&points);
    let fill = fp.fill_ratio();
    let footprint_ok = fill < 1.0;
    outcome(
        surfaces_ok && footprint_ok && elapsed < Duration::from_secs(30),
        format!(
            "{}; parasitic footprint fills {:.3} of its box (orientation grid fills 1); sweep {elapsed:.2?}",
            parts.join(", "),
            fill
        ),
    )
}

fn symmetry_suite(grid: &OrientationGrid, c: &ManipulatorConfig) -> Outcome {
    // the rotated images of the box corners reach √2 × limit
    let wide = ManipulatorConfig {
        tilt_limit: c.tilt_limit * 1.5,
        ..c.clone()
    };
    let n = grid.resolution;
    let turn = spin_z(2.0 * std::f64::consts::PI / 3.0);
    let mut mirror: f64 = 0.0;
    let mut threefold: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (tx, ty) = (grid.theta_x_samples[i], grid.theta_y_samples[j]);
            let a = solve_closure(tx, ty, grid.z, c).unwrap();
            let m = solve_closure(grid.theta_x_samples[n - 1 - i], ty, grid.z, c).unwrap();
            mirror = mirror
                .max((a.p.x - m.p.x).abs())
                .max((a.p.y + m.p.y).abs())
                .max((a.torsion + m.torsion).abs());
            for rotation in [turn, turn.transpose()] {
                let w = rotation * Vector3::new(tx, ty, 0.0);
                let b = solve_closure(w.x, w.y, grid.z, &wide).unwrap();
                threefold = threefold
                    .max((rotation * a.p - b.p).amax())
                    .max((a.torsion - b.torsion).abs());
            }
        }
    }
    outcome(
        mirror < 1e-9 && threefold < 1e-9,
        format!(
            "{} nodes, mirror {mirror:.1e}, 3-fold {threefold:.1e}",
            n * n
        ),
    )
}

fn main() {
    let c = ManipulatorConfig::default();
    let grid = OrientationGrid::for_config(41, &c).unwrap();
    let start = Instant::now();
    let samples = stiffness_surfaces(&grid, &c);
    let sweep_time = start.elapsed();

    let results = [
        ("1 Jacobian oracle", jacobian_oracle(&c)),
        ("2 Projector laws", projector_laws(&c)),
        ("3 Parasitic coupling", parasitic_coupling_check(&c)),
        ("4 Velocity-position consistency", velocity_position(&c)),
        ("5 Stiffness scalars", stiffness_scalars(&c)),
        ("6 K structure", k_structure(&grid, &samples)),
        ("7 Figure shape", figure_shape(&grid, &samples, sweep_time)),
        ("8 Symmetry suite", symmetry_suite(&grid, &c)),
    ];
    println!(
        "acceptance (chart {}, z = {} m)",
        c.orientation_chart.name(),
        c.heave
    );
    let mut failures = 0;
    for (name, o) in &results {
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failures += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria pass",
        results.len() - failures,
        results.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
