mod args;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use nalgebra::Vector2;
use prs_core::sweep::{
    footprint, integrate_path, parasitic_map, regrid_nearest, stiffness_surfaces, surface_extrema,
    with_threads, OrientationGrid, SurfaceSample, TiltPath,
};
use prs_core::ManipulatorConfig;
use serde_json::{json, Value};

use args::{Cli, Command, GridArgs, Shape, Space, TrajectoryArgs};
use output::{finite, num, write_outputs, RunManifest, Table};

const PARASITIC_HEADER: &[&str] = &[
    "theta_x_deg",
    "theta_y_deg",
    "x_par_mm",
    "y_par_mm",
    "torsion_deg",
    "converged",
];
const STIFFNESS_HEADER: &[&str] = &[
    "theta_x_deg",
    "theta_y_deg",
    "x_par_mm",
    "y_par_mm",
    "kpx",
    "kpy",
    "kpz",
    "kax",
    "kay",
    "kaz",
];
const REGRID_HEADER: &[&str] = &[
    "x_par_mm", "y_par_mm", "kpx", "kpy", "kpz", "kax", "kay", "kaz",
];
const TRAJECTORY_HEADER: &[&str] = &[
    "t",
    "theta_x_deg",
    "theta_y_deg",
    "x_par_mm",
    "y_par_mm",
    "torsion_deg",
    "residual_m",
];
const REFERENCE_POINT: &str =
    "platform centre O' (origin of the moving frame, plane of the spherical-joint centres)";

/// Exit status 1: the computation failed. Exit status 2: bad input.
enum Failure {
    Usage(String),
    Computation(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let text =
        match &cli.config {
            Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read config {}: {e}", path.display()))
            })?),
            None => None,
        };
    let config = ManipulatorConfig::load(text.as_deref(), &cli.overrides)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let threads = cli.threads.map(usize::from);
    let mut manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: String::new(),
        arguments: std::env::args().skip(1).collect(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        config: serde_json::to_value(config.to_table()).unwrap_or(Value::Null),
        parameters: Value::Null,
        orientation_chart: config.orientation_chart.name(),
        reference_point: REFERENCE_POINT,
        units: Vec::new(),
        outputs: Vec::new(),
        summary: Value::Null,
    };
    let json = cli.format == args::Format::Json;

    match &cli.command {
        Command::Parasitic(grid_args) => {
            manifest.command = "parasitic".into();
            let grid = grid(grid_args, &config)?;
            let samples = sweep(threads, || parasitic_map(&grid, &config));
            manifest.parameters = grid_parameters(&grid, threads);
            manifest.units = vec![
                ("theta_x_deg", "deg"),
                ("theta_y_deg", "deg"),
                ("x_par_mm", "mm"),
                ("y_par_mm", "mm"),
                ("torsion_deg", "deg"),
                ("converged", "bool"),
            ];
            manifest.summary = parasitic_summary(&samples);
            let table = Table {
                header: PARASITIC_HEADER,
                rows: samples.iter().map(parasitic_row).collect(),
            };
            emit(&cli.out, "parasitic", json, &table, &mut manifest)?;
            report_failures(&samples)
        }
        Command::Stiffness {
            grid: grid_args,
            space,
            regrid,
        } => {
            manifest.command = "stiffness".into();
            let grid = grid(grid_args, &config)?;
            let samples = sweep(threads, || stiffness_surfaces(&grid, &config));
            let mut parameters = grid_parameters(&grid, threads);
            parameters["space"] = json!(format!("{space:?}").to_lowercase());
            parameters["regrid"] = json!(regrid);
            manifest.parameters = parameters;
            let angular = if config.stiffness_length_scale.is_some() {
                "N/m"
            } else {
                "N*m/rad"
            };
            manifest.units = vec![
                ("theta_x_deg", "deg"),
                ("theta_y_deg", "deg"),
                ("x_par_mm", "mm"),
                ("y_par_mm", "mm"),
                ("kpx", "N/m"),
                ("kpy", "N/m"),
                ("kpz", "N/m"),
                ("kax", angular),
                ("kay", angular),
                ("kaz", angular),
            ];
            let summary = stiffness_summary(&grid, &samples);
            print_extrema(&summary);
            manifest.summary = summary;
            let table = Table {
                header: STIFFNESS_HEADER,
                rows: samples.iter().map(|s| stiffness_row(s, *space)).collect(),
            };
            emit(&cli.out, "stiffness", json, &table, &mut manifest)?;
            if let Some(n) = regrid {
                let cells = regrid_nearest(&samples, *n as usize);
                let table = Table {
                    header: REGRID_HEADER,
                    rows: cells
                        .iter()
                        .map(|c| {
                            let mut row = vec![Some(num(c.x * 1e3)), Some(num(c.y * 1e3))];
                            row.extend(c.stiffness.to_array().map(|k| Some(num(k))));
                            row
                        })
                        .collect(),
                };
                manifest.outputs.clear();
                manifest.summary = json!({ "source": "stiffness", "cells": cells.len(), "method": "nearest neighbour, cells beyond one lattice diagonal dropped" });
                emit(&cli.out, "stiffness_regrid", json, &table, &mut manifest)?;
            }
            report_failures(&samples)
        }
        Command::Trajectory(t) => {
            manifest.command = "trajectory".into();
            trajectory(t, &config, &cli.out, json, &mut manifest)
        }
    }
}

fn grid(args: &GridArgs, config: &ManipulatorConfig) -> Result<OrientationGrid, Failure> {
    let z = args.z.unwrap_or(config.heave);
    OrientationGrid::new(args.grid, config.tilt_limit, z).map_err(|e| Failure::Usage(e.to_string()))
}

fn sweep<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => with_threads(n, f),
        None => f(),
    }
}

fn grid_parameters(grid: &OrientationGrid, threads: Option<usize>) -> Value {
    json!({
        "grid": grid.resolution,
        "z_m": grid.z,
        "tilt_limit_deg": grid.theta_x_samples[grid.resolution - 1].to_degrees(),
        "threads": threads,
    })
}

fn emit(
    dir: &std::path::Path,
    stem: &str,
    json: bool,
    table: &Table,
    manifest: &mut RunManifest,
) -> Result<Vec<PathBuf>, Failure> {
    let paths = write_outputs(dir, stem, json, table, manifest).map_err(|e| {
        Failure::Computation(format!("writing {stem} output in {}: {e}", dir.display()))
    })?;
    for p in &paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(paths)
}

fn parasitic_row(s: &SurfaceSample) -> Vec<Option<String>> {
    vec![
        Some(num(s.theta_x.to_degrees())),
        Some(num(s.theta_y.to_degrees())),
        finite(s.x_par * 1e3),
        finite(s.y_par * 1e3),
        finite(s.torsion.to_degrees()),
        Some(s.converged.to_string()),
    ]
}

fn stiffness_row(s: &SurfaceSample, space: Space) -> Vec<Option<String>> {
    let orientation = space != Space::Parasitic;
    let parasitic = space != Space::Orientation;
    let mut row = vec![
        orientation.then(|| num(s.theta_x.to_degrees())),
        orientation.then(|| num(s.theta_y.to_degrees())),
        if parasitic {
            finite(s.x_par * 1e3)
        } else {
            None
        },
        if parasitic {
            finite(s.y_par * 1e3)
        } else {
            None
        },
    ];
    match s.stiffness {
        Some(k) => row.extend(k.to_array().map(|v| Some(num(v)))),
        None => row.extend(std::iter::repeat_n(None, 6)),
    }
    row
}

fn parasitic_summary(samples: &[SurfaceSample]) -> Value {
    let ok: Vec<&SurfaceSample> = samples.iter().filter(|s| s.converged).collect();
    let points: Vec<[f64; 2]> = ok.iter().map(|s| [s.x_par, s.y_par]).collect();
    let max_abs = |f: fn(&SurfaceSample) -> f64| ok.iter().map(|s| f(s).abs()).fold(0.0, f64::max);
    let fp = footprint(&points);
    json!({
        "nodes": samples.len(),
        "failed": samples.len() - ok.len(),
        "max_abs_x_par_mm": max_abs(|s| s.x_par) * 1e3,
        "max_abs_y_par_mm": max_abs(|s| s.y_par) * 1e3,
        "max_abs_torsion_deg": max_abs(|s| s.torsion).to_degrees(),
        "footprint_mm": { "min": [fp.min[0] * 1e3, fp.min[1] * 1e3], "max": [fp.max[0] * 1e3, fp.max[1] * 1e3], "hull_fill_ratio": fp.fill_ratio() },
    })
}

fn stiffness_summary(grid: &OrientationGrid, samples: &[SurfaceSample]) -> Value {
    let node = |index: usize| {
        let (i, j) = grid.coordinates(index);
        let s = &samples[index];
        json!({
            "index": index,
            "theta_x_deg": s.theta_x.to_degrees(),
            "theta_y_deg": s.theta_y.to_degrees(),
            "x_par_mm": s.x_par * 1e3,
            "y_par_mm": s.y_par * 1e3,
            "grid": [i, j],
        })
    };
    let extrema: Vec<Value> = surface_extrema(samples)
        .iter()
        .map(|e| {
            json!({
                "column": e.column,
                "max": e.max,
                "argmax": node(e.argmax),
                "min": e.min,
                "argmin": node(e.argmin),
            })
        })
        .collect();
    let min_eigenvalue = samples
        .iter()
        .filter_map(|s| s.min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let mut summary = parasitic_summary(samples);
    summary["extrema"] = Value::Array(extrema);
    summary["min_eigenvalue"] = json!(finite(min_eigenvalue).map(|_| min_eigenvalue));
    summary
}

fn print_extrema(summary: &Value) {
    let Some(extrema) = summary["extrema"].as_array() else {
        return;
    };
    for e in extrema {
        let at = |key: &str| {
            format!(
                "({:.2}°, {:.2}°)",
                e[key]["theta_x_deg"].as_f64().unwrap_or(f64::NAN),
                e[key]["theta_y_deg"].as_f64().unwrap_or(f64::NAN)
            )
        };
        eprintln!(
            "{}: max {:.6e} at {}, min {:.6e} at {}",
            e["column"].as_str().unwrap_or("?"),
            e["max"].as_f64().unwrap_or(f64::NAN),
            at("argmax"),
            e["min"].as_f64().unwrap_or(f64::NAN),
            at("argmin"),
        );
    }
}

fn report_failures(samples: &[SurfaceSample]) -> Result<(), Failure> {
    let failed: Vec<String> = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.converged)
        .map(|(i, s)| {
            format!(
                "  node {i} ({:.3}°, {:.3}°): {}",
                s.theta_x.to_degrees(),
                s.theta_y.to_degrees(),
                s.failure.as_deref().unwrap_or("not converged")
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Computation(format!(
            "{} of {} nodes failed:\n{}",
            failed.len(),
            samples.len(),
            failed.join("\n")
        )))
    }
}

fn trajectory(
    t: &TrajectoryArgs,
    config: &ManipulatorConfig,
    out: &std::path::Path,
    json: bool,
    manifest: &mut RunManifest,
) -> Result<(), Failure> {
    for (name, value) in [("--step", t.step), ("--duration", t.duration)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Failure::Usage(format!(
                "{name} must be positive, got {value}"
            )));
        }
    }
    if !t.amplitude_deg.is_finite() || !t.direction_deg.is_finite() {
        return Err(Failure::Usage(
            "tilt amplitude and direction must be finite".into(),
        ));
    }
    let z = t.z.unwrap_or(config.heave);
    if !z.is_finite() {
        return Err(Failure::Usage(format!("--z must be finite, got {z}")));
    }
    let amplitude = t.amplitude_deg.to_radians();
    let direction = t.direction_deg.to_radians();
    let target = Vector2::new(direction.cos(), direction.sin()) * amplitude;
    let path = match t.shape {
        Shape::Ramp => TiltPath::Ramp {
            target,
            duration: t.duration,
        },
        Shape::OutAndBack => TiltPath::OutAndBack {
            target,
            duration: t.duration,
        },
        Shape::Circle => TiltPath::Circle {
            amplitude,
            duration: t.duration,
        },
    };
    let result = integrate_path(&path, z, t.step, config)
        .map_err(|e| Failure::Computation(e.to_string()))?;

    manifest.parameters = json!({
        "shape": format!("{:?}", t.shape),
        "amplitude_deg": t.amplitude_deg,
        "direction_deg": t.direction_deg,
        "duration_s": t.duration,
        "step_s": result.step,
        "z_m": z,
        "method": result.method,
    });
    manifest.units = vec![
        ("t", "s"),
        ("theta_x_deg", "deg"),
        ("theta_y_deg", "deg"),
        ("x_par_mm", "mm"),
        ("y_par_mm", "mm"),
        ("torsion_deg", "deg"),
        ("residual_m", "m"),
    ];
    let (first, last) = (result.first(), result.last());
    manifest.summary = json!({
        "points": result.points.len(),
        "max_residual_m": result.max_residual(),
        "start_to_end_drift_mm": [(last.x - first.x) * 1e3, (last.y - first.y) * 1e3],
        "final": { "theta_x_deg": last.theta_x.to_degrees(), "theta_y_deg": last.theta_y.to_degrees(), "x_par_mm": last.x * 1e3, "y_par_mm": last.y * 1e3, "torsion_deg": last.torsion.to_degrees() },
    });
    let table = Table {
        header: TRAJECTORY_HEADER,
        rows: result
            .points
            .iter()
            .map(|p| {
                vec![
                    Some(num(p.t)),
                    Some(num(p.theta_x.to_degrees())),
                    Some(num(p.theta_y.to_degrees())),
                    Some(num(p.x * 1e3)),
                    Some(num(p.y * 1e3)),
                    Some(num(p.torsion.to_degrees())),
                    Some(num(p.residual)),
                ]
            })
            .collect(),
    };
    emit(out, "trajectory", json, &table, manifest)?;
    Ok(())
}
