use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "prs3",
    version,
    about = "Parasitic motion and stiffness maps of the 3-PRS parallel head"
)]
pub struct Cli {
    /// TOML configuration; unset keys take the built-in defaults.
    #[arg(long, global = true, env = "PRS_STIFFNESS_CONFIG")]
    pub config: Option<PathBuf>,

    /// Override one configuration key, e.g. `--set torsional.k_spherical_deg=9e5`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true, value_parser = parse_assignment)]
    pub overrides: Vec<(String, String)>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads for grid sweeps (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parasitic (x, y, torsion) over the tilt grid.
    Parasitic(GridArgs),
    /// Diagonal Cartesian stiffness over the tilt grid.
    Stiffness {
        #[command(flatten)]
        grid: GridArgs,
        /// Which coordinates to populate per row.
        #[arg(long, value_enum, default_value_t = Space::Both)]
        space: Space,
        /// Also write a nearest-neighbour resampling of the parasitic-space
        /// surfaces on an N×N lattice.
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(2..))]
        regrid: Option<u32>,
    },
    /// Integrate the parasitic motion along a commanded tilt path.
    Trajectory(TrajectoryArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Samples per tilt axis (odd).
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    /// Heave, metres (default: the configuration's).
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, value_enum, default_value_t = Shape::Ramp)]
    pub shape: Shape,
    /// Peak tilt magnitude, degrees.
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    pub amplitude_deg: f64,
    /// Direction of the tilt axis vector in the (θx, θy) plane, degrees
    /// (ramp and out-and-back).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub direction_deg: f64,
    /// Seconds.
    #[arg(long, default_value_t = 1.0)]
    pub duration: f64,
    /// Integration step, seconds.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Heave, metres (default: the configuration's).
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Orientation,
    Parasitic,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Ramp,
    Circle,
    OutAndBack,
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected KEY=VALUE, got `{s}`")),
    }
}
