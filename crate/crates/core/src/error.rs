use thiserror::Error;

/// Failures raised while loading or validating a [`crate::config::ManipulatorConfig`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("could not parse configuration: {0}")]
    Parse(String),
    #[error("configuration key `{key}`: {reason}")]
    Parameter { key: String, reason: String },
    #[error("infeasible geometry: {0}")]
    Geometry(String),
}

impl ConfigError {
    pub(crate) fn parameter(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Parameter {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

/// Everything that can go wrong evaluating a pose, Jacobian or stiffness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("closure did not converge after {iterations} iterations (residual {residual:.3e} m)")]
    Closure { iterations: usize, residual: f64 },

    #[error("limb {limb} cannot reach: radial offset {offset:.6} m exceeds link length {link_length:.6} m")]
    Unreachable {
        limb: usize,
        offset: f64,
        link_length: f64,
    },

    #[error("closure Jacobian is singular (condition number {condition:.3e})")]
    ClosureSingularity { condition: f64 },

    #[error(
        "spherical joint {limb}: degenerate Y-X-Z decomposition (|cos θ4| = {cos_theta4:.3e})"
    )]
    DegenerateDecomposition { limb: usize, cos_theta4: f64 },

    #[error("limb {limb} is horizontal: l·s1 = {projection:.3e}")]
    ActuationSingularity { limb: usize, projection: f64 },

    #[error("constraint block lost rank (σ_min/σ_max = {ratio:.3e})")]
    ConstraintSingularity { ratio: f64 },

    #[error("parasitic coupling matrix C1 is singular (condition number {condition:.3e})")]
    ParasiticSingularity { condition: f64 },

    #[error("twist violates the constraint rows (residual {residual:.3e})")]
    ConstraintViolation { residual: f64 },

    #[error("{name} out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("tilt ({theta_x:.6}, {theta_y:.6}) rad outside the ±{limit:.6} rad workspace")]
    OutsideWorkspace {
        theta_x: f64,
        theta_y: f64,
        limit: f64,
    },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("integration failed at t = {time:.6} s: constraint residual {residual:.3e} m")]
    Integration { time: f64, residual: f64 },

    #[error("trajectory failed at t = {time:.6} s: {reason}")]
    Trajectory { time: f64, reason: String },

    #[error("integration step must be positive and finite, got {0}")]
    Step(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
