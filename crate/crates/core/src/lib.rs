//! Kinematics and stiffness of the 3-PRS (Sprint Z3) parallel head.
//!
//! The pipeline for one pose is
//! [`kinematics::solve_closure`] → [`jacobian::inverse_jacobian`] →
//! [`stiffness::assemble_cartesian_stiffness`]; [`sweep`] repeats it over the
//! tilt workspace and integrates the velocity-level parasitic model along
//! tilt trajectories.

// `!(x < limit)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod jacobian;
pub mod kinematics;
pub mod rotation;
pub mod stiffness;
pub mod sweep;

pub use config::{limb_frames, load_config, LimbFrame, ManipulatorConfig};
pub use error::{ConfigError, Error, Result};
pub use jacobian::{
    actuation_rates, inverse_jacobian, parasitic_coupling, projection_matrix, reshuffle,
    JacobianBundle, ReshuffledJacobian,
};
pub use kinematics::{solve_closure, spherical_joint_angles, Pose, SphericalJointAngles};
pub use rotation::{rotation_from_tilt, OrientationChart};
pub use stiffness::{
    assemble_cartesian_stiffness, diagonal_stiffness, limb_axial_stiffness,
    limb_torsional_stiffness, shift_reference, CartesianStiffness, ComponentStiffness,
    DiagonalStiffness,
};
pub use sweep::{
    integrate_path, integrate_trajectory, parasitic_map, stiffness_surfaces, ExecutionMode,
    OrientationGrid, SurfaceSample, TiltPath, TiltSample, TrajectoryResult,
};
