//! Lorenz-type systems related by Zn symmetry: the standard Lorenz flow,
//! its normalized form L2, the quotient L1 obtained by gluing the two
//! symmetric half-planes, and the Zn-extensions Ln of L1.
//!
//! The crate is `no_std` (with `alloc`). File formats, rendering and the
//! command line live in the `zlorenz` crate.
#![no_std]

extern crate alloc;

mod math;

pub mod chaos;
pub mod covering;
pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod params;
pub mod state;
pub mod trajectory;

pub use chaos::{chaos_table, lyapunov_max, ChaosRow, LyapunovConfig, LyapunovEstimate};
pub use covering::{
    branch_preimages, color_of, cover_point, cover_trajectory, lift_trajectory, ColoredPoint, CoveringSpec,
};
pub use dynamics::{
    fixed_points, l1_polar_field, l2_field, ln_cartesian_field, ln_polar_field, standard_field, SystemSpec, RADIUS_MIN,
};
pub use error::DomainError;
pub use integrate::{flow, solve, IntegrationError, IntegratorConfig, Mode, VectorField};
pub use params::{NormalizedParams, StandardParams};
pub use state::{CartesianState, CoordinateKind, PolarState};
pub use trajectory::{simulate, Trajectory, TrajectoryMeta};
