//! Rotation numbers of discrete random dynamical systems on the circle.
//!
//! * [`circle`]: angles, lifts, and the `(q, α)` lift normalization.
//! * [`homeo`]: concrete orientation-preserving homeomorphisms.
//! * [`system`]: random systems (i.i.d. or cyclic bases) and their skew product.
//! * [`estimate`]: `ρ_{q,α}`, nonuniform lifts, orbit rotation numbers, and the
//!   ergodic-formula cross-check.
//! * [`compare`]: crossing statistics, staircases, and the comparison identities.
//! * [`sde`]: Stratonovich flows on the circle and the time-sampling experiment.
//! * [`fixtures`]: reference systems with known answers.

pub mod circle;
pub mod compare;
pub mod config;
pub mod error;
pub mod estimate;
pub mod fixtures;
pub mod homeo;
pub mod plfile;
pub mod report;
pub mod rng;
pub mod sde;
pub mod stats;
pub mod system;

pub use circle::{cover, normalize_lift, shift_params, Angle, Deviation, LiftParams};
pub use compare::{
    crossing_stats, staircase_sweep, verify_orbit_identity, verify_lift_comparison, CrossingStats, StreamMode, SweepAxis,
};
pub use error::{Error, Result};
pub use estimate::{
    ergodic_formula_check, orbit_rotation, rho_estimate, rho_nonuniform, EmpiricalMeasure, EstimateReport,
    OffsetLaw, OrbitTrace,
};
pub use homeo::{compose, CircleMap};
pub use sde::{
    integrate_segment, or_sampling_counterexample, rot_continuous, rot_formula_estimate, sampling_experiment,
    BrownianStream, VectorField, VectorFieldSet,
};
pub use system::{iterate_skew, MapFamily, Model, RandomSystem, SkewState};
