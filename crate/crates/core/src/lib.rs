//! Multi-robot frontier exploration on 2-D occupancy grids with probabilistic
//! viewpoint prioritization: per-frontier viewpoints scored by entropy-based
//! information gain, soft-clustered with a truncated Dirichlet-process
//! Gaussian mixture, and handed to pluggable selection policies inside a
//! deterministic tick simulator.
//!
//! All continuous math is generic over the scalar type; see [`Real`]. The
//! `*64` aliases at the crate root fix the common double-precision
//! instantiations.

pub mod grid;
pub mod mapping;
pub mod numeric;
pub mod real;
pub mod worldgen;

pub use real::Real;

pub type Pose64 = mapping::Pose<f64>;
pub type BeliefGrid64 = mapping::BeliefGrid<f64>;
pub type SensorModel64 = mapping::SensorModel<f64>;
pub type WorldSpec64 = worldgen::WorldSpec<f64>;
pub type GroundTruthGrid64 = worldgen::GroundTruthGrid<f64>;
