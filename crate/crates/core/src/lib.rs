//! Max-Sum (cavity method) solver for rooted, classic and prize-collecting
//! Steiner tree problems on graphs.
//!
//! The solver iterates reinforced Max-Sum message passing over per-edge depth
//! variables (normal or flat depth model) and, at every iteration, turns the
//! current fields into a feasible tree through greedy extraction heuristics
//! (field-reweighted MST / shortest-path tree / Goemans-Williamson), so a
//! primal bound is available anytime.
//!
//! Core numerics are generic over the scalar through [`scalar::Scalar`];
//! `f64` aliases are exported at the crate root.

pub mod driver;
pub mod engine;
pub mod gen;
pub mod graph;
pub mod heuristics;
pub mod oracle;
pub mod scalar;

pub use graph::{energy, gap, DepthMode, Instance, Kind, Representation, SolutionTree};
pub use scalar::Scalar;

/// Default double-precision instance.
pub type Instance64 = graph::Instance<f64>;
/// Single-precision instance.
pub type Instance32 = graph::Instance<f32>;
// EngineState64 / SolverConfig64 aliases restored once those modules land
