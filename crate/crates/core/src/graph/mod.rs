//! Problem instances, solution trees, depth representations and STP I/O.

mod instance;
mod representation;
mod stp;
mod tree;

pub use instance::{BuildError, Instance, InstanceBuilder, Kind};
pub use representation::{
    representation_energy, representation_to_subgraph, tree_to_representation,
    validate_representation, DepthMode, Representation, ReprError,
};
pub use stp::{parse_stp, parse_stp_str, write_solution, write_stp, StpError};
pub use tree::{energy, gap, GapError, SolutionTree, TreeError};
