//! Instances, permutation laws, process specifications and state spaces.

pub mod assumptions;
pub mod instance;
pub mod perm;
pub mod process;
pub mod state;

pub use assumptions::{check_ip2_assumptions, AssumptionReport, ProcessCheck};
pub use instance::{explicit_law, Hyperedge, HypergraphInstance, ValidationReport, Violation, ViolationKind};
pub use perm::{EdgePermutation, PermutationLaw, WeightedPermutation};
pub use process::{ProcessKind, ProcessSpec};
pub use state::{apply_in_place, apply_permutation, LabeledConfig, SpaceKind, StateSpace, DEFAULT_STATE_BUDGET};
