//! Interchange, exclusion and independent-walk processes on finite
//! hypergraphs: graphical-construction simulation, exact analysis on
//! enumerated state spaces, and numerical checks of mixing and relaxation
//! time comparisons.

pub mod dirichlet;
pub mod error;
pub mod exact;
pub mod generators;
pub mod model;
pub mod par;
pub mod report;
pub mod sim;
pub mod theorems;

pub use error::{Error, Result};
pub use model::{HypergraphInstance, ProcessKind, ProcessSpec};
