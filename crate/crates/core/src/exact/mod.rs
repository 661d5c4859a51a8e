//! Exact analysis on enumerated state spaces.

pub mod censored;
pub mod export;
pub mod generator;
pub mod interactions;
pub mod kernel;
pub mod lumping;
pub mod sparse;
pub mod spectral;
pub mod tv;

pub use censored::build_censored_q2;
pub use generator::{build_generator, two_state_chain, BalanceReport, GeneratorMatrix, BALANCE_TOL};
pub use interactions::{exact_expected_interactions, exact_probj, expected_interactions, ProbJSolver};
pub use kernel::{transition_matrix, Kernel};
pub use lumping::project_to_exclusion;
pub use sparse::RateMatrix;
pub use spectral::{relaxation_time, spectral_gap};
pub use tv::{bar_d_k, mixing_time, tv, worst_case_d, TvCurve};
