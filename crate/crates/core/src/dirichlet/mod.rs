//! Dirichlet forms of IP(2) and Q(2) and the constants comparing them.

pub mod comparison;
pub mod forms;

pub use comparison::{
    comparison_report, sup_ratio, trel_comparison, variational_gap, ComparisonReport, FormPair, InequalityResult,
    TrelComparison, COMPARISON_TOL,
};
pub use forms::{dirichlet_ip2, dirichlet_q2, FormBreakdown, Ip2Forms, PairForm, Q2Forms, TestFunction, Q2_PATTERNS};
