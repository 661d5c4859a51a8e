//! The inequality harness: every check returns [`VerificationReport`]s.

pub mod graphs;
pub mod mixing;
pub mod walks;

pub use graphs::{
    clr_regression, en_identity_residual, negative_correlation_exploratory, relaxation_ratios,
    verify_interaction_bound_en, verify_negative_correlation, CLR_TOL,
};
pub use mixing::{
    default_submulti_grid, delta, proof_steps, single_move_chain_length, verify_lemma_probj,
    verify_submultiplicativity, verify_theorem_main, ProbJOptions, MIN_MC_REPLICAS,
};
pub use walks::{check_hk_theta, hk_profile, verify_mixing_relaxation, verify_mixtrel, verify_rw_sandwich, HkProfile};

use crate::error::{Error, Result};

/// Relative bisection tolerance for mixing times entering an assertion.
pub const ASSERT_MIX_TOL: f64 = 1e-10;

/// Additive tolerance on exact probability and distance comparisons.
pub const EXACT_TOL: f64 = 1e-9;

/// Tolerance on a comparison of times: `1e-9` relative, floored at `1e-9`.
pub(crate) fn time_tol(rhs: f64) -> f64 {
    EXACT_TOL * rhs.abs().max(1.0)
}

/// `0 < ε <= 1/k`.
pub(crate) fn check_eps(eps: f64, k: usize) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 / k as f64 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("need 0 < eps <= 1/k, got eps = {eps}, k = {k}")))
    }
}
