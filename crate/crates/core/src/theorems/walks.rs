//! Random-walk comparisons: the RW(k) sandwich, mixing versus relaxation
//! envelopes and heat-kernel decay.

use serde::Serialize;

use super::{time_tol, ASSERT_MIX_TOL, EXACT_TOL};
use crate::error::{Error, Result};
use crate::exact::tv::mixing_time_tol;
use crate::exact::{build_generator, relaxation_time, transition_matrix, GeneratorMatrix};
use crate::model::{HypergraphInstance, ProcessSpec};
use crate::report::VerificationReport;

/// `½ t_mix^{RW(1)}(4ε/k) <= t_mix^{RW(k)}(ε) <= t_mix^{RW(1)}(ε/k)`.
pub fn verify_rw_sandwich(
    instance: &HypergraphInstance,
    k: usize,
    eps: f64,
    budget: usize,
) -> Result<Vec<VerificationReport>> {
    if k < 3 {
        return Err(Error::Precondition(format!("the sandwich needs k >= 3, got {k}")));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::Precondition(format!("the sandwich needs eps in (0, 1/4), got {eps}")));
    }
    let kf = k as f64;
    let rwk = build_generator(&ProcessSpec::rw(k, instance)?, budget)?;
    let rw1 = build_generator(&ProcessSpec::rw(1, instance)?, budget)?;
    let tk = mixing_time_tol(&rwk, eps, ASSERT_MIX_TOL)?;
    let lower = 0.5 * mixing_time_tol(&rw1, 4.0 * eps / kf, ASSERT_MIX_TOL)?;
    let upper = mixing_time_tol(&rw1, eps / kf, ASSERT_MIX_TOL)?;
    Ok(vec![
        VerificationReport::exact("RW(k) sandwich lower", lower, tk, time_tol(tk))
            .param("k", kf)
            .param("eps", eps),
        VerificationReport::exact("RW(k) sandwich upper", tk, upper, time_tol(upper))
            .param("k", kf)
            .param("eps", eps),
    ])
}

/// `t_rel log(1/(2ε)) <= t_mix(ε) <= t_rel log(1/(ε π_min))` for a
/// reversible generator with uniform stationary law.
pub fn verify_mixing_relaxation(gen: &GeneratorMatrix, eps: f64) -> Result<Vec<VerificationReport>> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let pi = gen.stationary().ok_or(Error::Reducible)?;
    let pi_min = pi.iter().copied().fold(f64::INFINITY, f64::min);
    let t_rel = relaxation_time(gen)?;
    let t_mix = mixing_time_tol(gen, eps, ASSERT_MIX_TOL)?;
    let lower = t_rel * (1.0 / (2.0 * eps)).ln();
    let upper = t_rel * (1.0 / (eps * pi_min)).ln();
    let name = gen.label();
    Ok(vec![
        VerificationReport::exact(&format!("{name} mixing >= relaxation envelope"), lower, t_mix, time_tol(t_mix))
            .param("eps", eps)
            .param("t_rel", t_rel),
        VerificationReport::exact(&format!("{name} mixing <= relaxation envelope"), t_mix, upper, time_tol(upper))
            .param("eps", eps)
            .param("t_rel", t_rel),
    ])
}

/// Envelopes for RW(1) (`log(n/ε)`) and, when reversible, IP(2) (`log(n^2/ε)`
/// dominates the `log(1/(ε π_min))` checked).
pub fn verify_mixtrel(instance: &HypergraphInstance, eps: f64, budget: usize) -> Result<Vec<VerificationReport>> {
    let rw1 = build_generator(&ProcessSpec::rw(1, instance)?, budget)?;
    let mut out = verify_mixing_relaxation(&rw1, eps)?;
    let ip2 = build_generator(&ProcessSpec::ip(2, instance)?, budget)?;
    if ip2.is_reversible() && ip2.is_irreducible() {
        out.extend(verify_mixing_relaxation(&ip2, eps)?);
    }
    Ok(out)
}

/// `h(t) = max_x p_t(x, x) - π(x)` on a grid, with the smallest `c` making
/// `h(t) <= c / t^{1+θ}` hold on the grid points `t >= t_rel`.
#[derive(Debug, Clone, Serialize)]
pub struct HkProfile {
    pub theta: f64,
    pub t_rel: f64,
    pub times: Vec<f64>,
    pub h: Vec<f64>,
    pub min_c: f64,
    pub reports: Vec<VerificationReport>,
}

impl HkProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, h) in self.times.iter().zip(&self.h) {
            out.push_str(&format!("{t},{h}\n"));
        }
        out
    }
}

fn diagonal_excess(gen: &GeneratorMatrix, t: f64) -> Result<f64> {
    let pi = gen.stationary().ok_or(Error::Reducible)?;
    let p = transition_matrix(gen, t)?;
    Ok((0..gen.dim()).map(|x| p.get(x, x) - pi[x]).fold(f64::NEG_INFINITY, f64::max))
}

/// HK-(θ) profile of a reversible single-walker generator. With `c` given,
/// the bound is asserted at every grid time `t >= t_rel`. The spectral
/// decay `h(t) <= h(t0) e^{-(t - t0)/t_rel}` from the first such time is
/// always asserted.
pub fn hk_profile(gen: &GeneratorMatrix, theta: f64, c: Option<f64>, times: &[f64]) -> Result<HkProfile> {
    let t_rel = relaxation_time(gen)?;
    let mut grid: Vec<f64> = times.iter().copied().filter(|&t| t >= t_rel).collect();
    grid.sort_by(f64::total_cmp);
    if grid.is_empty() {
        return Err(Error::Precondition(format!("no grid time reaches t_rel = {t_rel}")));
    }
    let h = grid.iter().map(|&t| diagonal_excess(gen, t)).collect::<Result<Vec<f64>>>()?;
    let min_c = grid
        .iter()
        .zip(&h)
        .map(|(t, h)| h * t.powf(1.0 + theta))
        .fold(0.0, f64::max);
    let mut reports = Vec::new();
    if let Some(c) = c {
        for (&t, &v) in grid.iter().zip(&h) {
            reports.push(
                VerificationReport::exact("HK-(theta)", v, c / t.powf(1.0 + theta), EXACT_TOL)
                    .param("theta", theta)
                    .param("c", c)
                    .param("t", t),
            );
        }
    }
    let (t0, h0) = (grid[0], h[0]);
    for (&t, &v) in grid.iter().zip(&h).skip(1) {
        reports.push(
            VerificationReport::exact("heat kernel spectral decay", v, h0 * (-(t - t0) / t_rel).exp(), EXACT_TOL)
                .param("t0", t0)
                .param("t", t)
                .param("t_rel", t_rel),
        );
    }
    reports.push(
        VerificationReport::exploratory("HK-(theta) minimal c", min_c, min_c, 0.0).param("theta", theta),
    );
    Ok(HkProfile {
        theta,
        t_rel,
        times: grid,
        h,
        min_c,
        reports,
    })
}

/// [`hk_profile`] for RW(1) of an instance.
pub fn check_hk_theta(
    instance: &HypergraphInstance,
    theta: f64,
    c: Option<f64>,
    times: &[f64],
    budget: usize,
) -> Result<HkProfile> {
    let rw1 = build_generator(&ProcessSpec::rw(1, instance)?, budget)?;
    hk_profile(&rw1, theta, c, times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::two_state_chain;
    use crate::exact::tv::log_grid;
    use crate::generators;
    use crate::model::DEFAULT_STATE_BUDGET;

    #[test]
    fn two_state_profile_is_closed_form() {
        let gen = two_state_chain();
        let times = [0.5, 1.0, 2.0, 4.0];
        let p = hk_profile(&gen, 0.5, None, &times).unwrap();
        assert!((p.t_rel - 0.5).abs() < 1e-12);
        for (t, h) in p.times.iter().zip(&p.h) {
            assert!((h - 0.5 * (-2.0 * t).exp()).abs() < 1e-12);
        }
        // the decay is exactly e^{-(t - t0)/t_rel}, so the check is tight
        assert!(p.reports.iter().all(|r| r.pass));
        let c = p.times.iter().map(|t| 0.5 * (-2.0 * t).exp() * t.powf(1.5)).fold(0.0, f64::max);
        assert!((p.min_c - c).abs() < 1e-12);
    }

    #[test]
    fn hk_assertion_uses_given_constant() {
        let g = generators::cycle(6).unwrap();
        let times = log_grid(0.5, 50.0, 12);
        let p = check_hk_theta(&g, 0.1, None, &times, DEFAULT_STATE_BUDGET).unwrap();
        let ok = check_hk_theta(&g, 0.1, Some(p.min_c * 1.0001), &times, DEFAULT_STATE_BUDGET).unwrap();
        assert!(ok.reports.iter().all(|r| r.pass));
        let bad = check_hk_theta(&g, 0.1, Some(p.min_c * 0.5), &times, DEFAULT_STATE_BUDGET).unwrap();
        assert!(bad.reports.iter().any(|r| r.is_failure()));
    }

    #[test]
    fn sandwich_guards() {
        let g = generators::complete(4).unwrap();
        assert!(verify_rw_sandwich(&g, 3, 0.25, DEFAULT_STATE_BUDGET).is_err());
        assert!(verify_rw_sandwich(&g, 2, 0.1, DEFAULT_STATE_BUDGET).is_err());
        let reps = verify_rw_sandwich(&g, 3, 0.125, DEFAULT_STATE_BUDGET).unwrap();
        assert!(reps.iter().all(|r| r.pass), "{reps:#?}");
    }
}
