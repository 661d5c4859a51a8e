//! Standing assumptions on IP(2) (and IP(k)): irreducibility, uniform
//! stationarity and reversibility.

use serde::Serialize;

use super::instance::HypergraphInstance;
use crate::exact::generator::ip_generator;

/// Structural checks for one IP(k).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessCheck {
    pub k: usize,
    pub states: usize,
    pub irreducible: bool,
    pub uniform_stationary: bool,
    pub reversible: bool,
    /// States reachable from `(0, 1, ..., k-1)`.
    pub reachable_from_base: usize,
    pub stationarity_residual: f64,
    pub detailed_balance_residual: f64,
}

/// IP(2) checks plus those for any further requested `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub ip2: ProcessCheck,
    pub others: Vec<ProcessCheck>,
    /// Requested `k` that were skipped because their space exceeds the budget.
    pub skipped: Vec<usize>,
}

impl AssumptionReport {
    /// IP(2) irreducible with uniform stationary law.
    pub fn ip2_ok(&self) -> bool {
        self.ip2.irreducible && self.ip2.uniform_stationary
    }

    pub fn check(&self, k: usize) -> Option<&ProcessCheck> {
        if k == 2 {
            return Some(&self.ip2);
        }
        self.others.iter().find(|c| c.k == k)
    }
}

fn check_k(instance: &HypergraphInstance, k: usize, budget: usize) -> Option<ProcessCheck> {
    let g = ip_generator(instance, k, budget).ok()?;
    let report = g.balance_report();
    let base: Vec<usize> = (0..k).collect();
    let start = g.space().index(&base).expect("base configuration");
    let reachable = g.rates().reachable_from(start).into_iter().filter(|&r| r).count();
    Some(ProcessCheck {
        k,
        states: g.dim(),
        irreducible: report.irreducible,
        uniform_stationary: report.uniform_stationary,
        reversible: report.reversible,
        reachable_from_base: reachable,
        stationarity_residual: report.stationarity_residual,
        detailed_balance_residual: report.detailed_balance_residual,
    })
}

/// Runs the checks for IP(2) and for every `k` in `ks` (values outside
/// `1..=n` are ignored) whose state space fits in `budget`.
pub fn check_ip2_assumptions(instance: &HypergraphInstance, ks: &[usize], budget: usize) -> AssumptionReport {
    let ip2 = check_k(instance, 2, budget.max(instance.n() * instance.n())).expect("IP(2) always fits");
    let mut others = Vec::new();
    let mut skipped = Vec::new();
    let mut ks: Vec<usize> = ks.iter().copied().filter(|&k| k != 2 && k >= 1 && k <= instance.n()).collect();
    ks.sort_unstable();
    ks.dedup();
    for k in ks {
        match check_k(instance, k, budget) {
            Some(c) => others.push(c),
            None => skipped.push(k),
        }
    }
    AssumptionReport { ip2, others, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::model::{Hyperedge, DEFAULT_STATE_BUDGET as B};

    #[test]
    fn k4_passes_for_every_k() {
        let k4 = generators::complete(4).unwrap();
        let r = check_ip2_assumptions(&k4, &[1, 3, 4], B);
        assert!(r.ip2_ok() && r.ip2.reversible);
        for k in 1..=4 {
            let c = r.check(k).unwrap();
            assert!(c.irreducible && c.uniform_stationary && c.reversible, "k = {k}");
        }
        assert_eq!(r.check(4).unwrap().states, 24);
    }

    #[test]
    fn three_cycle_law_splits_the_full_space() {
        let inst = generators::three_cycle_instance();
        let r = check_ip2_assumptions(&inst, &[4], B);
        assert!(r.ip2.irreducible);
        let c4 = r.check(4).unwrap();
        assert!(!c4.irreducible);
        assert_eq!((c4.reachable_from_base, c4.states), (12, 24));
    }

    #[test]
    fn disconnected_instance_is_not_irreducible() {
        let inst = HypergraphInstance::unchecked(
            4,
            vec![Hyperedge::transposition(0, 1, 1.0), Hyperedge::transposition(2, 3, 1.0)],
            false,
        );
        assert!(!check_ip2_assumptions(&inst, &[], B).ip2.irreducible);
    }

    #[test]
    fn budget_skips_large_k() {
        let k5 = generators::complete(5).unwrap();
        let r = check_ip2_assumptions(&k5, &[5], 100);
        assert_eq!(r.skipped, vec![5]);
    }
}
