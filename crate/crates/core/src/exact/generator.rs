//! Explicit generators for RW(k), IP(k), EX(k) and Q(2).

use serde::Serialize;

use super::censored::build_censored_q2;
use super::sparse::RateMatrix;
use crate::error::{Error, Result};
use crate::model::{apply_in_place, HypergraphInstance, ProcessKind, ProcessSpec, SpaceKind, StateSpace};
use crate::par;

/// Residual tolerance for stationarity and detailed-balance checks.
pub const BALANCE_TOL: f64 = 1e-10;

/// A rate matrix over an enumerated state space.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    label: String,
    space: StateSpace,
    rates: RateMatrix,
    stationary: Option<Vec<f64>>,
    reversible: bool,
}

/// Summary of the structural checks performed on a generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    pub irreducible: bool,
    pub uniform_stationary: bool,
    pub reversible: bool,
    pub stationarity_residual: f64,
    pub detailed_balance_residual: f64,
}

impl GeneratorMatrix {
    /// Wraps a rate matrix, setting `pi` to uniform when the uniform
    /// distribution passes the stationarity check.
    pub fn new(label: String, space: StateSpace, rates: RateMatrix) -> Self {
        let mut g = Self {
            label,
            space,
            rates,
            stationary: None,
            reversible: false,
        };
        let report = g.balance_report();
        if report.uniform_stationary {
            g.stationary = Some(g.uniform());
            g.reversible = report.reversible;
        }
        g
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn rates(&self) -> &RateMatrix {
        &self.rates
    }

    pub fn dim(&self) -> usize {
        self.rates.dim()
    }

    pub fn stationary(&self) -> Option<&[f64]> {
        self.stationary.as_deref()
    }

    pub fn is_reversible(&self) -> bool {
        self.reversible
    }

    pub fn is_irreducible(&self) -> bool {
        self.rates.is_irreducible()
    }

    fn uniform(&self) -> Vec<f64> {
        vec![1.0 / self.dim() as f64; self.dim()]
    }

    /// Irreducibility plus uniform stationarity and detailed balance, with
    /// residuals scaled so that the tolerance applies to rates, not to
    /// `pi`-weighted rates.
    pub fn balance_report(&self) -> BalanceReport {
        let n = self.dim();
        let ones = vec![1.0; n];
        let scale = self.rates.max_exit().max(1.0);
        let stationarity_residual = self.rates.stationarity_residual(&ones) / scale;
        let detailed_balance_residual = self.rates.detailed_balance_residual(&ones) / scale;
        let uniform_stationary = stationarity_residual <= BALANCE_TOL;
        BalanceReport {
            irreducible: self.rates.is_irreducible(),
            uniform_stationary,
            reversible: uniform_stationary && detailed_balance_residual <= BALANCE_TOL,
            stationarity_residual,
            detailed_balance_residual,
        }
    }

    /// Dense copy of `Q`.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        self.rates.to_dense()
    }

    /// Maps a state to its index.
    pub fn index_of(&self, state: &[usize]) -> Result<usize> {
        self.space
            .index(state)
            .ok_or_else(|| Error::Precondition(format!("{state:?} is not a state of {}", self.label)))
    }
}

/// Builds the generator of `spec`, refusing state spaces above `budget`.
pub fn build_generator(spec: &ProcessSpec<'_>, budget: usize) -> Result<GeneratorMatrix> {
    match spec.kind {
        ProcessKind::Ip => ip_generator(spec.instance, spec.k, budget),
        ProcessKind::Rw => rw_generator(spec.instance, spec.k, budget),
        ProcessKind::Ex => ex_generator(spec.instance, spec.k, budget),
        ProcessKind::Q2 => build_censored_q2(spec.instance, budget),
    }
}

/// Rates of the lifted edge actions from every state of `space`; `project`
/// maps the post-ring tuple into the space (identity for IP, sorting for EX).
fn lifted_rows(
    instance: &HypergraphInstance,
    space: &StateSpace,
    project: fn(&mut [usize]),
) -> Vec<Vec<(usize, f64)>> {
    par::map_collect(0..space.len(), |a| {
        let state = space.state(a);
        let mut touched: Vec<usize> = state
            .iter()
            .flat_map(|&v| instance.edges_at(v).iter().copied())
            .collect();
        touched.sort_unstable();
        touched.dedup();
        let mut row = Vec::new();
        let mut buf = state.clone();
        for ei in touched {
            let e = &instance.edges()[ei];
            for w in e.support() {
                if w.p == 0.0 {
                    continue;
                }
                buf.copy_from_slice(&state);
                apply_in_place(&mut buf, e.vertices(), w.perm.images());
                project(&mut buf);
                if buf != state {
                    let b = space.index(&buf).expect("lifted action stays in the space");
                    row.push((b, e.rate() * w.p));
                }
            }
        }
        row
    })
}

pub(crate) fn ip_generator(instance: &HypergraphInstance, k: usize, budget: usize) -> Result<GeneratorMatrix> {
    let space = ProcessSpec::ip(k, instance)?.enumerate_states(budget)?;
    let rows = lifted_rows(instance, &space, |_| {});
    Ok(GeneratorMatrix::new(
        ProcessKind::Ip.label(k),
        space,
        RateMatrix::from_rows(rows, None),
    ))
}

fn ex_generator(instance: &HypergraphInstance, k: usize, budget: usize) -> Result<GeneratorMatrix> {
    let space = ProcessSpec::ex(k, instance)?.enumerate_states(budget)?;
    let rows = lifted_rows(instance, &space, |s| s.sort_unstable());
    Ok(GeneratorMatrix::new(
        ProcessKind::Ex.label(k),
        space,
        RateMatrix::from_rows(rows, None),
    ))
}

/// Single-particle rates `u -> v`, `u != v`.
pub fn single_particle_moves(instance: &HypergraphInstance) -> Vec<Vec<(usize, f64)>> {
    instance
        .single_particle_rates()
        .into_iter()
        .enumerate()
        .map(|(u, row)| {
            row.into_iter()
                .enumerate()
                .filter(|&(v, r)| v != u && r > 0.0)
                .collect()
        })
        .collect()
}

pub(crate) fn rw_generator(instance: &HypergraphInstance, k: usize, budget: usize) -> Result<GeneratorMatrix> {
    let space = ProcessSpec::rw(k, instance)?.enumerate_states(budget)?;
    let moves = single_particle_moves(instance);
    let rows = par::map_collect(0..space.len(), |a| {
        let state = space.state(a);
        let mut buf = state.clone();
        let mut row = Vec::new();
        for i in 0..k {
            for &(v, r) in &moves[state[i]] {
                buf[i] = v;
                row.push((space.index(&buf).expect("in space"), r));
            }
            buf[i] = state[i];
        }
        row
    });
    Ok(GeneratorMatrix::new(
        ProcessKind::Rw.label(k),
        space,
        RateMatrix::from_rows(rows, None),
    ))
}

/// Two-vertex chain with unit swap rate; the smallest closed-form sanity case.
pub fn two_state_chain() -> GeneratorMatrix {
    let space = StateSpace::new(SpaceKind::Product, 2, 1, 2).expect("tiny");
    GeneratorMatrix::new(
        "two-state".into(),
        space,
        RateMatrix::from_rows(vec![vec![(1, 1.0)], vec![(0, 1.0)]], None),
    )
}
