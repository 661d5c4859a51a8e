//! Exact interaction quantities: expected interaction counts and `P[J_s]`.
//!
//! `J_s(x)` is the event that the last particle of an IP(k) started from `x`
//! has no interaction with the others during `[s, 2s]`. Its probability is
//! `sum_y P_s(x, y) u_s(y)`, where `u_s(y)` is the survival probability of
//! IP(k) killed at every ring of an edge holding the last particle together
//! with another one.

use super::generator::{ip_generator, GeneratorMatrix};
use super::kernel::{evolve_distribution, evolve_function, integrate_functional, DEFAULT_KERNEL_TOL};
use super::sparse::RateMatrix;
use crate::error::{Error, Result};
use crate::model::{apply_in_place, HypergraphInstance, ProcessSpec, StateSpace};
use crate::par;

/// `rho_ij(state) = sum of r_e over edges holding coordinates i and j`.
pub fn pair_interaction_field(instance: &HypergraphInstance, space: &StateSpace, i: usize, j: usize) -> Vec<f64> {
    par::map_collect(0..space.len(), |a| {
        let s = space.state(a);
        instance.shared_rate(s[i], s[j])
    })
}

/// `E[# interactions of coordinates i, j during [t1, t2]]` from `start`.
pub fn expected_interactions(
    gen: &GeneratorMatrix,
    instance: &HypergraphInstance,
    pair: (usize, usize),
    start: &[usize],
    window: (f64, f64),
) -> Result<f64> {
    let (t1, t2) = window;
    if !(0.0 <= t1 && t1 <= t2) {
        return Err(Error::Precondition(format!("invalid window [{t1}, {t2}]")));
    }
    let k = gen.space().k();
    if pair.0 >= k || pair.1 >= k || pair.0 == pair.1 {
        return Err(Error::Precondition(format!("invalid particle pair {pair:?} for k = {k}")));
    }
    let a = gen.index_of(start)?;
    let rho = pair_interaction_field(instance, gen.space(), pair.0, pair.1);
    let mut v = vec![0.0; gen.dim()];
    v[a] = 1.0;
    let v = evolve_distribution(gen.rates(), &v, t1, DEFAULT_KERNEL_TOL);
    Ok(integrate_functional(gen.rates(), &v, &rho, t2 - t1, DEFAULT_KERNEL_TOL))
}

/// Builds the generator of `spec` and evaluates [`expected_interactions`].
pub fn exact_expected_interactions(
    spec: &ProcessSpec<'_>,
    pair: (usize, usize),
    start: &[usize],
    window: (f64, f64),
    budget: usize,
) -> Result<f64> {
    let gen = super::generator::build_generator(spec, budget)?;
    expected_interactions(&gen, spec.instance, pair, start, window)
}

/// IP(k) together with its killed counterpart, for repeated `P[J_s]` queries.
#[derive(Debug, Clone)]
pub struct ProbJSolver {
    ip: GeneratorMatrix,
    killed: RateMatrix,
}

impl ProbJSolver {
    /// Needs `2 * (n)_k <= budget` (the clean/dirty augmented space).
    pub fn new(instance: &HypergraphInstance, k: usize, budget: usize) -> Result<Self> {
        let states = ProcessSpec::ip(k, instance)?.enumerate_states(usize::MAX)?.len();
        if states.saturating_mul(2) > budget {
            return Err(Error::StateSpaceTooLarge {
                states: 2 * states as u128,
                budget,
            });
        }
        let ip = ip_generator(instance, k, budget)?;
        let killed = killed_generator(instance, ip.space());
        Ok(Self { ip, killed })
    }

    pub fn ip_generator(&self) -> &GeneratorMatrix {
        &self.ip
    }

    pub fn k(&self) -> usize {
        self.ip.space().k()
    }

    /// `P[J_s(x)]` for every state `x`, indexed like the IP(k) space.
    pub fn all(&self, s: f64) -> Vec<f64> {
        let dim = self.ip.dim();
        if self.k() == 1 {
            return vec![1.0; dim];
        }
        let survival = evolve_function(&self.killed, &vec![1.0; dim], s, DEFAULT_KERNEL_TOL);
        evolve_function(self.ip.rates(), &survival, s, DEFAULT_KERNEL_TOL)
            .into_iter()
            .map(|p| p.clamp(0.0, 1.0))
            .collect()
    }

    /// `P[J_s(start)]`.
    pub fn at(&self, start: &[usize], s: f64) -> Result<f64> {
        let a = self.ip.index_of(start)?;
        if self.k() == 1 {
            return Ok(1.0);
        }
        let mut v = vec![0.0; self.ip.dim()];
        v[a] = 1.0;
        let v = evolve_distribution(self.ip.rates(), &v, s, DEFAULT_KERNEL_TOL);
        let survival = evolve_function(&self.killed, &vec![1.0; self.ip.dim()], s, DEFAULT_KERNEL_TOL);
        Ok(v.iter().zip(&survival).map(|(p, u)| p * u).sum::<f64>().clamp(0.0, 1.0))
    }

    /// `min_x P[J_s(x)]`.
    pub fn min(&self, s: f64) -> f64 {
        self.all(s).into_iter().fold(1.0, f64::min)
    }
}

/// IP(k) in which every ring of an edge holding the last particle and at
/// least one other particle kills the chain.
fn killed_generator(instance: &HypergraphInstance, space: &StateSpace) -> RateMatrix {
    let k = space.k();
    let rows_and_kill: Vec<(Vec<(usize, f64)>, f64)> = par::map_collect(0..space.len(), |a| {
        let state = space.state(a);
        let last = state[k - 1];
        let mut touched: Vec<usize> = state
            .iter()
            .flat_map(|&v| instance.edges_at(v).iter().copied())
            .collect();
        touched.sort_unstable();
        touched.dedup();
        let mut row = Vec::new();
        let mut kill = 0.0;
        let mut buf = state.clone();
        for ei in touched {
            let e = &instance.edges()[ei];
            if e.contains(last) && state[..k - 1].iter().any(|&v| e.contains(v)) {
                kill += e.rate();
                continue;
            }
            for w in e.support() {
                if w.p == 0.0 {
                    continue;
                }
                buf.copy_from_slice(&state);
                apply_in_place(&mut buf, e.vertices(), w.perm.images());
                if buf != state {
                    row.push((space.index(&buf).expect("in space"), e.rate() * w.p));
                }
            }
        }
        (row, kill)
    });
    let (rows, kill): (Vec<_>, Vec<_>) = rows_and_kill.into_iter().unzip();
    RateMatrix::from_rows(rows, Some(&kill))
}

/// `P[J_s(start)]` for an IP(k) spec.
pub fn exact_probj(spec: &ProcessSpec<'_>, start: &[usize], s: f64, budget: usize) -> Result<f64> {
    if spec.kind != crate::model::ProcessKind::Ip {
        return Err(Error::InvalidProcess("J_s is defined for interchange processes".into()));
    }
    ProbJSolver::new(spec.instance, spec.k, budget)?.at(start, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::model::state::DEFAULT_STATE_BUDGET as B;

    #[test]
    fn complete_graph_closed_form() {
        for (n, k) in [(4, 2), (5, 3), (5, 4)] {
            let kn = generators::complete(n).unwrap();
            let solver = ProbJSolver::new(&kn, k, B).unwrap();
            for s in [0.1, 0.5, 1.3] {
                let expect = (-((k - 1) as f64) * s).exp();
                for p in solver.all(s) {
                    assert!((p - expect).abs() < 1e-10, "n={n} k={k} s={s}: {p} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn single_particle_is_vacuous() {
        let c5 = generators::cycle(5).unwrap();
        assert_eq!(exact_probj(&ProcessSpec::ip(1, &c5).unwrap(), &[2], 1.0, B).unwrap(), 1.0);
    }

    #[test]
    fn complete_graph_interactions_are_linear_in_time() {
        let k5 = generators::complete(5).unwrap();
        let spec = ProcessSpec::ip(2, &k5).unwrap();
        assert_eq!(exact_expected_interactions(&spec, (0, 1), &[0, 3], (0.7, 0.7), B).unwrap(), 0.0);
        let got = exact_expected_interactions(&spec, (0, 1), &[0, 3], (0.5, 2.0), B).unwrap();
        assert!((got - 1.5).abs() < 1e-9);
    }

    #[test]
    fn stationary_average_is_pair_interaction_rate() {
        for inst in [generators::cycle(5).unwrap(), generators::complete_uniform(5, 3).unwrap()] {
            let gen = ip_generator(&inst, 2, B).unwrap();
            let s = 0.8;
            let total: f64 = gen
                .space()
                .iter()
                .map(|x| expected_interactions(&gen, &inst, (0, 1), &x, (0.0, s)).unwrap())
                .sum();
            let avg = total / gen.dim() as f64;
            assert!((avg - s * inst.pair_interaction_rate()).abs() < 1e-8);
        }
    }
}
