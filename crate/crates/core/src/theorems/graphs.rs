//! Graph-specific ingredients: negative correlation, the interaction bound
//! under heat-kernel decay, and relaxation-time regressions.

use super::{ASSERT_MIX_TOL, EXACT_TOL};
use crate::dirichlet::forms::uniform_edges;
use crate::error::{Error, Result};
use crate::exact::tv::mixing_time_tol;
use crate::exact::{build_generator, expected_interactions, relaxation_time, transition_matrix, Kernel};
use crate::model::{HypergraphInstance, ProcessSpec};
use crate::par;
use crate::report::VerificationReport;

/// Relative tolerance of the relaxation-time regression on graphs.
pub const CLR_TOL: f64 = 1e-8;

fn require_graph(instance: &HypergraphInstance) -> Result<()> {
    if instance.is_graph() {
        Ok(())
    } else {
        Err(Error::NotAGraph(
            "every edge must have two vertices and the transposition law".into(),
        ))
    }
}

/// Unordered vertex pairs lying together in some edge.
fn edge_pairs(instance: &HypergraphInstance) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = instance
        .edges()
        .iter()
        .flat_map(|e| {
            let v = e.vertices();
            (0..v.len()).flat_map(move |i| (i + 1..v.len()).map(move |j| (v[i], v[j])))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Largest `P[a, b both in {x, y}] - P[a in {x, y}] P[b in {x, y}]` at time
/// `t`, with the maximizing `(a, b, x, y)` and the number of combinations.
fn correlation_excess(
    instance: &HypergraphInstance,
    t: f64,
    budget: usize,
) -> Result<(f64, [usize; 4], usize)> {
    let ip2 = build_generator(&ProcessSpec::ip(2, instance)?, budget)?;
    let rw1 = build_generator(&ProcessSpec::rw(1, instance)?, budget)?;
    let k2: Kernel = transition_matrix(&ip2, t)?;
    let k1: Kernel = transition_matrix(&rw1, t)?;
    let space = ip2.space();
    let pairs = edge_pairs(instance);
    let per_start = par::map_collect(0..space.len(), |ab| {
        let s = space.state(ab);
        let (a, b) = (s[0], s[1]);
        let mut best = (f64::NEG_INFINITY, [a, b, 0, 0]);
        for &(x, y) in &pairs {
            let xy = space.index(&[x, y]).expect("distinct");
            let yx = space.index(&[y, x]).expect("distinct");
            let joint = k2.get(ab, xy) + k2.get(ab, yx);
            let ma = k1.get(a, x) + k1.get(a, y);
            let mb = k1.get(b, x) + k1.get(b, y);
            let excess = joint - ma * mb;
            if excess > best.0 {
                best = (excess, [a, b, x, y]);
            }
        }
        best
    });
    let count = per_start.len() * pairs.len();
    let (excess, witness) = per_start
        .into_iter()
        .fold((f64::NEG_INFINITY, [0; 4]), |acc, b| if b.0 > acc.0 { b } else { acc });
    Ok((excess, witness, count))
}

const NEG_CORR_TOL: f64 = 1e-10;

/// Negative correlation of two interchange particles over an edge, for
/// every `a != b` and every edge `{x, y}`.
pub fn verify_negative_correlation(instance: &HypergraphInstance, t: f64, budget: usize) -> Result<VerificationReport> {
    require_graph(instance)?;
    let (excess, w, count) = correlation_excess(instance, t, budget)?;
    Ok(VerificationReport::exact("negative correlation", excess, 0.0, NEG_CORR_TOL)
        .param("t", t)
        .param("combinations", count as f64)
        .note(format!("worst (a, b, x, y) = ({}, {}, {}, {})", w[0], w[1], w[2], w[3])))
}

/// The same quantity on any instance, with `{x, y}` ranging over pairs
/// inside an edge. Reported, never asserted.
pub fn negative_correlation_exploratory(
    instance: &HypergraphInstance,
    t: f64,
    budget: usize,
) -> Result<VerificationReport> {
    let (excess, w, count) = correlation_excess(instance, t, budget)?;
    Ok(VerificationReport::exploratory("negative correlation (hypergraph)", excess, 0.0, NEG_CORR_TOL)
        .param("t", t)
        .param("combinations", count as f64)
        .note(format!("worst (a, b, x, y) = ({}, {}, {}, {})", w[0], w[1], w[2], w[3])))
}

fn regular_unit_graph(instance: &HypergraphInstance) -> Result<usize> {
    require_graph(instance)?;
    let d = instance
        .regular_degree()
        .ok_or_else(|| Error::Precondition("the interaction bound needs a regular graph".into()))?;
    if instance.edges().iter().any(|e| e.rate() != 1.0) {
        return Err(Error::Precondition("the interaction bound needs unit edge rates".into()));
    }
    Ok(d)
}

/// `max_a |Σ_x Σ_{y~x} (p_t(a,x)^2 + p_t(a,y)^2) - 2 d p_{2t}(a,a)|`.
pub fn en_identity_residual(instance: &HypergraphInstance, t: f64, budget: usize) -> Result<f64> {
    let d = regular_unit_graph(instance)?;
    let rw1 = build_generator(&ProcessSpec::rw(1, instance)?, budget)?;
    let p = transition_matrix(&rw1, t)?;
    let p2 = transition_matrix(&rw1, 2.0 * t)?;
    let n = instance.n();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let mut lhs = 0.0;
        for e in instance.edges() {
            let (x, y) = (e.vertices()[0], e.vertices()[1]);
            // both orientations of the edge
            lhs += 2.0 * (p.get(a, x).powi(2) + p.get(a, y).powi(2));
        }
        worst = worst.max((lhs - 2.0 * d as f64 * p2.get(a, a)).abs());
    }
    Ok(worst)
}

/// The identity at `t` and `E[N_{(s,2s)}(a,b)] <= 4d(s/n + s(max_z p_{2s}(z,z) - 1/n))`
/// with `s = α t_mix^{RW(1)}(ε)`, over all `a != b`.
pub fn verify_interaction_bound_en(
    instance: &HypergraphInstance,
    eps: f64,
    alpha: f64,
    budget: usize,
) -> Result<Vec<VerificationReport>> {
    let d = regular_unit_graph(instance)? as f64;
    if !(alpha > 0.0) {
        return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    let n = instance.n() as f64;
    let rw1 = build_generator(&ProcessSpec::rw(1, instance)?, budget)?;
    let s = alpha * mixing_time_tol(&rw1, eps, ASSERT_MIX_TOL)?;
    let identity = en_identity_residual(instance, s, budget)?;
    let p2 = transition_matrix(&rw1, 2.0 * s)?;
    let max_diag = (0..instance.n()).map(|z| p2.get(z, z)).fold(0.0, f64::max);
    let rhs = 4.0 * d * (s / n + s * (max_diag - 1.0 / n));

    let ip2 = build_generator(&ProcessSpec::ip(2, instance)?, budget)?;
    let space = ip2.space();
    let counts = par::map_collect(0..space.len(), |i| {
        expected_interactions(&ip2, instance, (0, 1), &space.state(i), (s, 2.0 * s))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let (arg, worst) = counts
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let pair = space.state(arg);
    Ok(vec![
        VerificationReport::exact("heat kernel sum identity", identity, 0.0, 1e-10)
            .param("t", s)
            .param("d", d),
        VerificationReport::exact("interaction bound E[N]", worst, rhs, EXACT_TOL)
            .param("s", s)
            .param("eps", eps)
            .param("alpha", alpha)
            .param("d", d)
            .note(format!("worst start ({}, {})", pair[0], pair[1])),
    ])
}

/// `t_rel^{IP(k)} = t_rel^{RW(1)}` on a graph, each k.
pub fn clr_regression(instance: &HypergraphInstance, ks: &[usize], budget: usize) -> Result<Vec<VerificationReport>> {
    require_graph(instance)?;
    let t1 = relaxation_time(&build_generator(&ProcessSpec::rw(1, instance)?, budget)?)?;
    ks.iter()
        .map(|&k| {
            let tk = relaxation_time(&build_generator(&ProcessSpec::ip(k, instance)?, budget)?)?;
            Ok(VerificationReport::exact("relaxation time IP(k) = RW(1)", ((tk - t1) / t1).abs(), 0.0, CLR_TOL)
                .param("k", k as f64)
                .param("t_rel_ipk", tk)
                .param("t_rel_rw1", t1))
        })
        .collect()
}

/// `t_rel^{IP(k)} / t_rel^{RW(1)}` for uniform-law instances. The k = 2
/// ratio is asserted against the explicit 120; larger k are reported.
pub fn relaxation_ratios(instance: &HypergraphInstance, ks: &[usize], budget: usize) -> Result<Vec<VerificationReport>> {
    uniform_edges(instance)?;
    let t1 = relaxation_time(&build_generator(&ProcessSpec::rw(1, instance)?, budget)?)?;
    ks.iter()
        .map(|&k| {
            let tk = relaxation_time(&build_generator(&ProcessSpec::ip(k, instance)?, budget)?)?;
            let rep = if k == 2 {
                VerificationReport::exact("t_rel IP(k) <= 120 t_rel RW(1)", tk, 120.0 * t1, EXACT_TOL * t1.max(1.0))
            } else {
                VerificationReport::exploratory("t_rel IP(k) / t_rel RW(1)", tk, t1, 0.0)
            };
            Ok(rep.param("k", k as f64).param("ratio", tk / t1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::model::DEFAULT_STATE_BUDGET;

    #[test]
    fn c5_negative_correlation() {
        let g = generators::cycle(5).unwrap();
        let r = verify_negative_correlation(&g, 1.0, DEFAULT_STATE_BUDGET).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.params["combinations"], 20.0 * 5.0);
    }

    #[test]
    fn at_time_zero_disjoint_starts_give_zero_joint() {
        // joint is 0 unless {a, b} = {x, y}; then 1 = 1 * 1
        let g = generators::cycle(5).unwrap();
        let r = verify_negative_correlation(&g, 0.0, DEFAULT_STATE_BUDGET).unwrap();
        assert!(r.lhs.abs() < 1e-12);
    }

    #[test]
    fn hypergraphs_are_refused_but_explorable() {
        let g = generators::complete_uniform(5, 3).unwrap();
        assert!(matches!(verify_negative_correlation(&g, 1.0, DEFAULT_STATE_BUDGET), Err(Error::NotAGraph(_))));
        let r = negative_correlation_exploratory(&g, 1.0, DEFAULT_STATE_BUDGET).unwrap();
        assert!(!r.asserted && r.lhs.is_finite());
    }

    #[test]
    fn identity_on_c6() {
        let g = generators::cycle(6).unwrap();
        assert!(en_identity_residual(&g, 0.7, DEFAULT_STATE_BUDGET).unwrap() < 1e-10);
    }

    #[test]
    fn irregular_graph_is_refused() {
        let g = generators::path(5).unwrap();
        assert!(verify_interaction_bound_en(&g, 0.25, 1.0, DEFAULT_STATE_BUDGET).is_err());
    }

    #[test]
    fn clr_on_k4() {
        let g = generators::complete(4).unwrap();
        let reps = clr_regression(&g, &[2, 3], DEFAULT_STATE_BUDGET).unwrap();
        assert!(reps.iter().all(|r| r.pass), "{reps:#?}");
    }
}
