//! Dirichlet forms of IP(2) and Q(2) on `(V)_2`, split into the named terms
//! of the comparison argument.
//!
//! Every term is a sum `Σ w(a, b) (f(a) - f(b))^2` over ordered pairs and is
//! stored as a [`PairForm`], so it can be evaluated on many test functions
//! or turned into a symmetric matrix for the generalized eigenproblem.
//! The uniform measure on `(V)_2` is `π = 1/(n(n-1))`; the classical
//! `1/C(n,2)` prefactor differs by the factor 2 on every term alike.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{build_censored_q2, build_generator, GeneratorMatrix};
use crate::model::{HypergraphInstance, PermutationLaw, ProcessSpec, SpaceKind, StateSpace};

/// Absolute tolerance for reconciling a decomposition with its generator.
pub const RECONCILE_TOL: f64 = 1e-10;

/// A real function on the states of an enumerated space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    values: Vec<f64>,
}

impl TestFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("test function value at {i} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn constant(len: usize, c: f64) -> Self {
        Self { values: vec![c; len] }
    }

    pub fn indicator(len: usize, i: usize) -> Self {
        let mut values = vec![0.0; len];
        values[i] = 1.0;
        Self { values }
    }

    /// I.i.d. standard normal values.
    pub fn standard_normal<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self {
            values: (0..len).map(|_| rng.sample(StandardNormal)).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean under the uniform measure.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Variance under the uniform measure.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.values.len() as f64
    }

    pub fn centered(&self) -> Self {
        let m = self.mean();
        Self {
            values: self.values.iter().map(|v| v - m).collect(),
        }
    }

    /// Mean zero and unit variance, or `None` for (numerically) constant f.
    pub fn normalized(&self) -> Option<Self> {
        let var = self.variance();
        let scale = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if var <= 1e-24 * scale.max(1.0) * scale.max(1.0) {
            return None;
        }
        let s = var.sqrt();
        let m = self.mean();
        Some(Self {
            values: self.values.iter().map(|v| (v - m) / s).collect(),
        })
    }
}

/// `Σ w (f(a) - f(b))^2` over a list of weighted ordered pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairForm {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl PairForm {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn add(&mut self, a: usize, b: usize, w: f64) {
        if a != b && w != 0.0 {
            self.entries.push((a, b, w));
        }
    }

    /// `½ Σ π(a) q(a, b) (f(a) - f(b))^2` for a generator with stationary law.
    pub fn from_generator(gen: &GeneratorMatrix) -> Result<Self> {
        let pi = gen.stationary().ok_or(Error::Reducible)?;
        let mut form = Self::new(gen.dim());
        for (a, b, q) in gen.rates().triplets() {
            form.add(a, b, 0.5 * pi[a] * q);
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn eval(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.dim, "test function has wrong length");
        self.entries
            .iter()
            .map(|&(a, b, w)| {
                let d = f[a] - f[b];
                w * d * d
            })
            .sum()
    }

    /// Symmetric `L` with `f^T L f = self.eval(f)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(a, b, w) in &self.entries {
            m[(a, a)] += w;
            m[(b, b)] += w;
            m[(a, b)] -= w;
            m[(b, a)] -= w;
        }
        m
    }

    pub fn sum(forms: &[&PairForm]) -> Self {
        let dim = forms.first().map_or(0, |f| f.dim);
        let mut out = Self::new(dim);
        for f in forms {
            assert_eq!(f.dim, dim);
            out.entries.extend_from_slice(&f.entries);
        }
        out
    }
}

/// A form's total with its named pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormBreakdown {
    pub total: f64,
    pub terms: BTreeMap<String, f64>,
}

impl FormBreakdown {
    pub fn term(&self, name: &str) -> f64 {
        self.terms.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn sum_of(&self, names: &[&str]) -> f64 {
        names.iter().map(|n| self.term(n)).sum()
    }
}

/// Edges as `(vertices, rate)` under the uniform law. A transposition at
/// rate `r` is the uniform law on two vertices at rate `2r`.
pub fn uniform_edges(instance: &HypergraphInstance) -> Result<Vec<(Vec<usize>, f64)>> {
    instance
        .edges()
        .iter()
        .map(|e| match e.law() {
            PermutationLaw::Uniform => Ok((e.vertices().to_vec(), e.rate())),
            PermutationLaw::Transposition => Ok((e.vertices().to_vec(), 2.0 * e.rate())),
            PermutationLaw::Explicit(_) => Err(Error::NonUniformLaw),
        })
        .collect()
}

/// Edge sums used by the explicit formulas, indexed by vertices.
struct EdgeSums {
    n: usize,
    edges: Vec<(Vec<bool>, usize, f64)>,
}

impl EdgeSums {
    fn new(n: usize, edges: &[(Vec<usize>, f64)]) -> Self {
        let edges = edges
            .iter()
            .map(|(vs, r)| {
                let mut member = vec![false; n];
                for &v in vs {
                    member[v] = true;
                }
                (member, vs.len(), *r)
            })
            .collect();
        Self { n, edges }
    }

    /// `Σ_e g(e)` over edges whose membership satisfies `pred`.
    fn sum(&self, pred: impl Fn(&[bool]) -> bool, g: impl Fn(usize, f64) -> f64) -> f64 {
        self.edges
            .iter()
            .filter(|(m, _, _)| pred(m))
            .map(|&(_, s, r)| g(s, r))
            .sum()
    }

    /// `Σ_{e ∋ u} r_e`.
    fn s(&self, u: usize) -> f64 {
        self.sum(|m| m[u], |_, r| r)
    }

    /// `Σ_{e ∋ u, v} r_e / (2|e|)`.
    fn a(&self, u: usize, v: usize) -> f64 {
        self.sum(|m| m[u] && m[v], |s, r| r / (2.0 * s as f64))
    }

    /// `Σ_{e ∋ u, v} r_e / (|e| - 1)`.
    fn b(&self, u: usize, v: usize) -> f64 {
        self.sum(|m| m[u] && m[v], |s, r| r / (s as f64 - 1.0))
    }
}

/// The three terms of the IP(2) form and the generator-based total.
#[derive(Debug, Clone)]
pub struct Ip2Forms {
    pub space: StateSpace,
    pub total: PairForm,
    /// Both coordinates in the ringing edge.
    pub eip2_1: PairForm,
    /// Only the second coordinate moves.
    pub eip2_2: PairForm,
    /// Only the first coordinate moves.
    pub eip2_3: PairForm,
}

impl Ip2Forms {
    pub fn build(instance: &HypergraphInstance, budget: usize) -> Result<Self> {
        let edges = uniform_edges(instance)?;
        let gen = build_generator(&ProcessSpec::ip(2, instance)?, budget)?;
        let space = gen.space().clone();
        let total = PairForm::from_generator(&gen)?;
        let n = instance.n();
        let pi = 1.0 / (n * (n - 1)) as f64;
        let sums = EdgeSums::new(n, &edges);
        let len = space.len();
        let (mut t1, mut t2, mut t3) = (PairForm::new(len), PairForm::new(len), PairForm::new(len));
        for ai in 0..len {
            let a = space.state(ai);
            for bi in 0..len {
                if bi == ai {
                    continue;
                }
                let b = space.state(bi);
                let w1 = sums.sum(
                    |m| m[a[0]] && m[a[1]] && m[b[0]] && m[b[1]],
                    |s, r| r / (s * (s - 1)) as f64,
                );
                t1.add(ai, bi, 0.5 * pi * w1);
                if b[0] == a[0] {
                    let w = sums.sum(|m| !m[a[0]] && m[a[1]] && m[b[1]], |s, r| r / s as f64);
                    t2.add(ai, bi, 0.5 * pi * w);
                }
                if b[1] == a[1] {
                    let w = sums.sum(|m| !m[a[1]] && m[a[0]] && m[b[0]], |s, r| r / s as f64);
                    t3.add(ai, bi, 0.5 * pi * w);
                }
            }
        }
        debug_assert_eq!(sums.n, n);
        Ok(Self {
            space,
            total,
            eip2_1: t1,
            eip2_2: t2,
            eip2_3: t3,
        })
    }

    pub fn breakdown(&self, f: &TestFunction) -> FormBreakdown {
        let v = f.values();
        let terms = BTreeMap::from([
            ("EIP2_1".to_string(), self.eip2_1.eval(v)),
            ("EIP2_2".to_string(), self.eip2_2.eval(v)),
            ("EIP2_3".to_string(), self.eip2_3.eval(v)),
        ]);
        FormBreakdown {
            total: self.total.eval(v),
            terms,
        }
    }

    /// The sum of the three displayed terms.
    pub fn decomposed(&self) -> PairForm {
        PairForm::sum(&[&self.eip2_1, &self.eip2_2, &self.eip2_3])
    }
}

/// Names of the Q(2) pattern terms, in order.
pub const Q2_PATTERNS: [&str; 4] = ["EQ2_1", "EQ2_2", "EQ2_3", "EQ2_4"];

/// Q(2) form: generator total, the four pattern terms classified from the
/// censored rates, and the explicit sub-terms.
#[derive(Debug, Clone)]
pub struct Q2Forms {
    pub space: StateSpace,
    pub generator: GeneratorMatrix,
    pub total: PairForm,
    /// `y(1)=x(1)`, `y(2)=x(2)`, `y(2)=x(1)`, `y(1)=x(2)`.
    pub patterns: [PairForm; 4],
    /// Censored transitions matching no pattern; empty when the
    /// classification is complete.
    pub other: PairForm,
    pub simple1: PairForm,
    pub simple2: PairForm,
    pub compound: PairForm,
    pub decomp: [PairForm; 3],
    pub term3: PairForm,
    pub term3pt: [PairForm; 4],
}

impl Q2Forms {
    pub fn build(instance: &HypergraphInstance, budget: usize) -> Result<Self> {
        let edges = uniform_edges(instance)?;
        let generator = build_censored_q2(instance, budget)?;
        let space = generator.space().clone();
        debug_assert_eq!(space.kind(), SpaceKind::Injective);
        let total = PairForm::from_generator(&generator)?;
        let n = instance.n();
        let pi = 1.0 / (n * (n - 1)) as f64;
        let len = space.len();
        let states: Vec<Vec<usize>> = space.iter().collect();
        let idx = |x: usize, y: usize| space.index(&[x, y]).expect("distinct pair");

        let mut patterns: [PairForm; 4] = std::array::from_fn(|_| PairForm::new(len));
        let mut other = PairForm::new(len);
        for (a, b, q) in generator.rates().triplets() {
            if a == b {
                continue;
            }
            let (x, y) = (&states[a], &states[b]);
            let w = 0.5 * pi * q;
            let hits = [y[0] == x[0], y[1] == x[1], y[1] == x[0], y[0] == x[1]];
            if !hits.iter().any(|&h| h) {
                other.add(a, b, w);
            }
            for (p, hit) in patterns.iter_mut().zip(hits) {
                if hit {
                    p.add(a, b, w);
                }
            }
        }

        let sums = EdgeSums::new(n, &edges);
        let s: Vec<f64> = (0..n).map(|u| sums.s(u)).collect();
        let mut simple1 = PairForm::new(len);
        let mut simple2 = PairForm::new(len);
        let mut compound = PairForm::new(len);
        let mut decomp: [PairForm; 3] = std::array::from_fn(|_| PairForm::new(len));
        let mut term3 = PairForm::new(len);
        let mut term3pt: [PairForm; 4] = std::array::from_fn(|_| PairForm::new(len));
        let half = 0.5 * pi;
        let three_halves = 1.5 * pi;

        for (xi, x) in states.iter().enumerate() {
            let (x1, x2) = (x[0], x[1]);
            // y(1) = x(1): direct moves and the detour through the diagonal.
            for v in 0..n {
                if v == x1 || v == x2 {
                    continue;
                }
                let yi = idx(x1, v);
                simple1.add(xi, yi, half * sums.sum(|m| !m[x1] && m[x2] && m[v], |s, r| r / s as f64));
                simple2.add(xi, yi, half * sums.sum(|m| m[x1] && m[x2] && m[v], |s, r| r / s as f64));
                compound.add(xi, yi, half * sums.a(x1, x2) * sums.b(x1, v) / s[x1]);
            }
            // decomp1: w = (w1, x2).
            for w1 in 0..n {
                if w1 == x1 || w1 == x2 {
                    continue;
                }
                decomp[0].add(xi, idx(w1, x2), three_halves * sums.a(x1, x2) * sums.b(x1, w1) / s[x1]);
            }
            // decomp2 with w = x: z = (x1, z2).
            for z2 in 0..n {
                if z2 == x1 || z2 == x2 {
                    continue;
                }
                decomp[1].add(xi, idx(x1, z2), three_halves * sums.a(x2, z2) * sums.b(x1, z2) / s[z2]);
            }
            // decomp3 with z = x: Σ_{x(2) ∈ V} Σ_{e ∋ z(2), x(2)} r_e/(2|e|) = Σ_{e ∋ z(2)} r_e/2.
            let inner: f64 = (0..n).map(|u| sums.a(x2, u)).sum();
            decomp[2].add(xi, idx(x2, x1), three_halves * inner * sums.b(x1, x2) / s[x2]);

            // y(2) = x(1): particle 2 hits x(1), then one of the pair leaves.
            for y1 in 0..n {
                if y1 == x1 {
                    continue;
                }
                let yi = idx(y1, x1);
                let w = half * 2.0 * sums.a(x1, x2) * 0.5 * sums.b(y1, x1) / s[x1];
                term3.add(xi, yi, w);
            }
            // term3pt1/2 with z = (z1, x2).
            for z1 in 0..n {
                if z1 == x1 || z1 == x2 {
                    continue;
                }
                let zi = idx(z1, x2);
                let lead = half * 2.0 * 2.0 * sums.a(x1, x2) / s[x1];
                let inside = sums.sum(|m| m[z1] && m[x1] && m[x2], |s, r| r / (2.0 * (s as f64 - 1.0)));
                let outside = sums.sum(|m| m[z1] && m[x1] && !m[x2], |s, r| r / (2.0 * (s as f64 - 1.0)));
                term3pt[0].add(xi, zi, lead * inside);
                term3pt[1].add(xi, zi, lead * outside);
            }
            // term3pt3/4, written with z = x and y = (x1, y2).
            for y2 in 0..n {
                if y2 == x1 || y2 == x2 {
                    continue;
                }
                let yi = idx(x1, y2);
                let lead = half * 2.0 * 0.5 * sums.b(x1, y2) / s[y2];
                let inside = sums.sum(|m| m[y2] && m[x2] && m[x1], |s, r| r / s as f64);
                let outside = sums.sum(|m| m[y2] && m[x2] && !m[x1], |s, r| r / s as f64);
                term3pt[2].add(yi, xi, lead * inside);
                term3pt[3].add(yi, xi, lead * outside);
            }
        }

        Ok(Self {
            space,
            generator,
            total,
            patterns,
            other,
            simple1,
            simple2,
            compound,
            decomp,
            term3,
            term3pt,
        })
    }

    /// Pattern terms summed; dominates the total because swaps are counted
    /// in both of the last two patterns.
    pub fn pattern_sum(&self) -> PairForm {
        PairForm::sum(&[&self.patterns[0], &self.patterns[1], &self.patterns[2], &self.patterns[3]])
    }

    pub fn breakdown(&self, f: &TestFunction) -> FormBreakdown {
        let v = f.values();
        let mut terms = BTreeMap::new();
        for (name, p) in Q2_PATTERNS.iter().zip(&self.patterns) {
            terms.insert(name.to_string(), p.eval(v));
        }
        terms.insert("other".into(), self.other.eval(v));
        terms.insert("simple1".into(), self.simple1.eval(v));
        terms.insert("simple2".into(), self.simple2.eval(v));
        terms.insert("compound".into(), self.compound.eval(v));
        for (i, d) in self.decomp.iter().enumerate() {
            terms.insert(format!("decomp{}", i + 1), d.eval(v));
        }
        terms.insert("term3".into(), self.term3.eval(v));
        for (i, t) in self.term3pt.iter().enumerate() {
            terms.insert(format!("term3pt{}", i + 1), t.eval(v));
        }
        FormBreakdown {
            total: self.total.eval(v),
            terms,
        }
    }
}

fn check_len(space: &StateSpace, f: &TestFunction) -> Result<()> {
    if f.len() != space.len() {
        return Err(Error::Precondition(format!(
            "test function has {} values, (V)_2 has {} states",
            f.len(),
            space.len()
        )));
    }
    Ok(())
}

/// IP(2) form with its three-term decomposition, reconciled with the
/// generator.
pub fn dirichlet_ip2(instance: &HypergraphInstance, f: &TestFunction, budget: usize) -> Result<FormBreakdown> {
    let forms = Ip2Forms::build(instance, budget)?;
    check_len(&forms.space, f)?;
    let out = forms.breakdown(f);
    let sum = out.sum_of(&["EIP2_1", "EIP2_2", "EIP2_3"]);
    if (sum - out.total).abs() > RECONCILE_TOL * out.total.abs().max(1.0) {
        return Err(Error::Internal(format!(
            "IP(2) decomposition {sum} disagrees with generator form {}",
            out.total
        )));
    }
    Ok(out)
}

/// Q(2) form with pattern terms and explicit sub-terms.
pub fn dirichlet_q2(instance: &HypergraphInstance, f: &TestFunction, budget: usize) -> Result<FormBreakdown> {
    let forms = Q2Forms::build(instance, budget)?;
    check_len(&forms.space, f)?;
    Ok(forms.breakdown(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::model::DEFAULT_STATE_BUDGET;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_function_has_zero_form() {
        let g = generators::complete(4).unwrap();
        let f = TestFunction::constant(12, 3.5);
        let ip = dirichlet_ip2(&g, &f, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(ip.total, 0.0);
        assert!(ip.terms.values().all(|&v| v == 0.0));
        let q = dirichlet_q2(&g, &f, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(q.total, 0.0);
        assert!(q.terms.values().all(|&v| v == 0.0));
    }

    #[test]
    fn indicator_on_k3_matches_direct_sum() {
        let g = generators::complete(3).unwrap();
        let gen = build_generator(&ProcessSpec::ip(2, &g).unwrap(), DEFAULT_STATE_BUDGET).unwrap();
        let q = gen.to_dense();
        let f = TestFunction::indicator(6, 0);
        // Oracle: ½ Σ π(a) π-free q(a, b) (Δf)^2 with π = 1/6.
        let mut direct = 0.0;
        for a in 0..6 {
            for b in 0..6 {
                if a != b {
                    let d = f.values()[a] - f.values()[b];
                    direct += 0.5 / 6.0 * q[(a, b)] * d * d;
                }
            }
        }
        let ip = dirichlet_ip2(&g, &f, DEFAULT_STATE_BUDGET).unwrap();
        assert!((ip.total - direct).abs() < 1e-12);
    }

    #[test]
    fn non_uniform_law_is_refused() {
        let g = generators::three_cycle_instance();
        let f = TestFunction::constant(12, 0.0);
        assert_eq!(dirichlet_ip2(&g, &f, DEFAULT_STATE_BUDGET).unwrap_err(), Error::NonUniformLaw);
        assert_eq!(dirichlet_q2(&g, &f, DEFAULT_STATE_BUDGET).unwrap_err(), Error::NonUniformLaw);
    }

    #[test]
    fn k4_patterns_cover_every_censored_rate() {
        let g = generators::complete(4).unwrap();
        let forms = Q2Forms::build(&g, DEFAULT_STATE_BUDGET).unwrap();
        assert!(forms.other.entries().is_empty());
    }

    #[test]
    fn explicit_sub_terms_match_censored_rates_for_equal_edge_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in [
            generators::cycle(5).unwrap(),
            generators::complete_uniform(5, 3).unwrap(),
            generators::star(5).unwrap(),
        ] {
            let forms = Q2Forms::build(&g, DEFAULT_STATE_BUDGET).unwrap();
            for _ in 0..5 {
                let f = TestFunction::standard_normal(forms.space.len(), &mut rng);
                let b = forms.breakdown(&f);
                let sub = b.sum_of(&["simple1", "simple2", "compound"]);
                assert!((sub - b.term("EQ2_1")).abs() < 1e-10, "{sub} vs {}", b.term("EQ2_1"));
                assert!(b.sum_of(&Q2_PATTERNS) >= b.total - 1e-10);
            }
        }
    }

    #[test]
    fn ip2_terms_reconcile_on_a_hypergraph() {
        let g = generators::complete_uniform(5, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let f = TestFunction::standard_normal(20, &mut rng);
            dirichlet_ip2(&g, &f, DEFAULT_STATE_BUDGET).unwrap();
        }
    }

    #[test]
    fn pair_form_matrix_agrees_with_eval() {
        let g = generators::cycle(4).unwrap();
        let forms = Ip2Forms::build(&g, DEFAULT_STATE_BUDGET).unwrap();
        let m = forms.total.matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = TestFunction::standard_normal(12, &mut rng);
        let v = nalgebra::DVector::from_column_slice(f.values());
        assert!(((v.transpose() * &m * &v)[(0, 0)] - forms.total.eval(f.values())).abs() < 1e-12);
    }

    #[test]
    fn normalization() {
        let f = TestFunction::new(vec![1.0, 2.0, 3.0, 6.0]).unwrap().normalized().unwrap();
        assert!(f.mean().abs() < 1e-15);
        assert!((f.variance() - 1.0).abs() < 1e-12);
        assert!(TestFunction::constant(4, 2.0).normalized().is_none());
        assert!(TestFunction::new(vec![f64::NAN]).is_err());
    }
}
