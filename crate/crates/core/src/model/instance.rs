//! Hypergraph instances: vertices, rated hyperedges and per-edge permutation laws.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::perm::{EdgePermutation, PermutationLaw, WeightedPermutation};
use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// A hyperedge with its ring rate and permutation law.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperedge {
    vertices: Vec<usize>,
    rate: f64,
    law: PermutationLaw,
    support: Vec<WeightedPermutation>,
}

impl Hyperedge {
    /// Builds an edge; the vertex list is sorted into canonical order.
    pub fn new(mut vertices: Vec<usize>, rate: f64, law: PermutationLaw) -> Self {
        vertices.sort_unstable();
        let support = law.support(&vertices).unwrap_or_default();
        Self {
            vertices,
            rate,
            law,
            support,
        }
    }

    pub fn transposition(u: usize, v: usize, rate: f64) -> Self {
        Self::new(vec![u, v], rate, PermutationLaw::Transposition)
    }

    pub fn uniform(vertices: Vec<usize>, rate: f64) -> Self {
        Self::new(vertices, rate, PermutationLaw::Uniform)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn law(&self) -> &PermutationLaw {
        &self.law
    }

    /// Support of the law, with zero-probability entries kept.
    pub fn support(&self) -> &[WeightedPermutation] {
        &self.support
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Probability under the law that `u` is sent to `v`.
    pub fn move_probability(&self, u: usize, v: usize) -> f64 {
        if !self.contains(u) {
            return if u == v { 1.0 } else { 0.0 };
        }
        self.support
            .iter()
            .filter(|w| w.perm.image(&self.vertices, u) == v)
            .map(|w| w.p)
            .sum()
    }

    fn violations(&self, index: usize, n: usize, out: &mut Vec<Violation>) {
        let push = |out: &mut Vec<Violation>, kind, msg: String| {
            out.push(Violation {
                kind,
                edge: Some(index),
                message: msg,
            })
        };
        let v = &self.vertices;
        if v.len() < 2 {
            push(out, ViolationKind::EdgeTooSmall, format!("edge {index} has {} vertices", v.len()));
        }
        if v.len() > n {
            push(out, ViolationKind::EdgeTooLarge, format!("edge {index} has {} > n vertices", v.len()));
        }
        if let Some(&bad) = v.iter().find(|&&x| x >= n) {
            push(out, ViolationKind::VertexOutOfRange, format!("edge {index} has vertex {bad} >= n = {n}"));
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            push(out, ViolationKind::DuplicateVertex, format!("edge {index} repeats a vertex"));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            push(out, ViolationKind::NonpositiveRate, format!("edge {index} has nonpositive rate {}", self.rate));
        }
        if let Err(e) = self.law.support(v) {
            push(out, ViolationKind::InvalidLaw, format!("edge {index}: {e}"));
            return;
        }
        let mut total = 0.0;
        for w in &self.support {
            if !(w.p >= 0.0 && w.p.is_finite()) {
                push(out, ViolationKind::NegativeProbability, format!("edge {index} has probability {}", w.p));
            }
            if let Err(e) = w.perm.check_bijection(v) {
                push(out, ViolationKind::InvalidPermutation, format!("edge {index}: {e}"));
            }
            total += w.p;
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            push(out, ViolationKind::LawNotNormalized, format!("edge {index}: law not normalized (sum {total})"));
        }
    }
}

/// Kinds of invariant violations reported by [`HypergraphInstance::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    TooFewVertices,
    EdgeTooSmall,
    EdgeTooLarge,
    VertexOutOfRange,
    DuplicateVertex,
    NonpositiveRate,
    LawNotNormalized,
    NegativeProbability,
    InvalidPermutation,
    InvalidLaw,
    MoveGraphDisconnected,
}

impl ViolationKind {
    /// Violations that make an instance structurally unusable.
    pub fn is_structural(self) -> bool {
        !matches!(self, ViolationKind::MoveGraphDisconnected)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub edge: Option<usize>,
    pub message: String,
}

/// Result of validating an instance. Empty `violations` means valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub move_graph_connected: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn structural_error(&self) -> Option<Error> {
        let msgs: Vec<&str> = self
            .violations
            .iter()
            .filter(|v| v.kind.is_structural())
            .map(|v| v.message.as_str())
            .collect();
        (!msgs.is_empty()).then(|| Error::InvalidInstance(msgs.join("; ")))
    }
}

/// A finite hypergraph on vertices `0..n` with rated edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawInstance", into = "RawInstance")]
pub struct HypergraphInstance {
    n: usize,
    edges: Vec<Hyperedge>,
    incidence: Vec<Vec<usize>>,
    allow_small_n: bool,
}

impl HypergraphInstance {
    /// Builds an instance, rejecting structural invariant violations.
    /// Requires `n >= 3`.
    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        let inst = Self::unchecked(n, edges, false);
        match inst.validate().structural_error() {
            Some(e) => Err(e),
            None => Ok(inst),
        }
    }

    /// Like [`new`](Self::new) but permits `n < 3`. Intended for tests and
    /// closed-form sanity instances such as the two-state chain.
    pub fn new_allowing_small_n(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        let inst = Self::unchecked(n, edges, true);
        match inst.validate().structural_error() {
            Some(e) => Err(e),
            None => Ok(inst),
        }
    }

    /// Builds without checking anything; use [`validate`](Self::validate) to
    /// inspect the result.
    pub fn unchecked(n: usize, edges: Vec<Hyperedge>, allow_small_n: bool) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for &v in e.vertices() {
                if v < n && incidence[v].last() != Some(&i) {
                    incidence[v].push(i);
                }
            }
        }
        Self {
            n,
            edges,
            incidence,
            allow_small_n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    /// Indices of the edges containing `v`.
    pub fn edges_at(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn allows_small_n(&self) -> bool {
        self.allow_small_n
    }

    /// Total ring rate `sum_e r_e`.
    pub fn total_rate(&self) -> f64 {
        self.edges.iter().map(Hyperedge::rate).sum()
    }

    /// `R = sum_e r_e |e| (|e| - 1)`.
    pub fn interaction_rate_r(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let s = e.size() as f64;
                e.rate() * s * (s - 1.0)
            })
            .sum()
    }

    /// `R / (n (n - 1))`: rate at which two particles at equilibrium interact.
    pub fn pair_interaction_rate(&self) -> f64 {
        let n = self.n as f64;
        self.interaction_rate_r() / (n * (n - 1.0))
    }

    /// Sum of `r_e` over edges containing both `u` and `v`.
    pub fn shared_rate(&self, u: usize, v: usize) -> f64 {
        self.incidence[u]
            .iter()
            .filter(|&&i| self.edges[i].contains(v))
            .map(|&i| self.edges[i].rate())
            .sum()
    }

    /// All edges have two vertices and the transposition law.
    pub fn is_graph(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.size() == 2 && matches!(e.law(), PermutationLaw::Transposition))
    }

    /// Every edge uses the uniform law (the uniform interchange process).
    pub fn is_uniform(&self) -> bool {
        self.edges.iter().all(|e| e.law().is_uniform())
    }

    /// Degree of each vertex in a graph instance, if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.incidence.first()?.len();
        self.incidence.iter().all(|i| i.len() == d).then_some(d)
    }

    /// Single-particle move rates `u -> v` summed over edges (self moves included).
    pub fn single_particle_rates(&self) -> Vec<Vec<f64>> {
        let mut q = vec![vec![0.0; self.n]; self.n];
        for e in &self.edges {
            for w in e.support() {
                for (i, &u) in e.vertices().iter().enumerate() {
                    let v = w.perm.images()[i];
                    if u < self.n && v < self.n {
                        q[u][v] += e.rate() * w.p;
                    }
                }
            }
        }
        q
    }

    /// Reports every violated invariant, plus connectivity of the
    /// single-particle move graph.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.n < 3 && !self.allow_small_n {
            violations.push(Violation {
                kind: ViolationKind::TooFewVertices,
                edge: None,
                message: format!("n = {} < 3", self.n),
            });
        }
        if self.n == 0 {
            violations.push(Violation {
                kind: ViolationKind::TooFewVertices,
                edge: None,
                message: "n = 0".into(),
            });
        }
        for (i, e) in self.edges.iter().enumerate() {
            e.violations(i, self.n, &mut violations);
        }
        let move_graph_connected = self.n > 0 && self.move_graph_connected();
        if !move_graph_connected {
            violations.push(Violation {
                kind: ViolationKind::MoveGraphDisconnected,
                edge: None,
                message: "single-particle move graph is not strongly connected".into(),
            });
        }
        ValidationReport {
            violations,
            move_graph_connected,
        }
    }

    fn move_graph_connected(&self) -> bool {
        let q = self.single_particle_rates();
        let n = self.n;
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    let rate = if forward { q[u][v] } else { q[v][u] };
                    if !seen[v] && rate > 0.0 {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            seen.iter().all(|&s| s)
        };
        reach(true) && reach(false)
    }

    /// Parses the JSON instance format, rejecting structurally invalid input.
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        match inst.validate().structural_error() {
            Some(e) => Err(e),
            None => Ok(inst),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Same instance with every rate multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Hyperedge::new(e.vertices.clone(), e.rate * c, e.law.clone()))
            .collect();
        Self::unchecked(self.n, edges, self.allow_small_n)
    }
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    vertices: Vec<usize>,
    rate: f64,
    law: PermutationLaw,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    edges: Vec<RawEdge>,
}

impl From<RawInstance> for HypergraphInstance {
    fn from(raw: RawInstance) -> Self {
        let edges = raw
            .edges
            .into_iter()
            .map(|e| Hyperedge::new(e.vertices, e.rate, e.law))
            .collect();
        // Files never carry the small-n override; `from_json` rejects n < 3.
        Self::unchecked(raw.n, edges, false)
    }
}

impl From<HypergraphInstance> for RawInstance {
    fn from(inst: HypergraphInstance) -> Self {
        RawInstance {
            n: inst.n,
            edges: inst
                .edges
                .into_iter()
                .map(|e| RawEdge {
                    vertices: e.vertices,
                    rate: e.rate,
                    law: e.law,
                })
                .collect(),
        }
    }
}

/// Convenience for explicit laws given as `(images, probability)` pairs.
pub fn explicit_law(entries: Vec<(Vec<usize>, f64)>) -> PermutationLaw {
    PermutationLaw::Explicit(
        entries
            .into_iter()
            .map(|(perm, p)| WeightedPermutation {
                perm: EdgePermutation(perm),
                p,
            })
            .collect(),
    )
}
