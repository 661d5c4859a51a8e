//! Named instance families.
//!
//! Rates default to 1; edges of size 2 use the transposition law and larger
//! edges the uniform law.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::perm::{all_permutations, three_cycles};
use crate::model::{explicit_law, Hyperedge, HypergraphInstance, PermutationLaw};

fn default_edge(vertices: Vec<usize>, rate: f64) -> Hyperedge {
    if vertices.len() == 2 {
        Hyperedge::transposition(vertices[0], vertices[1], rate)
    } else {
        Hyperedge::uniform(vertices, rate)
    }
}

fn build(n: usize, edges: Vec<Vec<usize>>) -> Result<HypergraphInstance> {
    HypergraphInstance::new(n, edges.into_iter().map(|e| default_edge(e, 1.0)).collect())
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInstance(msg.into())
}

pub fn cycle(n: usize) -> Result<HypergraphInstance> {
    if n < 3 {
        return Err(invalid("cycle needs n >= 3"));
    }
    build(n, (0..n).map(|i| vec![i, (i + 1) % n]).collect())
}

pub fn path(n: usize) -> Result<HypergraphInstance> {
    build(n, (0..n.saturating_sub(1)).map(|i| vec![i, i + 1]).collect())
}

pub fn star(n: usize) -> Result<HypergraphInstance> {
    build(n, (1..n).map(|i| vec![0, i]).collect())
}

pub fn complete(n: usize) -> Result<HypergraphInstance> {
    complete_uniform(n, 2)
}

/// All `s`-subsets of `0..n` as edges.
pub fn complete_uniform(n: usize, s: usize) -> Result<HypergraphInstance> {
    if s < 2 || s > n {
        return Err(invalid(format!("complete-uniform needs 2 <= s <= n, got s = {s}, n = {n}")));
    }
    build(n, subsets(n, s))
}

fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..s).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..s).rev().find(|&i| cur[i] < n - s + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..s {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// The discrete torus `Z_m^d` with nearest-neighbour edges.
pub fn torus(d: usize, m: usize) -> Result<HypergraphInstance> {
    if d == 0 || m < 3 {
        return Err(invalid("torus needs d >= 1 and side m >= 3"));
    }
    let n = m.checked_pow(d as u32).ok_or_else(|| invalid("torus too large"))?;
    let mut edges = Vec::new();
    for v in 0..n {
        let mut stride = 1;
        for _ in 0..d {
            let coord = (v / stride) % m;
            let w = v - coord * stride + ((coord + 1) % m) * stride;
            edges.push(vec![v, w]);
            stride *= m;
        }
    }
    build(n, edges)
}

pub fn hypercube(d: usize) -> Result<HypergraphInstance> {
    if d < 2 {
        return Err(invalid("hypercube needs d >= 2"));
    }
    let n = 1usize << d;
    let edges = (0..n)
        .flat_map(|v| (0..d).filter(move |&i| v & (1 << i) == 0).map(move |i| vec![v, v | (1 << i)]))
        .collect();
    build(n, edges)
}

/// A simple `d`-regular graph on `n` vertices from the pairing model,
/// resampled until simple; deterministic in `seed`.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<HypergraphInstance> {
    if d == 0 || d >= n || (n * d) % 2 == 1 {
        return Err(invalid(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _ in 0..10_000 {
        stubs.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        let ok = stubs.chunks(2).all(|p| {
            let (a, b) = (p[0].min(p[1]), p[0].max(p[1]));
            a != b && seen.insert((a, b))
        });
        if ok {
            return build(n, seen.into_iter().map(|(a, b)| vec![a, b]).collect());
        }
    }
    Err(invalid("pairing model did not produce a simple graph"))
}

/// One hyperedge holding every vertex, uniform law.
pub fn single_hyperedge(n: usize) -> Result<HypergraphInstance> {
    HypergraphInstance::new(n, vec![Hyperedge::uniform((0..n).collect(), 1.0)])
}

/// One 4-vertex hyperedge whose law is uniform over the eight 3-cycles.
/// IP(2) is irreducible but IP(4) is not: 3-cycles are even.
pub fn three_cycle_instance() -> HypergraphInstance {
    let v = vec![0, 1, 2, 3];
    let cycles = three_cycles(&v);
    let p = 1.0 / cycles.len() as f64;
    let law = explicit_law(cycles.into_iter().map(|c| (c, p)).collect());
    HypergraphInstance::new(4, vec![Hyperedge::new(v, 1.0, law)]).expect("valid")
}

pub fn from_file(path: &Path) -> Result<HypergraphInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    HypergraphInstance::from_json(&text)
}

/// Connected simple graphs on `n` vertices, one per isomorphism class, in a
/// fixed order.
pub fn connected_graphs(n: usize) -> Vec<HypergraphInstance> {
    let pairs = subsets(n, 2);
    let perms = all_permutations(&(0..n).collect::<Vec<_>>());
    let index_of = |a: usize, b: usize| pairs.iter().position(|p| p[0] == a.min(b) && p[1] == a.max(b)).unwrap();
    let relabel: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|e| index_of(p[e[0]], p[e[1]])).collect())
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let canonical = relabel
            .iter()
            .map(|r| (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).fold(0u64, |m, i| m | 1 << r[i]))
            .min()
            .unwrap();
        if canonical != mask || !seen.insert(mask) {
            continue;
        }
        let edges: Vec<Vec<usize>> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i].clone()).collect();
        if let Ok(g) = build(n, edges) {
            if g.validate().move_graph_connected {
                out.push(g);
            }
        }
    }
    out
}

/// Parameters for [`generate_instance`]; unused fields are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub s: Option<usize>,
    pub seed: Option<u64>,
    pub rate: Option<f64>,
    /// `uniform`, `transposition` (size-2 edges only) or `three-cycles`.
    pub law: Option<String>,
    pub file: Option<String>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            n: None,
            d: None,
            m: None,
            s: None,
            seed: None,
            rate: None,
            law: None,
            file: None,
        }
    }
}

/// Builds a named family member. Known names: `cycle`, `path`, `star`,
/// `complete`, `torus`, `hypercube`, `complete-uniform`, `random-regular`,
/// `single-hyperedge`, `from-file`.
pub fn generate_instance(name: &str, params: &GeneratorParams) -> Result<HypergraphInstance> {
    let need = |v: Option<usize>, what: &str| v.ok_or_else(|| invalid(format!("`{name}` needs parameter {what}")));
    let base = match name {
        "cycle" => cycle(need(params.n, "n")?)?,
        "path" => path(need(params.n, "n")?)?,
        "star" => star(need(params.n, "n")?)?,
        "complete" => complete(need(params.n, "n")?)?,
        "torus" => torus(need(params.d, "d")?, need(params.m, "m")?)?,
        "hypercube" => hypercube(need(params.d, "d")?)?,
        "complete-uniform" => complete_uniform(need(params.n, "n")?, need(params.s, "s")?)?,
        "random-regular" => random_regular(need(params.n, "n")?, need(params.d, "d")?, params.seed.unwrap_or(0))?,
        "single-hyperedge" => single_hyperedge(need(params.n, "n")?)?,
        "from-file" => {
            let file = params.file.as_deref().ok_or_else(|| invalid("`from-file` needs a file"))?;
            return from_file(Path::new(file));
        }
        other => return Err(Error::UnknownGenerator(other.to_string())),
    };
    let rate = params.rate.unwrap_or(1.0);
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(invalid(format!("rate must be positive, got {rate}")));
    }
    let law = params.law.as_deref();
    let edges = base
        .edges()
        .iter()
        .map(|e| {
            let v = e.vertices().to_vec();
            match law {
                None => Ok(Hyperedge::new(v, rate, e.law().clone())),
                Some("uniform") => Ok(Hyperedge::new(v, rate, PermutationLaw::Uniform)),
                Some("transposition") if v.len() == 2 => Ok(Hyperedge::new(v, rate, PermutationLaw::Transposition)),
                Some("three-cycles") if v.len() >= 3 => {
                    let cycles = three_cycles(&v);
                    let p = 1.0 / cycles.len() as f64;
                    Ok(Hyperedge::new(v, rate, explicit_law(cycles.into_iter().map(|c| (c, p)).collect())))
                }
                Some(other) => Err(invalid(format!("law `{other}` does not apply to an edge of size {}", v.len()))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    HypergraphInstance::new(base.n(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_edges() {
        let c = cycle(5).unwrap();
        assert_eq!(c.edges().len(), 5);
        assert_eq!(c.edges()[4].vertices(), &[0, 4]);
        assert!(c.edges().iter().all(|e| e.rate() == 1.0));
    }

    #[test]
    fn complete_uniform_counts() {
        let h = complete_uniform(5, 3).unwrap();
        assert_eq!(h.edges().len(), 10);
        assert!(h.is_uniform());
    }

    #[test]
    fn torus_and_hypercube_are_regular() {
        assert_eq!(torus(2, 4).unwrap().regular_degree(), Some(4));
        assert_eq!(torus(1, 5).unwrap().edges().len(), 5);
        assert_eq!(hypercube(3).unwrap().regular_degree(), Some(3));
        let g = random_regular(8, 3, 7).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        assert_eq!(g, random_regular(8, 3, 7).unwrap());
    }

    #[test]
    fn connected_graph_counts() {
        // OEIS A001349
        assert_eq!(connected_graphs(3).len(), 2);
        assert_eq!(connected_graphs(4).len(), 6);
        assert_eq!(connected_graphs(5).len(), 21);
    }

    #[test]
    fn named_generation() {
        let p = GeneratorParams {
            n: Some(4),
            law: Some("three-cycles".into()),
            ..Default::default()
        };
        assert_eq!(generate_instance("single-hyperedge", &p).unwrap(), three_cycle_instance());
        assert!(matches!(
            generate_instance("petersen", &p),
            Err(Error::UnknownGenerator(_))
        ));
        let p = GeneratorParams {
            n: Some(5),
            s: Some(3),
            ..Default::default()
        };
        assert_eq!(generate_instance("complete-uniform", &p).unwrap().edges().len(), 10);
    }
}
