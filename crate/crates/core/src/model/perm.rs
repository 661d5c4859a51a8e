//! Permutations of a hyperedge's vertex set and the laws they are drawn from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest hyperedge for which the uniform law is enumerated explicitly.
pub const MAX_UNIFORM_EDGE: usize = 8;

/// A permutation of an edge, stored as the images (vertex ids) of the edge's
/// sorted vertex list: `images[i]` is where `vertices[i]` is sent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgePermutation(pub Vec<usize>);

impl EdgePermutation {
    pub fn identity(vertices: &[usize]) -> Self {
        Self(vertices.to_vec())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// Checks that this is a bijection of `vertices` (sorted).
    pub fn check_bijection(&self, vertices: &[usize]) -> Result<()> {
        if self.0.len() != vertices.len() {
            return Err(Error::InvalidPermutation(format!(
                "length {} does not match edge size {}",
                self.0.len(),
                vertices.len()
            )));
        }
        let mut sorted = self.0.clone();
        sorted.sort_unstable();
        if sorted != vertices {
            return Err(Error::InvalidPermutation(format!(
                "{:?} is not a bijection of {:?}",
                self.0, vertices
            )));
        }
        Ok(())
    }

    /// Image of `v` under the permutation; vertices outside the edge are fixed.
    #[inline]
    pub fn image(&self, vertices: &[usize], v: usize) -> usize {
        match vertices.binary_search(&v) {
            Ok(pos) => self.0[pos],
            Err(_) => v,
        }
    }

    pub fn is_identity(&self, vertices: &[usize]) -> bool {
        self.0 == vertices
    }
}

/// Law of the permutation applied when an edge rings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PermutationLaw {
    /// Uniform over all `|e|!` permutations of the edge.
    Uniform,
    /// Swap the two endpoints of a 2-vertex edge with probability one.
    Transposition,
    /// Explicit list of permutations with their probabilities.
    Explicit(Vec<WeightedPermutation>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPermutation {
    pub perm: EdgePermutation,
    pub p: f64,
}

impl WeightedPermutation {
    pub fn new(perm: Vec<usize>, p: f64) -> Self {
        Self {
            perm: EdgePermutation(perm),
            p,
        }
    }
}

impl PermutationLaw {
    /// Materializes the support of the law on the sorted vertex list.
    ///
    /// Explicit laws are returned as given (including identities and zero
    /// weights) so that validation can report on them.
    pub fn support(&self, vertices: &[usize]) -> Result<Vec<WeightedPermutation>> {
        match self {
            PermutationLaw::Uniform => {
                if vertices.len() > MAX_UNIFORM_EDGE {
                    return Err(Error::InvalidInstance(format!(
                        "uniform law on a {}-vertex edge is too large to enumerate (max {MAX_UNIFORM_EDGE})",
                        vertices.len()
                    )));
                }
                let perms = all_permutations(vertices);
                let p = 1.0 / perms.len() as f64;
                Ok(perms
                    .into_iter()
                    .map(|images| WeightedPermutation::new(images, p))
                    .collect())
            }
            PermutationLaw::Transposition => {
                if vertices.len() != 2 {
                    return Err(Error::InvalidInstance(format!(
                        "transposition law requires a 2-vertex edge, got {}",
                        vertices.len()
                    )));
                }
                Ok(vec![WeightedPermutation::new(
                    vec![vertices[1], vertices[0]],
                    1.0,
                )])
            }
            PermutationLaw::Explicit(list) => Ok(list.clone()),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, PermutationLaw::Uniform)
    }
}

/// All permutations of `items` in lexicographic order of positions.
pub fn all_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // next lexicographic permutation of idx
        let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else {
            break;
        };
        let j = (i..idx.len()).rev().find(|&j| idx[j] > idx[i - 1]).unwrap();
        idx.swap(i - 1, j);
        idx[i..].reverse();
    }
    out
}

/// The eight 3-cycles of a 4-element set, as images of `vertices`.
pub fn three_cycles(vertices: &[usize]) -> Vec<Vec<usize>> {
    all_permutations(vertices)
        .into_iter()
        .filter(|p| {
            let fixed = p.iter().zip(vertices).filter(|(a, b)| a == b).count();
            fixed == vertices.len() - 3 && is_single_cycle_on_moved(p, vertices)
        })
        .collect()
}

fn is_single_cycle_on_moved(p: &[usize], vertices: &[usize]) -> bool {
    let moved: Vec<usize> = (0..p.len()).filter(|&i| p[i] != vertices[i]).collect();
    if moved.is_empty() {
        return false;
    }
    let pos = |v: usize| vertices.binary_search(&v).unwrap();
    let start = moved[0];
    let mut len = 1;
    let mut cur = pos(p[start]);
    while cur != start {
        cur = pos(p[cur]);
        len += 1;
    }
    len == moved.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_permutations() {
        let perms = all_permutations(&[2, 5, 7]);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[0], vec![2, 5, 7]);
        assert_eq!(perms[5], vec![7, 5, 2]);
        let mut dedup = perms.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 6);
    }

    #[test]
    fn uniform_support_sums_to_one() {
        let s = PermutationLaw::Uniform.support(&[0, 1, 2, 3]).unwrap();
        assert_eq!(s.len(), 24);
        let total: f64 = s.iter().map(|w| w.p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn there_are_eight_three_cycles() {
        let c = three_cycles(&[0, 1, 2, 3]);
        assert_eq!(c.len(), 8);
        assert!(c.contains(&vec![1, 2, 0, 3]));
    }

    #[test]
    fn bijection_check() {
        let v = [0, 1, 2];
        assert!(EdgePermutation(vec![1, 2, 0]).check_bijection(&v).is_ok());
        assert!(EdgePermutation(vec![1, 1, 0]).check_bijection(&v).is_err());
        assert!(EdgePermutation(vec![1, 0]).check_bijection(&v).is_err());
        assert!(EdgePermutation(vec![1, 3, 0]).check_bijection(&v).is_err());
    }

    #[test]
    fn image_fixes_outside_vertices() {
        let p = EdgePermutation(vec![1, 2, 0]);
        assert_eq!(p.image(&[0, 1, 2], 0), 1);
        assert_eq!(p.image(&[0, 1, 2], 3), 3);
    }
}
