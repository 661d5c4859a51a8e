//! Labeled configurations and enumerated state spaces.
//!
//! Three spaces occur: `V^k` (independent walkers), `(V)_k` (distinct
//! labeled positions) and k-subsets of `V` (unlabeled particles). Each is
//! indexed in lexicographic order by closed-form ranking, so the index map is
//! stable across runs and needs no lookup table.

use serde::{Deserialize, Serialize};

use super::instance::Hyperedge;
use super::perm::EdgePermutation;
use crate::error::{Error, Result};

/// Default refusal threshold for exact state-space enumeration.
pub const DEFAULT_STATE_BUDGET: usize = 5_000_000;

/// Positions of `k` labeled particles; coordinates are distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabeledConfig(pub Vec<usize>);

impl LabeledConfig {
    pub fn new(positions: Vec<usize>, n: usize) -> Result<Self> {
        let cfg = Self(positions);
        if !cfg.is_valid(n) {
            return Err(Error::Precondition(format!(
                "{:?} is not a tuple of distinct vertices below {n}",
                cfg.0
            )));
        }
        Ok(cfg)
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn is_valid(&self, n: usize) -> bool {
        self.0.iter().all(|&x| x < n)
            && self
                .0
                .iter()
                .enumerate()
                .all(|(i, x)| !self.0[..i].contains(x))
    }

    pub fn occupies(&self, v: usize) -> bool {
        self.0.contains(&v)
    }
}

/// Lifts `sigma` (a permutation of `edge`) to configurations.
pub fn apply_permutation(
    config: &LabeledConfig,
    edge: &Hyperedge,
    sigma: &EdgePermutation,
) -> Result<LabeledConfig> {
    sigma.check_bijection(edge.vertices())?;
    let mut out = config.clone();
    apply_in_place(&mut out.0, edge.vertices(), sigma.images());
    Ok(out)
}

/// Unchecked lift used on hot paths; `images` must be a bijection of `vertices`.
#[inline]
pub fn apply_in_place(positions: &mut [usize], vertices: &[usize], images: &[usize]) {
    for x in positions.iter_mut() {
        if let Ok(pos) = vertices.binary_search(x) {
            *x = images[pos];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    /// `V^k`, all k-tuples.
    Product,
    /// `(V)_k`, k-tuples of distinct vertices.
    Injective,
    /// k-subsets, stored as increasing tuples.
    Subsets,
}

/// An enumerated state space with a lexicographic bijection to `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpace {
    kind: SpaceKind,
    n: usize,
    k: usize,
    len: usize,
}

impl StateSpace {
    pub fn new(kind: SpaceKind, n: usize, k: usize, budget: usize) -> Result<Self> {
        let count = Self::count(kind, n, k);
        if count > budget as u128 {
            return Err(Error::StateSpaceTooLarge {
                states: count,
                budget,
            });
        }
        if k > n && kind != SpaceKind::Product {
            return Err(Error::InvalidProcess(format!("k = {k} exceeds n = {n}")));
        }
        Ok(Self {
            kind,
            n,
            k,
            len: count as usize,
        })
    }

    /// Number of states without building anything.
    pub fn count(kind: SpaceKind, n: usize, k: usize) -> u128 {
        let (n, k) = (n as u128, k as u128);
        match kind {
            SpaceKind::Product => n.checked_pow(k as u32).unwrap_or(u128::MAX),
            SpaceKind::Injective => {
                if k > n {
                    0
                } else {
                    ((n - k + 1)..=n).product()
                }
            }
            SpaceKind::Subsets => binomial_u128(n, k),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        s.len() == self.k
            && s.iter().all(|&x| x < self.n)
            && match self.kind {
                SpaceKind::Product => true,
                SpaceKind::Injective => s.iter().enumerate().all(|(i, x)| !s[..i].contains(x)),
                SpaceKind::Subsets => s.windows(2).all(|w| w[0] < w[1]),
            }
    }

    /// Index of a state, or `None` if it is not in the space.
    pub fn index(&self, s: &[usize]) -> Option<usize> {
        if !self.contains(s) {
            return None;
        }
        let n = self.n;
        let k = self.k;
        Some(match self.kind {
            SpaceKind::Product => s.iter().fold(0, |acc, &x| acc * n + x),
            SpaceKind::Injective => {
                let mut rank = 0;
                for i in 0..k {
                    let smaller_unused = (0..s[i]).filter(|v| !s[..i].contains(v)).count();
                    rank += smaller_unused * falling(n - i - 1, k - i - 1);
                }
                rank
            }
            SpaceKind::Subsets => {
                let mut rank = 0;
                let mut prev = 0;
                for i in 0..k {
                    for v in prev..s[i] {
                        rank += binomial(n - v - 1, k - i - 1);
                    }
                    prev = s[i] + 1;
                }
                rank
            }
        })
    }

    /// Writes state `i` into `buf` (length `k`).
    pub fn state_into(&self, mut i: usize, buf: &mut [usize]) {
        debug_assert!(i < self.len && buf.len() == self.k);
        let n = self.n;
        let k = self.k;
        match self.kind {
            SpaceKind::Product => {
                for slot in buf.iter_mut().rev() {
                    *slot = i % n;
                    i /= n;
                }
            }
            SpaceKind::Injective => {
                for pos in 0..k {
                    let block = falling(n - pos - 1, k - pos - 1);
                    let mut skip = i / block;
                    i %= block;
                    let v = (0..n)
                        .find(|v| {
                            if buf[..pos].contains(v) {
                                return false;
                            }
                            if skip == 0 {
                                return true;
                            }
                            skip -= 1;
                            false
                        })
                        .expect("rank in range");
                    buf[pos] = v;
                }
            }
            SpaceKind::Subsets => {
                let mut v = 0;
                for pos in 0..k {
                    loop {
                        let block = binomial(n - v - 1, k - pos - 1);
                        if i < block {
                            break;
                        }
                        i -= block;
                        v += 1;
                    }
                    buf[pos] = v;
                    v += 1;
                }
            }
        }
    }

    pub fn state(&self, i: usize) -> Vec<usize> {
        let mut buf = vec![0; self.k];
        self.state_into(i, &mut buf);
        buf
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len).map(|i| self.state(i))
    }
}

/// `m (m-1) ... (m-r+1)`.
pub fn falling(m: usize, r: usize) -> usize {
    (0..r).map(|i| m - i).product()
}

pub fn binomial(n: usize, k: usize) -> usize {
    binomial_u128(n as u128, k as u128) as usize
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn counts() {
        let b = DEFAULT_STATE_BUDGET;
        assert_eq!(StateSpace::new(SpaceKind::Injective, 4, 2, b).unwrap().len(), 12);
        assert_eq!(StateSpace::new(SpaceKind::Subsets, 4, 2, b).unwrap().len(), 6);
        assert_eq!(StateSpace::new(SpaceKind::Injective, 6, 3, b).unwrap().len(), 120);
        assert_eq!(StateSpace::new(SpaceKind::Product, 5, 3, b).unwrap().len(), 125);
    }

    #[test]
    fn budget_is_enforced() {
        let err = StateSpace::new(SpaceKind::Injective, 12, 12, DEFAULT_STATE_BUDGET).unwrap_err();
        assert!(matches!(err, Error::StateSpaceTooLarge { .. }));
        assert!(err.to_string().contains("Monte Carlo"));
    }

    #[test]
    fn lexicographic_order() {
        let s = StateSpace::new(SpaceKind::Injective, 3, 2, 100).unwrap();
        let all: Vec<_> = s.iter().collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 2], vec![2, 0], vec![2, 1]]);
        let s = StateSpace::new(SpaceKind::Subsets, 4, 2, 100).unwrap();
        let all: Vec<_> = s.iter().collect();
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn apply_examples() {
        let e = Hyperedge::transposition(0, 1, 1.0);
        let c = LabeledConfig(vec![0, 1]);
        let out = apply_permutation(&c, &e, &EdgePermutation(vec![1, 0])).unwrap();
        assert_eq!(out.0, vec![1, 0]);
        let id = apply_permutation(&c, &e, &EdgePermutation(vec![0, 1])).unwrap();
        assert_eq!(id, c);

        let e3 = Hyperedge::uniform(vec![0, 1, 2], 1.0);
        let out = apply_permutation(&LabeledConfig(vec![0, 3]), &e3, &EdgePermutation(vec![1, 2, 0])).unwrap();
        assert_eq!(out.0, vec![1, 3]);

        let err = apply_permutation(&c, &e3, &EdgePermutation(vec![1, 1, 0])).unwrap_err();
        assert!(matches!(err, Error::InvalidPermutation(_)));
    }

    fn kinds() -> impl Strategy<Value = SpaceKind> {
        prop_oneof![
            Just(SpaceKind::Product),
            Just(SpaceKind::Injective),
            Just(SpaceKind::Subsets)
        ]
    }

    proptest! {
        #[test]
        fn index_is_a_bijection(kind in kinds(), n in 1usize..7, k in 1usize..4) {
            prop_assume!(kind == SpaceKind::Product || k <= n);
            let space = StateSpace::new(kind, n, k, 1_000_000).unwrap();
            let mut prev: Option<Vec<usize>> = None;
            for i in 0..space.len() {
                let s = space.state(i);
                prop_assert!(space.contains(&s));
                prop_assert_eq!(space.index(&s), Some(i));
                if let Some(p) = prev { prop_assert!(p < s); }
                prev = Some(s);
            }
        }

        #[test]
        fn lifted_permutations_keep_distinctness(
            n in 3usize..8,
            seed in any::<u64>(),
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut verts: Vec<usize> = (0..n).collect();
            verts.shuffle(&mut rng);
            let size = 2 + (seed as usize % (n - 1));
            let mut edge_vertices = verts[..size].to_vec();
            edge_vertices.sort_unstable();
            let mut images = edge_vertices.clone();
            images.shuffle(&mut rng);
            let edge = Hyperedge::uniform(edge_vertices, 1.0);
            let k = 1 + (seed as usize / 7) % n;
            verts.shuffle(&mut rng);
            let cfg = LabeledConfig(verts[..k].to_vec());
            let out = apply_permutation(&cfg, &edge, &EdgePermutation(images)).unwrap();
            prop_assert!(out.is_valid(n));
        }
    }
}
