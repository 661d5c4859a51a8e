//! Compressed-row storage for off-diagonal rates.

use std::collections::VecDeque;

/// Off-diagonal transition rates in CSR form plus per-state exit rates.
///
/// For a proper generator `exit[a]` is the row sum of the off-diagonal rates,
/// so the diagonal is `-exit[a]`. Sub-generators (chains with killing) carry
/// an exit rate larger than the row sum; the difference is the killing rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    exit: Vec<f64>,
}

impl RateMatrix {
    /// Builds from per-row `(column, rate)` lists. Duplicate columns are
    /// summed, zero rates and diagonal entries dropped. `killing` (if given)
    /// is added on top of the row sums.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, killing: Option<&[f64]>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut exit = Vec::with_capacity(n);
        row_ptr.push(0);
        for (a, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            let mut sum = 0.0;
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut rate = 0.0;
                while i < row.len() && row[i].0 == c {
                    rate += row[i].1;
                    i += 1;
                }
                if c != a && rate != 0.0 {
                    cols.push(c);
                    vals.push(rate);
                    sum += rate;
                }
            }
            exit.push(sum + killing.map_or(0.0, |k| k[a]));
            row_ptr.push(cols.len());
        }
        Self {
            row_ptr,
            cols,
            vals,
            exit,
        }
    }

    pub fn dim(&self) -> usize {
        self.exit.len()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Off-diagonal entries of row `a`.
    pub fn row(&self, a: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[a]..self.row_ptr[a + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn exit(&self) -> &[f64] {
        &self.exit
    }

    /// Off-diagonal rate `q(a, b)` (zero on the diagonal).
    pub fn get(&self, a: usize, b: usize) -> f64 {
        let range = self.row_ptr[a]..self.row_ptr[a + 1];
        match self.cols[range.clone()].binary_search(&b) {
            Ok(pos) => self.vals[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Full entry `Q(a, b)` including the diagonal `-exit[a]`.
    pub fn entry(&self, a: usize, b: usize) -> f64 {
        if a == b {
            -self.exit[a]
        } else {
            self.get(a, b)
        }
    }

    pub fn max_exit(&self) -> f64 {
        self.exit.iter().copied().fold(0.0, f64::max)
    }

    /// `out = v Q` for a row vector `v`.
    pub fn left_mul(&self, v: &[f64], out: &mut [f64]) {
        for (a, o) in out.iter_mut().enumerate() {
            *o = -v[a] * self.exit[a];
        }
        for a in 0..self.dim() {
            let va = v[a];
            if va != 0.0 {
                for (b, q) in self.row(a) {
                    out[b] += va * q;
                }
            }
        }
    }

    /// `out = Q f` for a column vector `f`.
    pub fn right_mul(&self, f: &[f64], out: &mut [f64]) {
        for (a, o) in out.iter_mut().enumerate() {
            let s: f64 = self.row(a).map(|(b, q)| q * f[b]).sum();
            *o = s - self.exit[a] * f[a];
        }
    }

    /// Dense copy of the full matrix `Q`.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for a in 0..n {
            m[(a, a)] = -self.exit[a];
            for (b, q) in self.row(a) {
                m[(a, b)] = q;
            }
        }
        m
    }

    /// Whether every state reaches every other along positive rates.
    pub fn is_irreducible(&self) -> bool {
        let n = self.dim();
        if n <= 1 {
            return true;
        }
        let mut transpose = vec![Vec::new(); n];
        for a in 0..n {
            for (b, _) in self.row(a) {
                transpose[b].push(a);
            }
        }
        let forward = self.reachable_from(0);
        if forward.iter().any(|&s| !s) {
            return false;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for &b in &transpose[a] {
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// States reachable from `start` (including itself).
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.dim()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for (b, _) in self.row(a) {
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen
    }

    /// Largest residual of `pi Q = 0`.
    pub fn stationarity_residual(&self, pi: &[f64]) -> f64 {
        let mut out = vec![0.0; self.dim()];
        self.left_mul(pi, &mut out);
        out.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Largest detailed-balance residual `|pi(a) q(a,b) - pi(b) q(b,a)|`.
    pub fn detailed_balance_residual(&self, pi: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim() {
            for (b, q) in self.row(a) {
                worst = worst.max((pi[a] * q - pi[b] * self.get(b, a)).abs());
            }
        }
        worst
    }

    /// Iterates `(row, col, rate)` over off-diagonal entries.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim()).flat_map(move |a| self.row(a).map(move |(b, q)| (a, b, q)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> RateMatrix {
        RateMatrix::from_rows(vec![vec![(1, 1.0)], vec![(0, 1.0)]], None)
    }

    #[test]
    fn duplicates_merge_and_diagonal_drops() {
        let m = RateMatrix::from_rows(vec![vec![(1, 0.5), (0, 3.0), (1, 0.25)], vec![]], None);
        assert_eq!(m.get(0, 1), 0.75);
        assert_eq!(m.exit()[0], 0.75);
        assert_eq!(m.nnz(), 1);
        assert!(!m.is_irreducible());
    }

    #[test]
    fn products() {
        let m = two_state();
        let mut out = vec![0.0; 2];
        m.left_mul(&[1.0, 0.0], &mut out);
        assert_eq!(out, vec![-1.0, 1.0]);
        m.right_mul(&[1.0, 1.0], &mut out);
        assert_eq!(out, vec![0.0, 0.0]);
        assert!(m.is_irreducible());
        assert_eq!(m.detailed_balance_residual(&[0.5, 0.5]), 0.0);
    }

    #[test]
    fn killing_adds_to_exit() {
        let m = RateMatrix::from_rows(vec![vec![(1, 1.0)], vec![(0, 1.0)]], Some(&[0.5, 0.0]));
        assert_eq!(m.exit(), &[1.5, 1.0]);
        assert_eq!(m.entry(0, 0), -1.5);
    }
}
