//! Total-variation distances, worst-case curves and mixing times.

use serde::Serialize;

use super::generator::GeneratorMatrix;
use super::kernel::{evolve_distribution, DEFAULT_KERNEL_TOL};
use crate::error::{Error, Result};
use crate::model::SpaceKind;
use crate::par;

/// Default relative tolerance on bisected mixing times.
pub const MIXING_REL_TOL: f64 = 1e-6;

/// `sum_a (mu(a) - nu(a))_+`.
pub fn tv(mu: &[f64], nu: &[f64]) -> f64 {
    mu.iter().zip(nu).map(|(a, b)| (a - b).max(0.0)).sum()
}

fn unit(dim: usize, a: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[a] = 1.0;
    e
}

fn stationary(gen: &GeneratorMatrix) -> Result<&[f64]> {
    gen.stationary().ok_or_else(|| {
        Error::Precondition(format!("{}: stationary distribution is not known", gen.label()))
    })
}

/// `max_a TV(P_t(a, .), pi)`.
pub fn worst_case_d(gen: &GeneratorMatrix, t: f64) -> Result<f64> {
    let pi = stationary(gen)?;
    let q = gen.rates();
    Ok(par::max_over(0..gen.dim(), |a| {
        tv(&evolve_distribution(q, &unit(gen.dim(), a), t, DEFAULT_KERNEL_TOL), pi)
    }))
}

/// `max_{a,b} TV(P_t(a, .), P_t(b, .))`.
pub fn worst_pair_distance(gen: &GeneratorMatrix, t: f64) -> f64 {
    let q = gen.rates();
    let rows = par::map_collect(0..gen.dim(), |a| {
        evolve_distribution(q, &unit(gen.dim(), a), t, DEFAULT_KERNEL_TOL)
    });
    par::max_over(0..rows.len(), |a| {
        (a + 1..rows.len()).map(|b| tv(&rows[a], &rows[b])).fold(0.0, f64::max)
    })
    .max(0.0)
}

/// `bar d_k(t)` for an IP(k) generator (or RW(1)): the worst TV between the
/// laws from `(w, u)` and `(w, v)`, `u, v` outside `w`.
pub fn bar_d_k(gen: &GeneratorMatrix, t: f64) -> Result<f64> {
    let space = gen.space();
    let k = space.k();
    match space.kind() {
        SpaceKind::Injective => {}
        SpaceKind::Product if k == 1 => {}
        _ => {
            return Err(Error::Precondition(format!(
                "bar d_k is defined for interchange generators, not {}",
                gen.label()
            )))
        }
    }
    let n = space.n();
    let q = gen.rates();
    let dim = gen.dim();
    // Group states by their first k-1 coordinates.
    let mut groups: std::collections::BTreeMap<Vec<usize>, Vec<usize>> = Default::default();
    for (i, s) in space.iter().enumerate() {
        groups.entry(s[..k - 1].to_vec()).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    debug_assert!(groups.iter().all(|g| g.len() == n - (k - 1)));
    let worst = par::max_over(0..groups.len(), |g| {
        let rows: Vec<Vec<f64>> = groups[g]
            .iter()
            .map(|&a| evolve_distribution(q, &unit(dim, a), t, DEFAULT_KERNEL_TOL))
            .collect();
        let mut m: f64 = 0.0;
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                m = m.max(tv(&rows[i], &rows[j]));
            }
        }
        m
    });
    Ok(worst.max(0.0))
}

/// `t_mix(eps)` to the default relative tolerance.
pub fn mixing_time(gen: &GeneratorMatrix, eps: f64) -> Result<f64> {
    mixing_time_tol(gen, eps, MIXING_REL_TOL)
}

/// Bisection for `inf { t : d(t) <= eps }`. The returned time always
/// satisfies `d(t) <= eps`; the true value lies within `rel_tol * t` below it.
pub fn mixing_time_tol(gen: &GeneratorMatrix, eps: f64, rel_tol: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !gen.is_irreducible() {
        return Err(Error::Reducible);
    }
    stationary(gen)?;
    let d = |t: f64| worst_case_d(gen, t);
    if d(0.0)? <= eps {
        return Ok(0.0);
    }
    let mut hi = 1.0 / gen.rates().max_exit().max(1e-300);
    let mut lo = 0.0;
    while d(hi)? > eps {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Internal("mixing time bracket diverged".into()));
        }
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if d(mid)? <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Worst-case distance (and optionally `bar d_k`) on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvCurve {
    pub times: Vec<f64>,
    pub d: Vec<f64>,
    pub bar_d: Option<Vec<f64>>,
}

impl TvCurve {
    pub fn compute(gen: &GeneratorMatrix, times: &[f64], with_bar_d: bool) -> Result<Self> {
        let d = times.iter().map(|&t| worst_case_d(gen, t)).collect::<Result<Vec<_>>>()?;
        let bar_d = if with_bar_d {
            Some(times.iter().map(|&t| bar_d_k(gen, t)).collect::<Result<Vec<_>>>()?)
        } else {
            None
        };
        Ok(Self {
            times: times.to_vec(),
            d,
            bar_d,
        })
    }

    /// True when both curves are non-increasing up to `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        let mono = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] + slack);
        mono(&self.d) && self.bar_d.as_deref().is_none_or(mono)
    }

    /// First grid time with `d <= eps`.
    pub fn first_crossing(&self, eps: f64) -> Option<f64> {
        self.times.iter().zip(&self.d).find(|(_, &d)| d <= eps).map(|(&t, _)| t)
    }

    /// CSV with header `t,d,bar_d_k` (last column empty when not computed).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,d,bar_d_k\n");
        for (i, (t, d)) in self.times.iter().zip(&self.d).enumerate() {
            match &self.bar_d {
                Some(b) => out.push_str(&format!("{t},{d},{}\n", b[i])),
                None => out.push_str(&format!("{t},{d},\n")),
            }
        }
        out
    }
}

/// `n` points from `lo` to `hi`, evenly spaced in log scale.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
