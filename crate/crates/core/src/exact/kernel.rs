//! Transition kernels `P(t) = exp(tQ)` by uniformization.
//!
//! With `L >= max_a |Q(a,a)|` and `P = I + Q/L`,
//! `exp(tQ) = sum_j Pois(Lt)(j) P^j`. All terms are nonnegative, and stopping
//! once the accumulated Poisson mass reaches `1 - tol` bounds every entry's
//! error by `tol`.

use super::generator::GeneratorMatrix;
use super::sparse::RateMatrix;
use crate::error::{Error, Result};
use crate::par;

/// Default truncation tolerance for uniformization.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-12;

/// Poisson(`lambda`) probabilities for `0..=J`, where `J` is the first index
/// past the mean at which the accumulated mass reaches `1 - tol`.
pub fn poisson_weights(lambda: f64, tol: f64) -> Vec<f64> {
    if lambda <= 0.0 {
        return vec![1.0];
    }
    let cap = (lambda + 60.0 * lambda.sqrt() + 100.0).ceil() as usize;
    let ln_lambda = lambda.ln();
    let mut weights = Vec::new();
    let mut log_w = -lambda;
    let mut total = 0.0;
    for j in 0..=cap {
        if j > 0 {
            log_w += ln_lambda - (j as f64).ln();
        }
        let w = log_w.exp();
        weights.push(w);
        total += w;
        if j as f64 >= lambda && total >= 1.0 - tol {
            break;
        }
    }
    weights
}

fn uniformization_rate(q: &RateMatrix) -> f64 {
    q.max_exit()
}

/// One step of `v -> v P` with `P = I + Q/L`.
fn step_left(q: &RateMatrix, rate: f64, v: &[f64], out: &mut [f64]) {
    q.left_mul(v, out);
    for (o, &x) in out.iter_mut().zip(v) {
        *o = x + *o / rate;
    }
}

fn step_right(q: &RateMatrix, rate: f64, f: &[f64], out: &mut [f64]) {
    q.right_mul(f, out);
    for (o, &x) in out.iter_mut().zip(f) {
        *o = x + *o / rate;
    }
}

/// Row vector `v exp(tQ)`.
pub fn evolve_distribution(q: &RateMatrix, v: &[f64], t: f64, tol: f64) -> Vec<f64> {
    let rate = uniformization_rate(q);
    if t == 0.0 || rate == 0.0 {
        return v.to_vec();
    }
    let weights = poisson_weights(rate * t, tol);
    let mass: f64 = weights.iter().sum();
    let mut cur = v.to_vec();
    let mut next = vec![0.0; v.len()];
    let mut acc: Vec<f64> = cur.iter().map(|x| x * weights[0]).collect();
    for &w in &weights[1..] {
        step_left(q, rate, &cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        for (a, &x) in acc.iter_mut().zip(&cur) {
            *a += w * x;
        }
    }
    for a in acc.iter_mut() {
        *a = (*a / mass).max(0.0);
    }
    acc
}

/// Column vector `exp(tQ) f`.
pub fn evolve_function(q: &RateMatrix, f: &[f64], t: f64, tol: f64) -> Vec<f64> {
    let rate = uniformization_rate(q);
    if t == 0.0 || rate == 0.0 {
        return f.to_vec();
    }
    let weights = poisson_weights(rate * t, tol);
    let mass: f64 = weights.iter().sum();
    let mut cur = f.to_vec();
    let mut next = vec![0.0; f.len()];
    let mut acc: Vec<f64> = cur.iter().map(|x| x * weights[0]).collect();
    for &w in &weights[1..] {
        step_right(q, rate, &cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        for (a, &x) in acc.iter_mut().zip(&cur) {
            *a += w * x;
        }
    }
    acc.iter().map(|a| a / mass).collect()
}

/// `int_0^len (v exp(uQ)) . rho du`, using
/// `int_0^len Pois(Lu)(j) du = P[Pois(L len) > j] / L`.
pub fn integrate_functional(q: &RateMatrix, v: &[f64], rho: &[f64], len: f64, tol: f64) -> f64 {
    let dot = |x: &[f64]| x.iter().zip(rho).map(|(a, b)| a * b).sum::<f64>();
    let rate = uniformization_rate(q);
    if len == 0.0 {
        return 0.0;
    }
    if rate == 0.0 {
        return len * dot(v);
    }
    let weights = poisson_weights(rate * len, tol * 1e-2);
    let mut cur = v.to_vec();
    let mut next = vec![0.0; v.len()];
    let mut total = 0.0;
    let mut cdf = 0.0;
    for (j, &w) in weights.iter().enumerate() {
        if j > 0 {
            step_left(q, rate, &cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cdf += w;
        let tail = (1.0 - cdf).max(0.0);
        total += dot(&cur) * tail / rate;
    }
    total
}

/// Dense row-major stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    dim: usize,
    data: Vec<f64>,
}

impl Kernel {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let dim = rows.len();
        let data = rows.into_iter().flatten().collect();
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for a in 0..dim {
            data[a * dim + a] = 1.0;
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.dim..(a + 1) * self.dim]
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.dim + b]
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Kernel) -> Kernel {
        let n = self.dim;
        let rows = par::map_collect(0..n, |a| {
            let mut out = vec![0.0; n];
            for (c, &x) in self.row(a).iter().enumerate() {
                if x != 0.0 {
                    for (o, &y) in out.iter_mut().zip(other.row(c)) {
                        *o += x * y;
                    }
                }
            }
            out
        });
        Kernel::from_rows(rows)
    }

    pub fn max_abs_diff(&self, other: &Kernel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `P(t)` for a generator, rows computed in parallel.
pub fn transition_matrix(gen: &GeneratorMatrix, t: f64) -> Result<Kernel> {
    transition_matrix_tol(gen.rates(), t, DEFAULT_KERNEL_TOL)
}

pub fn transition_matrix_tol(q: &RateMatrix, t: f64, tol: f64) -> Result<Kernel> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Precondition(format!("time must be finite and nonnegative, got {t}")));
    }
    let n = q.dim();
    if t == 0.0 {
        return Ok(Kernel::identity(n));
    }
    let rows = par::map_collect(0..n, |a| {
        let mut e = vec![0.0; n];
        e[a] = 1.0;
        evolve_distribution(q, &e, t, tol)
    });
    Ok(Kernel::from_rows(rows))
}

/// Row `a` of `P(t)`.
pub fn transition_row(gen: &GeneratorMatrix, a: usize, t: f64) -> Vec<f64> {
    let mut e = vec![0.0; gen.dim()];
    e[a] = 1.0;
    evolve_distribution(gen.rates(), &e, t, DEFAULT_KERNEL_TOL)
}
