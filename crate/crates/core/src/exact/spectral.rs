//! Spectral gaps of reversible generators.
//!
//! Every reversible generator built here is reversible with respect to the
//! uniform law, so `-Q` is symmetric and its spectrum is read off directly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generator::GeneratorMatrix;
use super::sparse::RateMatrix;
use crate::error::{Error, Result};

/// Below this many states the spectrum is computed densely.
pub const DENSE_LIMIT: usize = 2000;

const LANCZOS_TOL: f64 = 1e-11;

fn check_gap_preconditions(gen: &GeneratorMatrix) -> Result<()> {
    if !gen.is_reversible() {
        return Err(Error::NotReversible);
    }
    if !gen.is_irreducible() {
        return Err(Error::Reducible);
    }
    if gen.dim() < 2 {
        return Err(Error::Precondition(format!(
            "{} has a single state; its spectral gap is undefined",
            gen.label()
        )));
    }
    Ok(())
}

/// Smallest nonzero eigenvalue of `-Q`.
pub fn spectral_gap(gen: &GeneratorMatrix) -> Result<f64> {
    check_gap_preconditions(gen)?;
    if gen.dim() < DENSE_LIMIT {
        let mut vals: Vec<f64> = neg_generator(gen.rates()).symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals[1])
    } else {
        lanczos_gap(gen.rates())
    }
}

/// `1 / gap`.
pub fn relaxation_time(gen: &GeneratorMatrix) -> Result<f64> {
    spectral_gap(gen).map(|g| 1.0 / g)
}

/// Gap together with an eigenvector (unit Euclidean norm), dense only.
pub fn gap_eigenvector(gen: &GeneratorMatrix) -> Result<(f64, DVector<f64>)> {
    check_gap_preconditions(gen)?;
    if gen.dim() >= DENSE_LIMIT {
        return Err(Error::Precondition(format!(
            "eigenvectors are only computed below {DENSE_LIMIT} states"
        )));
    }
    let (vals, vecs) = laplacian_spectrum(neg_generator(gen.rates()));
    Ok((vals[1], vecs.column(1).into_owned()))
}

/// `-Q` as a dense symmetric matrix.
pub fn neg_generator(q: &RateMatrix) -> DMatrix<f64> {
    let n = q.dim();
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        m[(a, a)] = q.exit()[a];
        for (b, r) in q.row(a) {
            m[(a, b)] -= r;
        }
    }
    // symmetrize away rounding differences
    let t = m.transpose();
    (m + t) * 0.5
}

/// Ascending eigenvalues and matching eigenvector columns of a symmetric matrix.
pub fn laplacian_spectrum(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_columns(
        &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Lanczos with full reorthogonalization on `-Q` restricted to the
/// complement of the constants, restarted from the current Ritz vector.
fn lanczos_gap(q: &RateMatrix) -> Result<f64> {
    let n = q.dim();
    let c = 1.0 / (n as f64).sqrt();
    let deflate = |v: &mut [f64]| {
        let s: f64 = v.iter().sum::<f64>() * c;
        v.iter_mut().for_each(|x| *x -= s * c);
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let apply = |x: &[f64], out: &mut [f64]| {
        q.right_mul(x, out);
        out.iter_mut().for_each(|y| *y = -*y);
    };

    // fixed-seed random start: generic, so no symmetry class is missed
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let max_basis = n.saturating_sub(1).min(300);
    let mut last = f64::INFINITY;
    for _restart in 0..40 {
        deflate(&mut start);
        let nv = norm(&start);
        if nv == 0.0 {
            return Err(Error::Internal("Lanczos start vector vanished".into()));
        }
        let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / nv).collect()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![0.0; n];
        for j in 0..max_basis {
            apply(&basis[j], &mut w);
            deflate(&mut w);
            let a: f64 = w.iter().zip(&basis[j]).map(|(x, y)| x * y).sum();
            alpha.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let p: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
                }
                deflate(&mut w);
            }
            let bnorm = norm(&w);
            let breakdown = bnorm < 1e-10 * a.abs().max(1.0);
            let done = breakdown || j + 1 == max_basis;
            if !done {
                beta.push(bnorm);
                basis.push(w.iter().map(|x| x / bnorm).collect());
            }
            if done || (j + 1) % 20 == 0 {
                let m = alpha.len();
                let t = DMatrix::from_fn(m, m, |r, s| {
                    if r == s {
                        alpha[r]
                    } else if r + 1 == s || s + 1 == r {
                        beta[r.min(s)]
                    } else {
                        0.0
                    }
                });
                let (vals, vecs) = laplacian_spectrum(t);
                let theta = vals[0];
                let resid = if breakdown { 0.0 } else { (bnorm * vecs[(m - 1, 0)]).abs() };
                if resid <= LANCZOS_TOL * theta.abs().max(1e-300) {
                    return Ok(theta);
                }
                if done {
                    // restart from the Ritz vector
                    let mut ritz = vec![0.0; n];
                    for (i, b) in basis.iter().take(m).enumerate() {
                        ritz.iter_mut().zip(b).for_each(|(x, y)| *x += vecs[(i, 0)] * y);
                    }
                    start = ritz;
                    last = theta;
                    break;
                }
            }
        }
    }
    if last.is_finite() {
        Ok(last)
    } else {
        Err(Error::Internal("Lanczos did not converge".into()))
    }
}

#[cfg(test)]
pub(crate) fn lanczos_for_tests(q: &RateMatrix) -> Result<f64> {
    lanczos_gap(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::generator::{build_generator, two_state_chain};
    use crate::generators;
    use crate::model::{state::DEFAULT_STATE_BUDGET as B, ProcessSpec};

    #[test]
    fn two_state_relaxation_time() {
        assert!((relaxation_time(&two_state_chain()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn k4_rw1_and_ip2() {
        let k4 = generators::complete(4).unwrap();
        let rw1 = build_generator(&ProcessSpec::rw(1, &k4).unwrap(), B).unwrap();
        let ip2 = build_generator(&ProcessSpec::ip(2, &k4).unwrap(), B).unwrap();
        assert!((spectral_gap(&rw1).unwrap() - 4.0).abs() < 1e-10);
        assert!((relaxation_time(&ip2).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        for inst in [generators::cycle(7).unwrap(), generators::complete_uniform(6, 3).unwrap()] {
            let g = build_generator(&ProcessSpec::ip(3, &inst).unwrap(), B).unwrap();
            let dense = spectral_gap(&g).unwrap();
            let iter = lanczos_for_tests(g.rates()).unwrap();
            assert!((dense - iter).abs() <= 1e-9 * dense, "{dense} vs {iter}");
        }
    }

    #[test]
    fn non_reversible_is_refused() {
        // a directed 3-cycle law on a single triangle: rotation only
        let law = crate::model::explicit_law(vec![(vec![1, 2, 0], 1.0)]);
        let inst = crate::model::HypergraphInstance::new(
            3,
            vec![crate::model::Hyperedge::new(vec![0, 1, 2], 1.0, law)],
        )
        .unwrap();
        let g = build_generator(&ProcessSpec::ip(1, &inst).unwrap(), B).unwrap();
        assert!(g.stationary().is_some());
        assert!(matches!(spectral_gap(&g), Err(Error::NotReversible)));
    }
}
