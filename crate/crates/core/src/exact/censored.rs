//! Q(2): two independent walkers watched only while they are apart.
//!
//! With `A` the off-diagonal pairs and `B` the diagonal pairs `(x, x)` of
//! `V^2`, the censored generator is the Schur complement
//! `Q_AA + Q_AB (-Q_BB)^{-1} Q_BA`.

use nalgebra::DMatrix;

use super::generator::{rw_generator, GeneratorMatrix};
use super::sparse::RateMatrix;
use crate::error::{Error, Result};
use crate::model::{HypergraphInstance, ProcessKind, ProcessSpec};

/// Builds the censored two-walker generator on `(V)_2`.
pub fn build_censored_q2(instance: &HypergraphInstance, budget: usize) -> Result<GeneratorMatrix> {
    let n = instance.n();
    let rw2 = rw_generator(instance, 2, budget)?;
    let target = ProcessSpec::q2(instance)?.enumerate_states(budget)?;
    let product = rw2.space();
    let q = rw2.rates();

    // -Q_BB is n x n; invert it once and apply to Q_BA.
    let mut neg_qbb = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        let a = product.index(&[u, u]).expect("diagonal state");
        neg_qbb[(u, u)] = q.exit()[a];
        for (b, rate) in q.row(a) {
            let s = product.state(b);
            if s[0] == s[1] {
                neg_qbb[(u, s[0])] -= rate;
            }
        }
    }
    let mut qba = DMatrix::<f64>::zeros(n, target.len());
    for u in 0..n {
        let a = product.index(&[u, u]).expect("diagonal state");
        for (b, rate) in q.row(a) {
            let s = product.state(b);
            if s[0] != s[1] {
                qba[(u, target.index(&s).expect("off-diagonal"))] += rate;
            }
        }
    }
    let lu = neg_qbb.lu();
    let exit_dist = lu
        .solve(&qba)
        .ok_or_else(|| Error::Internal("diagonal block of RW(2) is singular; move graph disconnected".into()))?;

    let scale = q.max_exit().max(1.0);
    let rows = (0..target.len())
        .map(|ai| {
            let x = target.state(ai);
            let a = product.index(&x).expect("in product space");
            let mut row: Vec<(usize, f64)> = Vec::new();
            let mut via_diagonal = vec![0.0; target.len()];
            let mut any = false;
            for (b, rate) in q.row(a) {
                let s = product.state(b);
                if s[0] == s[1] {
                    any = true;
                    for (c, v) in via_diagonal.iter_mut().enumerate() {
                        *v += rate * exit_dist[(s[0], c)];
                    }
                } else {
                    row.push((target.index(&s).expect("off-diagonal"), rate));
                }
            }
            if any {
                row.extend(
                    via_diagonal
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, v)| v > 1e-14 * scale),
                );
            }
            row
        })
        .collect();
    Ok(GeneratorMatrix::new(
        ProcessKind::Q2.label(2),
        target,
        RateMatrix::from_rows(rows, None),
    ))
}
