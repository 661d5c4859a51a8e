//! Projection of IP(k) onto EX(k) by forgetting labels.

use std::collections::BTreeMap;

use super::generator::GeneratorMatrix;
use super::sparse::RateMatrix;
use crate::error::{Error, Result};
use crate::model::{ProcessKind, SpaceKind, StateSpace};

const LUMP_TOL: f64 = 1e-12;

/// Lumps an IP(k) generator onto k-subsets, checking that every labeling of
/// a subset has the same aggregate rate to every other subset.
pub fn project_to_exclusion(ip: &GeneratorMatrix) -> Result<GeneratorMatrix> {
    let space = ip.space();
    if space.kind() != SpaceKind::Injective {
        return Err(Error::InvalidProcess(format!("{} is not an interchange generator", ip.label())));
    }
    let (n, k) = (space.n(), space.k());
    let target = StateSpace::new(SpaceKind::Subsets, n, k, usize::MAX)?;
    let scale = ip.rates().max_exit().max(1.0);
    let mut rows: Vec<Option<BTreeMap<usize, f64>>> = vec![None; target.len()];
    for a in 0..space.len() {
        let mut s = space.state(a);
        s.sort_unstable();
        let from = target.index(&s).expect("subset");
        let mut agg: BTreeMap<usize, f64> = BTreeMap::new();
        for (b, r) in ip.rates().row(a) {
            let mut t = space.state(b);
            t.sort_unstable();
            let to = target.index(&t).expect("subset");
            if to != from {
                *agg.entry(to).or_default() += r;
            }
        }
        match &rows[from] {
            None => rows[from] = Some(agg),
            Some(reference) => {
                let keys: std::collections::BTreeSet<usize> = reference.keys().chain(agg.keys()).copied().collect();
                for key in keys {
                    let x = reference.get(&key).copied().unwrap_or(0.0);
                    let y = agg.get(&key).copied().unwrap_or(0.0);
                    if (x - y).abs() > LUMP_TOL * scale {
                        return Err(Error::Internal(format!(
                            "labelings of {s:?} disagree on the rate to subset {key}: {x} vs {y}"
                        )));
                    }
                }
            }
        }
    }
    let rows = rows
        .into_iter()
        .map(|r| r.unwrap_or_default().into_iter().collect())
        .collect();
    Ok(GeneratorMatrix::new(
        ProcessKind::Ex.label(k),
        target,
        RateMatrix::from_rows(rows, None),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::generator::build_generator;
    use crate::exact::spectral::spectral_gap;
    use crate::exact::tv::mixing_time;
    use crate::generators;
    use crate::model::{state::DEFAULT_STATE_BUDGET as B, ProcessSpec};

    #[test]
    fn lumped_matches_direct_exclusion_generator() {
        for inst in [generators::cycle(5).unwrap(), generators::complete_uniform(5, 3).unwrap()] {
            for k in 1..=4 {
                let ip = build_generator(&ProcessSpec::ip(k, &inst).unwrap(), B).unwrap();
                let lumped = project_to_exclusion(&ip).unwrap();
                let direct = build_generator(&ProcessSpec::ex(k, &inst).unwrap(), B).unwrap();
                assert!((lumped.to_dense() - direct.to_dense()).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn full_occupancy_is_a_single_state() {
        let k4 = generators::complete(4).unwrap();
        let ip = build_generator(&ProcessSpec::ip(4, &k4).unwrap(), B).unwrap();
        let ex = project_to_exclusion(&ip).unwrap();
        assert_eq!(ex.dim(), 1);
        assert_eq!(ex.rates().nnz(), 0);
    }

    #[test]
    fn contraction_direction() {
        let k4 = generators::complete(4).unwrap();
        let ip = build_generator(&ProcessSpec::ip(2, &k4).unwrap(), B).unwrap();
        let ex = project_to_exclusion(&ip).unwrap();
        assert!(spectral_gap(&ex).unwrap() >= spectral_gap(&ip).unwrap() - 1e-10);

        let c5 = generators::cycle(5).unwrap();
        let ip = build_generator(&ProcessSpec::ip(2, &c5).unwrap(), B).unwrap();
        let ex = project_to_exclusion(&ip).unwrap();
        assert!(mixing_time(&ex, 0.25).unwrap() <= mixing_time(&ip, 0.25).unwrap() * (1.0 + 1e-6));
    }
}
