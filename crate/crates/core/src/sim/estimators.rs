//! Monte Carlo estimators. Replicas run in parallel with independent
//! streams; statistics are reduced in replica order.

use rand::Rng;
use serde::Serialize;

use super::event_log::{EventLog, RingSampler};
use super::rng::RngSpec;
use crate::error::{Error, Result};
use crate::exact::tv::tv;
use crate::model::{HypergraphInstance, LabeledConfig, SpaceKind, StateSpace, DEFAULT_STATE_BUDGET};
use crate::par;

/// Number of bootstrap resamples behind [`TvEstimate`] intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub replicas: usize,
}

impl Estimate {
    fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            se: (var / n).sqrt(),
            replicas: xs.len(),
        }
    }

    /// `|mean - value| <= z * se`, with a floor for zero-variance samples.
    pub fn agrees_with(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.se + 1e-12
    }
}

fn check_replicas(replicas: usize) -> Result<()> {
    if replicas == 0 {
        Err(Error::Precondition("at least one replica is required".into()))
    } else {
        Ok(())
    }
}

/// Rings of the window `(t1, t2]` whose edge holds both particles `i` and
/// `j` just before the ring. The configuration starts at time 0.
pub fn count_interactions(
    instance: &HypergraphInstance,
    start: &LabeledConfig,
    pair: (usize, usize),
    log: &EventLog,
    window: (f64, f64),
) -> Result<u64> {
    let (t1, t2) = window;
    if !(0.0 <= t1 && t1 <= t2 && t2 <= log.horizon) {
        return Err(Error::WindowOutsideHorizon {
            start: t1,
            end: t2,
            horizon: log.horizon,
        });
    }
    let sampler = RingSampler::new(instance);
    let mut pos = start.positions().to_vec();
    let mut count = 0;
    for ring in log.window(0.0, t2) {
        if ring.t > t1 && sampler.holds_both(ring, pos[pair.0], pos[pair.1]) {
            count += 1;
        }
        sampler.apply(ring, &mut pos);
    }
    Ok(count)
}

/// Mean number of interactions of `pair` during `window`.
pub fn estimate_interactions(
    instance: &HypergraphInstance,
    start: &LabeledConfig,
    pair: (usize, usize),
    window: (f64, f64),
    replicas: usize,
    rng: RngSpec,
) -> Result<Estimate> {
    check_replicas(replicas)?;
    let sampler = RingSampler::new(instance);
    let samples = par::map_collect(0..replicas, |r| {
        let mut pos = start.positions().to_vec();
        let mut count = 0u64;
        for ring in sampler.rings(rng.replica(r as u64), window.1) {
            if ring.t > window.0 && sampler.holds_both(&ring, pos[pair.0], pos[pair.1]) {
                count += 1;
            }
            sampler.apply(&ring, &mut pos);
        }
        count as f64
    });
    Ok(Estimate::from_samples(&samples))
}

/// Fraction of replicas in which the last particle has no interaction with
/// any other particle during `[s, 2s]`.
pub fn estimate_probj(
    instance: &HypergraphInstance,
    start: &LabeledConfig,
    s: f64,
    replicas: usize,
    rng: RngSpec,
) -> Result<Estimate> {
    check_replicas(replicas)?;
    let k = start.k();
    if k <= 1 {
        return Ok(Estimate {
            mean: 1.0,
            se: 0.0,
            replicas,
        });
    }
    let sampler = RingSampler::new(instance);
    let samples = par::map_collect(0..replicas, |r| {
        let mut pos = start.positions().to_vec();
        for ring in sampler.rings(rng.replica(r as u64), 2.0 * s) {
            if ring.t > s {
                let e = &instance.edges()[ring.edge];
                if e.contains(pos[k - 1]) && pos[..k - 1].iter().any(|&v| e.contains(v)) {
                    return 0.0;
                }
            }
            sampler.apply(&ring, &mut pos);
        }
        1.0
    });
    Ok(Estimate::from_samples(&samples))
}

/// Fraction of replicas in which a walker started at `x` is back at `x` at `t`.
pub fn estimate_heat_kernel(
    instance: &HypergraphInstance,
    x: usize,
    t: f64,
    replicas: usize,
    rng: RngSpec,
) -> Result<Estimate> {
    check_replicas(replicas)?;
    let sampler = RingSampler::new(instance);
    let samples = par::map_collect(0..replicas, |r| {
        let mut pos = [x];
        for ring in sampler.rings(rng.replica(r as u64), t) {
            sampler.apply(&ring, &mut pos);
        }
        if pos[0] == x {
            1.0
        } else {
            0.0
        }
    });
    Ok(Estimate::from_samples(&samples))
}

fn final_positions(sampler: &RingSampler<'_>, start: &[usize], t: f64, rng: RngSpec, replica: u64) -> Vec<usize> {
    let mut pos = start.to_vec();
    for ring in sampler.rings(rng.replica(replica), t) {
        sampler.apply(&ring, &mut pos);
    }
    pos
}

/// Empirical law of `I_t(start)` over the IP(k) state space.
pub fn estimate_law(
    instance: &HypergraphInstance,
    start: &LabeledConfig,
    t: f64,
    replicas: usize,
    rng: RngSpec,
) -> Result<(StateSpace, Vec<f64>)> {
    check_replicas(replicas)?;
    let space = StateSpace::new(SpaceKind::Injective, instance.n(), start.k(), DEFAULT_STATE_BUDGET)?;
    let sampler = RingSampler::new(instance);
    let finals = par::map_collect(0..replicas, |r| final_positions(&sampler, start.positions(), t, rng, r as u64));
    let mut law = vec![0.0; space.len()];
    for f in finals {
        law[space.index(&f).expect("injective")] += 1.0 / replicas as f64;
    }
    Ok((space, law))
}

/// Plug-in TV between the empirical laws from two starts, with a bootstrap
/// interval. The plug-in estimate is biased upward by roughly
/// `sqrt(states / replicas)`; `bias_scale` reports that figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvEstimate {
    pub estimate: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bias_scale: f64,
    pub replicas: usize,
}

/// Both starts are driven by the same ring logs (replica `r` uses one log
/// for both), so identical starts give an estimate of exactly 0.
///
/// `coarsen` maps a final configuration to a bin in `0..bins`; without it
/// the configuration must index an enumerable IP(k) space.
pub fn empirical_tv(
    instance: &HypergraphInstance,
    starts: (&LabeledConfig, &LabeledConfig),
    t: f64,
    replicas: usize,
    rng: RngSpec,
    coarsen: Option<(&(dyn Fn(&[usize]) -> usize + Sync), usize)>,
) -> Result<TvEstimate> {
    check_replicas(replicas)?;
    let k = starts.0.k();
    if starts.1.k() != k {
        return Err(Error::Precondition("starts must hold the same number of particles".into()));
    }
    let space = match coarsen {
        Some(_) => None,
        None => Some(StateSpace::new(SpaceKind::Injective, instance.n(), k, DEFAULT_STATE_BUDGET).map_err(|_| {
            Error::Precondition("state space not enumerable; supply a coarsening map".into())
        })?),
    };
    let bins = match (&space, coarsen) {
        (Some(s), _) => s.len(),
        (None, Some((_, b))) => b,
        _ => unreachable!(),
    };
    let bin = |pos: &[usize]| match (&space, coarsen) {
        (Some(s), _) => s.index(pos).expect("injective"),
        (None, Some((f, _))) => f(pos),
        _ => unreachable!(),
    };
    let sampler = RingSampler::new(instance);
    let pairs: Vec<(usize, usize)> = par::map_collect(0..replicas, |r| {
        let a = final_positions(&sampler, starts.0.positions(), t, rng, r as u64);
        let b = final_positions(&sampler, starts.1.positions(), t, rng, r as u64);
        (bin(&a), bin(&b))
    });
    let plug_in = |idx: &mut dyn Iterator<Item = usize>| {
        let mut mu = vec![0.0; bins];
        let mut nu = vec![0.0; bins];
        let w = 1.0 / replicas as f64;
        for i in idx {
            mu[pairs[i].0] += w;
            nu[pairs[i].1] += w;
        }
        tv(&mu, &nu)
    };
    let estimate = plug_in(&mut (0..replicas));
    let boot_rng = rng.with_stream(rng.stream ^ 0xb007_5742_0000_0000);
    let mut boot: Vec<f64> = par::map_collect(0..BOOTSTRAP_RESAMPLES, |b| {
        let mut g = boot_rng.replica(b as u64);
        let draws: Vec<usize> = (0..replicas).map(|_| g.random_range(0..replicas)).collect();
        plug_in(&mut draws.into_iter())
    });
    let mean = boot.iter().sum::<f64>() / boot.len() as f64;
    let se = (boot.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (boot.len() - 1) as f64).sqrt();
    boot.sort_by(f64::total_cmp);
    let q = |p: f64| boot[((p * (boot.len() - 1) as f64).round() as usize).min(boot.len() - 1)];
    Ok(TvEstimate {
        estimate,
        se,
        ci_low: q(0.025),
        ci_high: q(0.975),
        bias_scale: (bins as f64 / replicas as f64).sqrt(),
        replicas,
    })
}
