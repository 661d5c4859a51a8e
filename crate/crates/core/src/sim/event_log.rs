//! Ring sequences: Poisson ring times, rate-weighted edge choices and
//! permutations drawn from each edge's law.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use super::rng::RngSpec;
use crate::error::{Error, Result};
use crate::model::{apply_in_place, HypergraphInstance, LabeledConfig};

/// One ring: time, edge index, index into the edge's law support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub t: f64,
    pub edge: usize,
    pub perm: usize,
}

/// Precomputed cumulative weights for drawing rings.
#[derive(Debug, Clone)]
pub struct RingSampler<'a> {
    instance: &'a HypergraphInstance,
    total_rate: f64,
    edge_cdf: Vec<f64>,
    perm_cdf: Vec<Vec<f64>>,
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if let Some(last) = out.last().copied() {
        out.iter_mut().for_each(|c| *c /= last);
    }
    out
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

impl<'a> RingSampler<'a> {
    pub fn new(instance: &'a HypergraphInstance) -> Self {
        Self {
            instance,
            total_rate: instance.total_rate(),
            edge_cdf: cumulative(instance.edges().iter().map(|e| e.rate())),
            perm_cdf: instance
                .edges()
                .iter()
                .map(|e| cumulative(e.support().iter().map(|w| w.p)))
                .collect(),
        }
    }

    pub fn instance(&self) -> &'a HypergraphInstance {
        self.instance
    }

    /// The next ring strictly after `t`.
    pub fn next_ring(&self, rng: &mut ChaCha8Rng, t: f64) -> Ring {
        let gap: f64 = rng.sample(Exp1);
        let edge = draw(&self.edge_cdf, rng.random());
        let perm = draw(&self.perm_cdf[edge], rng.random());
        Ring {
            t: t + gap / self.total_rate,
            edge,
            perm,
        }
    }

    /// Rings in `(0, horizon]`, drawn lazily.
    pub fn rings<'s>(&'s self, mut rng: ChaCha8Rng, horizon: f64) -> impl Iterator<Item = Ring> + 's {
        let mut t = 0.0;
        std::iter::from_fn(move || {
            if self.total_rate <= 0.0 {
                return None;
            }
            let ring = self.next_ring(&mut rng, t);
            t = ring.t;
            (ring.t <= horizon).then_some(ring)
        })
    }

    /// Applies `ring` to a position vector.
    pub fn apply(&self, ring: &Ring, positions: &mut [usize]) {
        let e = &self.instance.edges()[ring.edge];
        apply_in_place(positions, e.vertices(), e.support()[ring.perm].perm.images());
    }

    /// Whether the ringing edge holds both `u` and `v`.
    pub fn holds_both(&self, ring: &Ring, u: usize, v: usize) -> bool {
        let e = &self.instance.edges()[ring.edge];
        e.contains(u) && e.contains(v)
    }
}

/// A stored realization of the graphical construction on `(0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub horizon: f64,
    pub rings: Vec<Ring>,
}

#[derive(Serialize)]
struct RingLine<'a> {
    t: f64,
    edge: usize,
    perm: &'a [usize],
}

/// Ring log of replica 0 of `rng`.
pub fn sample_event_log(instance: &HypergraphInstance, horizon: f64, rng: RngSpec) -> Result<EventLog> {
    EventLog::sample(instance, horizon, rng, 0)
}

impl EventLog {
    pub fn sample(instance: &HypergraphInstance, horizon: f64, rng: RngSpec, replica: u64) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::Precondition(format!("horizon must be finite and nonnegative, got {horizon}")));
        }
        let sampler = RingSampler::new(instance);
        Ok(Self {
            horizon,
            rings: sampler.rings(rng.replica(replica), horizon).collect(),
        })
    }

    fn check_window(&self, s: f64, t: f64) -> Result<()> {
        if 0.0 <= s && s <= t && t <= self.horizon {
            Ok(())
        } else {
            Err(Error::WindowOutsideHorizon {
                start: s,
                end: t,
                horizon: self.horizon,
            })
        }
    }

    /// Rings with time in `(s, t]`.
    pub fn window(&self, s: f64, t: f64) -> &[Ring] {
        let lo = self.rings.partition_point(|r| r.t <= s);
        let hi = self.rings.partition_point(|r| r.t <= t);
        &self.rings[lo..hi.max(lo)]
    }

    /// `I_[s,t](config)`: the composition of the rings in `(s, t]`.
    pub fn evolve(&self, instance: &HypergraphInstance, config: &LabeledConfig, s: f64, t: f64) -> Result<LabeledConfig> {
        self.check_window(s, t)?;
        let sampler = RingSampler::new(instance);
        let mut pos = config.positions().to_vec();
        for ring in self.window(s, t) {
            sampler.apply(ring, &mut pos);
        }
        Ok(LabeledConfig(pos))
    }

    /// Path of `config` started at time 0, one entry per ring that moves it.
    pub fn trajectory(&self, instance: &HypergraphInstance, config: &LabeledConfig) -> Trajectory {
        let sampler = RingSampler::new(instance);
        let mut pos = config.positions().to_vec();
        let mut jumps = Vec::new();
        for ring in &self.rings {
            let before = pos.clone();
            sampler.apply(ring, &mut pos);
            if pos != before {
                jumps.push((ring.t, LabeledConfig(pos.clone())));
            }
        }
        Trajectory {
            start: config.clone(),
            horizon: self.horizon,
            jumps,
        }
    }

    /// One JSON object per line: `{"t": .., "edge": .., "perm": [..]}`.
    pub fn to_json_lines(&self, instance: &HypergraphInstance) -> String {
        let mut out = String::new();
        for r in &self.rings {
            let line = RingLine {
                t: r.t,
                edge: r.edge,
                perm: instance.edges()[r.edge].support()[r.perm].perm.images(),
            };
            out.push_str(&serde_json::to_string(&line).expect("serializable"));
            out.push('\n');
        }
        out
    }
}

/// Piecewise-constant path; the value at a jump time is the post-jump state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start: LabeledConfig,
    pub horizon: f64,
    pub jumps: Vec<(f64, LabeledConfig)>,
}

impl Trajectory {
    pub fn at(&self, t: f64) -> &LabeledConfig {
        let i = self.jumps.partition_point(|(u, _)| *u <= t);
        if i == 0 {
            &self.start
        } else {
            &self.jumps[i - 1].1
        }
    }
}
