use serde::{Deserialize, Serialize};

use super::instance::HypergraphInstance;
use super::state::{SpaceKind, StateSpace};
use crate::error::{Error, Result};

/// Which process runs on an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    /// `k` independent random walks.
    Rw,
    /// Interchange process with `k` labeled particles.
    Ip,
    /// Exclusion process with `k` unlabeled particles.
    Ex,
    /// Two independent walkers observed only while apart.
    Q2,
}

impl ProcessKind {
    pub fn space_kind(self) -> SpaceKind {
        match self {
            ProcessKind::Rw => SpaceKind::Product,
            ProcessKind::Ip | ProcessKind::Q2 => SpaceKind::Injective,
            ProcessKind::Ex => SpaceKind::Subsets,
        }
    }

    pub fn label(self, k: usize) -> String {
        match self {
            ProcessKind::Rw => format!("RW({k})"),
            ProcessKind::Ip => format!("IP({k})"),
            ProcessKind::Ex => format!("EX({k})"),
            ProcessKind::Q2 => "Q(2)".into(),
        }
    }
}

impl std::str::FromStr for ProcessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rw" => Ok(ProcessKind::Rw),
            "ip" => Ok(ProcessKind::Ip),
            "ex" => Ok(ProcessKind::Ex),
            "q2" => Ok(ProcessKind::Q2),
            other => Err(Error::InvalidProcess(format!("unknown process `{other}`"))),
        }
    }
}

/// A process kind with its particle count on a given instance.
#[derive(Debug, Clone, Copy)]
pub struct ProcessSpec<'a> {
    pub kind: ProcessKind,
    pub k: usize,
    pub instance: &'a HypergraphInstance,
}

impl<'a> ProcessSpec<'a> {
    pub fn new(kind: ProcessKind, k: usize, instance: &'a HypergraphInstance) -> Result<Self> {
        let n = instance.n();
        if k == 0 {
            return Err(Error::InvalidProcess("k must be at least 1".into()));
        }
        match kind {
            ProcessKind::Q2 if k != 2 => Err(Error::InvalidProcess("Q(2) has exactly two particles".into())),
            ProcessKind::Ip | ProcessKind::Ex | ProcessKind::Q2 if k > n => {
                Err(Error::InvalidProcess(format!("k = {k} exceeds n = {n}")))
            }
            _ => Ok(Self { kind, k, instance }),
        }
    }

    pub fn rw(k: usize, instance: &'a HypergraphInstance) -> Result<Self> {
        Self::new(ProcessKind::Rw, k, instance)
    }

    pub fn ip(k: usize, instance: &'a HypergraphInstance) -> Result<Self> {
        Self::new(ProcessKind::Ip, k, instance)
    }

    pub fn ex(k: usize, instance: &'a HypergraphInstance) -> Result<Self> {
        Self::new(ProcessKind::Ex, k, instance)
    }

    pub fn q2(instance: &'a HypergraphInstance) -> Result<Self> {
        Self::new(ProcessKind::Q2, 2, instance)
    }

    pub fn label(&self) -> String {
        self.kind.label(self.k)
    }

    /// Enumerates the state space, refusing above `budget` states.
    pub fn enumerate_states(&self, budget: usize) -> Result<StateSpace> {
        StateSpace::new(self.kind.space_kind(), self.instance.n(), self.k, budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::model::state::DEFAULT_STATE_BUDGET;

    #[test]
    fn state_counts_per_kind() {
        let k4 = generators::complete(4).unwrap();
        let b = DEFAULT_STATE_BUDGET;
        assert_eq!(ProcessSpec::ip(2, &k4).unwrap().enumerate_states(b).unwrap().len(), 12);
        assert_eq!(ProcessSpec::ex(2, &k4).unwrap().enumerate_states(b).unwrap().len(), 6);
        assert_eq!(ProcessSpec::rw(2, &k4).unwrap().enumerate_states(b).unwrap().len(), 16);
        assert_eq!(ProcessSpec::q2(&k4).unwrap().enumerate_states(b).unwrap().len(), 12);
    }

    #[test]
    fn rejects_bad_particle_counts() {
        let k4 = generators::complete(4).unwrap();
        assert!(ProcessSpec::ip(5, &k4).is_err());
        assert!(ProcessSpec::new(ProcessKind::Q2, 3, &k4).is_err());
        assert!(ProcessSpec::rw(0, &k4).is_err());
        assert!(ProcessSpec::rw(5, &k4).is_ok());
    }
}
