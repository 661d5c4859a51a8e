use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use interchange_lab::model::DEFAULT_STATE_BUDGET;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "interchange-lab", version, about = "Interchange, exclusion and random-walk processes on hypergraphs")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Instance JSON file.
    #[arg(long, global = true, conflicts_with = "generator")]
    pub instance: Option<PathBuf>,
    /// Named generator: cycle, path, star, complete, torus, hypercube,
    /// complete-uniform, random-regular, single-hyperedge.
    #[arg(long, global = true)]
    pub generator: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Dimension (torus, hypercube) or degree (random-regular).
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Side length of the torus.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Edge size of complete-uniform.
    #[arg(long, global = true)]
    pub s: Option<usize>,
    /// Rate of every edge.
    #[arg(long, global = true)]
    pub rate: Option<f64>,
    /// Permutation law override: uniform, transposition, three-cycles.
    #[arg(long, global = true)]
    pub law: Option<String>,
    /// Seed of the random-regular generator.
    #[arg(long, global = true)]
    pub gen_seed: Option<u64>,
    /// Processes such as ip2, rw1, ex3, q2; a bare kind takes its particle
    /// counts from --k.
    #[arg(long, global = true, value_delimiter = ',')]
    pub process: Vec<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Master seed for every random quantity.
    #[arg(long, global = true, env = "INTERCHANGE_LAB_SEED")]
    pub seed: Option<u64>,
    /// Relative tolerance of mixing-time bisection.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest state space built exactly.
    #[arg(long, global = true, default_value_t = DEFAULT_STATE_BUDGET)]
    pub budget_states: usize,
    /// Worker thread cap.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Output directory; without it the main result goes to stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Write the instance as JSON.
    Gen,
    /// Exact analysis: state counts, gaps, mixing times, curves, exports.
    Analyze(AnalyzeArgs),
    /// Monte Carlo estimates from the graphical construction.
    Simulate(SimulateArgs),
    /// Run inequality checks.
    Verify(VerifyArgs),
    /// Merge reports.json files from earlier verify runs.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    Tv,
    BarD,
    Hk,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub curve: Option<Curve>,
    /// Time grid `lo:hi:points`, log-spaced.
    #[arg(long)]
    pub grid: Option<Grid>,
    /// HK exponent for `--curve hk`.
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    /// Also write the generator as a coordinate list and the state legend.
    #[arg(long)]
    pub export: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    Probj,
    HeatKernel,
    Interactions,
    Tv,
    EventLog,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub estimate: EstimateKind,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
    /// Starting positions, one vertex per particle.
    #[arg(long, value_delimiter = ',')]
    pub start: Vec<usize>,
    /// Second start for `tv`.
    #[arg(long, value_delimiter = ',')]
    pub start2: Vec<usize>,
    /// Particle pair for `interactions`.
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1])]
    pub pair: Vec<usize>,
    /// Window `t1,t2` for `interactions`.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    pub window: Vec<f64>,
    /// `s` for `probj`, time for `tv`, horizon for `event-log`.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    /// Vertex for `heat-kernel`.
    #[arg(long, default_value_t = 0)]
    pub vertex: usize,
    /// Time grid for `heat-kernel`.
    #[arg(long, default_value = "0.1:10:20")]
    pub grid: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Clr,
    Ratios,
    Dirichlet,
    Trel,
    Probj,
    Submulti,
    Main,
    Sandwich,
    Mixtrel,
    Hk,
    Negcorr,
    En,
    All,
}

impl Check {
    pub const EACH: [Check; 12] = [
        Check::Clr,
        Check::Ratios,
        Check::Dirichlet,
        Check::Trel,
        Check::Probj,
        Check::Submulti,
        Check::Main,
        Check::Sandwich,
        Check::Mixtrel,
        Check::Hk,
        Check::Negcorr,
        Check::En,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Clr => "clr",
            Check::Ratios => "ratios",
            Check::Dirichlet => "dirichlet",
            Check::Trel => "trel",
            Check::Probj => "probj",
            Check::Submulti => "submulti",
            Check::Main => "main",
            Check::Sandwich => "sandwich",
            Check::Mixtrel => "mixtrel",
            Check::Hk => "hk",
            Check::Negcorr => "negcorr",
            Check::En => "en",
            Check::All => "all",
        }
    }

    /// Checks drawing random numbers.
    pub fn needs_seed(self) -> bool {
        matches!(self, Check::Dirichlet | Check::Probj)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub check: Vec<Check>,
    /// Random test functions per Dirichlet comparison.
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Replicas when the probJ chain exceeds the budget.
    #[arg(long, default_value_t = interchange_lab::theorems::MIN_MC_REPLICAS)]
    pub replicas: usize,
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    /// HK constant to assert; the minimal one is always reported.
    #[arg(long)]
    pub c: Option<f64>,
    /// Times for `negcorr` and the `en` identity.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub times: Vec<f64>,
    /// `s = alpha * t_mix^{RW(1)}(eps)` for `en`.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Time grid for `hk`; defaults to `[t_rel, 50 t_rel]`.
    #[arg(long)]
    pub grid: Option<Grid>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// reports.json files or directories holding one.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

/// `lo:hi:points`, log-spaced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn times(&self) -> Vec<f64> {
        interchange_lab::exact::tv::log_grid(self.lo, self.hi, self.points)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, points] = parts[..] else {
            return Err(format!("expected lo:hi:points, got `{s}`"));
        };
        let lo: f64 = lo.parse().map_err(|e| format!("lo: {e}"))?;
        let hi: f64 = hi.parse().map_err(|e| format!("hi: {e}"))?;
        let points: usize = points.parse().map_err(|e| format!("points: {e}"))?;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) || points == 0 {
            return Err(format!("need 0 < lo <= hi and at least one point, got `{s}`"));
        }
        Ok(Self { lo, hi, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0.5:8:5".parse().unwrap();
        assert_eq!(g.times().len(), 5);
        assert!("1:2".parse::<Grid>().is_err());
        assert!("0:2:3".parse::<Grid>().is_err());
        assert!("1:2:0".parse::<Grid>().is_err());
    }

    #[test]
    fn check_names() {
        assert_eq!(Check::Submulti.name(), "submulti");
        assert!(Check::EACH.iter().all(|c| *c != Check::All));
    }
}
