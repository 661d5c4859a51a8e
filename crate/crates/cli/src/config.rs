//! Resolved experiment configuration: the instance, processes and grids a
//! command works on, plus everything needed to rerun it.

use interchange_lab::generators::{self, GeneratorParams};
use interchange_lab::{HypergraphInstance, ProcessKind};
use serde::Serialize;

use crate::args::{Cli, Command, Common};
use crate::RunError;

#[derive(Debug, Serialize)]
pub struct ExperimentConfig<'a> {
    pub command: &'a Command,
    pub flags: &'a Common,
    /// Label used in reports, e.g. `cycle(n=5)`.
    #[serde(skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<&'a HypergraphInstance>,
    pub processes: Vec<(ProcessKind, usize)>,
}

/// Loads or generates the instance named by the flags.
pub fn resolve_instance(c: &Common) -> Result<(HypergraphInstance, String), RunError> {
    if let Some(path) = &c.instance {
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok((generators::from_file(path)?, label));
    }
    let Some(name) = c.generator.as_deref() else {
        return Err(RunError::Operational("give --instance FILE or --generator NAME".into()));
    };
    let params = GeneratorParams {
        n: c.n,
        d: c.d,
        m: c.m,
        s: c.s,
        seed: c.gen_seed,
        rate: c.rate,
        law: c.law.clone(),
        file: None,
    };
    let inst = generators::generate_instance(name, &params)?;
    let mut parts = Vec::new();
    for (key, v) in [("n", c.n), ("d", c.d), ("m", c.m), ("s", c.s)] {
        if let Some(v) = v {
            parts.push(format!("{key}={v}"));
        }
    }
    if let Some(seed) = c.gen_seed {
        parts.push(format!("seed={seed}"));
    }
    if let Some(rate) = c.rate {
        parts.push(format!("rate={rate}"));
    }
    if let Some(law) = &c.law {
        parts.push(format!("law={law}"));
    }
    Ok((inst, format!("{name}({})", parts.join(","))))
}

/// Parses `ip2`, `rw1`, `q2` or a bare kind combined with every `--k`.
pub fn parse_processes(items: &[String], ks: &[usize]) -> Result<Vec<(ProcessKind, usize)>, RunError> {
    let mut out = Vec::new();
    for item in items {
        let split = item.find(|ch: char| ch.is_ascii_digit()).unwrap_or(item.len());
        let (kind, digits) = item.split_at(split);
        if kind.eq_ignore_ascii_case("q") && digits == "2" {
            out.push((ProcessKind::Q2, 2));
            continue;
        }
        let kind: ProcessKind = kind.parse()?;
        if kind == ProcessKind::Q2 {
            out.push((kind, 2));
        } else if digits.is_empty() {
            if ks.is_empty() {
                return Err(RunError::Operational(format!("process `{item}` needs --k")));
            }
            out.extend(ks.iter().map(|&k| (kind, k)));
        } else {
            let k = digits
                .parse()
                .map_err(|_| RunError::Operational(format!("bad particle count in `{item}`")))?;
            out.push((kind, k));
        }
    }
    Ok(out)
}

/// Checks the invariants no flag parser can: grids non-empty and a seed for
/// anything random.
pub fn validate(cli: &Cli) -> Result<(), RunError> {
    let c = &cli.common;
    if c.eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(RunError::Operational("every --eps must lie in (0, 1)".into()));
    }
    if c.threads == Some(0) {
        return Err(RunError::Operational("--threads must be positive".into()));
    }
    let need_seed = match &cli.command {
        Command::Simulate(_) => Some("simulate"),
        Command::Verify(v) => v
            .check
            .iter()
            .find(|ch| ch.needs_seed() || **ch == crate::args::Check::All)
            .map(|ch| ch.name()),
        _ => None,
    };
    if let (Some(what), None) = (need_seed, c.seed) {
        return Err(RunError::Operational(format!(
            "`{what}` draws random numbers; pass --seed or set INTERCHANGE_LAB_SEED"
        )));
    }
    if let Command::Verify(v) = &cli.command {
        if v.times.is_empty() || v.trials == 0 {
            return Err(RunError::Operational("--times and --trials must be non-empty".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn process_names() {
        let p = parse_processes(&["ip2".into(), "rw".into(), "q2".into(), "EX3".into()], &[1, 2]).unwrap();
        assert_eq!(
            p,
            vec![
                (ProcessKind::Ip, 2),
                (ProcessKind::Rw, 1),
                (ProcessKind::Rw, 2),
                (ProcessKind::Q2, 2),
                (ProcessKind::Ex, 3)
            ]
        );
        assert!(parse_processes(&["ip".into()], &[]).is_err());
        assert!(parse_processes(&["zz2".into()], &[]).is_err());
    }
}
