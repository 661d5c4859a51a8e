use std::fmt::Write;
use std::path::PathBuf;

use interchange_lab::dirichlet::{comparison_report, trel_comparison};
use interchange_lab::exact::export::{coordinate_list, state_legend};
use interchange_lab::exact::tv::{log_grid, mixing_time_tol, MIXING_REL_TOL};
use interchange_lab::exact::{
    bar_d_k, build_generator, exact_expected_interactions, exact_probj, relaxation_time, spectral_gap,
    transition_matrix, tv, worst_case_d, GeneratorMatrix,
};
use interchange_lab::model::{check_ip2_assumptions, LabeledConfig};
use interchange_lab::report::{summary_table, Status, VerificationReport};
use interchange_lab::sim::{
    empirical_tv, estimate_heat_kernel, estimate_interactions, estimate_probj, sample_event_log, RngSpec,
};
use interchange_lab::theorems::{self, ProbJOptions};
use interchange_lab::{par, Error, HypergraphInstance, ProcessKind, ProcessSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::{AnalyzeArgs, Check, Cli, Command, Curve, EstimateKind, ReportArgs, SimulateArgs, VerifyArgs};
use crate::config::{parse_processes, resolve_instance, validate, ExperimentConfig};
use crate::output::Outputs;
use crate::RunError;

const EN_IDENTITY_TOL: f64 = 1e-10;

pub fn run(cli: Cli) -> Result<(), RunError> {
    validate(&cli)?;
    if let Some(t) = cli.common.threads {
        par::set_threads(t)?;
    }
    let mut out = Outputs::default();
    if let Command::Report(args) = &cli.command {
        let failed = report(args, &mut out)?;
        let config = ExperimentConfig {
            command: &cli.command,
            flags: &cli.common,
            label: String::new(),
            instance: None,
            processes: Vec::new(),
        };
        out.finish(cli.common.out.as_deref(), &config)?;
        return if failed { Err(RunError::Failed) } else { Ok(()) };
    }

    let (instance, label) = resolve_instance(&cli.common)?;
    let mut processes = parse_processes(&cli.common.process, &cli.common.k)?;
    if processes.is_empty() && matches!(cli.command, Command::Analyze(_)) {
        processes.push((ProcessKind::Ip, 2));
    }
    let ctx = Ctx {
        cli: &cli,
        inst: &instance,
        label: &label,
        budget: cli.common.budget_states,
    };
    let failed = match &cli.command {
        Command::Gen => {
            out.file("instance.json", instance.to_json_pretty() + "\n");
            out.summary(format!("{label}: {} vertices, {} edges\n", instance.n(), instance.edges().len()));
            false
        }
        Command::Analyze(a) => {
            analyze(&ctx, a, &processes, &mut out)?;
            false
        }
        Command::Simulate(s) => {
            simulate(&ctx, s, &mut out)?;
            false
        }
        Command::Verify(v) => verify(&ctx, v, &mut out)?,
        Command::Report(_) => unreachable!(),
    };
    let config = ExperimentConfig {
        command: &cli.command,
        flags: &cli.common,
        label: label.clone(),
        instance: Some(&instance),
        processes,
    };
    out.finish(cli.common.out.as_deref(), &config)?;
    if failed {
        Err(RunError::Failed)
    } else {
        Ok(())
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    inst: &'a HypergraphInstance,
    label: &'a str,
    budget: usize,
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.cli.common.seed.expect("validated")
    }

    fn eps_or(&self, default: &[f64]) -> Vec<f64> {
        let mut eps = if self.cli.common.eps.is_empty() {
            default.to_vec()
        } else {
            self.cli.common.eps.clone()
        };
        eps.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        eps
    }

    fn ks_or(&self, default: Vec<usize>) -> Vec<usize> {
        if self.cli.common.k.is_empty() {
            default
        } else {
            self.cli.common.k.clone()
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, RunError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| RunError::Operational(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn slug(kind: ProcessKind, k: usize) -> String {
    match kind {
        ProcessKind::Q2 => "q2".into(),
        ProcessKind::Rw => format!("rw{k}"),
        ProcessKind::Ip => format!("ip{k}"),
        ProcessKind::Ex => format!("ex{k}"),
    }
}

/// `None` when the exact counterpart does not fit in the budget.
fn within_budget<T>(r: interchange_lab::Result<T>) -> Result<Option<T>, RunError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::StateSpaceTooLarge { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn two_column_csv(times: &[f64], values: &[f64]) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in times.iter().zip(values) {
        writeln!(s, "{t},{v}").unwrap();
    }
    s
}

fn default_tv_grid(gen: &GeneratorMatrix) -> Result<Vec<f64>, RunError> {
    let tm = mixing_time_tol(gen, 0.25, MIXING_REL_TOL)?;
    let mut times = vec![0.0];
    times.extend(log_grid(tm / 50.0, 5.0 * tm, 40));
    Ok(times)
}

fn analyze(ctx: &Ctx<'_>, a: &AnalyzeArgs, processes: &[(ProcessKind, usize)], out: &mut Outputs) -> Result<(), RunError> {
    let tol = ctx.cli.common.tol.unwrap_or(MIXING_REL_TOL);
    let eps = ctx.eps_or(&[0.25]);
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut summary = String::new();
    for &(kind, k) in processes {
        let gen = build_generator(&ProcessSpec::new(kind, k, ctx.inst)?, ctx.budget)?;
        let name = slug(kind, k);
        let (reversible, irreducible) = (gen.is_reversible(), gen.is_irreducible());
        let gap = if reversible && irreducible {
            Some(spectral_gap(&gen)?)
        } else {
            None
        };
        let mut mixing = Vec::new();
        if irreducible {
            for &e in &eps {
                mixing.push(json!({"eps": e, "t_mix": mixing_time_tol(&gen, e, tol)?}));
            }
        }
        let mut row = json!({
            "process": gen.label(),
            "states": gen.dim(),
            "reversible": reversible,
            "irreducible": irreducible,
            "spectral_gap": gap,
            "t_rel": gap.map(|g| 1.0 / g),
            "mixing_times": mixing,
        });
        write!(summary, "{}: {} states", gen.label(), gen.dim()).unwrap();
        if let Some(g) = gap {
            write!(summary, ", gap {g:.6}, t_rel {:.6}", 1.0 / g).unwrap();
        } else {
            write!(summary, ", reversible {reversible}, irreducible {irreducible}").unwrap();
        }
        for m in row["mixing_times"].as_array().unwrap() {
            write!(summary, ", t_mix({}) {:.6}", m["eps"], m["t_mix"].as_f64().unwrap()).unwrap();
        }
        summary.push('\n');

        match a.curve {
            Some(Curve::Tv) | Some(Curve::BarD) => {
                let times = match a.grid {
                    Some(g) => g.times(),
                    None => default_tv_grid(&gen)?,
                };
                let values = if a.curve == Some(Curve::Tv) {
                    times.iter().map(|&t| worst_case_d(&gen, t)).collect::<interchange_lab::Result<Vec<_>>>()?
                } else {
                    times.iter().map(|&t| bar_d_k(&gen, t)).collect::<interchange_lab::Result<Vec<_>>>()?
                };
                let tag = if a.curve == Some(Curve::Tv) { "tv" } else { "bar-d" };
                files.push((format!("{tag}-{name}.csv"), two_column_csv(&times, &values)));
            }
            Some(Curve::Hk) => {
                let times = match a.grid {
                    Some(g) => g.times(),
                    None => {
                        let t_rel = relaxation_time(&gen)?;
                        log_grid(t_rel, 50.0 * t_rel, 30)
                    }
                };
                let profile = theorems::hk_profile(&gen, a.theta, None, &times)?;
                row["hk_min_c"] = json!(profile.min_c);
                row["hk_theta"] = json!(a.theta);
                files.push((format!("hk-{name}.csv"), profile.to_csv()));
            }
            None => {}
        }
        if a.export {
            files.push((format!("generator-{name}.coo"), coordinate_list(&gen)));
            files.push((format!("states-{name}.txt"), state_legend(&gen)));
        }
        rows.push(row);
    }
    let analysis = json!({
        "instance": ctx.label,
        "n": ctx.inst.n(),
        "edges": ctx.inst.edges().len(),
        "R": ctx.inst.interaction_rate_r(),
        "processes": rows,
        "assumptions": check_ip2_assumptions(ctx.inst, &ctx.cli.common.k, ctx.budget),
    });
    out.file("analysis.json", to_json(&analysis)?);
    for (name, content) in files {
        out.file(name, content);
    }
    out.summary(summary);
    Ok(())
}

fn config_arg(v: &[usize], n: usize, what: &str) -> Result<LabeledConfig, RunError> {
    LabeledConfig::new(v.to_vec(), n).map_err(|e| RunError::Operational(format!("{what}: {e}")))
}

fn simulate(ctx: &Ctx<'_>, s: &SimulateArgs, out: &mut Outputs) -> Result<(), RunError> {
    let inst = ctx.inst;
    let n = inst.n();
    let rng = RngSpec::new(ctx.seed(), 0);
    let k = ctx.cli.common.k.first().copied().unwrap_or(2);
    let start = if s.start.is_empty() {
        config_arg(&(0..k).collect::<Vec<_>>(), n, "--start")?
    } else {
        config_arg(&s.start, n, "--start")?
    };
    let k = start.k();
    let base = json!({
        "instance": ctx.label,
        "seed": ctx.seed(),
        "replicas": s.replicas,
    });
    let with = |mut v: serde_json::Value, extra: serde_json::Value| {
        for (key, val) in extra.as_object().unwrap() {
            v[key] = val.clone();
        }
        v
    };
    let summary;
    match s.estimate {
        EstimateKind::Probj => {
            let est = estimate_probj(inst, &start, s.time, s.replicas, rng)?;
            let exact = within_budget(exact_probj(&ProcessSpec::ip(k, inst)?, start.positions(), s.time, ctx.budget))?;
            summary = format!("P[J_s] = {} +- {} (exact {exact:?})\n", est.mean, est.se);
            let v = with(base, json!({"estimate": "probj", "start": start.positions(), "s": s.time, "mean": est.mean, "se": est.se, "exact": exact}));
            out.file("probj.json", to_json(&v)?);
        }
        EstimateKind::Interactions => {
            let [i, j] = s.pair[..] else {
                return Err(RunError::Operational("--pair takes two particle indices".into()));
            };
            let [t1, t2] = s.window[..] else {
                return Err(RunError::Operational("--window takes two times".into()));
            };
            if i >= k || j >= k || i == j {
                return Err(RunError::Operational(format!("--pair {i},{j} does not name two of {k} particles")));
            }
            let est = estimate_interactions(inst, &start, (i, j), (t1, t2), s.replicas, rng)?;
            let exact = within_budget(exact_expected_interactions(
                &ProcessSpec::ip(k, inst)?,
                (i, j),
                start.positions(),
                (t1, t2),
                ctx.budget,
            ))?;
            summary = format!("E[N] = {} +- {} (exact {exact:?})\n", est.mean, est.se);
            let v = with(base, json!({"estimate": "interactions", "start": start.positions(), "pair": [i, j], "window": [t1, t2], "mean": est.mean, "se": est.se, "exact": exact}));
            out.file("interactions.json", to_json(&v)?);
        }
        EstimateKind::HeatKernel => {
            if s.vertex >= n {
                return Err(RunError::Operational(format!("--vertex {} is not below n = {n}", s.vertex)));
            }
            let mut csv = String::from("t,value,se\n");
            for t in s.grid.times() {
                let est = estimate_heat_kernel(inst, s.vertex, t, s.replicas, rng)?;
                writeln!(csv, "{t},{},{}", est.mean, est.se).unwrap();
            }
            summary = format!("p_t({0},{0}) on {1} grid times\n", s.vertex, s.grid.points);
            out.file("heat-kernel.csv", csv);
        }
        EstimateKind::Tv => {
            let other = if s.start2.is_empty() {
                config_arg(&((n - k)..n).rev().collect::<Vec<_>>(), n, "--start2")?
            } else {
                config_arg(&s.start2, n, "--start2")?
            };
            let est = empirical_tv(inst, (&start, &other), s.time, s.replicas, rng, None)?;
            let exact = within_budget(build_generator(&ProcessSpec::ip(k, inst)?, ctx.budget))?
                .map(|gen| -> Result<f64, RunError> {
                    let p = transition_matrix(&gen, s.time)?;
                    Ok(tv(p.row(gen.index_of(start.positions())?), p.row(gen.index_of(other.positions())?)))
                })
                .transpose()?;
            summary = format!("TV = {} +- {} (exact {exact:?})\n", est.estimate, est.se);
            let v = with(base, json!({"estimate": "tv", "start": start.positions(), "start2": other.positions(), "t": s.time, "result": est, "exact": exact}));
            out.file("tv.json", to_json(&v)?);
        }
        EstimateKind::EventLog => {
            let log = sample_event_log(inst, s.time, rng)?;
            let lines = log.to_json_lines(inst);
            summary = format!("{} rings on [0, {}]\n", lines.lines().count(), s.time);
            out.file("events.jsonl", lines);
        }
    }
    out.summary(summary);
    Ok(())
}

fn run_check(ctx: &Ctx<'_>, v: &VerifyArgs, check: Check) -> interchange_lab::Result<Vec<VerificationReport>> {
    let (inst, budget) = (ctx.inst, ctx.budget);
    let n = inst.n();
    let ks = ctx.ks_or(vec![3]);
    let mut reports = Vec::new();
    match check {
        Check::Clr => {
            let ks: Vec<usize> = ctx.ks_or((2..n).collect()).into_iter().filter(|&k| k >= 2 && k < n).collect();
            reports = theorems::clr_regression(inst, &ks, budget)?;
        }
        Check::Ratios => reports = theorems::relaxation_ratios(inst, &ctx.ks_or((2..n).collect()), budget)?,
        Check::Dirichlet => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed());
            reports = comparison_report(inst, v.trials, &mut rng, budget)?.reports();
        }
        Check::Trel => reports = trel_comparison(inst, budget)?.reports,
        Check::Probj => {
            let opts = ProbJOptions {
                budget,
                replicas: v.replicas,
                rng: RngSpec::new(ctx.seed(), 1),
                mc_starts: 8,
            };
            for &k in &ks {
                for eps in ctx.eps_or(&[0.25, 1.0 / k as f64]) {
                    reports.push(theorems::verify_lemma_probj(inst, eps, k, &opts)?);
                }
            }
        }
        Check::Submulti => {
            for &k in &ks {
                let grid = theorems::default_submulti_grid(inst, k, budget)?;
                reports.extend(theorems::verify_submultiplicativity(inst, k, &grid, budget)?);
            }
        }
        Check::Main => {
            for &k in &ks {
                for eps in ctx.eps_or(&[1.0 / 12.0, 1.0 / k as f64]) {
                    reports.extend(theorems::verify_theorem_main(inst, eps, k, budget)?);
                }
            }
        }
        Check::Sandwich => {
            for &k in &ks {
                for eps in ctx.eps_or(&[0.2, 0.125]) {
                    reports.extend(theorems::verify_rw_sandwich(inst, k, eps, budget)?);
                }
            }
        }
        Check::Mixtrel => {
            for eps in ctx.eps_or(&[0.25, 0.1, 0.01]) {
                reports.extend(theorems::verify_mixtrel(inst, eps, budget)?);
            }
        }
        Check::Hk => {
            let times = match v.grid {
                Some(g) => g.times(),
                None => {
                    let t_rel = relaxation_time(&build_generator(&ProcessSpec::rw(1, inst)?, budget)?)?;
                    log_grid(t_rel, 50.0 * t_rel, 30)
                }
            };
            reports = theorems::check_hk_theta(inst, v.theta, v.c, &times, budget)?.reports;
        }
        Check::Negcorr => {
            for &t in &v.times {
                reports.push(if inst.is_graph() {
                    theorems::verify_negative_correlation(inst, t, budget)?
                } else {
                    theorems::negative_correlation_exploratory(inst, t, budget)?
                });
            }
        }
        Check::En => {
            for &t in &v.times {
                let residual = theorems::en_identity_residual(inst, t, budget)?;
                reports.push(VerificationReport::exact("EN identity", residual, 0.0, EN_IDENTITY_TOL).param("t", t));
            }
            for eps in ctx.eps_or(&[0.25]) {
                reports.extend(theorems::verify_interaction_bound_en(inst, eps, v.alpha, budget)?);
            }
        }
        Check::All => unreachable!(),
    }
    Ok(reports)
}

fn counts(reports: &[VerificationReport]) -> String {
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let failed = reports.iter().filter(|r| r.is_failure()).count();
    format!(
        "{} checks: {} pass, {} asserted failures, {} condition not met, {} exploratory\n",
        reports.len(),
        count(Status::Pass),
        failed,
        count(Status::ConditionNotMet),
        count(Status::Exploratory),
    )
}

/// Returns whether an asserted check failed.
fn verify(ctx: &Ctx<'_>, v: &VerifyArgs, out: &mut Outputs) -> Result<bool, RunError> {
    let lenient = v.check.contains(&Check::All);
    let mut checks = if lenient { Check::EACH.to_vec() } else { v.check.clone() };
    checks.sort();
    checks.dedup();
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for check in checks {
        match run_check(ctx, v, check) {
            Ok(rs) => reports.extend(rs.into_iter().map(|r| {
                if r.instance.is_empty() {
                    r.with_instance(ctx.label)
                } else {
                    r
                }
            })),
            Err(e) if lenient => skipped.push(format!("skipped {}: {e}\n", check.name())),
            Err(e) => return Err(RunError::Operational(format!("{}: {e}", check.name()))),
        }
    }
    let mut summary = summary_table(&reports);
    summary.push_str(&counts(&reports));
    summary.extend(skipped);
    out.file("reports.json", to_json(&reports)?);
    out.file("summary.txt", summary.clone());
    out.summary(summary);
    Ok(reports.iter().any(|r| r.is_failure()))
}

fn report(args: &ReportArgs, out: &mut Outputs) -> Result<bool, RunError> {
    let mut reports: Vec<VerificationReport> = Vec::new();
    for input in &args.inputs {
        let path: PathBuf = if input.is_dir() { input.join("reports.json") } else { input.clone() };
        let text = std::fs::read_to_string(&path).map_err(|e| RunError::Operational(format!("{}: {e}", path.display())))?;
        let part: Vec<VerificationReport> =
            serde_json::from_str(&text).map_err(|e| RunError::Operational(format!("{}: {e}", path.display())))?;
        reports.extend(part);
    }
    let mut summary = summary_table(&reports);
    summary.push_str(&counts(&reports));
    out.file("reports.json", to_json(&reports)?);
    out.file("summary.txt", summary.clone());
    out.summary(summary);
    Ok(reports.iter().any(|r| r.is_failure()))
}
