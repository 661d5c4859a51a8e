use interchange_lab::exact::{
    build_generator, exact_expected_interactions, transition_matrix, tv, worst_case_d, ProbJSolver,
};
use interchange_lab::generators;
use interchange_lab::model::{Hyperedge, LabeledConfig, SpaceKind, StateSpace, DEFAULT_STATE_BUDGET as B};
use interchange_lab::par;
use interchange_lab::sim::{
    count_interactions, empirical_tv, estimate_heat_kernel, estimate_interactions, estimate_law, estimate_probj,
    sample_event_log, EventLog, RngSpec,
};
use interchange_lab::{HypergraphInstance, ProcessSpec};
use proptest::prelude::*;

const REPLICAS: usize = 10_000;

fn two_vertex() -> HypergraphInstance {
    HypergraphInstance::new_allowing_small_n(2, vec![Hyperedge::transposition(0, 1, 1.0)]).unwrap()
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn empty_horizon_gives_empty_log() {
    let log = sample_event_log(&generators::complete(4).unwrap(), 0.0, RngSpec::new(1, 0)).unwrap();
    assert!(log.rings.is_empty());
}

#[test]
fn ring_count_matches_poisson_mean() {
    let k4 = generators::complete(4).unwrap();
    let rng = RngSpec::new(42, 0);
    let counts: Vec<f64> =
        par::map_collect(0..REPLICAS, |r| EventLog::sample(&k4, 10.0, rng, r as u64).unwrap().rings.len() as f64);
    let (m, se) = mean_se(&counts);
    assert!((m - 60.0).abs() <= 3.0 * se, "mean {m}, se {se}");
}

#[test]
fn edge_choice_is_proportional_to_rate() {
    let inst = HypergraphInstance::new(
        3,
        vec![Hyperedge::transposition(0, 1, 1.0), Hyperedge::transposition(1, 2, 3.0)],
    )
    .unwrap();
    let log = sample_event_log(&inst, 5_000.0, RngSpec::new(9, 0)).unwrap();
    let n = log.rings.len() as f64;
    let p = log.rings.iter().filter(|r| r.edge == 1).count() as f64 / n;
    let se = (0.75 * 0.25 / n).sqrt();
    assert!((p - 0.75).abs() <= 3.0 * se, "p {p}, n {n}");
}

#[test]
fn evolve_examples() {
    let inst = generators::path(3).unwrap();
    let log = EventLog {
        horizon: 1.0,
        rings: vec![interchange_lab::sim::Ring { t: 0.5, edge: 0, perm: 0 }],
    };
    let x = LabeledConfig(vec![0, 2]);
    assert_eq!(log.evolve(&inst, &x, 0.3, 0.3).unwrap(), x);
    assert_eq!(log.evolve(&inst, &x, 0.0, 1.0).unwrap().0, vec![1, 2]);
    assert!(log.evolve(&inst, &x, 0.0, 2.0).is_err());
    // value at a ring time is the post-ring state
    let path = log.trajectory(&inst, &x);
    assert_eq!(path.at(0.5).0, vec![1, 2]);
    assert_eq!(path.at(0.49).0, vec![0, 2]);
}

#[test]
fn identical_seeds_reproduce_logs() {
    let h = generators::complete_uniform(5, 3).unwrap();
    let a = sample_event_log(&h, 4.0, RngSpec::new(77, 3)).unwrap();
    let b = sample_event_log(&h, 4.0, RngSpec::new(77, 3)).unwrap();
    assert_eq!(a.to_json_lines(&h), b.to_json_lines(&h));
    let c = sample_event_log(&h, 4.0, RngSpec::new(77, 4)).unwrap();
    assert_ne!(a.to_json_lines(&h), c.to_json_lines(&h));
    let first = a.to_json_lines(&h);
    let line: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    assert!(line["t"].is_f64() && line["edge"].is_u64() && line["perm"].as_array().unwrap().len() == 3);
}

#[test]
fn complete_graph_interactions_have_unit_rate() {
    let k5 = generators::complete(5).unwrap();
    let rng = RngSpec::new(5, 1);
    let start = LabeledConfig(vec![0, 3]);
    let counts: Vec<f64> = par::map_collect(0..REPLICAS, |r| {
        let log = EventLog::sample(&k5, 2.0, rng, r as u64).unwrap();
        count_interactions(&k5, &start, (0, 1), &log, (0.0, 2.0)).unwrap() as f64
    });
    let (m, se) = mean_se(&counts);
    assert!((m - 2.0).abs() <= 3.0 * se, "mean {m}, se {se}");
}

#[test]
fn interaction_means_match_exact_on_a_path() {
    let p5 = generators::path(5).unwrap();
    let spec = ProcessSpec::ip(3, &p5).unwrap();
    let start = LabeledConfig(vec![0, 2, 4]);
    let window = (0.5, 2.0);
    let exact = exact_expected_interactions(&spec, (0, 1), start.positions(), window, B).unwrap();
    let est = estimate_interactions(&p5, &start, (0, 1), window, REPLICAS, RngSpec::new(8, 0)).unwrap();
    assert!(est.agrees_with(exact, 3.0), "{est:?} vs {exact}");
}

#[test]
fn probj_examples() {
    let k5 = generators::complete(5).unwrap();
    let start = LabeledConfig(vec![1, 2, 4]);
    let est = estimate_probj(&k5, &start, 0.3, REPLICAS, RngSpec::new(3, 0)).unwrap();
    assert!(est.agrees_with((-2.0f64 * 0.3).exp(), 3.0), "{est:?}");

    let c5 = generators::cycle(5).unwrap();
    let solver = ProbJSolver::new(&c5, 3, B).unwrap();
    let start = LabeledConfig(vec![0, 1, 3]);
    let est = estimate_probj(&c5, &start, 0.6, REPLICAS, RngSpec::new(3, 1)).unwrap();
    assert!(est.agrees_with(solver.at(start.positions(), 0.6).unwrap(), 3.0), "{est:?}");
}

#[test]
fn heat_kernel_examples() {
    let two = two_vertex();
    let t = 0.4;
    let est = estimate_heat_kernel(&two, 0, t, REPLICAS, RngSpec::new(4, 0)).unwrap();
    assert!(est.agrees_with(0.5 * (1.0 + (-2.0 * t).exp()), 3.0), "{est:?}");

    let c6 = generators::cycle(6).unwrap();
    let p = transition_matrix(&build_generator(&ProcessSpec::rw(1, &c6).unwrap(), B).unwrap(), 1.3).unwrap();
    let est = estimate_heat_kernel(&c6, 2, 1.3, REPLICAS, RngSpec::new(4, 1)).unwrap();
    assert!(est.agrees_with(p.get(2, 2), 3.0), "{est:?}");
}

#[test]
fn empirical_tv_on_the_two_state_chain() {
    let two = two_vertex();
    let t = std::f64::consts::LN_2 / 2.0;
    let (a, b) = (LabeledConfig(vec![0]), LabeledConfig(vec![1]));
    let est = empirical_tv(&two, (&a, &b), t, REPLICAS, RngSpec::new(6, 0), None).unwrap();
    assert!(est.ci_low <= 0.5 && 0.5 <= est.ci_high, "{est:?}");
}

#[test]
fn empirical_tv_tracks_worst_case_distance() {
    let c5 = generators::cycle(5).unwrap();
    let gen = build_generator(&ProcessSpec::ip(2, &c5).unwrap(), B).unwrap();
    let t = 1.0;
    let p = transition_matrix(&gen, t).unwrap();
    let (a, b) = (LabeledConfig(vec![0, 1]), LabeledConfig(vec![1, 0]));
    let exact = tv(p.row(gen.index_of(&[0, 1]).unwrap()), p.row(gen.index_of(&[1, 0]).unwrap()));
    let est = empirical_tv(&c5, (&a, &b), t, REPLICAS, RngSpec::new(6, 1), None).unwrap();
    // the plug-in bias is at most of order bias_scale
    assert!((est.estimate - exact).abs() <= 3.0 * est.se + est.bias_scale, "{est:?} vs {exact}");
    assert!(exact <= 2.0 * worst_case_d(&gen, t).unwrap() + 1e-12);
}

#[test]
fn single_coordinate_is_a_random_walk_on_graphs() {
    let c5 = generators::cycle(5).unwrap();
    let p = transition_matrix(&build_generator(&ProcessSpec::rw(1, &c5).unwrap(), B).unwrap(), 0.8).unwrap();
    let (space, law) = estimate_law(&c5, &LabeledConfig(vec![1]), 0.8, REPLICAS, RngSpec::new(10, 0)).unwrap();
    for (i, &f) in law.iter().enumerate() {
        let exact = p.get(1, space.state(i)[0]);
        let se = (exact * (1.0 - exact) / REPLICAS as f64).sqrt();
        assert!((f - exact).abs() <= 3.0 * se + 1e-12, "state {i}: {f} vs {exact}");
    }
}

#[test]
fn tuples_follow_the_interchange_kernel() {
    let k4 = generators::complete(4).unwrap();
    let gen = build_generator(&ProcessSpec::ip(2, &k4).unwrap(), B).unwrap();
    let p = transition_matrix(&gen, 0.3).unwrap();
    let start = [2, 0];
    let (space, law) = estimate_law(&k4, &LabeledConfig(start.to_vec()), 0.3, REPLICAS, RngSpec::new(11, 0)).unwrap();
    let a = gen.index_of(&start).unwrap();
    for (i, &f) in law.iter().enumerate() {
        let exact = p.get(a, gen.index_of(&space.state(i)).unwrap());
        let se = (exact * (1.0 - exact) / REPLICAS as f64).sqrt();
        // 12 simultaneous comparisons: 4 SE keeps the familywise error small
        assert!((f - exact).abs() <= 4.0 * se + 1e-12, "state {i}: {f} vs {exact}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cocycle_holds_exactly(seed in any::<u64>(), s in 0.0f64..3.0, frac in 0.0f64..1.0, u_extra in 0.0f64..2.0) {
        let h = generators::complete_uniform(5, 3).unwrap();
        let u = s + u_extra;
        let t = s + frac * u_extra;
        let log = sample_event_log(&h, 5.0, RngSpec::new(seed, 0)).unwrap();
        let space = StateSpace::new(SpaceKind::Injective, 5, 3, B).unwrap();
        let x = LabeledConfig(space.state((seed % 60) as usize));
        let direct = log.evolve(&h, &x, s, u).unwrap();
        let split = log.evolve(&h, &log.evolve(&h, &x, s, t).unwrap(), t, u).unwrap();
        prop_assert_eq!(direct, split);
    }

    #[test]
    fn interaction_count_is_symmetric(seed in any::<u64>(), t1 in 0.0f64..2.0, len in 0.0f64..2.0) {
        let h = generators::complete_uniform(6, 3).unwrap();
        let log = sample_event_log(&h, 4.0, RngSpec::new(seed, 2)).unwrap();
        let x = LabeledConfig(vec![0, 2, 5]);
        let w = (t1, t1 + len);
        prop_assert_eq!(
            count_interactions(&h, &x, (0, 2), &log, w).unwrap(),
            count_interactions(&h, &x, (2, 0), &log, w).unwrap()
        );
    }
}
