use interchange_lab::generators;
use interchange_lab::model::{
    apply_permutation, check_ip2_assumptions, explicit_law, EdgePermutation, Hyperedge, LabeledConfig, SpaceKind,
    StateSpace, ViolationKind, DEFAULT_STATE_BUDGET as B,
};
use interchange_lab::{Error, HypergraphInstance, ProcessSpec};
use proptest::prelude::*;

#[test]
fn validation_examples() {
    assert!(generators::complete(4).unwrap().validate().is_valid());

    let zero = HypergraphInstance::unchecked(
        3,
        vec![Hyperedge::transposition(0, 1, 0.0), Hyperedge::transposition(1, 2, 1.0)],
        false,
    );
    assert!(zero.validate().has(ViolationKind::NonpositiveRate));

    let short = explicit_law(vec![(vec![1, 0, 2], 0.5), (vec![0, 2, 1], 0.4)]);
    let bad = HypergraphInstance::unchecked(3, vec![Hyperedge::new(vec![0, 1, 2], 1.0, short)], false);
    assert!(bad.validate().has(ViolationKind::LawNotNormalized));
    assert!(HypergraphInstance::new(3, bad.edges().to_vec()).is_err());
}

#[test]
fn n_below_three_needs_the_override() {
    let e = vec![Hyperedge::transposition(0, 1, 1.0)];
    assert!(HypergraphInstance::new(2, e.clone()).is_err());
    assert!(HypergraphInstance::new_allowing_small_n(2, e).is_ok());
}

#[test]
fn interaction_rate_examples() {
    assert_eq!(generators::complete(4).unwrap().interaction_rate_r(), 12.0);
    assert_eq!(generators::single_hyperedge(4).unwrap().interaction_rate_r(), 12.0);
    for n in 3..8 {
        assert!((generators::complete(n).unwrap().pair_interaction_rate() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn apply_permutation_examples() {
    let e01 = Hyperedge::transposition(0, 1, 1.0);
    let x = LabeledConfig(vec![0, 1]);
    assert_eq!(apply_permutation(&x, &e01, &EdgePermutation::identity(&[0, 1])).unwrap(), x);
    assert_eq!(apply_permutation(&x, &e01, &EdgePermutation(vec![1, 0])).unwrap().0, vec![1, 0]);

    let e012 = Hyperedge::uniform(vec![0, 1, 2], 1.0);
    let cyc = EdgePermutation(vec![1, 2, 0]);
    assert_eq!(apply_permutation(&LabeledConfig(vec![0, 3]), &e012, &cyc).unwrap().0, vec![1, 3]);

    let not_bijection = EdgePermutation(vec![1, 1, 0]);
    assert!(matches!(
        apply_permutation(&x, &e012, &not_bijection),
        Err(Error::InvalidPermutation(_))
    ));
}

#[test]
fn state_counts() {
    let k4 = generators::complete(4).unwrap();
    let k6 = generators::complete(6).unwrap();
    assert_eq!(ProcessSpec::ip(2, &k4).unwrap().enumerate_states(B).unwrap().len(), 12);
    assert_eq!(ProcessSpec::ex(2, &k4).unwrap().enumerate_states(B).unwrap().len(), 6);
    assert_eq!(ProcessSpec::ip(3, &k6).unwrap().enumerate_states(B).unwrap().len(), 120);
    assert_eq!(ProcessSpec::rw(3, &k4).unwrap().enumerate_states(B).unwrap().len(), 64);
    assert!(matches!(
        ProcessSpec::ip(6, &k6).unwrap().enumerate_states(100),
        Err(Error::StateSpaceTooLarge { states: 720, budget: 100 })
    ));
}

#[test]
fn assumption_examples() {
    let r = check_ip2_assumptions(&generators::complete(4).unwrap(), &[1, 3, 4], B);
    assert!((1..=4).all(|k| {
        let c = r.check(k).unwrap();
        c.irreducible && c.uniform_stationary && c.reversible
    }));

    let r = check_ip2_assumptions(&generators::three_cycle_instance(), &[4], B);
    assert!(r.ip2.irreducible);
    let c4 = r.check(4).unwrap();
    assert!(!c4.irreducible);
    assert_eq!(c4.reachable_from_base, 12);

    let split = HypergraphInstance::unchecked(
        4,
        vec![Hyperedge::transposition(0, 1, 1.0), Hyperedge::transposition(2, 3, 1.0)],
        false,
    );
    assert!(!check_ip2_assumptions(&split, &[], B).ip2.irreducible);
}

#[test]
fn uniform_laws_are_reversible_for_every_k() {
    for inst in [
        generators::complete_uniform(5, 3).unwrap(),
        generators::single_hyperedge(4).unwrap(),
        generators::cycle(5).unwrap(),
    ] {
        let ks: Vec<usize> = (1..=inst.n()).collect();
        let r = check_ip2_assumptions(&inst, &ks, B);
        for &k in &ks {
            let c = r.check(k).unwrap();
            assert!(c.uniform_stationary && c.reversible, "k = {k}");
        }
    }
}

#[test]
fn json_round_trip_is_bit_exact() {
    let mut edges = generators::complete_uniform(5, 3).unwrap().edges().to_vec();
    edges.push(Hyperedge::transposition(0, 4, 0.1 + 0.2));
    edges.push(generators::three_cycle_instance().edges()[0].clone());
    let inst = HypergraphInstance::new(5, edges).unwrap();
    let text = inst.to_json();
    let back = HypergraphInstance::from_json(&text).unwrap();
    assert_eq!(back, inst);
    assert_eq!(back.to_json(), text);
    assert!(text.contains(r#""law":"uniform""#) && text.contains(r#""explicit""#));
}

fn instance_strategy() -> impl Strategy<Value = HypergraphInstance> {
    (3usize..7).prop_flat_map(|n| {
        let edge = (proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 2..=n.min(4)), 0.1f64..3.0);
        proptest::collection::vec(edge, 1..6).prop_map(move |es| {
            HypergraphInstance::unchecked(
                n,
                es.into_iter().map(|(v, r)| Hyperedge::uniform(v, r)).collect(),
                false,
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifted_permutations_keep_coordinates_distinct(inst in instance_strategy(), seed in any::<u64>()) {
        let n = inst.n();
        let k = 1 + (seed as usize) % n;
        let space = StateSpace::new(SpaceKind::Injective, n, k, B).unwrap();
        let x = LabeledConfig(space.state((seed as usize / 7) % space.len()));
        for e in inst.edges() {
            for w in e.support() {
                let y = apply_permutation(&x, e, &w.perm).unwrap();
                prop_assert!(y.is_valid(n));
            }
        }
    }

    #[test]
    fn state_index_is_a_bijection(n in 1usize..7, k in 1usize..4) {
        for kind in [SpaceKind::Injective, SpaceKind::Subsets, SpaceKind::Product] {
            if k > n && kind != SpaceKind::Product {
                continue;
            }
            let space = StateSpace::new(kind, n, k, B).unwrap();
            prop_assert_eq!(space.len() as u128, StateSpace::count(kind, n, k));
            for i in 0..space.len() {
                prop_assert_eq!(space.index(&space.state(i)), Some(i));
            }
        }
    }

    #[test]
    fn interaction_rate_is_additive(a in instance_strategy(), b in instance_strategy()) {
        let n = a.n().max(b.n());
        let joined: Vec<Hyperedge> = a.edges().iter().chain(b.edges()).cloned().collect();
        let both = HypergraphInstance::unchecked(n, joined, false);
        let sum = a.interaction_rate_r() + b.interaction_rate_r();
        prop_assert!((both.interaction_rate_r() - sum).abs() <= 1e-12 * sum);
    }

    #[test]
    fn json_round_trip(inst in instance_strategy()) {
        let back: HypergraphInstance = serde_json::from_str(&inst.to_json()).unwrap();
        prop_assert_eq!(back, inst);
    }
}
