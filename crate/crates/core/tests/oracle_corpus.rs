use std::path::PathBuf;

use gmacwt::oracle::{check_delta_achievability, exact_equivocation, DiscreteWiretapSpec, Encoder, PATH_TOL};
use proptest::prelude::*;

fn load(name: &str) -> DiscreteWiretapSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/oracle").join(format!("{name}.json"));
    DiscreteWiretapSpec::load(&path).unwrap()
}

// exact-fraction enumeration, 17 digits
const EXPECTED: &[(&str, &[f64])] = &[
    ("one_time_pad", &[1.0, 1.0, 1.0]),
    ("full_leakage", &[0.0, 0.0, 0.0]),
    ("constant_output", &[1.0, 1.0, 1.0]),
    ("partial_pad", &[1.0, 0.0, 0.5]),
    ("mod3_pad", &[1.0, 1.0, 1.0]),
    ("bsc_cascade", &[0.796_948_634_597_766_51]),
    ("noisy_xor_mac", &[1.0, 1.0, 0.924_274_089_147_307_91]),
];

#[test]
fn corpus_values() {
    for (name, want) in EXPECTED {
        let r = exact_equivocation(&load(name)).unwrap();
        assert_eq!(r.name, *name);
        assert_eq!(r.subsets.len(), want.len());
        for (e, w) in r.subsets.iter().zip(*want) {
            assert!((e.delta - w).abs() < 1e-12, "{name} {}: {} vs {w}", e.subset, e.delta);
            assert!(e.h_messages >= 0.0 && e.h_messages_given_z >= 0.0 && e.mutual_information >= 0.0);
        }
        assert!(r.max_path_gap <= PATH_TOL, "{name}: {}", r.max_path_gap);
    }
}

#[test]
fn achievability_checks() {
    assert!(check_delta_achievability(&load("one_time_pad"), 1.0).unwrap());
    assert!(check_delta_achievability(&load("full_leakage"), 0.0).unwrap());
    assert!(!check_delta_achievability(&load("full_leakage"), 0.5).unwrap());
    // individually perfect, collectively leaky
    let xor = load("noisy_xor_mac");
    assert!(check_delta_achievability(&xor, 0.9).unwrap());
    assert!(!check_delta_achievability(&xor, 0.95).unwrap());
}

fn stochastic(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.01f64..1.0, cols), rows).prop_map(|m| {
        m.into_iter()
            .map(|r| {
                let t: f64 = r.iter().sum();
                let mut r: Vec<f64> = r.iter().map(|x| x / t).collect();
                // make the row sum exact
                let rest: f64 = r[1..].iter().sum();
                r[0] = 1.0 - rest;
                r
            })
            .collect()
    })
}

fn random_spec() -> impl Strategy<Value = DiscreteWiretapSpec> {
    (1usize..=2, 1usize..=2, 2usize..=3, 2usize..=3).prop_flat_map(|(l1, n, ys, zs)| {
        let table = |l: usize| prop::collection::vec(prop::collection::vec(prop::collection::vec(0usize..2, n), l), 2);
        (table(l1), table(1), stochastic(4, ys), stochastic(ys, zs)).prop_map(move |(t1, t2, w, v)| {
            DiscreteWiretapSpec {
                name: "random".into(),
                num_users: 2,
                message_counts: vec![2, 2],
                message_probs: None,
                block_length: n,
                input_alphabets: vec![2, 2],
                encoders: vec![Encoder { randomness: l1, table: t1 }, Encoder { randomness: 1, table: t2 }],
                main_channel: w,
                wiretap_channel: v,
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn further_degradation_never_reduces_equivocation(
        (spec, extra) in random_spec().prop_flat_map(|s| {
            let zs = s.wiretap_channel[0].len();
            (Just(s), stochastic(zs, 2))
        })
    ) {
        let before = exact_equivocation(&spec).unwrap();
        let after = exact_equivocation(&spec.degrade(&extra).unwrap()).unwrap();
        prop_assert!(before.max_path_gap <= PATH_TOL && after.max_path_gap <= PATH_TOL);
        for (a, b) in after.subsets.iter().zip(&before.subsets) {
            prop_assert!(a.delta >= b.delta - 1e-12, "{} : {} < {}", a.subset, a.delta, b.delta);
            prop_assert!((0.0..=1.0).contains(&a.delta));
        }
    }
}
