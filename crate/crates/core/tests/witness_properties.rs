use moment_witness::embed::sample_shallow_net;
use moment_witness::measure::measures_equal;
use moment_witness::witness::{
    is_locally_linear, pwl_counterexample_integers, pwl_counterexample_measures, pwl_counterexample_sets,
    set_split_pair, verify_separation, CounterexamplePair, SplitRule, DEFAULT_TOLERANCE,
};
use moment_witness::{Activation, DiscreteMeasure, Seed};
use proptest::prelude::*;

fn check(pair: &CounterexamplePair, net: &moment_witness::embed::ShallowNetParams) -> Result<(), TestCaseError> {
    prop_assert!(!measures_equal(&pair.m1, &pair.m2).unwrap());
    prop_assert!(pair.gap_within_bound(), "{:?} gap {}", pair.kind, pair.moment_gap);
    prop_assert!(pair.verify_region(net, 32, Seed(77)));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counterexamples_satisfy_their_contract(seed in 0u64..10_000, d in 1usize..4, hard in any::<bool>()) {
        let act = if hard { Activation::HardTanh } else { Activation::Relu };
        let net = sample_shallow_net(10, d, act, Seed(seed), 1.0).unwrap();
        check(&pwl_counterexample_sets(&net, Seed(seed)).unwrap(), &net)?;
        for rule in [SplitRule::Sign, SplitRule::Index] {
            check(&pwl_counterexample_measures(&net, Seed(seed), rule).unwrap(), &net)?;
        }
        check(&pwl_counterexample_integers(&net).unwrap(), &net)?;
    }

    #[test]
    fn separation_is_deterministic(seed in 0u64..1000) {
        let a = DiscreteMeasure::from_atoms(2, [(1.0, vec![0.1, 0.2]), (-0.5, vec![0.3, -0.4])]).unwrap();
        let b = DiscreteMeasure::from_atoms(2, [(0.5, vec![0.1, 0.25])]).unwrap();
        let r1 = verify_separation(&a, &b, Activation::Tanh, 13, 2, Seed(seed), DEFAULT_TOLERANCE).unwrap();
        let r2 = verify_separation(&a, &b, Activation::Tanh, 13, 2, Seed(seed), DEFAULT_TOLERANCE).unwrap();
        prop_assert_eq!(&r1, &r2);
        prop_assert!(!r1.separated || r1.margin > r1.tolerance);
    }
}

#[test]
fn set_split_is_scale_equivariant() {
    // A single ReLU unit is linear on the half-line x > 0 at every scale.
    let net = moment_witness::embed::ShallowNetParams::new(2, 1, vec![1.0, 0.5], vec![0.0, 0.0], Activation::Relu).unwrap();
    let x0 = moment_witness::Point::scalar(4.0).unwrap();
    let base = set_split_pair(&net, &x0, &[1.0], 1.0).unwrap();
    assert_eq!(base.moment_gap, 0.0);
    for lambda in [0.5, 2.0] {
        let scaled = moment_witness::Point::scalar(4.0 * lambda).unwrap();
        let pair = set_split_pair(&net, &scaled, &[lambda], lambda).unwrap();
        assert_eq!(pair.moment_gap, 0.0);
        assert!(is_locally_linear(&net, &scaled, lambda * lambda, 32, Seed(1)));
    }
}
