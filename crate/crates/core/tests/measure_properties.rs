use moment_witness::measure::{canonicalize, from_multiset, measures_equal};
use moment_witness::{Activation, DiscreteMeasure, Multiset, Point};
use proptest::prelude::*;

// Coordinates from a small dyadic grid, so repeated points occur often.
fn coord() -> impl Strategy<Value = f64> {
    (-8i32..=8).prop_map(|k| k as f64 / 4.0)
}

fn measure(dim: usize) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((prop::collection::vec(coord(), dim), -3i32..=3), 0..7).prop_map(move |atoms| {
        DiscreteMeasure::from_atoms(dim, atoms.into_iter().map(|(x, w)| (w as f64, x))).unwrap()
    })
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(m in measure(2)) {
        let c = canonicalize(&m);
        prop_assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonical_form_has_no_zero_weights_or_repeats(m in measure(2)) {
        let c = canonicalize(&m);
        prop_assert!(c.weights().iter().all(|&w| w != 0.0));
        let pts = c.points();
        prop_assert!(pts.windows(2).all(|w| w[0].lex_cmp(&w[1]).is_lt()));
    }

    #[test]
    fn multiset_order_does_not_matter(xs in prop::collection::vec(prop::collection::vec(coord(), 2), 1..7), rot in 0usize..7) {
        let pts: Vec<Point> = xs.iter().map(|x| Point::new(x.clone()).unwrap()).collect();
        let mut shuffled = pts.clone();
        shuffled.rotate_left(rot % pts.len());
        shuffled.reverse();
        let a = from_multiset(&Multiset::new(2, pts).unwrap());
        let b = from_multiset(&Multiset::new(2, shuffled).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn equality_is_an_equivalence(a in measure(1), b in measure(1), c in measure(1)) {
        prop_assert!(measures_equal(&a, &a).unwrap());
        prop_assert_eq!(measures_equal(&a, &b).unwrap(), measures_equal(&b, &a).unwrap());
        if measures_equal(&a, &b).unwrap() && measures_equal(&b, &c).unwrap() {
            prop_assert!(measures_equal(&a, &c).unwrap());
        }
    }

    #[test]
    fn text_roundtrip(m in measure(3)) {
        let back = DiscreteMeasure::from_text(&m.to_text()).unwrap();
        prop_assert!(measures_equal(&m, &back).unwrap());
    }

    #[test]
    fn central_differences_match_derivatives(x in -4.0f64..4.0) {
        let h = 1e-5;
        for act in moment_witness::activation::catalog() {
            if act.kinks().iter().any(|k| (x - k).abs() < 1e-3) {
                continue;
            }
            let fd = (act.apply(x + h) - act.apply(x - h)) / (2.0 * h);
            prop_assert!((act.derivative(x) - fd).abs() <= 1e-5, "{} at {}", act, x);
        }
    }

    #[test]
    fn piecewise_linear_entries_are_locally_linear(x in -4.0f64..4.0) {
        let delta = 2f64.powi(-12);
        for act in Activation::ALL.into_iter().filter(|a| a.is_piecewise_linear()) {
            if act.kinks().iter().any(|k| (x - k).abs() <= 2.0 * delta) {
                continue;
            }
            // Snap to a grid on which x ± δ is exact.
            let x = (x / delta).round() * delta;
            let (lhs, rhs) = (act.apply(x + delta) + act.apply(x - delta), 2.0 * act.apply(x));
            if act == Activation::LeakyRelu {
                // The 0.01 slope is not dyadic, so products round.
                prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs.abs());
            } else {
                prop_assert_eq!(lhs, rhs, "{}", act);
            }
        }
    }
}
