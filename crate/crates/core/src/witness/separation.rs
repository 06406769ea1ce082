use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{moment_embed, sample_shallow_net};
use crate::{Activation, DiscreteMeasure, Error, Result, Seed};

/// Default separation threshold on [`normalized_distance`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Outcome of a randomized separation test.
///
/// Invariant: `separated ⇒ margin > tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub separated: bool,
    pub margin: f64,
    pub witnesses_used: usize,
    pub params_snapshot: String,
    pub tolerance: f64,
}

impl SeparationReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("finite values serialize")
    }
}

/// `‖e1 − e2‖ / max(1, ‖e1‖∞, ‖e2‖∞)`.
pub fn normalized_distance(e1: &[f64], e2: &[f64]) -> f64 {
    let inf = e1.iter().chain(e2).fold(1.0f64, |m, v| m.max(v.abs()));
    crate::embed::dist(e1, e2) / inf
}

/// Samples `trials` shallow nets of the given width (trial `t` uses
/// `seed + t`) and reports the largest normalized embedding distance.
pub fn verify_separation(
    m1: &DiscreteMeasure,
    m2: &DiscreteMeasure,
    activation: Activation,
    width: usize,
    trials: usize,
    seed: Seed,
    tol: f64,
) -> Result<SeparationReport> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch {
            expected: m1.dim(),
            found: m2.dim(),
        });
    }
    if width == 0 || trials == 0 {
        return Err(Error::precondition("width and trials must be positive"));
    }
    let d = m1.dim();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let net = sample_shallow_net(width, d, activation, seed.offset(t as u64), 1.0)?;
            let dist = normalized_distance(&moment_embed(m1, &net)?, &moment_embed(m2, &net)?);
            Ok((dist, net))
        })
        .collect::<Result<Vec<_>>>()?;
    let (margin, best) = outcomes
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("trials >= 1");
    Ok(SeparationReport {
        separated: margin > tol,
        margin,
        witnesses_used: trials,
        params_snapshot: best.to_text(),
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::pwl_counterexample_sets;

    fn pair() -> (DiscreteMeasure, DiscreteMeasure) {
        let m1 = DiscreteMeasure::from_scalar_atoms(&[(0.3, 1.0), (-0.7, 0.5)]).unwrap();
        let m2 = DiscreteMeasure::from_scalar_atoms(&[(0.2, 1.0), (0.9, -0.25)]).unwrap();
        (m1, m2)
    }

    #[test]
    fn identical_measures_never_separate() {
        let (m, _) = pair();
        for act in crate::activation::catalog() {
            let r = verify_separation(&m, &m, act, 5, 3, Seed(1), DEFAULT_TOLERANCE).unwrap();
            assert!(!r.separated);
            assert!(r.margin <= r.tolerance);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (m1, m2) = pair();
        let a = verify_separation(&m1, &m2, Activation::Tanh, 9, 4, Seed(3), 1e-9).unwrap();
        let b = verify_separation(&m1, &m2, Activation::Tanh, 9, 4, Seed(3), 1e-9).unwrap();
        assert_eq!(a, b);
        assert!(a.separated);
        assert_eq!(a.witnesses_used, 4);
    }

    #[test]
    fn set_split_pair_not_separated_by_its_own_net() {
        for width in [1, 3, 10, 25] {
            let seed = Seed(100 + width as u64);
            let net = sample_shallow_net(width, 2, Activation::Relu, seed, 1.0).unwrap();
            let cx = pwl_counterexample_sets(&net, Seed(1)).unwrap();
            let r = verify_separation(&cx.m1, &cx.m2, Activation::Relu, width, 1, seed, 1e-9).unwrap();
            assert!(!r.separated, "width {width}: margin {}", r.margin);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let (m1, _) = pair();
        let z = DiscreteMeasure::zero(2);
        assert!(verify_separation(&m1, &z, Activation::Tanh, 3, 1, Seed(0), 1e-9).is_err());
    }
}
