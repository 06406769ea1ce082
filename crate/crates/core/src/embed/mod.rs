//! Moment maps `μ ↦ Σ w_i f(x_i)` for several choices of feature `f`.

mod alphabet;
mod deep;
pub mod exact;
mod gaussian;
mod shallow;
mod staircase;
mod tsystem;

pub use alphabet::{alphabet_min_gap, sigma_alpha_alphabet};
pub use deep::{deep_embed, DeepEmbedding, FeatureMap, IdentityMap, LeakyReluStack};
pub use gaussian::{gaussian_embed, sample_gaussian, GaussianParams};
pub use shallow::{moment_embed, recommended_width, sample_shallow_net, ShallowNetParams, Space};
pub use staircase::{staircase_decode, staircase_decode_weights, staircase_embed, StaircaseParams};
pub use tsystem::{
    is_invertible, tsystem_embed, tsystem_matrix, TSystem, TSystemKind, INVERTIBLE_CONDITION,
};

use crate::measure::canonicalize;
use crate::{DiscreteMeasure, Error, Result};

/// A pointwise feature `f: ℝ^d → ℝ^m` and its induced moment map.
pub trait MeasureEmbedding {
    fn input_dim(&self) -> usize;

    fn output_dim(&self) -> usize;

    fn feature(&self, x: &[f64]) -> Vec<f64>;

    /// `Σ w_i f(x_i)` over the canonical form of `m`.
    fn embed(&self, m: &DiscreteMeasure) -> Result<Vec<f64>> {
        if m.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: m.dim(),
            });
        }
        Ok(sum_features(&canonicalize(m), self.output_dim(), |x| self.feature(x)))
    }
}

pub(crate) fn sum_features<F>(m: &DiscreteMeasure, out_dim: usize, f: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut acc = vec![0.0; out_dim];
    for (p, w) in m.atoms() {
        for (a, v) in acc.iter_mut().zip(f(p.coords())) {
            *a += w * v;
        }
    }
    acc
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
