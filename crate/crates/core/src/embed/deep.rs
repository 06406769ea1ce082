use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};

use super::{check_dim, MeasureEmbedding, ShallowNetParams};
use crate::activation::LEAKY_SLOPE;
use crate::linalg::rank;
use crate::{DiscreteMeasure, Error, Result, Seed};

const RANK_TOL: f64 = 1e-10;
const MAX_RESAMPLES: usize = 64;

/// A map `F: ℝ^d → ℝ^L`, assumed injective by [`deep_embed`].
pub trait FeatureMap: Send + Sync {
    fn input_dim(&self) -> usize;

    fn output_dim(&self) -> usize;

    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityMap(pub usize);

impl FeatureMap for IdentityMap {
    fn input_dim(&self) -> usize {
        self.0
    }

    fn output_dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
}

/// Layers `x ↦ leaky(W x + c)` with every `W` of full column rank, hence
/// injective.
#[derive(Debug, Clone)]
pub struct LeakyReluStack {
    layers: Vec<(DMatrix<f64>, Vec<f64>)>,
    input_dim: usize,
}

impl LeakyReluStack {
    /// Samples layers `d → widths[0] → widths[1] → …`, redrawing any weight
    /// matrix whose numerical rank is below its input dimension.
    pub fn sample(d: usize, widths: &[usize], seed: Seed) -> Result<Self> {
        let mut rng = seed.rng();
        let mut layers = Vec::with_capacity(widths.len());
        let mut fan_in = d;
        for &out in widths {
            if out < fan_in {
                return Err(Error::precondition(format!(
                    "layer {fan_in} -> {out} cannot be injective"
                )));
            }
            let wdist = Normal::new(0.0, 1.0 / (fan_in as f64).sqrt()).expect("finite std");
            let bdist = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("finite std");
            let mut attempt = 0;
            let w = loop {
                let w = DMatrix::from_fn(out, fan_in, |_, _| wdist.sample(&mut rng));
                if rank(&w, RANK_TOL) == fan_in {
                    break w;
                }
                attempt += 1;
                if attempt >= MAX_RESAMPLES {
                    return Err(Error::SearchFailed {
                        what: "full-rank layer",
                        attempts: attempt,
                    });
                }
            };
            let c = (0..out).map(|_| bdist.sample(&mut rng)).collect();
            layers.push((w, c));
            fan_in = out;
        }
        Ok(LeakyReluStack {
            layers,
            input_dim: d,
        })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Largest column-rank deficit over layers; zero iff every layer has
    /// full column rank.
    pub fn rank_deficit(&self) -> usize {
        self.layers
            .iter()
            .map(|(w, _)| w.ncols() - rank(w, RANK_TOL))
            .max()
            .unwrap_or(0)
    }
}

impl FeatureMap for LeakyReluStack {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |(w, _)| w.nrows())
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut h = x.to_vec();
        for (w, c) in &self.layers {
            h = (0..w.nrows())
                .map(|i| {
                    let z = (0..w.ncols()).fold(c[i], |acc, k| acc + w[(i, k)] * h[k]);
                    if z >= 0.0 {
                        z
                    } else {
                        LEAKY_SLOPE * z
                    }
                })
                .collect();
        }
        h
    }
}

/// `x ↦ σ(A F(x) + b)`.
pub struct DeepEmbedding<'a> {
    pub inner: &'a dyn FeatureMap,
    pub outer: &'a ShallowNetParams,
}

impl<'a> DeepEmbedding<'a> {
    pub fn new(inner: &'a dyn FeatureMap, outer: &'a ShallowNetParams) -> Result<Self> {
        check_dim(outer.dim(), inner.output_dim())?;
        Ok(DeepEmbedding { inner, outer })
    }
}

impl MeasureEmbedding for DeepEmbedding<'_> {
    fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }

    fn output_dim(&self) -> usize {
        self.outer.width()
    }

    fn feature(&self, x: &[f64]) -> Vec<f64> {
        self.outer.forward(&self.inner.apply(x))
    }
}

/// Component `j` is `Σ_i w_i σ(a_j · F(x_i) + b_j)`.
pub fn deep_embed(m: &DiscreteMeasure, inner: &dyn FeatureMap, outer: &ShallowNetParams) -> Result<Vec<f64>> {
    DeepEmbedding::new(inner, outer)?.embed(m)
}
