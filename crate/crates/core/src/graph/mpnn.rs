//! Sum-aggregation message passing with random parameters.

use std::cmp::Ordering;

use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::{Activation, Error, Result, Seed};

/// Neighbourhood update rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// `h_v ← Σ_{u ∈ N(v)} σ(A(η·h_v + h_u) + b)`.
    #[default]
    Sum,
    /// Degree-normalized convolution
    /// `h_v ← σ(Σ_{u ∈ N(v) ∪ {v}} A·h_u / √(d̂_u d̂_v) + b)` with
    /// `d̂ = degree + 1`; `η` is unused.
    Gcn,
}

/// Affine map `x ↦ A x + b`, `A` row-major `rows × cols`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Affine {
    fn sample(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> Affine {
        let wa = Normal::new(0.0, 1.0 / (2.0 * cols as f64).sqrt()).expect("finite std");
        let wb = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("finite std");
        let a = (0..rows * cols).map(|_| wa.sample(rng)).collect();
        let b = (0..rows).map(|_| wb.sample(rng)).collect();
        Affine { rows, cols, a, b }
    }

    fn linear(&self, x: &[f64]) -> Vec<f64> {
        self.a.chunks(self.cols).map(|row| row.iter().zip(x).map(|(a, x)| a * x).sum()).collect()
    }

    fn apply(&self, x: &[f64], act: Activation) -> Vec<f64> {
        self.linear(x).iter().zip(&self.b).map(|(z, b)| act.apply(z + b)).collect()
    }
}

/// Invariant: layer 1 maps `d_in → m`, later layers and the readout map
/// `m → m`; one `η` per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MPNNParams {
    pub layers: Vec<Affine>,
    pub etas: Vec<f64>,
    pub readout: Affine,
    pub hidden: usize,
    pub d_in: usize,
    pub activation: Activation,
    pub aggregation: Aggregation,
}

impl MPNNParams {
    pub fn rounds(&self) -> usize {
        self.layers.len()
    }

    pub fn with_aggregation(mut self, aggregation: Aggregation) -> Self {
        self.aggregation = aggregation;
        self
    }
}

/// Matrices `N(0, 1/(2·fan_in))`, biases `N(0, 1/2)`, `η ~ N(0, 1)`; drawn
/// layer by layer (`A`, `b`, `η`), then the readout.
pub fn sample_mpnn(d_in: usize, m: usize, rounds: usize, activation: Activation, seed: Seed) -> Result<MPNNParams> {
    if d_in == 0 || m == 0 || rounds == 0 {
        return Err(Error::precondition("d_in, m and T must be positive"));
    }
    let mut rng = seed.rng();
    let mut layers = Vec::with_capacity(rounds);
    let mut etas = Vec::with_capacity(rounds);
    for t in 0..rounds {
        layers.push(Affine::sample(m, if t == 0 { d_in } else { m }, &mut rng));
        etas.push(StandardNormal.sample(&mut rng));
    }
    let readout = Affine::sample(m, m, &mut rng);
    Ok(MPNNParams {
        layers,
        etas,
        readout,
        hidden: m,
        d_in,
        activation,
        aggregation: Aggregation::Sum,
    })
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Sum of vectors in lexicographic order, so the result is bitwise
/// independent of the order they were produced in.
fn ordered_sum(mut terms: Vec<Vec<f64>>, dim: usize) -> Vec<f64> {
    terms.sort_by(|a, b| lex(a, b));
    let mut acc = vec![0.0; dim];
    for t in &terms {
        for (a, v) in acc.iter_mut().zip(t) {
            *a += v;
        }
    }
    acc
}

fn sum_layer(g: &Graph, h: &[Vec<f64>], layer: &Affine, eta: f64, act: Activation) -> Vec<Vec<f64>> {
    (0..g.num_nodes())
        .map(|v| {
            let messages = g
                .neighbors(v)
                .iter()
                .map(|&u| {
                    let m: Vec<f64> = h[v].iter().zip(&h[u]).map(|(hv, hu)| eta * hv + hu).collect();
                    layer.apply(&m, act)
                })
                .collect();
            ordered_sum(messages, layer.rows)
        })
        .collect()
}

fn gcn_layer(g: &Graph, h: &[Vec<f64>], layer: &Affine, act: Activation) -> Vec<Vec<f64>> {
    let projected: Vec<Vec<f64>> = h.iter().map(|x| layer.linear(x)).collect();
    let dhat: Vec<f64> = (0..g.num_nodes()).map(|v| (g.degree(v) + 1) as f64).collect();
    (0..g.num_nodes())
        .map(|v| {
            let terms = std::iter::once(v)
                .chain(g.neighbors(v).iter().copied().filter(|&u| u != v))
                .map(|u| {
                    let c = 1.0 / (dhat[u] * dhat[v]).sqrt();
                    projected[u].iter().map(|x| c * x).collect()
                })
                .collect();
            ordered_sum(terms, layer.rows)
                .iter()
                .zip(&layer.b)
                .map(|(z, b)| act.apply(z + b))
                .collect()
        })
        .collect()
}

/// Initial features as `d_in`-vectors: the integer label in coordinate 0.
fn initial_features(g: &Graph, d_in: usize) -> Vec<Vec<f64>> {
    g.node_features()
        .iter()
        .map(|&f| {
            let mut x = vec![0.0; d_in];
            x[0] = f as f64;
            x
        })
        .collect()
}

/// Final node features `h^(T)` and the readout `Σ_v σ(A h_v^(T) + b)`.
/// Nodes without neighbours receive the empty sum under [`Aggregation::Sum`].
pub fn mpnn_forward(g: &Graph, p: &MPNNParams) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if p.layers.first().map(|l| l.cols) != Some(p.d_in) {
        return Err(Error::DimensionMismatch {
            expected: p.d_in,
            found: p.layers.first().map_or(0, |l| l.cols),
        });
    }
    let mut h = initial_features(g, p.d_in);
    for (layer, &eta) in p.layers.iter().zip(&p.etas) {
        if layer.cols != h.first().map_or(layer.cols, Vec::len) {
            return Err(Error::DimensionMismatch {
                expected: layer.cols,
                found: h[0].len(),
            });
        }
        h = match p.aggregation {
            Aggregation::Sum => sum_layer(g, &h, layer, eta, p.activation),
            Aggregation::Gcn => gcn_layer(g, &h, layer, p.activation),
        };
    }
    let readout_terms = h.iter().map(|x| p.readout.apply(x, p.activation)).collect();
    let graph_feature = ordered_sum(readout_terms, p.readout.rows);
    Ok((h, graph_feature))
}
