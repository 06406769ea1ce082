use std::fmt::Write as _;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_dim, MeasureEmbedding};
use crate::{Activation, DiscreteMeasure, Error, Result, Seed};

/// Shallow network `x ↦ σ(A x + b)` with `A ∈ ℝ^{m×d}` stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShallowNetParams {
    width: usize,
    dim: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    activation: Activation,
}

impl ShallowNetParams {
    pub fn new(width: usize, dim: usize, a: Vec<f64>, b: Vec<f64>, activation: Activation) -> Result<Self> {
        if width == 0 || dim == 0 {
            return Err(Error::precondition("network width and input dimension must be positive"));
        }
        check_dim(width * dim, a.len())?;
        check_dim(width, b.len())?;
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("network parameters"));
        }
        Ok(ShallowNetParams {
            width,
            dim,
            a,
            b,
            activation,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.a[j * self.dim..(j + 1) * self.dim]
    }

    pub fn bias(&self) -> &[f64] {
        &self.b
    }

    /// `A x + b`.
    pub fn pre_activation(&self, x: &[f64]) -> Vec<f64> {
        (0..self.width)
            .map(|j| {
                self.row(j)
                    .iter()
                    .zip(x)
                    .fold(self.b[j], |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    /// `σ(A x + b)` for one input point.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let act = self.activation;
        self.pre_activation(x).into_iter().map(|z| act.apply(z)).collect()
    }

    /// Jacobian of [`forward`](Self::forward) at `x`, row-major `m × d`.
    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let act = self.activation;
        let mut out = Vec::with_capacity(self.width * self.dim);
        for (j, z) in self.pre_activation(x).into_iter().enumerate() {
            let s = act.derivative(z);
            out.extend(self.row(j).iter().map(|a| s * a));
        }
        out
    }

    /// The first `m` neurons.
    pub fn prefix(&self, m: usize) -> Result<ShallowNetParams> {
        if m == 0 || m > self.width {
            return Err(Error::precondition(format!(
                "prefix width {m} outside 1..={}",
                self.width
            )));
        }
        Ok(ShallowNetParams {
            width: m,
            dim: self.dim,
            a: self.a[..m * self.dim].to_vec(),
            b: self.b[..m].to_vec(),
            activation: self.activation,
        })
    }

    pub fn with_activation(&self, activation: Activation) -> ShallowNetParams {
        ShallowNetParams {
            activation,
            ..self.clone()
        }
    }

    /// `m d activation`, then `m` rows of `A`, then `b`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.width, self.dim, self.activation.name());
        for j in 0..self.width {
            push_row(&mut s, self.row(j));
        }
        push_row(&mut s, &self.b);
        s
    }

    pub fn from_text(text: &str) -> Result<ShallowNetParams> {
        parse_params(Path::new("<memory>"), text)
    }

    pub fn read(path: &Path) -> Result<ShallowNetParams> {
        parse_params(path, &std::fs::read_to_string(path)?)
    }
}

impl MeasureEmbedding for ShallowNetParams {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn output_dim(&self) -> usize {
        self.width
    }

    fn feature(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x)
    }
}

fn push_row(s: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{v:?}").unwrap();
    }
    s.push('\n');
}

fn parse_params(path: &Path, text: &str) -> Result<ShallowNetParams> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing header `m d activation`"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [m, d, name] = fields[..] else {
        return Err(Error::parse(path, hline, "header must be `m d activation`"));
    };
    let m: usize = m.parse().map_err(|_| Error::parse(path, hline, "bad width"))?;
    let d: usize = d.parse().map_err(|_| Error::parse(path, hline, "bad dimension"))?;
    let activation = Activation::from_name(name).map_err(|e| Error::parse(path, hline, e.to_string()))?;

    let mut read_row = |len: usize| -> Result<Vec<f64>> {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::parse(path, hline, "unexpected end of file"))?;
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(path, ln, e.to_string()))?;
        if row.len() != len {
            return Err(Error::parse(path, ln, format!("expected {len} values, found {}", row.len())));
        }
        Ok(row)
    };
    let mut a = Vec::with_capacity(m * d);
    for _ in 0..m {
        a.extend(read_row(d)?);
    }
    let b = read_row(m)?;
    ShallowNetParams::new(m, d, a, b, activation)
}

/// `A_{ij} ~ N(0, 1/(s·√(2d)))`, `b_j ~ N(0, 1/√2)`, drawn row-major then bias.
pub fn sample_shallow_net(
    m: usize,
    d: usize,
    activation: Activation,
    seed: Seed,
    input_scale: f64,
) -> Result<ShallowNetParams> {
    if !(input_scale > 0.0 && input_scale.is_finite()) {
        return Err(Error::precondition("input_scale must be positive"));
    }
    let mut rng = seed.rng();
    let wa = Normal::new(0.0, 1.0 / (input_scale * (2.0 * d as f64).sqrt())).expect("finite std");
    let wb = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("finite std");
    let a: Vec<f64> = (0..m * d).map(|_| wa.sample(&mut rng)).collect();
    let b: Vec<f64> = (0..m).map(|_| wb.sample(&mut rng)).collect();
    ShallowNetParams::new(m, d, a, b, activation)
}

/// Target space for [`recommended_width`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    MeasuresRd,
    MultisetsRd,
    MeasuresCountable,
    MultisetsCountable,
}

/// Embedding dimension sufficient for moment injectivity on `n`-atom inputs.
pub fn recommended_width(space: Space, n: usize, d: usize) -> usize {
    match space {
        Space::MeasuresRd => 2 * n * (d + 1) + 1,
        Space::MultisetsRd => 2 * n * d + 1,
        Space::MeasuresCountable => 2 * n + 1,
        Space::MultisetsCountable => 1,
    }
}

/// `Σ_i w_i σ(A x_i + b)`.
pub fn moment_embed(m: &DiscreteMeasure, p: &ShallowNetParams) -> Result<Vec<f64>> {
    p.embed(m)
}
