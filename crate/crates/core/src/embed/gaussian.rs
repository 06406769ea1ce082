use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_dim, MeasureEmbedding};
use crate::{DiscreteMeasure, Error, Point, Result, Seed};

/// Lower bound added to sampled widths.
pub const WIDTH_FLOOR: f64 = 0.1;

/// Gaussian bumps `x ↦ exp(−‖x − y_j‖²/σ_j²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    centers: Vec<Point>,
    widths: Vec<f64>,
    dim: usize,
}

impl GaussianParams {
    pub fn new(centers: Vec<Point>, widths: Vec<f64>) -> Result<Self> {
        check_dim(centers.len(), widths.len())?;
        let Some(dim) = centers.first().map(Point::dim) else {
            return Err(Error::precondition("at least one Gaussian center is required"));
        };
        for c in &centers {
            check_dim(dim, c.dim())?;
        }
        if widths.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::precondition("Gaussian widths must be positive and finite"));
        }
        Ok(GaussianParams {
            centers,
            widths,
            dim,
        })
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }
}

impl MeasureEmbedding for GaussianParams {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn output_dim(&self) -> usize {
        self.widths.len()
    }

    fn feature(&self, x: &[f64]) -> Vec<f64> {
        self.centers
            .iter()
            .zip(&self.widths)
            .map(|(y, s)| {
                let sq: f64 = y.coords().iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (-sq / (s * s)).exp()
            })
            .collect()
    }
}

/// Centers `N(0, scale²·I)`, widths `|N(0,1)| + WIDTH_FLOOR`.
pub fn sample_gaussian(m: usize, d: usize, seed: Seed, scale: f64) -> Result<GaussianParams> {
    if m == 0 || d == 0 {
        return Err(Error::precondition("m and d must be positive"));
    }
    let mut rng = seed.rng();
    let centers = (0..m)
        .map(|_| {
            let c = (0..d)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    scale * z
                })
                .collect::<Vec<f64>>();
            Point::new(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let widths = (0..m)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z.abs() + WIDTH_FLOOR
        })
        .collect();
    GaussianParams::new(centers, widths)
}

/// Component `j` is `Σ_i w_i exp(−‖x_i − y_j‖²/σ_j²)`.
pub fn gaussian_embed(m: &DiscreteMeasure, p: &GaussianParams) -> Result<Vec<f64>> {
    p.embed(m)
}
