//! Singular-value ratio of the two-point embedding Jacobian.

use crate::embed::ShallowNetParams;
use crate::linalg::two_column_singular_values;
use crate::witness::is_locally_linear;
use crate::{Error, Point, Result, Seed};

pub const JACOBIAN_CSV_HEADER: &str = "x1,x2,ratio";

const RUN_PROBES: usize = 8;

fn derivative_column(net: &ShallowNetParams, x: f64) -> Vec<f64> {
    let act = net.activation();
    net.pre_activation(&[x])
        .into_iter()
        .zip(net.weights())
        .map(|(z, a)| act.derivative(z) * a)
        .collect()
}

/// `σ₂/σ₁` of the `m×2` Jacobian `[f'(x1), f'(x2)]` of `(x1, x2) ↦ f(x1) + f(x2)`.
/// A zero Jacobian has ratio 0. Requires a one-dimensional input.
pub fn jacobian_ratio_map(net: &ShallowNetParams, grid: &[(f64, f64)]) -> Result<Vec<f64>> {
    if net.dim() != 1 {
        return Err(Error::precondition(format!(
            "the Jacobian map needs a one-dimensional net, got d = {}",
            net.dim()
        )));
    }
    Ok(grid
        .iter()
        .map(|&(x1, x2)| {
            let (s1, s2) = two_column_singular_values(&derivative_column(net, x1), &derivative_column(net, x2));
            if s1 == 0.0 {
                0.0
            } else {
                (s2 / s1).clamp(0.0, 1.0)
            }
        })
        .collect())
}

/// `k×k` grid over `[0, 1]²` with coordinates `i/(k−1)`, row-major in `x1`.
pub fn unit_grid(k: usize) -> Vec<(f64, f64)> {
    let axis: Vec<f64> = match k {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
    };
    axis.iter().flat_map(|&x1| axis.iter().map(move |&x2| (x1, x2))).collect()
}

/// Maximal runs `[i, j]` of consecutive sorted coordinates such that the net
/// is linear on `[xs[i], xs[j]]`. Each run spans a square that crosses the
/// diagonal and lies in one linear region of the two-point embedding.
pub fn diagonal_runs(net: &ShallowNetParams, xs: &[f64], seed: Seed) -> Vec<(usize, usize)> {
    let linear = |i: usize, j: usize| {
        let (lo, hi) = (xs[i], xs[j]);
        let centre = Point::scalar((lo + hi) / 2.0).expect("finite grid");
        is_locally_linear(net, &centre, (hi - lo) / 2.0, RUN_PROBES, seed)
    };
    let mut runs = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j + 1 < xs.len() && linear(i, j + 1) {
            j += 1;
        }
        runs.push((i, j));
        i = j + 1;
    }
    runs
}

pub fn jacobian_csv(grid: &[(f64, f64)], ratios: &[f64]) -> String {
    let mut out = String::from(JACOBIAN_CSV_HEADER);
    out.push('\n');
    for ((x1, x2), r) in grid.iter().zip(ratios) {
        out.push_str(&format!("{x1},{x2},{r}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::sample_shallow_net;
    use crate::Activation;

    #[test]
    fn diagonal_is_singular() {
        for act in [Activation::Tanh, Activation::Silu, Activation::Relu, Activation::Sigmoid] {
            let net = sample_shallow_net(10, 1, act, Seed(3), 1.0).unwrap();
            let grid: Vec<(f64, f64)> = (0..50).map(|i| (i as f64 * 0.07 - 1.3, i as f64 * 0.07 - 1.3)).collect();
            assert!(jacobian_ratio_map(&net, &grid).unwrap().iter().all(|&r| r == 0.0));
        }
    }

    #[test]
    fn silu_off_diagonal_is_regular() {
        let net = sample_shallow_net(10, 1, Activation::Silu, Seed(5), 1.0).unwrap();
        let r = jacobian_ratio_map(&net, &[(0.1, 0.8), (0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert!(r.iter().all(|&v| v > 1e-6 && v <= 1.0), "{r:?}");
    }

    #[test]
    fn matches_full_svd() {
        let net = sample_shallow_net(6, 1, Activation::Tanh, Seed(8), 1.0).unwrap();
        let grid = unit_grid(7);
        let ratios = jacobian_ratio_map(&net, &grid).unwrap();
        for (&(x1, x2), &r) in grid.iter().zip(&ratios) {
            let mut cols = derivative_column(&net, x1);
            cols.extend(derivative_column(&net, x2));
            let m = nalgebra::DMatrix::from_column_slice(6, 2, &cols);
            let s = crate::linalg::singular_values(&m);
            let expected = if s[0] == 0.0 { 0.0 } else { s[1] / s[0] };
            assert!((r - expected).abs() < 1e-9, "{r} vs {expected}");
        }
    }

    #[test]
    fn relu_rectangles_are_degenerate() {
        let net = sample_shallow_net(10, 1, Activation::Relu, Seed(2), 1.0).unwrap();
        let xs: Vec<f64> = (0..40).map(|i| i as f64 / 39.0).collect();
        for (i, j) in diagonal_runs(&net, &xs, Seed(0)) {
            let cell: Vec<(f64, f64)> = (i..=j).flat_map(|a| (i..=j).map(move |b| (a, b))).map(|(a, b)| (xs[a], xs[b])).collect();
            assert!(jacobian_ratio_map(&net, &cell).unwrap().iter().all(|&r| r == 0.0));
        }
    }

    #[test]
    fn rejects_multivariate_nets() {
        let net = sample_shallow_net(4, 2, Activation::Tanh, Seed(0), 1.0).unwrap();
        assert!(jacobian_ratio_map(&net, &[(0.0, 1.0)]).is_err());
    }

    #[test]
    fn grid_and_csv() {
        let g = unit_grid(2);
        assert_eq!(g, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        assert_eq!(jacobian_csv(&g[..1], &[0.0]), "x1,x2,ratio\n0,0,0\n");
    }
}
