//! First-order collapse of split pairs under a differentiable embedding.

use crate::embed::{check_dim, dist, MeasureEmbedding};
use crate::{Error, Point, Result};

/// `(ε, ‖f(x0+ε·dir) + f(x0−ε·dir) − 2f(x0)‖ / ε)` for each `ε`: the moment
/// gap between `{{x0+ε·dir, x0−ε·dir}}` and `{{x0, x0}}`, relative to their
/// separation scale.
pub fn instability_probe(
    f: &dyn MeasureEmbedding,
    x0: &Point,
    dir: &Point,
    eps_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_dim(f.input_dim(), x0.dim())?;
    check_dim(f.input_dim(), dir.dim())?;
    if eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::precondition("every eps must be positive and finite"));
    }
    let x = x0.coords();
    let f0 = f.feature(x);
    let twice: Vec<f64> = f0.iter().map(|v| 2.0 * v).collect();
    Ok(eps_list
        .iter()
        .map(|&eps| {
            let plus: Vec<f64> = x.iter().zip(dir.coords()).map(|(a, u)| a + eps * u).collect();
            let minus: Vec<f64> = x.iter().zip(dir.coords()).map(|(a, u)| a - eps * u).collect();
            let split: Vec<f64> = f.feature(&plus).iter().zip(f.feature(&minus)).map(|(p, m)| p + m).collect();
            (eps, dist(&split, &twice) / eps)
        })
        .collect())
}

/// Least-squares slope of `ln r` against `ln ε`. `None` with fewer than two
/// points or any nonpositive entry.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(e, r)| !(e > 0.0 && r > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(e, r)| (e.ln(), r.ln())).collect();
    let k = logs.len() as f64;
    let (mx, my) = logs.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / k, b + y / k));
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::sample_shallow_net;
    use crate::{Activation, Seed};

    struct Square;

    impl MeasureEmbedding for Square {
        fn input_dim(&self) -> usize {
            1
        }

        fn output_dim(&self) -> usize {
            1
        }

        fn feature(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] * x[0]]
        }
    }

    #[test]
    fn quadratic_closed_form() {
        let x0 = Point::scalar(0.75).unwrap();
        let dir = Point::scalar(1.0).unwrap();
        let eps = [0.5, 0.25, 0.125, 0.0625];
        for (e, r) in instability_probe(&Square, &x0, &dir, &eps).unwrap() {
            assert_eq!(r, 2.0 * e);
        }
    }

    #[test]
    fn identity_net_is_flat_up_to_rounding() {
        let net = sample_shallow_net(5, 2, Activation::Identity, Seed(1), 1.0).unwrap();
        let x0 = Point::new(vec![0.5, -0.25]).unwrap();
        let dir = Point::new(vec![1.0, 0.5]).unwrap();
        let eps = [0.5, 0.25, 0.125];
        // Identity nets are affine, but rounding in A·x can leave an ulp.
        for (_, r) in instability_probe(&net, &x0, &dir, &eps).unwrap() {
            assert!(r <= 1e-14, "{r}");
        }
    }

    struct Affine;

    impl MeasureEmbedding for Affine {
        fn input_dim(&self) -> usize {
            1
        }

        fn output_dim(&self) -> usize {
            2
        }

        fn feature(&self, x: &[f64]) -> Vec<f64> {
            vec![3.0 * x[0] - 0.5, 0.25 - x[0]]
        }
    }

    #[test]
    fn dyadic_affine_map_is_exactly_zero() {
        let out = instability_probe(&Affine, &Point::scalar(0.375).unwrap(), &Point::scalar(-2.0).unwrap(), &[0.5, 2f64.powi(-10)]).unwrap();
        assert!(out.iter().all(|&(_, r)| r == 0.0));
    }

    #[test]
    fn tanh_decays_linearly() {
        let net = sample_shallow_net(10, 1, Activation::Tanh, Seed(9), 1.0).unwrap();
        let x0 = Point::scalar(0.3).unwrap();
        let dir = Point::scalar(1.0).unwrap();
        let out = instability_probe(&net, &x0, &dir, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(out[0].1 > out[1].1 && out[1].1 > out[2].1);
        let q = out[1].1 / out[2].1;
        assert!((5.0..=20.0).contains(&q), "{q}");
        let slope = loglog_slope(&out).unwrap();
        assert!((0.8..=1.2).contains(&slope), "{slope}");
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 0.1, 0.01].iter().map(|&e: &f64| (e, 3.0 * e.powi(2))).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&[(1.0, 0.0), (0.5, 1.0)]), None);
        assert_eq!(loglog_slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn rejects_bad_eps() {
        let x0 = Point::scalar(0.0).unwrap();
        assert!(instability_probe(&Square, &x0, &x0, &[0.0]).is_err());
    }
}
