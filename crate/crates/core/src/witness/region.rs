//! Linear-region detection for piecewise-linear nets by second differences.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embed::ShallowNetParams;
use crate::{Error, Point, Result, Seed};

pub const DEFAULT_PROBES: usize = 32;
pub const MAX_REGION_ATTEMPTS: usize = 10_000;

const SECOND_DIFF_TOL: f64 = 1e-11;
const ATTEMPTS_PER_SCALE: usize = 8;
const MAX_SCALE_EXP: i32 = 20;
// Below ~1e-6·R the second-difference test stops resolving kinks.
const MAX_HALVINGS: usize = 20;

fn second_difference_small(net: &ShallowNetParams, x0: &[f64], dir: &[f64], delta: f64, f0: &[f64], tol: f64) -> bool {
    let plus: Vec<f64> = x0.iter().zip(dir).map(|(x, u)| x + delta * u).collect();
    let minus: Vec<f64> = x0.iter().zip(dir).map(|(x, u)| x - delta * u).collect();
    let (fp, fm) = (net.forward(&plus), net.forward(&minus));
    let sq: f64 = fp
        .iter()
        .zip(&fm)
        .zip(f0)
        .map(|((a, b), c)| {
            let r = a + b - 2.0 * c;
            r * r
        })
        .sum();
    sq.sqrt() <= tol
}

pub(crate) fn random_unit(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            return u.into_iter().map(|v| v / n).collect();
        }
    }
}

/// True iff for `probes` random unit directions `u` and `δ ∈ {r, r/2}`,
/// `‖f(x0+δu) + f(x0−δu) − 2f(x0)‖ ≤ 1e-11·(1 + ‖f(x0)‖)`.
pub fn is_locally_linear(net: &ShallowNetParams, x0: &Point, radius: f64, probes: usize, seed: Seed) -> bool {
    let x = x0.coords();
    let f0 = net.forward(x);
    let tol = SECOND_DIFF_TOL * (1.0 + f0.iter().map(|v| v * v).sum::<f64>().sqrt());
    let mut rng = seed.rng();
    (0..probes).all(|_| {
        let u = random_unit(&mut rng, x.len());
        [radius, radius / 2.0]
            .into_iter()
            .all(|delta| second_difference_small(net, x, &u, delta, &f0, tol))
    })
}

/// Second differences along each given direction at `δ ∈ {1, 1/2}`.
/// Directions carry their own length.
pub(crate) fn linear_along(net: &ShallowNetParams, x0: &[f64], dirs: &[Vec<f64>]) -> bool {
    let f0 = net.forward(x0);
    let tol = SECOND_DIFF_TOL * (1.0 + f0.iter().map(|v| v * v).sum::<f64>().sqrt());
    dirs.iter()
        .all(|u| [1.0, 0.5].into_iter().all(|delta| second_difference_small(net, x0, u, delta, &f0, tol)))
}

/// Samples `x0` uniformly in `[−R, R]^d` with `R = 1, 2, 4, …`. For
/// piecewise-linear activations the radius is the distance to the nearest
/// kink hyperplane, capped at `R`; otherwise a radius is halved from `R`
/// until [`is_locally_linear`] accepts. Returns the centre
/// and the accepted radius.
pub fn find_linear_region(net: &ShallowNetParams, seed: Seed, max_attempts: usize) -> Result<(Point, f64)> {
    let d = net.dim();
    let mut rng = seed.child(0).rng();
    for attempt in 0..max_attempts {
        let exp = ((attempt / ATTEMPTS_PER_SCALE) as i32).min(MAX_SCALE_EXP);
        let scale = 2f64.powi(exp);
        let x0 = Point::new((0..d).map(|_| rng.random_range(-scale..=scale)).collect())?;
        if let Some(r) = kink_distance(net, x0.coords()) {
            let radius = scale.min(r * (1.0 - 1e-9));
            if radius > 1e-9 * scale {
                return Ok((x0, radius));
            }
            continue;
        }
        let mut radius = scale;
        for h in 0..MAX_HALVINGS {
            let probe_seed = seed.child(1 + (attempt * MAX_HALVINGS + h) as u64);
            if is_locally_linear(net, &x0, radius, DEFAULT_PROBES, probe_seed) {
                return Ok((x0, radius));
            }
            radius /= 2.0;
        }
    }
    Err(Error::SearchFailed {
        what: "linear region",
        attempts: max_attempts,
    })
}

/// Distance from `x` to the nearest kink hyperplane `a_j·x + b_j = k` of a
/// piecewise-linear net; `None` for other activations. Infinite when no
/// unit can reach a kink.
fn kink_distance(net: &ShallowNetParams, x: &[f64]) -> Option<f64> {
    let act = net.activation();
    if !act.is_piecewise_linear() {
        return None;
    }
    let z = net.pre_activation(x);
    Some(
        (0..net.width())
            .filter_map(|j| {
                let norm = net.row(j).iter().map(|a| a * a).sum::<f64>().sqrt();
                (norm > 0.0).then(|| act.kinks().iter().map(|k| (z[j] - k).abs() / norm).fold(f64::INFINITY, f64::min))
            })
            .fold(f64::INFINITY, f64::min),
    )
}

/// Linearity of a one-dimensional net on `[lo, hi]`: second differences at
/// every interior node of a uniform grid with `pieces` cells vanish.
pub(crate) fn interval_is_linear(net: &ShallowNetParams, lo: f64, hi: f64, pieces: usize) -> bool {
    let h = (hi - lo) / pieces as f64;
    let step = vec![h];
    (1..pieces).all(|k| linear_along(net, &[lo + k as f64 * h], std::slice::from_ref(&step)))
        && linear_along(net, &[(lo + hi) / 2.0], &[vec![(hi - lo) / 2.0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::sample_shallow_net;
    use crate::Activation;

    fn neuron() -> ShallowNetParams {
        ShallowNetParams::new(1, 1, vec![1.0], vec![0.0], Activation::Relu).unwrap()
    }

    #[test]
    fn single_relu_neuron() {
        assert!(is_locally_linear(&neuron(), &Point::scalar(5.0).unwrap(), 1.0, 32, Seed(1)));
        assert!(!is_locally_linear(&neuron(), &Point::scalar(0.0).unwrap(), 1.0, 32, Seed(1)));
    }

    #[test]
    fn tanh_nets_are_not_linear() {
        let mut linear = 0;
        for s in 0..200 {
            let net = sample_shallow_net(10, 2, Activation::Tanh, Seed(s), 1.0).unwrap();
            let x0 = Point::new(vec![0.3, -0.2]).unwrap();
            if is_locally_linear(&net, &x0, 1.0, 32, Seed(s + 1000)) {
                linear += 1;
            }
        }
        assert!(linear <= 2, "{linear} of 200 tanh nets looked linear");
    }

    #[test]
    fn region_search_finds_region() {
        for s in 0..20 {
            let net = sample_shallow_net(10, 3, Activation::HardTanh, Seed(s), 1.0).unwrap();
            let (x0, r) = find_linear_region(&net, Seed(s), MAX_REGION_ATTEMPTS).unwrap();
            assert!(r > 0.0);
            assert!(is_locally_linear(&net, &x0, r, 64, Seed(99)));
        }
    }

    #[test]
    fn interval_check() {
        assert!(interval_is_linear(&neuron(), 1.0, 3.0, 16));
        assert!(!interval_is_linear(&neuron(), -1.0, 3.0, 16));
    }
}
