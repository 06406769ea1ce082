//! Entropic optimal transport by log-domain Sinkhorn iterations.

use serde::{Deserialize, Serialize};

use super::exact::{check_transport_inputs, cost_matrix};
use crate::measure::canonicalize;
use crate::{DiscreteMeasure, Error, Result};

/// Default regularization relative to the mean ground cost.
pub const DEFAULT_RELATIVE_EPSILON: f64 = 0.01;
pub const DEFAULT_MAX_ITERS: usize = 2000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Invariants: `epsilon > 0`, `max_iters ≥ 1`, `p ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OTConfig {
    pub p: u32,
    pub epsilon: f64,
    pub max_iters: usize,
    pub convergence_tol: f64,
}

impl OTConfig {
    pub fn new(p: u32, epsilon: f64, max_iters: usize, convergence_tol: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::precondition("epsilon must be positive"));
        }
        if max_iters == 0 {
            return Err(Error::precondition("max_iters must be at least 1"));
        }
        if p != 1 && p != 2 {
            return Err(Error::precondition(format!("exponent p must be 1 or 2, got {p}")));
        }
        Ok(OTConfig {
            p,
            epsilon,
            max_iters,
            convergence_tol,
        })
    }

    /// Defaults for a given pair: `epsilon = 0.01 × mean pairwise cost`.
    pub fn default_for(m1: &DiscreteMeasure, m2: &DiscreteMeasure, p: u32) -> Result<Self> {
        let cost = cost_matrix(m1, m2, p);
        let count = (m1.len() * m2.len()).max(1) as f64;
        let mean = cost.iter().flatten().sum::<f64>() / count;
        let epsilon = if mean > 0.0 { DEFAULT_RELATIVE_EPSILON * mean } else { 1e-12 };
        OTConfig::new(p, epsilon, DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinkhornOutcome {
    /// `⟨P, C⟩^{1/p}` for the entropic plan `P`.
    pub value: f64,
    pub iterations: usize,
    /// L1 violation of the row marginal, relative to total mass.
    pub violation: f64,
    pub converged: bool,
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Log-domain Sinkhorn with geometric ε-scaling from the largest cost down
/// to `cfg.epsilon`. Non-convergence is reported in the outcome, not as an
/// error.
pub fn sinkhorn(m1: &DiscreteMeasure, m2: &DiscreteMeasure, cfg: &OTConfig) -> Result<SinkhornOutcome> {
    check_transport_inputs(m1, m2, cfg.p)?;
    let (m1, m2) = (canonicalize(m1), canonicalize(m2));
    let mass = m1.total_mass();
    if m1.is_empty() || m2.is_empty() || mass <= 0.0 {
        return Ok(SinkhornOutcome {
            value: 0.0,
            iterations: 0,
            violation: 0.0,
            converged: true,
        });
    }
    let cost = cost_matrix(&m1, &m2, cfg.p);
    let log_a: Vec<f64> = m1.weights().iter().map(|w| (w / mass).ln()).collect();
    let log_b: Vec<f64> = m2.weights().iter().map(|w| (w / m2.total_mass()).ln()).collect();
    let (n, k) = (log_a.len(), log_b.len());
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; k];

    let max_cost = cost.iter().flatten().copied().fold(0.0, f64::max);
    let mut eps = max_cost.max(cfg.epsilon);
    let mut iterations = 0;
    let mut last_eps = eps;
    let mut violation = f64::INFINITY;

    // g is updated last, so column marginals are exact; rows carry the error.
    let row_violation = |f: &[f64], g: &[f64], eps: f64| -> f64 {
        (0..n)
            .map(|i| {
                let row: f64 = (0..k)
                    .map(|j| (log_a[i] + log_b[j] + (f[i] + g[j] - cost[i][j]) / eps).exp())
                    .sum();
                (row - log_a[i].exp()).abs()
            })
            .sum()
    };

    while iterations < cfg.max_iters {
        for (i, fi) in f.iter_mut().enumerate() {
            *fi = -eps * log_sum_exp((0..k).map(|j| log_b[j] + (g[j] - cost[i][j]) / eps));
        }
        for (j, gj) in g.iter_mut().enumerate() {
            *gj = -eps * log_sum_exp((0..n).map(|i| log_a[i] + (f[i] - cost[i][j]) / eps));
        }
        iterations += 1;
        last_eps = eps;
        if eps > cfg.epsilon {
            eps = (eps * 0.5).max(cfg.epsilon);
            continue;
        }
        violation = row_violation(&f, &g, eps);
        if violation <= cfg.convergence_tol {
            break;
        }
    }
    if !violation.is_finite() {
        violation = row_violation(&f, &g, last_eps);
    }
    let eps = last_eps;
    let total: f64 = (0..n)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| (log_a[i] + log_b[j] + (f[i] + g[j] - cost[i][j]) / eps).exp() * cost[i][j])
        .sum();
    Ok(SinkhornOutcome {
        value: (mass * total).max(0.0).powf(1.0 / cfg.p as f64),
        iterations,
        violation,
        converged: violation <= cfg.convergence_tol,
    })
}

/// [`sinkhorn`] with [`OTConfig::default_for`].
pub fn sinkhorn_default(m1: &DiscreteMeasure, m2: &DiscreteMeasure, p: u32) -> Result<SinkhornOutcome> {
    let cfg = OTConfig::default_for(m1, m2, p)?;
    sinkhorn(m1, m2, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::wasserstein_exact;

    #[test]
    fn far_diracs() {
        let a = DiscreteMeasure::from_atoms(2, [(1.0, vec![0.0, 0.0])]).unwrap();
        let b = DiscreteMeasure::from_atoms(2, [(1.0, vec![30.0, 40.0])]).unwrap();
        let out = sinkhorn_default(&a, &b, 1).unwrap();
        assert!((out.value - 50.0).abs() <= 0.01 * 50.0);
        assert!(out.converged);
    }

    #[test]
    fn identical_measures_small_bias() {
        let m = DiscreteMeasure::from_scalar_atoms(&[(0.0, 1.0), (1.0, 1.0), (3.0, 2.0)]).unwrap();
        let out = sinkhorn_default(&m, &m, 1).unwrap();
        assert!(out.value >= 0.0);
        assert!(out.value <= 0.02 * 3.0, "{}", out.value);
    }

    #[test]
    fn close_to_exact_on_small_example() {
        let a = DiscreteMeasure::from_scalar_atoms(&[(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let b = DiscreteMeasure::from_scalar_atoms(&[(0.5, 1.0), (2.0, 1.0)]).unwrap();
        let exact = wasserstein_exact(&a, &b, 1).unwrap();
        let approx = sinkhorn_default(&a, &b, 1).unwrap().value;
        assert!((approx - exact).abs() <= 0.05 * exact, "{approx} vs {exact}");
    }

    #[test]
    fn config_validation() {
        assert!(OTConfig::new(1, 0.0, 10, 1e-9).is_err());
        assert!(OTConfig::new(1, 0.1, 0, 1e-9).is_err());
        assert!(OTConfig::new(3, 0.1, 10, 1e-9).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let a = DiscreteMeasure::from_scalar_atoms(&[(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let b = DiscreteMeasure::from_scalar_atoms(&[(0.3, 1.5), (2.0, 0.5)]).unwrap();
        let cfg = OTConfig::new(1, 1e-3, 1, 1e-15).unwrap();
        let out = sinkhorn(&a, &b, &cfg).unwrap();
        assert!(!out.converged);
        assert!(out.violation.is_finite());
    }
}
