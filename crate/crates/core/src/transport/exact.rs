//! Exact optimal transport between small discrete measures.
//!
//! The transportation problem is solved by successive shortest paths on the
//! bipartite residual graph. Residual arcs carry negative costs, so paths are
//! found with Bellman-Ford; at the sizes allowed here that is cheaper than
//! maintaining potentials.

use crate::measure::canonicalize;
use crate::{DiscreteMeasure, Error, Result};

/// Largest support accepted by [`wasserstein_exact`].
pub const EXACT_SUPPORT_LIMIT: usize = 16;

/// Largest total-mass difference treated as equal.
pub const MASS_TOLERANCE: f64 = 1e-12;

const MAX_AUGMENTATIONS: usize = 100_000;

pub(crate) fn cost_matrix(m1: &DiscreteMeasure, m2: &DiscreteMeasure, p: u32) -> Vec<Vec<f64>> {
    m1.points()
        .iter()
        .map(|x| {
            m2.points()
                .iter()
                .map(|y| crate::embed::dist(x.coords(), y.coords()).powi(p as i32))
                .collect()
        })
        .collect()
}

pub(crate) fn check_transport_inputs(m1: &DiscreteMeasure, m2: &DiscreteMeasure, p: u32) -> Result<()> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch {
            expected: m1.dim(),
            found: m2.dim(),
        });
    }
    if p != 1 && p != 2 {
        return Err(Error::precondition(format!("exponent p must be 1 or 2, got {p}")));
    }
    if !m1.is_nonnegative() || !m2.is_nonnegative() {
        return Err(Error::precondition("transport needs nonnegative weights"));
    }
    let (a, b) = (m1.total_mass(), m2.total_mass());
    if (a - b).abs() > MASS_TOLERANCE {
        return Err(Error::MassMismatch { left: a, right: b });
    }
    Ok(())
}

/// Exact `W_p` with ground cost `‖x − y‖^p`, returned as `(optimal cost)^{1/p}`.
pub fn wasserstein_exact(m1: &DiscreteMeasure, m2: &DiscreteMeasure, p: u32) -> Result<f64> {
    check_transport_inputs(m1, m2, p)?;
    let (mut m1, mut m2) = (canonicalize(m1), canonicalize(m2));
    // A fixed argument order makes the value bitwise symmetric.
    if atom_order(&m2, &m1).is_lt() {
        std::mem::swap(&mut m1, &mut m2);
    }
    for m in [&m1, &m2] {
        if m.len() > EXACT_SUPPORT_LIMIT {
            return Err(Error::SupportTooLarge {
                size: m.len(),
                limit: EXACT_SUPPORT_LIMIT,
            });
        }
    }
    let cost = cost_matrix(&m1, &m2, p);
    let plan = min_cost_plan(&cost, m1.weights(), m2.weights())?;
    let total: f64 = plan
        .iter()
        .zip(&cost)
        .flat_map(|(f, c)| f.iter().zip(c).map(|(f, c)| f * c))
        .sum();
    Ok(total.max(0.0).powf(1.0 / p as f64))
}

fn atom_order(a: &DiscreteMeasure, b: &DiscreteMeasure) -> std::cmp::Ordering {
    a.atoms()
        .zip(b.atoms())
        .map(|((p, w), (q, v))| p.lex_cmp(q).then(w.total_cmp(&v)))
        .find(|o| o.is_ne())
        .unwrap_or(a.len().cmp(&b.len()))
}

/// Optimal plan for supplies `a` and demands `b` (equal totals), by
/// successive shortest paths with Dijkstra on reduced costs.
///
/// Nodes: super-source `0`, sources `1..=n`, sinks `n+1..=n+k`, super-sink
/// `n+k+1`. Reduced costs are clamped at zero to absorb rounding.
fn min_cost_plan(cost: &[Vec<f64>], a: &[f64], b: &[f64]) -> Result<Vec<Vec<f64>>> {
    let (n, k) = (a.len(), b.len());
    let v = n + k + 2;
    let (s, t) = (0, n + k + 1);
    let mut cap = vec![vec![0.0; v]; v];
    let mut arc = vec![vec![0.0; v]; v];
    for i in 0..n {
        cap[s][1 + i] = a[i];
        for j in 0..k {
            cap[1 + i][1 + n + j] = f64::INFINITY;
            arc[1 + i][1 + n + j] = cost[i][j];
            arc[1 + n + j][1 + i] = -cost[i][j];
        }
    }
    for j in 0..k {
        cap[1 + n + j][t] = b[j];
    }
    let total = a.iter().sum::<f64>().min(b.iter().sum::<f64>());
    let tiny = 1e-14 * total.max(f64::MIN_POSITIVE);
    let mut sent = 0.0;
    let mut potential = vec![0.0; v];

    for _ in 0..MAX_AUGMENTATIONS {
        if total - sent <= tiny {
            break;
        }
        let mut dist = vec![f64::INFINITY; v];
        let mut pred = vec![usize::MAX; v];
        let mut done = vec![false; v];
        dist[s] = 0.0;
        while let Some(u) = (0..v).filter(|&u| !done[u] && dist[u].is_finite()).min_by(|&x, &y| dist[x].total_cmp(&dist[y])) {
            done[u] = true;
            for w in 0..v {
                if done[w] || cap[u][w] <= tiny {
                    continue;
                }
                let reduced = (arc[u][w] + potential[u] - potential[w]).max(0.0);
                if dist[u] + reduced < dist[w] {
                    dist[w] = dist[u] + reduced;
                    pred[w] = u;
                }
            }
        }
        if !dist[t].is_finite() {
            break;
        }
        let reach = dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
        for (p, d) in potential.iter_mut().zip(&dist) {
            *p += if d.is_finite() { *d } else { reach };
        }
        let mut amount = f64::INFINITY;
        let mut node = t;
        while node != s {
            amount = amount.min(cap[pred[node]][node]);
            node = pred[node];
        }
        let mut node = t;
        while node != s {
            let prev = pred[node];
            cap[prev][node] -= amount;
            cap[node][prev] += amount;
            node = prev;
        }
        sent += amount;
    }
    if total - sent > tiny.max(1e-12 * total) {
        return Err(Error::SearchFailed {
            what: "exact transport",
            attempts: MAX_AUGMENTATIONS,
        });
    }
    // Flow on source→sink arcs equals the residual capacity of their reverses.
    Ok((0..n).map(|i| (0..k).map(|j| cap[1 + n + j][1 + i]).collect()).collect())
}
