//! Node partitions induced by real-valued features, against WL colorings.

use serde::{Deserialize, Serialize};

use super::wl::partition_of;
use super::{Graph, WLColoring};
use crate::embed::{dist, norm};
use crate::{Error, Result};

/// Features closer than this, after normalization, are treated as equal.
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

/// Invariant: `agree` iff the two partitions coincide as set partitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringComparison {
    pub graph_id: usize,
    pub wl_partition_sizes: Vec<usize>,
    pub mpnn_partition_sizes: Vec<usize>,
    pub agree: bool,
    /// Over node pairs in different feature classes; `None` with one class.
    pub min_cross_distance: Option<f64>,
    pub median_cross_distance: Option<f64>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut x = x;
        while self.0[x] != root {
            let next = self.0[x];
            self.0[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Rescales so the mean Euclidean norm is 1. All-zero input is unchanged.
pub fn normalize_mean_norm(features: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mean = features.iter().map(|x| norm(x)).sum::<f64>() / features.len().max(1) as f64;
    if mean == 0.0 {
        return features.to_vec();
    }
    features.iter().map(|x| x.iter().map(|v| v / mean).collect()).collect()
}

pub(crate) fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0),
    }
}

/// Classes of the transitive closure of `‖h_i − h_j‖ < threshold` on
/// mean-norm-1 features, compared with the last WL round.
pub fn compare_colorings(
    graph_id: usize,
    g: &Graph,
    wl: &WLColoring,
    node_features: &[Vec<f64>],
    threshold: f64,
) -> Result<ColoringComparison> {
    compare_with_distances(graph_id, g, wl, node_features, threshold).map(|(c, _)| c)
}

/// [`compare_colorings`] plus the sorted cross-class distances.
pub(crate) fn compare_with_distances(
    graph_id: usize,
    g: &Graph,
    wl: &WLColoring,
    node_features: &[Vec<f64>],
    threshold: f64,
) -> Result<(ColoringComparison, Vec<f64>)> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::precondition("threshold must be positive"));
    }
    let n = g.num_nodes();
    if node_features.len() != n || wl.last().len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: node_features.len(),
        });
    }
    let h = normalize_mean_norm(node_features);
    let mut distances = vec![vec![0.0; n]; n];
    let mut uf = UnionFind((0..n).collect());
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(&h[i], &h[j]);
            distances[i][j] = d;
            if d < threshold {
                uf.union(i, j);
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    let mpnn = partition_of(&labels);
    let wl_part = wl.partition(wl.rounds());
    let mut cross: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| labels[i] != labels[j])
        .map(|(i, j)| distances[i][j])
        .collect();
    cross.sort_by(f64::total_cmp);
    let comparison = ColoringComparison {
        graph_id,
        wl_partition_sizes: wl_part.iter().map(Vec::len).collect(),
        mpnn_partition_sizes: mpnn.iter().map(Vec::len).collect(),
        agree: mpnn == wl_part,
        min_cross_distance: cross.first().copied(),
        median_cross_distance: median(&cross),
    };
    Ok((comparison, cross))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{mpnn_forward, sample_mpnn, wl_refine};
    use crate::{Activation, Seed};

    #[test]
    fn chains_merge_transitively() {
        let g = Graph::path(3);
        let wl = wl_refine(&Graph::new(3, []).unwrap(), 0);
        // Pairwise 0.6e-12 apart after normalization, 1.2e-12 end to end.
        let e = 0.6e-12;
        let h = vec![vec![1.0], vec![1.0 + e], vec![1.0 + 2.0 * e]];
        let c = compare_colorings(0, &g, &wl, &h, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(c.mpnn_partition_sizes, vec![3]);
        assert!(c.agree);
        assert_eq!(c.min_cross_distance, None);
    }

    #[test]
    fn cycle_has_one_class() {
        let g = Graph::cycle(6);
        let p = sample_mpnn(1, 2, 3, Activation::Tanh, Seed(5)).unwrap();
        let (h, _) = mpnn_forward(&g, &p).unwrap();
        let c = compare_colorings(0, &g, &wl_refine(&g, 3), &h, DEFAULT_THRESHOLD).unwrap();
        assert!(c.agree);
        assert_eq!(c.wl_partition_sizes, vec![6]);
    }

    #[test]
    fn path_of_three() {
        let g = Graph::path(3);
        let p = sample_mpnn(1, 1, 1, Activation::Tanh, Seed(12)).unwrap();
        let (h, _) = mpnn_forward(&g, &p).unwrap();
        let c = compare_colorings(3, &g, &wl_refine(&g, 1), &h, DEFAULT_THRESHOLD).unwrap();
        assert!(c.agree);
        assert_eq!(c.wl_partition_sizes, vec![2, 1]);
        assert_eq!(c.graph_id, 3);
        assert!(c.min_cross_distance.unwrap() > DEFAULT_THRESHOLD);
    }

    #[test]
    fn normalization() {
        let h = normalize_mean_norm(&[vec![3.0, 4.0], vec![0.0, 0.0]]);
        assert_eq!(h, vec![vec![1.2, 1.6], vec![0.0, 0.0]]);
        assert_eq!(median(&[1.0, 2.0, 4.0, 8.0]), Some(3.0));
    }
}
