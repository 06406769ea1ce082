//! One-dimensional Weisfeiler-Leman color refinement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Graph;

/// Colors per iteration. Ids are ranks of signatures in lexicographic order,
/// so they do not depend on node order.
///
/// Invariant: equal colors at `t + 1` imply equal colors at `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WLColoring {
    colors: Vec<Vec<usize>>,
}

fn canonical_ids<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let ranks: BTreeMap<K, usize> = {
        let mut sorted = keys.to_vec();
        sorted.sort();
        sorted.dedup();
        sorted.into_iter().enumerate().map(|(i, k)| (k, i)).collect()
    };
    keys.iter().map(|k| ranks[k]).collect()
}

impl WLColoring {
    /// Number of refinement rounds `T`; there are `T + 1` color arrays.
    pub fn rounds(&self) -> usize {
        self.colors.len() - 1
    }

    pub fn colors(&self, t: usize) -> &[usize] {
        &self.colors[t]
    }

    pub fn last(&self) -> &[usize] {
        self.colors.last().expect("at least the initial coloring")
    }

    pub fn num_classes(&self, t: usize) -> usize {
        self.colors[t].iter().max().map_or(0, |&c| c + 1)
    }

    /// Sorted color counts at round `t`.
    pub fn histogram(&self, t: usize) -> Vec<(usize, usize)> {
        histogram(&self.colors[t])
    }

    pub fn partition(&self, t: usize) -> Vec<Vec<usize>> {
        partition_of(&self.colors[t])
    }
}

pub(crate) fn histogram(colors: &[usize]) -> Vec<(usize, usize)> {
    let mut counts = BTreeMap::new();
    for &c in colors {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Classes of equal labels, each sorted, ordered by smallest member.
pub(crate) fn partition_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in labels.iter().enumerate() {
        classes.entry(c).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort_by_key(|c| c[0]);
    out
}

/// `T` rounds of refinement from the node features. Round `t + 1` colors
/// `v` by the pair (color of `v`, sorted neighbour colors) at round `t`.
pub fn wl_refine(g: &Graph, rounds: usize) -> WLColoring {
    let mut colors = vec![canonical_ids(g.node_features())];
    for _ in 0..rounds {
        let prev = colors.last().expect("nonempty");
        let signatures: Vec<(usize, Vec<usize>)> = (0..g.num_nodes())
            .map(|v| {
                let mut around: Vec<usize> = g.neighbors(v).iter().map(|&u| prev[u]).collect();
                around.sort_unstable();
                (prev[v], around)
            })
            .collect();
        colors.push(canonical_ids(&signatures));
    }
    WLColoring { colors }
}

/// True when `rounds` rounds of refinement on the disjoint union give `g1`
/// and `g2` the same color histogram at every round.
pub fn wl_equivalent(g1: &Graph, g2: &Graph, rounds: usize) -> bool {
    let union = g1.disjoint_union(g2);
    let wl = wl_refine(&union, rounds);
    let n1 = g1.num_nodes();
    (0..=rounds).all(|t| {
        let c = wl.colors(t);
        histogram(&c[..n1]) == histogram(&c[n1..])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_versus_two_triangles() {
        let c6 = Graph::cycle(6);
        let two = Graph::cycle(3).disjoint_union(&Graph::cycle(3));
        for t in 0..6 {
            assert_eq!(wl_refine(&c6, t), wl_refine(&two, t));
        }
        assert!(wl_equivalent(&c6, &two, 6));
    }

    #[test]
    fn path_versus_triangle() {
        assert!(!wl_equivalent(&Graph::path(3), &Graph::cycle(3), 0));
        let wl = wl_refine(&Graph::path(3), 1);
        assert_eq!(wl.partition(1), vec![vec![0, 2], vec![1]]);
        assert_eq!(wl.histogram(0), vec![(0, 2), (1, 1)]);
    }

    #[test]
    fn refinement_on_a_path() {
        // Colors of P5 split by distance to the nearest end.
        let wl = wl_refine(&Graph::path(5), 3);
        assert_eq!(wl.num_classes(0), 2);
        assert_eq!(wl.num_classes(1), 3);
        assert_eq!(wl.partition(3), vec![vec![0, 4], vec![1, 3], vec![2]]);
    }
}
