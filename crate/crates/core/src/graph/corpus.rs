//! Graph corpora and the corpus-wide WL agreement count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::compare::{compare_with_distances, median};
use super::{mpnn_forward, sample_mpnn, wl_refine, Aggregation, Graph};
use crate::{Activation, Error, Result, Seed};

pub const CORPUS_CSV_HEADER: &str = "activation,m,seed,failures,total,min_cross_distance,median_cross_distance";

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of connected graphs on
/// `1..=max_nodes` nodes, each the smallest edge mask in its class, ordered
/// by node count then mask. `max_nodes ≤ 7`.
pub fn connected_graphs(max_nodes: usize) -> Result<Vec<Graph>> {
    if max_nodes > 7 {
        return Err(Error::precondition("exhaustive enumeration is limited to 7 nodes"));
    }
    let mut out = Vec::new();
    for n in 1..=max_nodes {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let index = |i: usize, j: usize| pairs.iter().position(|&p| p == (i.min(j), i.max(j))).expect("pair");
        let perms: Vec<Vec<usize>> = permutations(n)
            .into_iter()
            .map(|p| pairs.iter().map(|&(i, j)| index(p[i], p[j])).collect())
            .collect();
        let mut seen = vec![false; 1 << pairs.len()];
        for mask in 0..1usize << pairs.len() {
            if seen[mask] {
                continue;
            }
            for image in &perms {
                let mapped = (0..pairs.len()).filter(|&e| mask >> e & 1 == 1).fold(0, |acc, e| acc | 1 << image[e]);
                seen[mapped] = true;
            }
            let g = Graph::new(n, (0..pairs.len()).filter(|&e| mask >> e & 1 == 1).map(|e| pairs[e]))?;
            if g.is_connected() {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Non-isomorphic pairs that 1-WL cannot tell apart.
pub fn wl_twin_pairs() -> Vec<(&'static str, Graph, Graph)> {
    let decalin = Graph::new(
        10,
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (5, 6), (6, 7), (7, 8), (8, 9), (9, 4)],
    )
    .expect("in range");
    let bicyclopentyl = Graph::new(
        10,
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 6), (6, 7), (7, 8), (8, 9), (9, 5), (0, 5)],
    )
    .expect("in range");
    vec![
        ("hexagon-vs-two-triangles", Graph::cycle(6), Graph::cycle(3).disjoint_union(&Graph::cycle(3))),
        ("decalin-vs-bicyclopentyl", decalin, bicyclopentyl),
        ("circulant-10-1-2-vs-1-3", Graph::circulant(10, &[1, 2]), Graph::circulant(10, &[1, 3])),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusExperiment {
    pub rounds: usize,
    pub activations: Vec<Activation>,
    pub widths: Vec<usize>,
    pub seeds: Vec<u64>,
    pub aggregation: Aggregation,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub activation: Activation,
    pub m: usize,
    pub seed: u64,
    /// Graphs whose feature partition differs from the WL partition.
    pub failures: usize,
    pub total: usize,
    /// Over all cross-class node pairs of all graphs.
    pub min_cross_distance: Option<f64>,
    pub median_cross_distance: Option<f64>,
}

impl CorpusRow {
    pub fn to_csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{}",
            self.activation,
            self.m,
            self.seed,
            self.failures,
            self.total,
            opt(self.min_cross_distance),
            opt(self.median_cross_distance)
        )
    }
}

pub fn corpus_csv(rows: &[CorpusRow]) -> String {
    let mut out = String::from(CORPUS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// One row per `(activation, m, seed)`; each parameter draw is shared by all
/// graphs. Node features start from the graph labels (degrees by default).
pub fn corpus_separation_experiment(graphs: &[Graph], cfg: &CorpusExperiment) -> Result<Vec<CorpusRow>> {
    if graphs.is_empty() {
        return Ok(Vec::new());
    }
    let colorings: Vec<_> = graphs.iter().map(|g| wl_refine(g, cfg.rounds)).collect();
    let mut rows = Vec::new();
    for &activation in &cfg.activations {
        for &m in &cfg.widths {
            for &seed in &cfg.seeds {
                let params = sample_mpnn(1, m, cfg.rounds, activation, Seed(seed))?.with_aggregation(cfg.aggregation);
                let results = graphs
                    .par_iter()
                    .zip(&colorings)
                    .enumerate()
                    .map(|(id, (g, wl))| {
                        let (h, _) = mpnn_forward(g, &params)?;
                        compare_with_distances(id, g, wl, &h, cfg.threshold)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let failures = results.iter().filter(|(c, _)| !c.agree).count();
                let mut cross: Vec<f64> = results.into_iter().flat_map(|(_, d)| d).collect();
                cross.sort_by(f64::total_cmp);
                rows.push(CorpusRow {
                    activation,
                    m,
                    seed,
                    failures,
                    total: graphs.len(),
                    min_cross_distance: cross.first().copied(),
                    median_cross_distance: median(&cross),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::wl_equivalent;

    #[test]
    fn counts_of_connected_graphs() {
        // Known counts of connected graphs on 1..=6 nodes.
        let all = connected_graphs(6).unwrap();
        let per_n: Vec<usize> = (1..=6).map(|n| all.iter().filter(|g| g.num_nodes() == n).count()).collect();
        assert_eq!(per_n, vec![1, 1, 2, 6, 21, 112]);
        assert_eq!(all.len(), 143);
    }

    #[test]
    fn twins_are_wl_equivalent_but_different() {
        for (name, a, b) in wl_twin_pairs() {
            assert!(wl_equivalent(&a, &b, 10), "{name}");
            assert_ne!(a.edges(), b.edges(), "{name}");
        }
    }

    #[test]
    fn empty_corpus() {
        let cfg = CorpusExperiment {
            rounds: 3,
            activations: vec![Activation::Tanh],
            widths: vec![1],
            seeds: vec![0],
            aggregation: Aggregation::Sum,
            threshold: 1e-12,
        };
        assert!(corpus_separation_experiment(&[], &cfg).unwrap().is_empty());
        let rows = corpus_separation_experiment(&connected_graphs(4).unwrap(), &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].total, 10);
        assert_eq!(rows[0].failures, 0);
        assert!(corpus_csv(&rows).starts_with(CORPUS_CSV_HEADER));
    }
}
