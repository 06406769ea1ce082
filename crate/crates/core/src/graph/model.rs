use crate::{Error, Result};

/// Undirected graph on nodes `0..num_nodes` with integer node labels.
///
/// Invariants: edges are stored once as `(min, max)`, sorted and unique;
/// `node_features.len() == num_nodes`. Self-loops are kept and make a node
/// its own neighbour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    node_features: Vec<i64>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Node features default to degrees.
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut norm = Vec::new();
        for (u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::precondition(format!(
                    "edge ({u}, {v}) out of range for {num_nodes} nodes"
                )));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(u, v) in &norm {
            adjacency[u].push(v);
            if u != v {
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let node_features = adjacency.iter().map(|a| a.len() as i64).collect();
        Ok(Graph {
            num_nodes,
            edges: norm,
            node_features,
            adjacency,
        })
    }

    pub fn with_features(mut self, features: Vec<i64>) -> Result<Graph> {
        if features.len() != self.num_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.num_nodes,
                found: features.len(),
            });
        }
        self.node_features = features;
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_features(&self) -> &[i64] {
        &self.node_features
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_self_loops(&self) -> bool {
        self.edges.iter().any(|(u, v)| u == v)
    }

    pub fn is_connected(&self) -> bool {
        if self.num_nodes == 0 {
            return true;
        }
        let mut seen = vec![false; self.num_nodes];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Node `v` of `self` becomes node `perm[v]`; features move with it.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..self.num_nodes).collect::<Vec<_>>() {
            return Err(Error::precondition("not a permutation of the node set"));
        }
        let mut features = vec![0; self.num_nodes];
        for (v, &p) in perm.iter().enumerate() {
            features[p] = self.node_features[v];
        }
        Graph::new(self.num_nodes, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))?.with_features(features)
    }

    /// `self` on nodes `0..n1`, `other` shifted to `n1..n1+n2`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.num_nodes;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        let features = self.node_features.iter().chain(&other.node_features).copied().collect();
        Graph::new(shift + other.num_nodes, edges)
            .and_then(|g| g.with_features(features))
            .expect("union of valid graphs")
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("in range")
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("in range")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("in range")
    }

    /// Circulant graph joining `i` and `i ± s` for each jump `s`.
    pub fn circulant(n: usize, jumps: &[usize]) -> Graph {
        Graph::new(n, (0..n).flat_map(|i| jumps.iter().map(move |&s| (i, (i + s) % n)))).expect("in range")
    }
}
