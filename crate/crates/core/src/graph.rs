//! Weighted undirected simple graphs and node partitions.
//!
//! Graphs are immutable once constructed; every mutation returns a new value.
//! Node ids are dense integers `0..node_count`, so Laplacian indexing is
//! direct. Edges are stored sorted by `(u, v)` with `u < v`, which fixes the
//! evaluation order everywhere downstream and makes runs reproducible.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A single undirected edge with a strictly positive weight. `u < v` always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected simple graph with strictly positive edge weights.
///
/// No self-loops, no parallel edges. All nodes `0..node_count` exist even if
/// isolated.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_count: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds a graph from an edge list. Endpoint order within a pair is
    /// irrelevant; duplicates (in either orientation) are rejected rather than
    /// merged, as are self-loops, out-of-range ids, and non-positive weights.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidArgument("node_count must be positive".into()));
        }
        let mut normalized: Vec<Edge> = Vec::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at node {u}")));
            }
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u},{v}) out of range for {node_count} nodes"
                )));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u},{v}) has non-positive weight {w}"
                )));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            normalized.push(Edge { u, v, w });
        }
        normalized.sort_by_key(|e| (e.u, e.v));
        for pair in normalized.windows(2) {
            if pair[0].u == pair[1].u && pair[0].v == pair[1].v {
                return Err(Error::InvalidArgument(format!(
                    "duplicate edge ({},{})",
                    pair[0].u, pair[0].v
                )));
            }
        }
        Ok(Self { node_count, edges: normalized })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(u, v)`, `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.w).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Sum of weights of edges incident to `i`; 0 for isolated nodes.
    pub fn weighted_degree(&self, i: usize) -> Result<f64> {
        if i >= self.node_count {
            return Err(Error::InvalidArgument(format!(
                "node id {i} out of range for {} nodes",
                self.node_count
            )));
        }
        Ok(self
            .edges
            .iter()
            .filter(|e| e.u == i || e.v == i)
            .map(|e| e.w)
            .sum())
    }

    /// All weighted degrees in one pass.
    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.node_count];
        for e in &self.edges {
            d[e.u] += e.w;
            d[e.v] += e.w;
        }
        d
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    /// Labels nodes by connected component via BFS. Two nodes share a label
    /// iff a path connects them; isolated nodes form singletons. Labels are
    /// assigned in order of the lowest node id in each component.
    pub fn connected_components(&self) -> Partition {
        let adj = self.adjacency();
        let mut labels = vec![-1i64; self.node_count];
        let mut next = 0i64;
        let mut queue = VecDeque::new();
        for start in 0..self.node_count {
            if labels[start] >= 0 {
                continue;
            }
            labels[start] = next;
            queue.push_back(start);
            while let Some(node) = queue.pop_front() {
                for &nb in &adj[node] {
                    if labels[nb] < 0 {
                        labels[nb] = next;
                        queue.push_back(nb);
                    }
                }
            }
            next += 1;
        }
        Partition::new(labels)
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().community_count() == 1
    }

    /// Returns a copy with the listed edges absent; node set unchanged.
    /// Every listed pair must currently be an edge.
    pub fn remove_edges(&self, edge_list: &[(usize, usize)]) -> Result<WeightedGraph> {
        let mut to_remove: Vec<(usize, usize)> = edge_list
            .iter()
            .map(|&(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect();
        to_remove.sort_unstable();
        to_remove.dedup();
        for &(u, v) in &to_remove {
            if self.edges.binary_search_by_key(&(u, v), |e| (e.u, e.v)).is_err() {
                return Err(Error::InvalidArgument(format!("edge ({u},{v}) not present")));
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| to_remove.binary_search(&(e.u, e.v)).is_err())
            .copied()
            .collect();
        Ok(WeightedGraph { node_count: self.node_count, edges })
    }

    /// Same topology with replaced weights (parallel to `edges()`).
    pub(crate) fn with_weights(&self, weights: &[f64]) -> WeightedGraph {
        assert_eq!(weights.len(), self.edges.len());
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &w)| Edge { w, ..*e })
            .collect();
        WeightedGraph { node_count: self.node_count, edges }
    }
}

/// A community assignment: one label per node id. Labels carry equality
/// semantics only; comparisons should be label-permutation-invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<i64>,
}

impl Partition {
    pub fn new(labels: Vec<i64>) -> Self {
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Number of distinct labels.
    pub fn community_count(&self) -> usize {
        let mut seen: Vec<i64> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// True iff the two partitions induce the same grouping, ignoring the
    /// concrete label values.
    pub fn equivalent(&self, other: &Partition) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut map: std::collections::HashMap<i64, i64> = std::collections::HashMap::new();
        let mut rev: std::collections::HashMap<i64, i64> = std::collections::HashMap::new();
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            if *map.entry(a).or_insert(b) != b || *rev.entry(b).or_insert(a) != a {
                return false;
            }
        }
        true
    }
}
