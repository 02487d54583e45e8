//! Undirected simple graphs in compressed sparse row layout.
//!
//! Neighbor lists are sorted, so codegrees are sorted-list intersections.
//! Graphs are immutable once built; algorithms that add edges work on a
//! [`Vec<Vec<u32>>`] and freeze the result with [`Graph::from_adjacency`].

pub mod generators;
mod geometric;
mod profile;

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

pub use geometric::{build_geometric_graph, build_geometric_graph_brute_force, Threshold};
pub use profile::{codegree, degree_profile, max_codegree, CodegreeScanner, DegreeProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("retry budget of {attempts} attempts exhausted")]
    RetriesExhausted { attempts: usize },
}

/// Undirected simple graph.
///
/// Invariants: adjacency is symmetric, sorted, duplicate-free and loop-free.
/// Each vertex may carry a label, normally the index of the point (or of the
/// original vertex) it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    labels: Option<Vec<u32>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
            labels: None,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) collapse; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            let (u, v) = (u as usize, v as usize);
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        Ok(Self::from_adjacency(adjacency))
    }

    /// Freezes adjacency lists, which must already be symmetric and loop-free.
    /// Lists are sorted and deduplicated here.
    pub fn from_adjacency(mut adjacency: Vec<Vec<u32>>) -> Self {
        let n = adjacency.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let total: usize = adjacency.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let g = Graph {
            offsets,
            neighbors,
            labels: None,
        };
        debug_assert!(g.check_invariants().is_ok());
        g
    }

    /// Verifies symmetry, sortedness and the absence of loops and duplicates.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let n = self.n();
        for v in 0..n {
            let nb = self.neighbors(v);
            for (i, &w) in nb.iter().enumerate() {
                let w = w as usize;
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
                if w == v {
                    return Err(GraphError::SelfLoop(v));
                }
                if i > 0 && nb[i - 1] as usize >= w {
                    return Err(GraphError::InvalidParameters("adjacency not strictly sorted"));
                }
            }
        }
        // Symmetry: scanning v upwards, the arcs (v, w) with w > v must meet
        // the entries of N(w) below w in increasing order, one for one.
        let mut cursor: Vec<usize> = (0..n).map(|w| self.offsets[w]).collect();
        for v in 0..n {
            for &w in self.neighbors(v).iter().filter(|&&w| w as usize > v) {
                let w = w as usize;
                if cursor[w] == self.offsets[w + 1] || self.neighbors[cursor[w]] as usize != v {
                    return Err(GraphError::InvalidParameters("adjacency not symmetric"));
                }
                cursor[w] += 1;
            }
        }
        for w in 0..n {
            let below = self.neighbors(w).partition_point(|&x| (x as usize) < w);
            if cursor[w] != self.offsets[w] + below {
                return Err(GraphError::InvalidParameters("adjacency not symmetric"));
            }
        }
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<u32>) -> Self {
        assert_eq!(labels.len(), self.n(), "one label per vertex");
        self.labels = Some(labels);
        self
    }

    /// Vertex count.
    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Label of `v`, or `v` itself when the graph carries no labels.
    pub fn label(&self, v: usize) -> u32 {
        match &self.labels {
            Some(labels) => labels[v],
            None => v as u32,
        }
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v as usize > u)
                .map(move |v| (u as u32, v))
        })
    }

    /// Owned copy of the adjacency lists, for algorithms that add edges.
    pub fn to_adjacency(&self) -> Vec<Vec<u32>> {
        (0..self.n()).map(|v| self.neighbors(v).to_vec()).collect()
    }

    /// Subgraph induced on `vertices` (sorted, distinct). Vertex `i` of the
    /// result is `vertices[i]`, and its label is the label of that vertex here.
    pub fn induced(&self, vertices: &[u32]) -> Graph {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let mut index = vec![u32::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v as usize] = i as u32;
        }
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        for &v in vertices {
            // Relabelling is monotone, so lists stay sorted.
            neighbors.extend(
                self.neighbors(v as usize)
                    .iter()
                    .map(|&w| index[w as usize])
                    .filter(|&w| w != u32::MAX),
            );
            offsets.push(neighbors.len());
        }
        let labels = vertices.iter().map(|&v| self.label(v as usize)).collect();
        Graph {
            offsets,
            neighbors,
            labels: Some(labels),
        }
    }

    /// Number of edges of the subgraph induced on the vertices flagged in `mask`.
    pub fn induced_edge_count(&self, members: &[u32], mask: &[bool]) -> usize {
        members
            .iter()
            .map(|&v| {
                self.neighbors(v as usize)
                    .iter()
                    .filter(|&&w| w > v && mask[w as usize])
                    .count()
            })
            .sum()
    }

    /// `k` vertex-disjoint copies; copy `c` occupies vertices `c·n .. (c+1)·n`.
    pub fn disjoint_copies(&self, k: usize) -> Graph {
        assert!(k >= 1, "need at least one copy");
        let n = self.n();
        let mut offsets = Vec::with_capacity(k * n + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(k * self.neighbors.len());
        for c in 0..k {
            let shift = (c * n) as u32;
            for v in 0..n {
                neighbors.extend(self.neighbors(v).iter().map(|&w| w + shift));
                offsets.push(neighbors.len());
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| (0..k).flat_map(|_| l.iter().copied()).collect());
        Graph {
            offsets,
            neighbors,
            labels,
        }
    }

    /// Whether every path from `u` to `v` has length at least `k`.
    ///
    /// Breadth-first search from `u`, truncated at depth `k − 1`.
    pub fn dist_at_least(&self, u: usize, v: usize, k: usize) -> bool {
        assert!(u != v, "distance query needs distinct vertices");
        if k <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::new();
        seen[u] = true;
        queue.push_back((u, 0usize));
        while let Some((x, depth)) = queue.pop_front() {
            if depth + 1 >= k {
                continue;
            }
            for &w in self.neighbors(x) {
                let w = w as usize;
                if w == v {
                    return false;
                }
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back((w, depth + 1));
                }
            }
        }
        true
    }

    /// True iff no edge has both endpoints in `set`.
    pub fn is_independent(&self, set: &[u32]) -> bool {
        let mut mark = vec![false; self.n()];
        for &v in set {
            mark[v as usize] = true;
        }
        set.iter()
            .all(|&v| self.neighbors(v as usize).iter().all(|&w| !mark[w as usize]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{complete, cycle, path};

    #[test]
    fn from_edges_dedups_and_sorts() {
        let g = Graph::from_edges(4, &[(2, 0), (0, 2), (1, 0), (3, 2)]).unwrap();
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.neighbors(2), &[0, 3]);
        assert_eq!(g.edge_count(), 3);
        assert!(g.check_invariants().is_ok());
        assert_eq!(Graph::from_edges(2, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(matches!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn invariants_catch_asymmetry() {
        let raw = |offsets: Vec<usize>, neighbors: Vec<u32>| Graph {
            offsets,
            neighbors,
            labels: None,
        };
        // 0 → 1 only.
        assert!(raw(vec![0, 1, 1], vec![1]).check_invariants().is_err());
        // 1 → 0 only.
        assert!(raw(vec![0, 0, 1], vec![0]).check_invariants().is_err());
        // 0–2 and 1–2, but 2 lists 0 and 0.
        assert!(raw(vec![0, 1, 2, 4], vec![2, 2, 0, 0]).check_invariants().is_err());
        assert!(raw(vec![0, 1, 2, 4], vec![2, 2, 0, 1]).check_invariants().is_ok());
        assert!(raw(vec![0, 1, 1], vec![0]).check_invariants().is_err());
    }

    #[test]
    fn induced_keeps_labels() {
        let g = cycle(6);
        let h = g.induced(&[1, 2, 3, 5]);
        assert_eq!(h.n(), 4);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.label(3), 5);
        let hh = h.induced(&[0, 3]);
        assert_eq!(hh.label(1), 5);
    }

    #[test]
    fn dist_at_least_cases() {
        let p = path(5);
        assert!(!p.dist_at_least(0, 1, 2));
        assert!(p.dist_at_least(0, 4, 4));
        assert!(!p.dist_at_least(0, 4, 5));
        let two = Graph::empty(2);
        assert!(two.dist_at_least(0, 1, 100));
    }

    #[test]
    fn disjoint_copies_of_triangle() {
        let k3 = complete(3);
        assert_eq!(k3.disjoint_copies(1), k3);
        let two = k3.disjoint_copies(2);
        assert_eq!(two.n(), 6);
        assert_eq!(two.edge_count(), 6);
        assert_eq!(two.max_degree(), 2);
        assert!(!two.has_edge(0, 3));
    }

    #[test]
    fn independence() {
        let g = path(4);
        assert!(g.is_independent(&[]));
        assert!(g.is_independent(&[0, 2]));
        assert!(!g.is_independent(&[1, 2]));
    }
}
