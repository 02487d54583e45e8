//! Degree and codegree statistics.
//!
//! The maximum codegree costs `O(Σ_v deg(v)²)`; it is the dominant
//! verification cost everywhere in the pipeline.

use alloc::vec;
use alloc::vec::Vec;

use super::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    /// `Δ(G)`.
    pub max_degree: usize,
    /// `Δ₂(G)`, the largest number of common neighbours of two distinct vertices.
    pub max_codegree: usize,
    /// `histogram[k]` is the number of vertices of degree `k`.
    pub histogram: Vec<usize>,
}

pub fn degree_profile(g: &Graph) -> DegreeProfile {
    let max_degree = g.max_degree();
    let mut histogram = vec![0; max_degree + 1];
    for v in 0..g.n() {
        histogram[g.degree(v)] += 1;
    }
    if g.n() == 0 {
        histogram.clear();
    }
    DegreeProfile {
        max_degree,
        max_codegree: max_codegree(g),
        histogram,
    }
}

/// Common neighbours of `u` and `v` by sorted-list intersection.
pub fn codegree(g: &Graph, u: usize, v: usize) -> usize {
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

pub fn max_codegree(g: &Graph) -> usize {
    CodegreeScanner::new(g.n()).max_codegree(g, None)
}

/// Reusable scratch space for codegree sweeps, optionally restricted to the
/// subgraph induced by an `alive` mask.
pub struct CodegreeScanner {
    counts: Vec<u32>,
    touched: Vec<u32>,
}

impl CodegreeScanner {
    pub fn new(n: usize) -> Self {
        CodegreeScanner {
            counts: vec![0; n],
            touched: Vec::new(),
        }
    }

    /// Visits, for vertex `u`, every `v > u` with a common neighbour, passing
    /// the number of common neighbours. Only alive vertices count when a mask
    /// is given (`u` itself is assumed alive).
    fn row<F: FnMut(u32, u32)>(&mut self, g: &Graph, alive: Option<&[bool]>, u: usize, mut f: F) {
        let is_alive = |x: u32| alive.is_none_or(|m| m[x as usize]);
        for &w in g.neighbors(u) {
            if !is_alive(w) {
                continue;
            }
            let nb = g.neighbors(w as usize);
            let start = nb.partition_point(|&v| v as usize <= u);
            for &v in &nb[start..] {
                if !is_alive(v) {
                    continue;
                }
                if self.counts[v as usize] == 0 {
                    self.touched.push(v);
                }
                self.counts[v as usize] += 1;
            }
        }
        for &v in &self.touched {
            f(v, self.counts[v as usize]);
            self.counts[v as usize] = 0;
        }
        self.touched.clear();
    }

    /// `Δ₂` of `g`, or of the subgraph induced by `alive`.
    pub fn max_codegree(&mut self, g: &Graph, alive: Option<&[bool]>) -> usize {
        let mut best = 0u32;
        for u in 0..g.n() {
            if alive.is_some_and(|m| !m[u]) {
                continue;
            }
            self.row(g, alive, u, |_, c| best = best.max(c));
        }
        best as usize
    }

    /// Flags every alive vertex that has some alive partner with at least
    /// `threshold` alive common neighbours.
    pub fn mark_heavy_pairs(&mut self, g: &Graph, alive: Option<&[bool]>, threshold: usize, out: &mut [bool]) {
        let threshold = threshold as u32;
        for u in 0..g.n() {
            if alive.is_some_and(|m| !m[u]) {
                continue;
            }
            let mut hit = false;
            self.row(g, alive, u, |v, c| {
                if c >= threshold {
                    out[v as usize] = true;
                    hit = true;
                }
            });
            if hit {
                out[u] = true;
            }
        }
    }
}
