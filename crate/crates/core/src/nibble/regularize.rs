use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::NibbleError;
use crate::graph::Graph;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularizePolicy {
    /// Requires `n ≥ 2Δ⁴`, under which every deficient vertex finds a partner;
    /// running out of partners is reported as an internal error.
    Strict,
    /// Any `n`. Examines at most `scan_limit` candidates per deficient vertex
    /// and phase, and leaves a vertex deficient when no partner turns up.
    BestEffort { scan_limit: Option<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regularized {
    pub graph: Graph,
    pub phase1_edges: usize,
    pub phase2_edges: usize,
    /// Vertices still of degree below `Δ`; always 0 under the strict policy.
    pub deficient_left: usize,
}

/// Two-hop ball of one vertex, as an epoch stamp over all vertices.
struct Ball {
    stamp: Vec<u32>,
    epoch: u32,
}

impl Ball {
    fn reset(&mut self, adj: &[Vec<u32>], u: u32) {
        self.epoch += 1;
        self.stamp[u as usize] = self.epoch;
        for &w in &adj[u as usize] {
            self.extend(adj, w);
        }
    }

    /// Adds `w` and its neighbours.
    fn extend(&mut self, adj: &[Vec<u32>], w: u32) {
        self.stamp[w as usize] = self.epoch;
        for &x in &adj[w as usize] {
            self.stamp[x as usize] = self.epoch;
        }
    }

    /// Distance from the centre is at least 4: `v` is outside the two-hop ball
    /// and so are all its neighbours.
    fn far(&self, adj: &[Vec<u32>], v: u32) -> bool {
        self.stamp[v as usize] != self.epoch && adj[v as usize].iter().all(|&w| self.stamp[w as usize] != self.epoch)
    }
}

/// Adds edges between vertices at distance at least 4 until every degree is
/// `Δ` or `Δ + 1`.
///
/// Phase 1 joins pairs of deficient vertices (degree `< Δ`); phase 2 joins a
/// deficient vertex to any vertex of degree `≤ Δ`. Candidates are taken
/// lowest index first. Since no added edge closes a path of length at most 3,
/// no pair gains a common neighbour unless it had none, so
/// `Δ₂(Ḡ) ≤ max{Δ₂(G), 1}`.
pub fn regularize(g: &Graph, delta: usize, policy: RegularizePolicy) -> Result<Regularized, NibbleError> {
    let n = g.n();
    if g.max_degree() > delta {
        return Err(NibbleError::PreconditionViolated(format!(
            "regularize: Δ(G) = {} exceeds the target {delta}",
            g.max_degree()
        )));
    }
    let scan_limit = match policy {
        RegularizePolicy::Strict => {
            if (n as f64) < 2.0 * math::powi(delta as f64, 4) {
                return Err(NibbleError::PreconditionViolated(format!(
                    "regularize: n = {n} is below 2Δ⁴ = {:.0}",
                    2.0 * math::powi(delta as f64, 4)
                )));
            }
            usize::MAX
        }
        RegularizePolicy::BestEffort { scan_limit } => scan_limit.unwrap_or(usize::MAX),
    };

    let mut adj = g.to_adjacency();
    let mut ball = Ball {
        stamp: vec![0; n],
        epoch: 0,
    };
    let mut deficient: BTreeSet<u32> = (0..n as u32).filter(|&v| adj[v as usize].len() < delta).collect();

    let mut phase1_edges = 0;
    let order: Vec<u32> = deficient.iter().copied().collect();
    for &u in &order {
        if adj[u as usize].len() >= delta {
            continue;
        }
        ball.reset(&adj, u);
        // Partners below u were already offered to u while they were served,
        // and distances only shrink, so the scan starts above u and never
        // revisits a rejected candidate.
        let mut cursor = u + 1;
        let mut scanned = 0;
        while adj[u as usize].len() < delta {
            let mut partner = None;
            while let Some(&v) = deficient.range(cursor..).next() {
                cursor = v + 1;
                scanned += 1;
                if ball.far(&adj, v) {
                    partner = Some(v);
                    break;
                }
                if scanned >= scan_limit {
                    break;
                }
            }
            let Some(v) = partner else { break };
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            ball.extend(&adj, v);
            phase1_edges += 1;
            if adj[v as usize].len() >= delta {
                deficient.remove(&v);
            }
        }
        if adj[u as usize].len() >= delta {
            deficient.remove(&u);
        }
    }

    let mut phase2_edges = 0;
    let mut open: BTreeSet<u32> = (0..n as u32).filter(|&v| adj[v as usize].len() <= delta).collect();
    let order: Vec<u32> = deficient.iter().copied().collect();
    for &u in &order {
        if adj[u as usize].len() >= delta {
            continue;
        }
        ball.reset(&adj, u);
        let mut cursor = 0;
        let mut scanned = 0;
        while adj[u as usize].len() < delta {
            let mut partner = None;
            while let Some(&v) = open.range(cursor..).next() {
                cursor = v + 1;
                scanned += 1;
                if ball.far(&adj, v) {
                    partner = Some(v);
                    break;
                }
                if scanned >= scan_limit {
                    break;
                }
            }
            let Some(v) = partner else {
                if policy == RegularizePolicy::Strict {
                    return Err(NibbleError::InternalExhaustion { vertex: u as usize });
                }
                break;
            };
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            ball.extend(&adj, v);
            phase2_edges += 1;
            if adj[v as usize].len() > delta {
                open.remove(&v);
            }
        }
    }

    let deficient_left = adj.iter().filter(|l| l.len() < delta).count();
    debug_assert!(adj.iter().all(|l| l.len() <= delta + 1));
    let mut graph = Graph::from_adjacency(adj);
    if let Some(labels) = g.labels() {
        graph = graph.with_labels(labels.to_vec());
    }
    Ok(Regularized {
        graph,
        phase1_edges,
        phase2_edges,
        deficient_left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{cycle, random_regular};
    use crate::graph::max_codegree;
    use crate::seeded_rng;

    #[test]
    fn regular_input_is_unchanged() {
        let mut rng = seeded_rng(1);
        let g = random_regular(40, 3, &mut rng).unwrap();
        let r = regularize(&g, 3, RegularizePolicy::BestEffort { scan_limit: None }).unwrap();
        assert_eq!(r.graph, g);
        assert_eq!(r.phase1_edges + r.phase2_edges, 0);
    }

    #[test]
    fn edgeless_to_degree_two() {
        let g = Graph::empty(32);
        let r = regularize(&g, 2, RegularizePolicy::Strict).unwrap();
        assert!((0..32).all(|v| (2..=3).contains(&r.graph.degree(v))));
        assert!(max_codegree(&r.graph) <= 1);
        assert_eq!(r.deficient_left, 0);
    }

    #[test]
    fn strict_needs_enough_vertices() {
        let g = cycle(20);
        assert!(matches!(
            regularize(&g, 3, RegularizePolicy::Strict),
            Err(NibbleError::PreconditionViolated(_))
        ));
        assert!(matches!(
            regularize(&g, 1, RegularizePolicy::Strict),
            Err(NibbleError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn best_effort_flags_leftovers() {
        // K_4 minus an edge: the two deficient vertices are adjacent-close.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let r = regularize(&g, 3, RegularizePolicy::BestEffort { scan_limit: None }).unwrap();
        assert_eq!(r.deficient_left, 2);
        assert_eq!(r.graph, g);
    }
}
