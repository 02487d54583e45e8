use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;

use super::AnalysisError;
use crate::graph::Graph;
use crate::seeded_rng;

/// Largest graph [`brute_force_mis`] accepts: vertex sets are `u64` masks.
pub const BRUTE_FORCE_LIMIT: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxIndependentSet {
    pub size: usize,
    /// One maximum independent set, sorted.
    pub witness: Vec<u32>,
}

/// Exact independence number by branch and bound.
///
/// Vertices of degree at most 1 among the candidates are taken without
/// branching; otherwise the search branches on a candidate of maximum degree.
/// A greedy clique cover of the candidates bounds what the branch can still
/// gain, and the min-degree greedy set is the initial incumbent.
pub fn brute_force_mis(g: &Graph) -> Result<MaxIndependentSet, AnalysisError> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(AnalysisError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let initial = greedy_mis(g, GreedyOrder::MinDegree);
    let mut search = Search {
        adj: &adj,
        best: initial.iter().fold(0u64, |m, &v| m | 1 << v),
        best_size: initial.len() as u32,
    };
    let all = (1u64 << n) - 1;
    search.run(all, 0);
    let witness: Vec<u32> = bits(search.best).map(|v| v as u32).collect();
    assert!(g.is_independent(&witness), "exact solver returned a dependent set");
    Ok(MaxIndependentSet {
        size: witness.len(),
        witness,
    })
}

struct Search<'a> {
    adj: &'a [u64],
    best: u64,
    best_size: u32,
}

impl Search<'_> {
    fn run(&mut self, cand: u64, chosen: u64) {
        let size = chosen.count_ones();
        if cand == 0 {
            if size > self.best_size {
                self.best = chosen;
                self.best_size = size;
            }
            return;
        }
        if size + self.clique_cover(cand) <= self.best_size {
            return;
        }
        let mut pivot = 0;
        let mut pivot_degree = 0;
        for v in bits(cand) {
            let d = (self.adj[v] & cand).count_ones();
            if d <= 1 {
                self.run(cand & !(self.adj[v] | 1 << v), chosen | 1 << v);
                return;
            }
            if d > pivot_degree {
                pivot = v;
                pivot_degree = d;
            }
        }
        self.run(cand & !(self.adj[pivot] | 1 << pivot), chosen | 1 << pivot);
        self.run(cand & !(1 << pivot), chosen);
    }

    /// Number of cliques in a greedy cover of `cand`; an independent set
    /// meets each clique at most once.
    fn clique_cover(&self, mut cand: u64) -> u32 {
        let mut cliques = 0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let mut clique = 1u64 << v;
            let mut extend = cand & self.adj[v];
            while extend != 0 {
                let w = extend.trailing_zeros() as usize;
                clique |= 1 << w;
                extend &= self.adj[w];
            }
            cand &= !clique;
            cliques += 1;
        }
        cliques
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    core::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let v = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(v)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyOrder {
    ByIndex,
    /// A uniformly random order drawn from the given seed.
    Random(u64),
    /// Repeatedly takes a vertex of minimum degree in the remaining graph,
    /// lowest index on ties.
    MinDegree,
}

/// Sequential greedy independent set, sorted. Each chosen vertex removes at
/// most `Δ + 1` vertices, so the size is at least `n/(Δ+1)`.
pub fn greedy_mis(g: &Graph, order: GreedyOrder) -> Vec<u32> {
    let n = g.n();
    let mut blocked = vec![false; n];
    let mut set = Vec::new();
    let mut take = |v: usize, blocked: &mut [bool]| {
        set.push(v as u32);
        blocked[v] = true;
        for &w in g.neighbors(v) {
            blocked[w as usize] = true;
        }
    };
    match order {
        GreedyOrder::ByIndex | GreedyOrder::Random(_) => {
            let mut perm: Vec<u32> = (0..n as u32).collect();
            if let GreedyOrder::Random(seed) = order {
                perm.shuffle(&mut seeded_rng(seed));
            }
            for v in perm {
                if !blocked[v as usize] {
                    take(v as usize, &mut blocked);
                }
            }
        }
        GreedyOrder::MinDegree => {
            let mut degree: Vec<u32> = (0..n).map(|v| g.degree(v) as u32).collect();
            let mut queue: BTreeSet<(u32, u32)> = (0..n as u32).map(|v| (degree[v as usize], v)).collect();
            while let Some((_, v)) = queue.pop_first() {
                let v = v as usize;
                take(v, &mut blocked);
                for &w in g.neighbors(v) {
                    if queue.remove(&(degree[w as usize], w)) {
                        for &x in g.neighbors(w as usize) {
                            let x = x as usize;
                            if queue.remove(&(degree[x], x as u32)) {
                                degree[x] -= 1;
                                queue.insert((degree[x], x as u32));
                            }
                        }
                    }
                }
            }
        }
    }
    set.sort_unstable();
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{complete, complete_bipartite, cycle, disjoint_cliques, gnp, path};

    #[test]
    fn small_classics() {
        assert_eq!(brute_force_mis(&cycle(5)).unwrap().size, 2);
        assert_eq!(brute_force_mis(&complete_bipartite(3, 3)).unwrap().size, 3);
        assert_eq!(brute_force_mis(&complete(7)).unwrap().size, 1);
        assert_eq!(brute_force_mis(&path(9)).unwrap().size, 5);
        assert_eq!(brute_force_mis(&Graph::empty(0)).unwrap().size, 0);
        assert_eq!(brute_force_mis(&disjoint_cliques(8, 3)).unwrap().size, 8);
    }

    #[test]
    fn rejects_large_graphs() {
        assert_eq!(
            brute_force_mis(&Graph::empty(61)),
            Err(AnalysisError::TooLarge { n: 61, limit: 60 })
        );
        assert_eq!(brute_force_mis(&Graph::empty(60)).unwrap().size, 60);
    }

    #[test]
    fn greedy_classics() {
        for order in [GreedyOrder::ByIndex, GreedyOrder::Random(3), GreedyOrder::MinDegree] {
            assert_eq!(greedy_mis(&Graph::empty(9), order).len(), 9);
            assert_eq!(greedy_mis(&complete(9), order).len(), 1);
        }
        // Min-degree greedy is optimal on paths and stars.
        assert_eq!(greedy_mis(&path(10), GreedyOrder::MinDegree).len(), 5);
        assert_eq!(greedy_mis(&complete_bipartite(1, 6), GreedyOrder::MinDegree).len(), 6);
        assert_eq!(greedy_mis(&complete_bipartite(1, 6), GreedyOrder::ByIndex), vec![0]);
    }

    #[test]
    fn random_order_is_seeded() {
        let g = gnp(80, 0.1, &mut seeded_rng(2));
        let a = greedy_mis(&g, GreedyOrder::Random(11));
        assert_eq!(a, greedy_mis(&g, GreedyOrder::Random(11)));
        assert!(g.is_independent(&a));
    }

    #[test]
    fn bound_dominates_greedy_on_random_graphs() {
        let mut rng = seeded_rng(4);
        for _ in 0..20 {
            let g = gnp(40, 0.2, &mut rng);
            let exact = brute_force_mis(&g).unwrap();
            assert!(g.is_independent(&exact.witness));
            for order in [GreedyOrder::ByIndex, GreedyOrder::MinDegree] {
                assert!(greedy_mis(&g, order).len() <= exact.size);
            }
        }
    }
}
