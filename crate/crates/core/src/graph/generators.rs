//! Test-bed graphs: small classics, Erdős–Rényi, random regular graphs, the
//! clique-plus-regular sharpness construction and symplectic polar graphs.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use super::{max_codegree, Graph, GraphError};

pub fn complete(n: usize) -> Graph {
    let adjacency = (0..n)
        .map(|v| (0..n as u32).filter(|&w| w as usize != v).collect())
        .collect();
    Graph::from_adjacency(adjacency)
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs three vertices");
    let edges: Vec<_> = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
    Graph::from_edges(n, &edges).expect("valid cycle")
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i as u32 - 1, i as u32)).collect();
    Graph::from_edges(n, &edges).expect("valid path")
}

/// `K_{a,b}` with parts `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut edges = Vec::with_capacity(a * b);
    for u in 0..a {
        for v in a..a + b {
            edges.push((u as u32, v as u32));
        }
    }
    Graph::from_edges(a + b, &edges).expect("valid bipartite graph")
}

/// `k` disjoint cliques of size `s`; clique `c` is `c·s .. (c+1)·s`.
pub fn disjoint_cliques(k: usize, s: usize) -> Graph {
    complete(s).disjoint_copies(k)
}

/// `G(n, p)`.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("valid random graph")
}

/// Restarts allowed when the pairing process gets stuck.
const PAIRING_RESTARTS: usize = 100;
/// Consecutive rejected pairs before the remaining stubs are scanned exhaustively.
const STUCK_AFTER: usize = 100;

/// Random `degree`-regular pairing on `n` vertices avoiding `forbidden` pairs,
/// self-loops and repeated edges.
///
/// Pairs of stubs are drawn uniformly and rejected one at a time instead of
/// rejecting whole configurations, whose acceptance probability
/// `≈ e^{−(d²−1)/4}` is hopeless beyond tiny degrees. When rejections pile
/// up, the remaining stubs are scanned; if no admissible pair is left the
/// process restarts. Returns the adjacency lists and the number of starts.
fn pairing<R, F>(n: usize, degree: usize, forbidden: F, rng: &mut R) -> Result<(Vec<Vec<u32>>, usize), GraphError>
where
    R: Rng + ?Sized,
    F: Fn(u32, u32) -> bool,
{
    let ok = |adj: &[Vec<u32>], u: u32, v: u32| u != v && !forbidden(u, v) && !adj[u as usize].contains(&v);
    for start in 1..=PAIRING_RESTARTS {
        let mut adj: Vec<Vec<u32>> = vec![Vec::with_capacity(degree); n];
        let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| core::iter::repeat_n(v, degree)).collect();
        let mut rejected = 0usize;
        let completed = loop {
            let len = stubs.len();
            if len == 0 {
                break true;
            }
            let (i, j) = (rng.random_range(0..len), rng.random_range(0..len));
            let chosen = if i != j && ok(&adj, stubs[i], stubs[j]) {
                Some((i, j))
            } else {
                rejected += 1;
                if rejected < STUCK_AFTER {
                    None
                } else {
                    let mut admissible = Vec::new();
                    for a in 0..len {
                        for b in a + 1..len {
                            if ok(&adj, stubs[a], stubs[b]) {
                                admissible.push((a, b));
                            }
                        }
                    }
                    if admissible.is_empty() {
                        break false;
                    }
                    Some(admissible[rng.random_range(0..admissible.len())])
                }
            };
            if let Some((i, j)) = chosen {
                let (u, v) = (stubs[i], stubs[j]);
                adj[u as usize].push(v);
                adj[v as usize].push(u);
                stubs.swap_remove(i.max(j));
                stubs.swap_remove(i.min(j));
                rejected = 0;
            }
        };
        if completed {
            return Ok((adj, start));
        }
    }
    Err(GraphError::RetriesExhausted {
        attempts: PAIRING_RESTARTS,
    })
}

/// Random `degree`-regular simple graph.
pub fn random_regular<R: Rng + ?Sized>(n: usize, degree: usize, rng: &mut R) -> Result<Graph, GraphError> {
    if !(n * degree).is_multiple_of(2) {
        return Err(GraphError::InvalidParameters("n·Δ must be even"));
    }
    if degree >= n.max(1) && degree > 0 {
        return Err(GraphError::InvalidParameters("Δ must be below n"));
    }
    let (adj, _) = pairing(n, degree, |_, _| false, rng)?;
    Ok(Graph::from_adjacency(adj))
}

#[derive(Debug, Clone)]
pub struct CappedRegular {
    pub graph: Graph,
    /// Graphs sampled, including the accepted one.
    pub attempts: usize,
    /// Realized `Δ₂`.
    pub max_codegree: usize,
}

/// Random `degree`-regular graph, resampled until `Δ₂ ≤ codegree_cap`.
pub fn random_regular_capped<R: Rng + ?Sized>(
    n: usize,
    degree: usize,
    codegree_cap: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<CappedRegular, GraphError> {
    for attempt in 1..=max_attempts {
        let graph = random_regular(n, degree, rng)?;
        let realized = max_codegree(&graph);
        if realized <= codegree_cap {
            return Ok(CappedRegular {
                graph,
                attempts: attempt,
                max_codegree: realized,
            });
        }
    }
    Err(GraphError::RetriesExhausted { attempts: max_attempts })
}

#[derive(Debug, Clone)]
pub struct Sharpness {
    pub graph: Graph,
    /// `ηΔ`.
    pub clique_size: usize,
    /// `(1 − η)Δ`.
    pub overlay_degree: usize,
    /// Realized `Δ₂`.
    pub max_codegree: usize,
    /// Starts of the pairing process.
    pub attempts: usize,
}

/// `n/(ηΔ)` disjoint cliques of size `ηΔ` with a random `(1−η)Δ`-regular graph
/// on top. Overlay edges inside a clique are rejected while pairing, so every
/// vertex ends with degree exactly `ηΔ − 1 + (1−η)Δ = Δ − 1`.
pub fn sharpness_construction<R: Rng + ?Sized>(
    n: usize,
    delta: usize,
    eta: f64,
    rng: &mut R,
) -> Result<Sharpness, GraphError> {
    let s_real = eta * delta as f64;
    let s = libm::round(s_real) as usize;
    if !(eta > 0.0 && eta <= 1.0) || (s_real - s as f64).abs() > 1e-9 || s == 0 {
        return Err(GraphError::InvalidParameters("ηΔ must be a positive integer"));
    }
    if !n.is_multiple_of(s) {
        return Err(GraphError::InvalidParameters("ηΔ must divide n"));
    }
    let overlay = delta - s;
    if !(overlay * n).is_multiple_of(2) {
        return Err(GraphError::InvalidParameters("(1−η)Δ·n must be even"));
    }
    if overlay > 0 && overlay >= n - s {
        return Err(GraphError::InvalidParameters("overlay degree too large for n"));
    }
    let (mut adj, attempts) = pairing(n, overlay, |u, v| u as usize / s == v as usize / s, rng)?;
    for (v, list) in adj.iter_mut().enumerate() {
        let c = v / s;
        list.extend((c * s..(c + 1) * s).filter(|&w| w != v).map(|w| w as u32));
    }
    let graph = Graph::from_adjacency(adj);
    let realized = max_codegree(&graph);
    Ok(Sharpness {
        graph,
        clique_size: s,
        overlay_degree: overlay,
        max_codegree: realized,
        attempts,
    })
}

/// Arithmetic of a field of order `q ≤ 256`, by table lookup.
struct SmallField {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
}

impl SmallField {
    fn new(q: usize) -> Option<Self> {
        if !(2..=256).contains(&q) {
            return None;
        }
        let prime = (2..q).take_while(|p| p * p <= q).all(|p| !q.is_multiple_of(p));
        let (add, mul): (Vec<u8>, Vec<u8>) = if prime {
            let mut add = vec![0u8; q * q];
            let mut mul = vec![0u8; q * q];
            for a in 0..q {
                for b in 0..q {
                    add[a * q + b] = ((a + b) % q) as u8;
                    mul[a * q + b] = ((a * b) % q) as u8;
                }
            }
            (add, mul)
        } else if q.is_power_of_two() {
            let m = q.trailing_zeros();
            // Irreducible polynomials over GF(2) of degree m, bit-encoded.
            let modulus: usize = [0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D][m as usize];
            let mut add = vec![0u8; q * q];
            let mut mul = vec![0u8; q * q];
            for a in 0..q {
                for b in 0..q {
                    add[a * q + b] = (a ^ b) as u8;
                    let (mut x, mut y, mut acc) = (a, b, 0usize);
                    while y != 0 {
                        if y & 1 == 1 {
                            acc ^= x;
                        }
                        y >>= 1;
                        x <<= 1;
                        if x & q != 0 {
                            x ^= modulus;
                        }
                    }
                    mul[a * q + b] = acc as u8;
                }
            }
            (add, mul)
        } else {
            return None;
        };
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).expect("additive inverse") as u8)
            .collect();
        Some(SmallField { q, add, mul, neg })
    }

    #[inline]
    fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }
}

/// Collinearity graph of the symplectic polar space `W(3, q)`: the points of
/// `PG(3, q)`, adjacent when orthogonal under `x₀y₁ − x₁y₀ + x₂y₃ − x₃y₂`.
///
/// Strongly regular with parameters `((q⁴−1)/(q−1), q(q+1), q−1, q+1)`, so it
/// has exact degree and codegree control at large degree. `q` must be a prime
/// or a power of two, at most 256.
pub fn symplectic_polar_graph(q: usize) -> Result<Graph, GraphError> {
    let field = SmallField::new(q).ok_or(GraphError::InvalidParameters(
        "q must be a prime or a power of two, at most 256",
    ))?;
    let inv: Vec<u8> = (0..q)
        .map(|a| (0..q).find(|&b| field.mul(a as u8, b as u8) == 1).unwrap_or(0) as u8)
        .collect();
    let points = projective_points::<4>(q);
    let plane = projective_points::<3>(q);
    // Normalized points are listed by leading coordinate, then the remaining
    // coordinates in base q, lowest first.
    let offsets: Vec<usize> = (0..4)
        .map(|lead| (0..lead).map(|l| q.pow(3 - l as u32)).sum())
        .collect();
    let index = |x: &[u8; 4]| {
        let lead = x.iter().position(|&c| c != 0).expect("nonzero point");
        let code = x[lead + 1..].iter().rev().fold(0, |acc, &c| acc * q + c as usize);
        offsets[lead] + code
    };

    let mut adjacency = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        // Neighbours of x are the points of the plane c·y = 0.
        let c = [field.neg[x[1] as usize], x[0], field.neg[x[3] as usize], x[2]];
        let k = c.iter().position(|&a| a != 0).expect("nonzero form");
        let free: Vec<usize> = (0..4).filter(|&j| j != k).collect();
        let scale = field.neg[inv[c[k] as usize] as usize];
        let mut list = Vec::with_capacity(q * (q + 1));
        for z in &plane {
            let mut y = [0u8; 4];
            let mut s = 0;
            for (&j, &zj) in free.iter().zip(z) {
                y[j] = zj;
                s = field.add(s, field.mul(c[j], zj));
            }
            y[k] = field.mul(scale, s);
            let lead = y.iter().find(|&&a| a != 0).copied().expect("nonzero point");
            let f = inv[lead as usize];
            for a in y.iter_mut() {
                *a = field.mul(f, *a);
            }
            let j = index(&y);
            if j != i {
                list.push(j as u32);
            }
        }
        adjacency.push(list);
    }
    Ok(Graph::from_adjacency(adjacency))
}

/// Points of `PG(N−1, q)` as vectors whose first nonzero coordinate is 1.
fn projective_points<const N: usize>(q: usize) -> Vec<[u8; N]> {
    let mut points = Vec::new();
    for lead in 0..N {
        let free = N - 1 - lead;
        for code in 0..q.pow(free as u32) {
            let mut x = [0u8; N];
            x[lead] = 1;
            let mut rest = code;
            for slot in x.iter_mut().skip(lead + 1) {
                *slot = (rest % q) as u8;
                rest /= q;
            }
            points.push(x);
        }
    }
    points
}
