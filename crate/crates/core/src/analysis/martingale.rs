use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use super::AnalysisError;
use crate::math;
use crate::stats::Estimate;

/// One-sided martingale tail bound `P(S_M − S_0 ≥ r) ≤ exp(−r²/(2b))` for
/// increments `ξᵢ ≤ Rᵢ` with `E[ξᵢ² | F_{i−1}] ≤ σᵢ²`, where
/// `b = Σ (σᵢ² + Rᵢ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleBound {
    pub caps: Vec<f64>,
    pub variances: Vec<f64>,
    pub b: f64,
    pub r: f64,
    pub bound: f64,
}

impl MartingaleBound {
    /// Needs at least one increment, every `Rᵢ > 0`, every `σᵢ² ≥ 0` and `r ≥ 0`.
    pub fn new(caps: Vec<f64>, variances: Vec<f64>, r: f64) -> Result<Self, AnalysisError> {
        if caps.is_empty() || caps.len() != variances.len() {
            return Err(AnalysisError::InvalidParameters(format!(
                "need matching, nonempty cap and variance lists (got {} and {})",
                caps.len(),
                variances.len()
            )));
        }
        if !caps.iter().all(|&c| c > 0.0 && c.is_finite()) {
            return Err(AnalysisError::InvalidParameters(
                "increment caps must be positive".into(),
            ));
        }
        if !variances.iter().all(|&s| s >= 0.0 && s.is_finite()) {
            return Err(AnalysisError::InvalidParameters(
                "variance caps must be nonnegative".into(),
            ));
        }
        if !(r >= 0.0) {
            return Err(AnalysisError::InvalidParameters(format!(
                "deviation r = {r} must be nonnegative"
            )));
        }
        let b: f64 = caps.iter().zip(&variances).map(|(c, s)| s + c * c).sum();
        let bound = math::exp(-r * r / (2.0 * b));
        Ok(MartingaleBound {
            caps,
            variances,
            b,
            r,
            bound,
        })
    }
}

/// `exp(−r²/(2 Σ (σᵢ² + Rᵢ²)))`.
pub fn chung_lu_bound(caps: &[f64], variances: &[f64], r: f64) -> Result<f64, AnalysisError> {
    MartingaleBound::new(caps.to_vec(), variances.to_vec(), r).map(|m| m.bound)
}

/// Bipartite graph between `X = 0..x_count` and `Y = 0..y_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bipartite {
    y_count: usize,
    /// Neighbours in `Y` of each `x`, sorted.
    x_adj: Vec<Vec<u32>>,
}

impl Bipartite {
    pub fn new(y_count: usize, mut x_adj: Vec<Vec<u32>>) -> Result<Self, AnalysisError> {
        for list in &mut x_adj {
            list.sort_unstable();
            list.dedup();
            if list.last().is_some_and(|&y| y as usize >= y_count) {
                return Err(AnalysisError::InvalidParameters(format!(
                    "neighbour outside Y = 0..{y_count}"
                )));
            }
        }
        Ok(Bipartite { y_count, x_adj })
    }

    /// Every `x` gets `degree` random neighbours in `Y`, never creating a pair
    /// in `X` with more than `ell` common neighbours.
    pub fn random_capped<R: Rng + ?Sized>(
        x_count: usize,
        y_count: usize,
        degree: usize,
        ell: usize,
        rng: &mut R,
    ) -> Result<Self, AnalysisError> {
        if degree > y_count {
            return Err(AnalysisError::InvalidParameters(format!(
                "degree {degree} exceeds |Y| = {y_count}"
            )));
        }
        let attempts = 100 * y_count.max(1);
        let mut x_adj: Vec<Vec<u32>> = vec![Vec::with_capacity(degree); x_count];
        let mut y_adj: Vec<Vec<u32>> = vec![Vec::new(); y_count];
        let mut common = vec![0usize; x_count * x_count];
        for x in 0..x_count {
            let mut tries = 0;
            while x_adj[x].len() < degree {
                tries += 1;
                if tries > attempts {
                    return Err(AnalysisError::RetriesExhausted { attempts });
                }
                let y = rng.random_range(0..y_count);
                if x_adj[x].contains(&(y as u32)) || y_adj[y].iter().any(|&z| common[x * x_count + z as usize] >= ell) {
                    continue;
                }
                for &z in &y_adj[y] {
                    common[x * x_count + z as usize] += 1;
                    common[z as usize * x_count + x] += 1;
                }
                x_adj[x].push(y as u32);
                y_adj[y].push(x as u32);
            }
        }
        Bipartite::new(y_count, x_adj)
    }

    pub fn x_count(&self) -> usize {
        self.x_adj.len()
    }

    pub fn y_count(&self) -> usize {
        self.y_count
    }

    pub fn edge_count(&self) -> usize {
        self.x_adj.iter().map(Vec::len).sum()
    }

    /// Largest number of common neighbours of two distinct vertices of `X`.
    pub fn max_codegree(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.x_adj.iter().enumerate() {
            for b in &self.x_adj[i + 1..] {
                best = best.max(a.iter().filter(|y| b.binary_search(y).is_ok()).count());
            }
        }
        best
    }

    /// `E|X ∖ N(A)| = Σ_x (1−p)^{d(x)}` for a `p`-random `A ⊆ Y`.
    pub fn expected_survivors(&self, p: f64) -> f64 {
        self.x_adj.iter().map(|l| math::powi(1.0 - p, l.len() as i32)).sum()
    }

    /// `|X ∖ N(A)|` for `A` given as a membership mask over `Y`.
    pub fn survivors(&self, in_a: &[bool]) -> usize {
        self.x_adj
            .iter()
            .filter(|l| l.iter().all(|&y| !in_a[y as usize]))
            .count()
    }
}

/// `exp(−r²/(4p(e(X,Y) + ℓ|X|²)))`.
pub fn abstract_lemma_bound(p: f64, edges: usize, ell: usize, x_count: usize, r: f64) -> f64 {
    let x = x_count as f64;
    math::exp(-r * r / (4.0 * p * (edges as f64 + ell as f64 * x * x)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractTail {
    pub r: f64,
    /// Empirical `P(S − E[S] ≥ r)`.
    pub frequency: Estimate,
    pub bound: f64,
}

impl AbstractTail {
    pub fn respected(&self) -> bool {
        self.frequency.mean <= self.bound
    }
}

/// Samples `S = |X ∖ N_H(A)|` for `samples` independent `p`-random `A ⊆ Y`
/// and reports the upper tail of `S − E[S]` at each deviation in `rs`.
/// `E[S]` is computed exactly and `ell` must cap the codegrees in `X`.
pub fn abstract_lemma_tail<R: Rng + ?Sized>(
    h: &Bipartite,
    p: f64,
    ell: usize,
    rs: &[f64],
    samples: usize,
    rng: &mut R,
) -> Result<Vec<AbstractTail>, AnalysisError> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(AnalysisError::InvalidParameters(format!(
            "p = {p} must lie in (0, 1/2]"
        )));
    }
    if samples == 0 {
        return Err(AnalysisError::InvalidParameters("samples must be positive".into()));
    }
    let realized = h.max_codegree();
    if realized > ell {
        return Err(AnalysisError::PreconditionViolated(format!(
            "codegree {realized} in X exceeds ell = {ell}"
        )));
    }
    let mean = h.expected_survivors(p);
    let mut hits = vec![0u64; rs.len()];
    let mut in_a = vec![false; h.y_count()];
    for _ in 0..samples {
        for slot in in_a.iter_mut() {
            *slot = rng.random_bool(p);
        }
        let deviation = h.survivors(&in_a) as f64 - mean;
        for (hit, &r) in hits.iter_mut().zip(rs) {
            *hit += (deviation >= r) as u64;
        }
    }
    Ok(rs
        .iter()
        .zip(hits)
        .map(|(&r, hit)| AbstractTail {
            r,
            frequency: Estimate::from_hits(hit, samples as u64),
            bound: abstract_lemma_bound(p, h.edge_count(), ell, h.x_count(), r),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn chung_lu_values() {
        assert_eq!(chung_lu_bound(&[1.0, 2.0], &[0.5, 0.0], 0.0).unwrap(), 1.0);
        let single = chung_lu_bound(&[1.0], &[0.0], 2.0).unwrap();
        assert!((single - (-2.0f64).exp()).abs() < 1e-15);
        let m = MartingaleBound::new(vec![1.0, 2.0], vec![3.0, 4.0], 6.0).unwrap();
        assert_eq!(m.b, 12.0);
        assert!((m.bound - (-36.0f64 / 24.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn chung_lu_rejects_bad_inputs() {
        assert!(chung_lu_bound(&[], &[], 1.0).is_err());
        assert!(chung_lu_bound(&[0.0], &[1.0], 1.0).is_err());
        assert!(chung_lu_bound(&[1.0], &[-1.0], 1.0).is_err());
        assert!(chung_lu_bound(&[1.0], &[1.0], -1.0).is_err());
        assert!(chung_lu_bound(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn random_bipartite_respects_cap() {
        let mut rng = seeded_rng(3);
        let h = Bipartite::random_capped(50, 500, 20, 3, &mut rng).unwrap();
        assert_eq!(h.edge_count(), 1000);
        assert!(h.max_codegree() <= 3);
        let tight = Bipartite::random_capped(30, 40, 10, 1, &mut rng);
        assert!(matches!(tight, Err(AnalysisError::RetriesExhausted { .. })));
    }

    #[test]
    fn survivors_and_expectation() {
        let h = Bipartite::new(3, vec![vec![0], vec![0, 1], vec![], vec![2, 1]]).unwrap();
        assert_eq!(h.survivors(&[true, false, false]), 2);
        assert_eq!(h.survivors(&[false, false, false]), 4);
        let e = h.expected_survivors(0.5);
        assert!((e - (0.5 + 0.25 + 1.0 + 0.25)).abs() < 1e-15);
        assert_eq!(h.max_codegree(), 1);
        assert!(Bipartite::new(2, vec![vec![2]]).is_err());
    }

    #[test]
    fn abstract_tail_small_run() {
        let mut rng = seeded_rng(8);
        let h = Bipartite::random_capped(20, 100, 8, 2, &mut rng).unwrap();
        let tails = abstract_lemma_tail(&h, 0.05, 2, &[0.0, 2.0, 4.0], 5_000, &mut rng).unwrap();
        assert!(tails.iter().all(AbstractTail::respected));
        assert!(tails[0].frequency.mean > tails[2].frequency.mean);
        assert!(abstract_lemma_tail(&h, 0.05, 0, &[1.0], 10, &mut rng).is_err());
        assert!(abstract_lemma_tail(&h, 0.6, 2, &[1.0], 10, &mut rng).is_err());
    }
}
