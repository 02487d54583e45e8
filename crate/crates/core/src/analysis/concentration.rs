use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use super::AnalysisError;
use crate::graph::{max_codegree, Graph};
use crate::math;
use crate::stats::Estimate;
use crate::stream_rng;

/// Default number of two-hop pairs drawn per trial.
pub const DEFAULT_PAIR_SAMPLES: usize = 10_000;

/// Exceedances within one class: vertices of one degree, or pairs of one
/// codegree in `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassTail {
    pub key: usize,
    pub samples: u64,
    pub hits: u64,
    pub frequency: Estimate,
}

/// Empirical upper tail of the degree (or codegree) of a surviving vertex
/// (or pair), against `exp(−α²/(32γη))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub gamma: f64,
    pub alpha: f64,
    pub eta: f64,
    pub delta: usize,
    pub trials: usize,
    /// Surviving vertices (or pairs) examined, summed over trials.
    pub samples: u64,
    /// Fraction of samples at or above the threshold.
    pub frequency: Estimate,
    pub bound: f64,
    /// Mean of `d_{G'}/d_G` over samples.
    pub mean_ratio: Estimate,
    /// `1 − γ + γ²`.
    pub mean_bound: f64,
    pub classes: Vec<ClassTail>,
}

impl TailReport {
    /// The pooled frequency and every class frequency are at most the bound.
    pub fn respected(&self) -> bool {
        self.frequency.mean <= self.bound && self.classes.iter().all(|c| c.frequency.mean <= self.bound)
    }

    /// The mean ratio is at most `1 − γ + γ²` up to `k` standard errors.
    pub fn mean_respected(&self, k: f64) -> bool {
        self.mean_ratio.mean <= self.mean_bound + k * self.mean_ratio.stderr
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub degree: TailReport,
    pub codegree: TailReport,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct SideTally {
    samples: u64,
    hits: u64,
    ratio_sum: f64,
    classes: BTreeMap<usize, (u64, u64)>,
}

impl SideTally {
    fn record(&mut self, key: usize, hit: bool, ratio: f64) {
        self.samples += 1;
        self.hits += hit as u64;
        self.ratio_sum += ratio;
        let class = self.classes.entry(key).or_default();
        class.0 += 1;
        class.1 += hit as u64;
    }
}

/// Counts from one trial; [`ConcentrationSetup::report`] merges them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialTally {
    degree: SideTally,
    codegree: SideTally,
}

/// A validated graph and parameter set for the concentration experiment.
///
/// Trials are independent given a base seed and a trial index, so they can be
/// run in any order or in parallel and merged in index order.
#[derive(Debug, Clone)]
pub struct ConcentrationSetup<'a> {
    g: &'a Graph,
    gamma: f64,
    alpha: f64,
    eta: f64,
    delta: usize,
    pair_samples: usize,
}

impl<'a> ConcentrationSetup<'a> {
    /// Checks `d(v) ∈ {Δ−1, Δ}`, `Δ₂ ≤ ηΔ`, `γ ≤ 1/2`, `Δ^{-1/2} ≤ η ≤ γ²/8` and
    /// `α ∈ [2γ², γ]`, where `Δ` is the maximum degree of `g`.
    ///
    /// `known_max_codegree` skips computing `Δ₂(G)`, which costs `Σ d(v)²`
    /// steps; every sampled pair is still checked against `ηΔ` during trials.
    pub fn new(
        g: &'a Graph,
        gamma: f64,
        alpha: f64,
        eta: f64,
        known_max_codegree: Option<usize>,
    ) -> Result<Self, AnalysisError> {
        let delta = g.max_degree();
        if delta == 0 {
            return Err(AnalysisError::PreconditionViolated(format!(
                "graph on {} vertices has no edges",
                g.n()
            )));
        }
        if let Some(v) = (0..g.n()).find(|&v| g.degree(v) + 1 < delta) {
            return Err(AnalysisError::PreconditionViolated(format!(
                "vertex {v} has degree {} outside {{Δ−1, Δ}} = {{{}, {delta}}}",
                g.degree(v),
                delta - 1
            )));
        }
        if !(gamma > 0.0 && gamma <= 0.5) {
            return Err(AnalysisError::InvalidParameters(format!(
                "gamma = {gamma} must lie in (0, 1/2]"
            )));
        }
        let eta_lo = 1.0 / math::sqrt(delta as f64);
        let eta_hi = gamma * gamma / 8.0;
        let tol = 1e-12;
        if !(eta >= eta_lo * (1.0 - tol) && eta <= eta_hi * (1.0 + tol)) {
            return Err(AnalysisError::InvalidParameters(format!(
                "eta = {eta} must lie in [Δ^(-1/2), gamma²/8] = [{eta_lo}, {eta_hi}]"
            )));
        }
        let alpha_lo = 2.0 * gamma * gamma;
        if !(alpha >= alpha_lo * (1.0 - tol) && alpha <= gamma * (1.0 + tol)) {
            return Err(AnalysisError::InvalidParameters(format!(
                "alpha = {alpha} must lie in [2·gamma², gamma] = [{alpha_lo}, {gamma}]"
            )));
        }
        let codegree = known_max_codegree.unwrap_or_else(|| max_codegree(g));
        if codegree as f64 > eta * delta as f64 * (1.0 + tol) {
            return Err(AnalysisError::PreconditionViolated(format!(
                "Δ₂ = {codegree} exceeds ηΔ = {}",
                eta * delta as f64
            )));
        }
        Ok(ConcentrationSetup {
            g,
            gamma,
            alpha,
            eta,
            delta,
            pair_samples: DEFAULT_PAIR_SAMPLES,
        })
    }

    /// Two-hop pairs drawn per trial, before conditioning on survival.
    pub fn with_pair_samples(mut self, pairs: usize) -> Self {
        self.pair_samples = pairs;
        self
    }

    pub fn bound(&self) -> f64 {
        math::exp(-self.alpha * self.alpha / (32.0 * self.gamma * self.eta))
    }

    /// One trial: a `γ/Δ`-random set `A`, the survivors `G' = G − (A ∪ N(A))`,
    /// the degree of every surviving vertex and the codegree of every sampled
    /// two-hop pair that survives.
    pub fn trial(&self, seed: u64, index: u64) -> Result<TrialTally, AnalysisError> {
        let g = self.g;
        let n = g.n();
        let mut rng = stream_rng(seed, index);
        let p = self.gamma / self.delta as f64;
        let mut alive = vec![true; n];
        for v in 0..n {
            if rng.random_bool(p) {
                alive[v] = false;
                for &w in g.neighbors(v) {
                    alive[w as usize] = false;
                }
            }
        }
        let scale = 1.0 - self.gamma + self.alpha;
        let mut tally = TrialTally::default();

        for v in (0..n).filter(|&v| alive[v]) {
            let d = g.degree(v);
            let x = g.neighbors(v).iter().filter(|&&w| alive[w as usize]).count();
            tally
                .degree
                .record(d, x as f64 >= scale * d as f64, x as f64 / d as f64);
        }

        let eta_delta = self.eta * self.delta as f64;
        let threshold = scale * eta_delta;
        let floor = 2.0 / (n as f64 * self.delta as f64 * self.delta as f64);
        for _ in 0..self.pair_samples {
            let Some((u, v)) = propose_pair(g, &mut rng) else { break };
            if !(alive[u] && alive[v]) {
                continue;
            }
            let (common, alive_common, weight) = pair_statistics(g, u, v, &alive);
            // The walk proposes {u, v} with probability n⁻¹·weight; accepting
            // with probability floor/(n⁻¹·weight) makes accepted pairs uniform.
            if !rng.random_bool((floor * n as f64 / weight).min(1.0)) {
                continue;
            }
            if common as f64 > eta_delta * (1.0 + 1e-12) {
                return Err(AnalysisError::PreconditionViolated(format!(
                    "pair ({u}, {v}) has codegree {common} above ηΔ = {eta_delta}"
                )));
            }
            tally.codegree.record(
                common,
                alive_common as f64 >= threshold,
                alive_common as f64 / common as f64,
            );
        }
        Ok(tally)
    }

    /// Merges trials, which must be given in a fixed order for reproducible
    /// floating-point sums.
    pub fn report(&self, trials: &[TrialTally]) -> ConcentrationReport {
        ConcentrationReport {
            degree: self.side_report(trials, |t| &t.degree),
            codegree: self.side_report(trials, |t| &t.codegree),
        }
    }

    fn side_report(&self, trials: &[TrialTally], side: impl Fn(&TrialTally) -> &SideTally) -> TailReport {
        let hits: Vec<(f64, f64)> = trials
            .iter()
            .map(|t| (side(t).hits as f64, side(t).samples as f64))
            .collect();
        let ratios: Vec<(f64, f64)> = trials
            .iter()
            .map(|t| (side(t).ratio_sum, side(t).samples as f64))
            .collect();
        let mut classes: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
        for t in trials {
            for (&key, &(s, h)) in &side(t).classes {
                let c = classes.entry(key).or_default();
                c.0 += s;
                c.1 += h;
            }
        }
        TailReport {
            gamma: self.gamma,
            alpha: self.alpha,
            eta: self.eta,
            delta: self.delta,
            trials: trials.len(),
            samples: trials.iter().map(|t| side(t).samples).sum(),
            frequency: Estimate::ratio(&hits),
            bound: self.bound(),
            mean_ratio: Estimate::ratio(&ratios),
            mean_bound: 1.0 - self.gamma + self.gamma * self.gamma,
            classes: classes
                .into_iter()
                .map(|(key, (samples, hits))| ClassTail {
                    key,
                    samples,
                    hits,
                    frequency: Estimate::from_hits(hits, samples),
                })
                .collect(),
        }
    }
}

/// Walk `u → w → v` with `u` uniform, `w` uniform in `N(u)` and `v` uniform in
/// `N(w)`; `None` when the graph has no edges, and a retry when `v = u`.
fn propose_pair<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Option<(usize, usize)> {
    if g.edge_count() == 0 {
        return None;
    }
    loop {
        let u = rng.random_range(0..g.n());
        let nu = g.neighbors(u);
        if nu.is_empty() {
            continue;
        }
        let w = nu[rng.random_range(0..nu.len())] as usize;
        let nw = g.neighbors(w);
        let v = nw[rng.random_range(0..nw.len())] as usize;
        if v != u {
            return Some((u, v));
        }
    }
}

/// Codegree in `G`, codegree among survivors, and
/// `Σ_{w ∈ N(u)∩N(v)} (1/(d(u)d(w)) + 1/(d(v)d(w)))`, which is `n` times the
/// probability that the walk proposes `{u, v}`.
fn pair_statistics(g: &Graph, u: usize, v: usize, alive: &[bool]) -> (usize, usize, f64) {
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (du, dv) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let (mut common, mut alive_common, mut inverse) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                let w = a[i] as usize;
                common += 1;
                alive_common += alive[w] as usize;
                inverse += 1.0 / g.degree(w) as f64;
                i += 1;
                j += 1;
            }
        }
    }
    (common, alive_common, inverse * (1.0 / du + 1.0 / dv))
}

/// Runs `trials` trials from a seed drawn from `rng` and merges them.
pub fn concentration_tail<R: Rng + ?Sized>(
    setup: &ConcentrationSetup<'_>,
    trials: usize,
    rng: &mut R,
) -> Result<ConcentrationReport, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::InvalidParameters("trials must be positive".into()));
    }
    let seed = rng.next_u64();
    let tallies = (0..trials as u64)
        .map(|t| setup.trial(seed, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(setup.report(&tallies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{cycle, symplectic_polar_graph};
    use crate::seeded_rng;

    #[test]
    fn rejects_bad_inputs() {
        let g = symplectic_polar_graph(7).unwrap();
        // Δ = 56, Δ₂ = 8: η ≥ 1/7 > γ²/8 for every γ ≤ 1/2.
        assert!(matches!(
            ConcentrationSetup::new(&g, 0.5, 0.5, 1.0 / 7.0, None),
            Err(AnalysisError::InvalidParameters(_))
        ));
        let path_like = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert!(matches!(
            ConcentrationSetup::new(&path_like, 0.5, 0.5, 1.0 / 32.0, None),
            Err(AnalysisError::PreconditionViolated(_))
        ));
        assert!(matches!(
            ConcentrationSetup::new(&cycle(5), 0.5, 0.1, 0.03, None),
            Err(AnalysisError::InvalidParameters(_))
        ));
    }

    #[test]
    fn zero_trials_is_an_error() {
        let g = symplectic_polar_graph(16).unwrap();
        // Δ = 272, Δ₂ = 17, so η = 1/16 and γ²/8 ≥ η needs γ ≥ 1/√2: infeasible.
        assert!(ConcentrationSetup::new(&g, 0.5, 0.5, 1.0 / 16.0, Some(17)).is_err());
        let g = symplectic_polar_graph(2).unwrap();
        let setup = ConcentrationSetup {
            g: &g,
            gamma: 0.5,
            alpha: 0.5,
            eta: 0.5,
            delta: 6,
            pair_samples: 10,
        };
        assert!(concentration_tail(&setup, 0, &mut seeded_rng(0)).is_err());
    }

    #[test]
    fn accepted_pairs_are_uniform() {
        // In the star K_{1,3} plus a pendant path, two-hop pairs have very
        // different proposal weights; acceptance must even them out.
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5)]).unwrap();
        let alive = vec![true; 6];
        let mut rng = seeded_rng(9);
        let floor = 2.0 / (6.0 * 9.0);
        let mut counts = BTreeMap::new();
        let mut accepted = 0u64;
        while accepted < 60_000 {
            let (u, v) = propose_pair(&g, &mut rng).unwrap();
            let (_, _, weight) = pair_statistics(&g, u, v, &alive);
            if rng.random_bool((floor * 6.0 / weight).min(1.0)) {
                *counts.entry((u.min(v), u.max(v))).or_insert(0u64) += 1;
                accepted += 1;
            }
        }
        // Two-hop pairs: {1,2},{1,3},{2,3},{0,4},{3,5}.
        assert_eq!(counts.len(), 5);
        for &c in counts.values() {
            let e = Estimate::from_hits(c, accepted);
            assert!(e.consistent_with(0.2, 4.0), "{counts:?}");
        }
    }
}
