use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use rand::Rng;

use super::{Condition, EtaPolicy, Mode, NibbleError, NibbleParams};
use crate::graph::{CodegreeScanner, Graph};
use crate::math;

/// Failed attempts per condition. One attempt can fail several conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConditionFailures {
    pub a_size: usize,
    pub a_edges: usize,
    pub c_size: usize,
    pub c_degree: usize,
    pub c_codegree: usize,
}

impl ConditionFailures {
    fn record(&mut self, c: Condition) {
        match c {
            Condition::ASize => self.a_size += 1,
            Condition::AEdges => self.a_edges += 1,
            Condition::CSize => self.c_size += 1,
            Condition::CDegree => self.c_degree += 1,
            Condition::CCodegree => self.c_codegree += 1,
        }
    }
}

impl fmt::Display for ConditionFailures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|A| {}, e(G[A]) {}, |C| {}, Δ(G[C]) {}, Δ₂(G[C]) {}",
            self.a_size, self.a_edges, self.c_size, self.c_degree, self.c_codegree
        )
    }
}

/// Hypotheses of the step that did not hold. Custom mode only; paper mode
/// turns each of these into an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepWarnings {
    /// Some degree is outside `{Δ−1, Δ}`.
    pub irregular: bool,
    /// `Δ₂(G) > ηΔ` for an explicit `η`.
    pub codegree_above_eta: bool,
    /// `Δ < 2^11`.
    pub delta_small: bool,
    /// `γ < 8Δ^{−1/8}`.
    pub gamma_small: bool,
    /// `n < Δ⁴`.
    pub n_small: bool,
    /// `Δ₂(G) > 2^{−6}γ³Δ / log Δ`.
    pub codegree_large: bool,
}

impl StepWarnings {
    pub fn any(&self) -> bool {
        self.irregular
            || self.codegree_above_eta
            || self.delta_small
            || self.gamma_small
            || self.n_small
            || self.codegree_large
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Degree parameter `Δ`; the sampling probability is `γ/Δ`.
    pub delta: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub eta: EtaPolicy,
    pub max_retries: usize,
    pub mode: Mode,
    /// `Δ₂(G)` if already known, to skip recomputing it.
    pub known_max_codegree: Option<usize>,
}

impl StepConfig {
    pub fn new(delta: usize, params: &NibbleParams) -> Self {
        StepConfig {
            delta,
            gamma: params.gamma,
            alpha: params.alpha,
            eta: params.eta,
            max_retries: params.max_retries,
            mode: params.mode,
            known_max_codegree: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// The bite, sorted.
    pub a: Vec<u32>,
    /// The surviving controlled part, sorted; disjoint from `A ∪ N(A)`.
    pub c: Vec<u32>,
    /// Failed attempts before the accepted one.
    pub retries: usize,
    /// `e(G[A])`.
    pub a_edges: usize,
    /// `Δ₂(G)`.
    pub max_codegree: usize,
    /// `ηΔ` used for the codegree conditions.
    pub eta_delta: f64,
    /// `Δ(G[C])`.
    pub c_max_degree: usize,
    /// `Δ₂(G[C])`, or `None` when `Δ₂(G)` already meets the bound (codegrees
    /// cannot grow in an induced subgraph).
    pub c_max_codegree: Option<usize>,
    pub failures: ConditionFailures,
    pub warnings: StepWarnings,
}

fn check_hypotheses(
    g: &Graph,
    cfg: &StepConfig,
    max_codegree: usize,
    eta_delta: f64,
) -> Result<StepWarnings, NibbleError> {
    let n = g.n();
    let delta = cfg.delta as f64;
    let mut w = StepWarnings {
        irregular: (0..n).any(|v| {
            let d = g.degree(v);
            d + 1 < cfg.delta || d > cfg.delta
        }),
        codegree_above_eta: max_codegree as f64 > eta_delta,
        ..StepWarnings::default()
    };
    w.delta_small = cfg.delta < 1 << 11;
    w.gamma_small = cfg.gamma < 8.0 * math::powf(delta, -0.125);
    w.n_small = (n as f64) < math::powi(delta, 4);
    w.codegree_large = max_codegree as f64 > math::powi(cfg.gamma, 3) * delta / (64.0 * math::ln(delta));
    if cfg.mode == Mode::Paper && w.any() {
        let mut why = Vec::new();
        for (flag, text) in [
            (w.irregular, "degrees must lie in {Δ−1, Δ}"),
            (w.codegree_above_eta, "Δ₂(G) exceeds ηΔ"),
            (w.delta_small, "Δ must be at least 2^11"),
            (w.gamma_small, "γ must be at least 8Δ^(−1/8)"),
            (w.n_small, "n must be at least Δ⁴"),
            (w.codegree_large, "Δ₂(G) must be at most 2^(−6)γ³Δ/log Δ"),
        ] {
            if flag {
                why.push(text);
            }
        }
        return Err(NibbleError::PreconditionViolated(format!(
            "nibble step at Δ = {}, n = {n}: {}",
            cfg.delta,
            why.join("; ")
        )));
    }
    Ok(w)
}

/// One nibble: samples a `γ/Δ`-random set `A`, removes `A ∪ N(A)`, and drops
/// the bad set `B` of vertices whose remaining degree is at least `(1−γ+α)Δ`
/// or that share at least `(1−γ+α)ηΔ` remaining neighbours with some vertex.
/// `C` is what is left. `A` is resampled until
///
/// * `|A| ≥ (1−α)γn/Δ` and `e(G[A]) ≤ γ²n/Δ`,
/// * `|C| ≥ (1−γ−α)n`, `Δ(G[C]) ≤ (1−γ+α)Δ` and `Δ₂(G[C]) ≤ (1−γ+α)ηΔ`
///
/// all hold, or the retry budget runs out.
pub fn nibble_step<R: Rng + ?Sized>(g: &Graph, cfg: &StepConfig, rng: &mut R) -> Result<StepOutcome, NibbleError> {
    let params = NibbleParams {
        gamma: cfg.gamma,
        alpha: cfg.alpha,
        eta: cfg.eta,
        max_retries: cfg.max_retries,
        mode: cfg.mode,
    };
    params.validate()?;
    if cfg.delta == 0 {
        return Err(NibbleError::InvalidParameters("Δ must be positive".into()));
    }
    let n = g.n();
    let delta = cfg.delta as f64;
    let (gamma, alpha) = (cfg.gamma, cfg.alpha);
    let mut scanner = CodegreeScanner::new(n);
    let max_codegree = cfg.known_max_codegree.unwrap_or_else(|| scanner.max_codegree(g, None));
    let eta_delta = match cfg.eta {
        EtaPolicy::Paper => (max_codegree as f64).max(2.0 * math::sqrt(delta)),
        EtaPolicy::Explicit(eta) => eta * delta,
    };
    let warnings = check_hypotheses(g, cfg, max_codegree, eta_delta)?;

    let p = gamma / delta;
    let nf = n as f64;
    let need_a = (1.0 - alpha) * gamma * nf / delta;
    let max_a_edges = gamma * gamma * nf / delta;
    let need_c = (1.0 - gamma - alpha) * nf;
    let degree_bound = (1.0 - gamma + alpha) * delta;
    let codegree_bound = (1.0 - gamma + alpha) * eta_delta;
    // No pair of G, let alone of G', reaches the codegree threshold.
    let codegree_part_needed = max_codegree as f64 >= codegree_bound;
    let heavy = math::ceil(codegree_bound).max(1.0) as usize;

    let mut failures = ConditionFailures::default();
    let mut in_a = vec![false; n];
    let mut alive = vec![false; n];
    let mut in_c = vec![false; n];
    for attempt in 0..=cfg.max_retries {
        in_a.iter_mut().for_each(|x| *x = false);
        let mut a = Vec::new();
        for v in 0..n {
            if rng.random_bool(p) {
                in_a[v] = true;
                a.push(v as u32);
            }
        }
        let a_edges = g.induced_edge_count(&a, &in_a);

        alive.iter_mut().for_each(|x| *x = true);
        for &v in &a {
            alive[v as usize] = false;
            for &w in g.neighbors(v as usize) {
                alive[w as usize] = false;
            }
        }
        let mut bad = vec![false; n];
        for u in 0..n {
            if alive[u] {
                let d = g.neighbors(u).iter().filter(|&&w| alive[w as usize]).count();
                bad[u] = d as f64 >= degree_bound;
            }
        }
        if codegree_part_needed {
            scanner.mark_heavy_pairs(g, Some(&alive), heavy, &mut bad);
        }
        let mut c = Vec::new();
        for u in 0..n {
            in_c[u] = alive[u] && !bad[u];
            if in_c[u] {
                c.push(u as u32);
            }
        }
        let c_max_degree = c
            .iter()
            .map(|&u| g.neighbors(u as usize).iter().filter(|&&w| in_c[w as usize]).count())
            .max()
            .unwrap_or(0);
        let c_max_codegree = if codegree_part_needed {
            Some(scanner.max_codegree(g, Some(&in_c)))
        } else {
            None
        };

        let mut ok = true;
        for (holds, cond) in [
            (a.len() as f64 >= need_a, Condition::ASize),
            (a_edges as f64 <= max_a_edges, Condition::AEdges),
            (c.len() as f64 >= need_c, Condition::CSize),
            (c_max_degree as f64 <= degree_bound, Condition::CDegree),
            (
                c_max_codegree.unwrap_or(max_codegree) as f64 <= codegree_bound,
                Condition::CCodegree,
            ),
        ] {
            if !holds {
                failures.record(cond);
                ok = false;
            }
        }
        if ok {
            return Ok(StepOutcome {
                a,
                c,
                retries: attempt,
                a_edges,
                max_codegree,
                eta_delta,
                c_max_degree,
                c_max_codegree,
                failures,
                warnings,
            });
        }
    }
    Err(NibbleError::RetriesExhausted {
        round: None,
        attempts: cfg.max_retries + 1,
        failures,
    })
}
