use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use super::{nibble_step, regularize, Mode, NibbleError, NibbleParams, RegularizePolicy, StepConfig, StepWarnings};
use crate::graph::{max_codegree, Graph};
use crate::math;

/// Degree targets of the iteration: `Δᵢ = ⌈qⁱ(Δ₀+1)⌉` and `Δ'ᵢ = qⁱΔ₂(G)` with
/// `q = 1 − γ + 2α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub mode: Mode,
    pub gamma: f64,
    pub alpha: f64,
    pub rounds: usize,
    /// `Δ(G)` of the input.
    pub delta0: usize,
    /// `Δ₂(G)` of the input.
    pub codegree0: usize,
}

/// Smallest `ln Δ` with `ln Δ ≥ 32(ln ln Δ + 2)`, below which the paper
/// round count is not positive.
pub fn required_ln_delta() -> f64 {
    let mut x: f64 = 100.0;
    for _ in 0..200 {
        x = 32.0 * (math::ln(x) + 2.0);
    }
    x
}

impl Schedule {
    /// `γ = (log Δ)⁻²`, `α = 2γ²`, `T = γ⁻¹(log Δ − 32(log log Δ + 2))`.
    /// Fails with [`NibbleError::ScheduleInfeasible`] when `T < 1`, which is
    /// every `Δ` below roughly `e^{239}`.
    pub fn paper(delta0: usize, codegree0: usize) -> Result<Self, NibbleError> {
        let infeasible = |rounds| NibbleError::ScheduleInfeasible {
            delta: delta0,
            rounds,
            required_ln_delta: required_ln_delta(),
        };
        if delta0 < 3 {
            return Err(infeasible(f64::NEG_INFINITY));
        }
        let l = math::ln(delta0 as f64);
        let gamma = 1.0 / (l * l);
        let t = (l - 32.0 * (math::ln(l) + 2.0)) / gamma;
        if t < 1.0 {
            return Err(infeasible(t));
        }
        Ok(Schedule {
            mode: Mode::Paper,
            gamma,
            alpha: 2.0 * gamma * gamma,
            rounds: math::floor(t) as usize,
            delta0,
            codegree0,
        })
    }

    /// Explicit `γ`, `α` and `T`. Requires `α ∈ [2γ², γ/2]`, so `q ≤ 1` and the
    /// degree targets never increase.
    pub fn custom(delta0: usize, codegree0: usize, gamma: f64, alpha: f64, rounds: usize) -> Result<Self, NibbleError> {
        NibbleParams::custom(gamma, alpha).validate()?;
        if 2.0 * alpha > gamma * (1.0 + 1e-12) {
            return Err(NibbleError::InvalidParameters(format!(
                "alpha = {alpha} exceeds gamma/2 = {}, so q = 1 − γ + 2α would exceed 1",
                gamma / 2.0
            )));
        }
        Ok(Schedule {
            mode: Mode::Custom,
            gamma,
            alpha,
            rounds,
            delta0,
            codegree0,
        })
    }

    /// Custom schedule for `g`, reading `Δ₀` and `Δ₂` off the graph.
    pub fn custom_for(g: &Graph, gamma: f64, alpha: f64, rounds: usize) -> Result<Self, NibbleError> {
        Self::custom(g.max_degree(), max_codegree(g), gamma, alpha, rounds)
    }

    pub fn q(&self) -> f64 {
        1.0 - self.gamma + 2.0 * self.alpha
    }

    /// `Δᵢ`.
    pub fn delta_at(&self, i: usize) -> usize {
        math::ceil(math::powi(self.q(), i as i32) * (self.delta0 + 1) as f64) as usize
    }

    /// `Δ'ᵢ`.
    pub fn codegree_at(&self, i: usize) -> f64 {
        math::powi(self.q(), i as i32) * self.codegree0 as f64
    }

    /// Vertex count `2(Δ+1)⁴(q−3α)^{−T}` that keeps every residual graph large
    /// enough to regularize.
    pub fn blow_up_threshold(&self) -> f64 {
        2.0 * math::powi((self.delta0 + 1) as f64, 4) * math::powf(self.q() - 3.0 * self.alpha, -(self.rounds as f64))
    }

    /// Nibble parameters consistent with this schedule.
    pub fn params(&self) -> NibbleParams {
        NibbleParams {
            gamma: self.gamma,
            alpha: self.alpha,
            mode: self.mode,
            ..NibbleParams::custom(self.gamma, self.alpha)
        }
    }
}

/// Millisecond clock for the trace. The core crate has no clock of its own.
pub trait Clock {
    fn now_ms(&self) -> u64;
}

/// Always reads 0, keeping traces reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_ms(&self) -> u64 {
        0
    }
}

#[derive(Clone, Copy)]
pub struct RunOptions<'a> {
    /// Replace `G` by enough disjoint copies that `n ≥ 2(Δ+1)⁴(q−3α)^{−T}`.
    pub auto_blow_up: bool,
    /// Largest blown-up graph allowed.
    pub max_blow_up_vertices: usize,
    /// Candidate budget per vertex for custom-mode regularization.
    pub regularize_scan_limit: Option<usize>,
    pub clock: &'a dyn Clock,
}

impl Default for RunOptions<'static> {
    fn default() -> Self {
        RunOptions {
            auto_blow_up: false,
            max_blow_up_vertices: 1 << 24,
            regularize_scan_limit: Some(4096),
            clock: &NoClock,
        }
    }
}

/// One round of [`run_schedule`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub index: usize,
    /// `|Gᵢ|`.
    pub n: usize,
    /// Realized `Δ(Gᵢ)`.
    pub max_degree: usize,
    /// Realized `Δ₂(Gᵢ)`.
    pub max_codegree: usize,
    /// Degree parameter handed to the nibble step (`Δᵢ` unless raised).
    pub step_delta: usize,
    /// `Δ(Gᵢ)` exceeded `Δᵢ − 1` and the target was raised (custom mode).
    pub over_schedule: bool,
    /// Vertices left below the target degree by regularization.
    pub deficient_left: usize,
    pub eta_delta: f64,
    /// `|Aᵢ|`.
    pub a_size: usize,
    /// `e(Ḡᵢ[Aᵢ])`, the quantity the nibble step bounds.
    pub a_edges: usize,
    /// `|Iᵢ|`.
    pub i_size: usize,
    pub retries: usize,
    pub millis: u64,
    pub warnings: StepWarnings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    RoundsCompleted,
    /// The residual graph ran out of vertices.
    EmptyResidual,
    /// The residual graph had no edges; all of its vertices were taken.
    EdgelessResidual {
        taken: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NibbleTrace {
    pub rounds: Vec<RoundRecord>,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp {
    pub copies: usize,
    /// Size of the independent set over all copies.
    pub total_size: usize,
    /// `total_size / (copies · n)`.
    pub per_copy_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NibbleResult {
    /// Sorted vertices of the input graph; verified independent.
    pub independent_set: Vec<u32>,
    pub trace: NibbleTrace,
    pub blow_up: Option<BlowUp>,
}

/// Alternates regularization and nibbling.
///
/// Round `i` regularizes `Gᵢ` to degree `Δᵢ − 1`, runs [`nibble_step`] on the
/// result with parameter `Δᵢ`, keeps `Iᵢ`, the vertices of `Aᵢ` without a
/// neighbour in `Gᵢ[Aᵢ]`, and continues with `G_{i+1} = Gᵢ[Cᵢ]` (original edges
/// only). An edgeless residual is taken whole and ends the run.
pub fn run_schedule<R: Rng + ?Sized>(
    g: &Graph,
    schedule: &Schedule,
    params: &NibbleParams,
    options: &RunOptions<'_>,
    rng: &mut R,
) -> Result<NibbleResult, NibbleError> {
    params.validate()?;
    if params.gamma != schedule.gamma || params.alpha != schedule.alpha || params.mode != schedule.mode {
        return Err(NibbleError::InvalidParameters(
            "nibble parameters disagree with the schedule".into(),
        ));
    }
    let n = g.n();
    if g.max_degree() > schedule.delta0 {
        return Err(NibbleError::InvalidParameters(format!(
            "Δ(G) = {} exceeds the schedule's Δ₀ = {}",
            g.max_degree(),
            schedule.delta0
        )));
    }
    if schedule.mode == Mode::Paper {
        let l = math::ln(schedule.delta0 as f64);
        let budget = schedule.delta0 as f64 * math::powi(2.0 * l, -7);
        if schedule.codegree0 as f64 > budget {
            return Err(NibbleError::PreconditionViolated(format!(
                "Δ₂(G) = {} exceeds Δ(2 log Δ)^(−7) = {budget:.3e}",
                schedule.codegree0
            )));
        }
    }

    let mut copies = 1;
    if options.auto_blow_up && n > 0 && (n as f64) < schedule.blow_up_threshold() {
        let k = math::ceil(schedule.blow_up_threshold() / n as f64);
        if k * n as f64 > options.max_blow_up_vertices as f64 {
            return Err(NibbleError::InvalidParameters(format!(
                "blow-up needs {k:.3e} copies of a {n}-vertex graph, over the limit of {} vertices",
                options.max_blow_up_vertices
            )));
        }
        copies = k as usize;
    }
    // Labels of the residual graphs must index `work`, whatever labels `g` carries.
    let mut work = if copies > 1 {
        g.disjoint_copies(copies)
    } else {
        g.clone()
    };
    let total = work.n();
    work = work.with_labels((0..total as u32).collect());
    let policy = match schedule.mode {
        Mode::Paper => RegularizePolicy::Strict,
        Mode::Custom => RegularizePolicy::BestEffort {
            scan_limit: options.regularize_scan_limit,
        },
    };

    let mut current = work.induced(&(0..total as u32).collect::<Vec<_>>());
    let mut chosen: Vec<u32> = Vec::new();
    let mut in_earlier_a = vec![false; total];
    let mut rounds = Vec::new();
    let mut stop = StopReason::RoundsCompleted;
    let mut local_in_a = vec![false; total];
    for i in 0..=schedule.rounds {
        if current.n() == 0 {
            stop = StopReason::EmptyResidual;
            break;
        }
        if current.edge_count() == 0 {
            chosen.extend((0..current.n()).map(|v| current.label(v)));
            stop = StopReason::EdgelessResidual { taken: current.n() };
            break;
        }
        if i == schedule.rounds {
            break;
        }
        let started = options.clock.now_ms();
        let ni = current.n();
        let realized_delta = current.max_degree();
        let realized_codegree = max_codegree(&current);
        let mut target = schedule.delta_at(i).saturating_sub(1);
        let over_schedule = realized_delta > target;
        if over_schedule {
            if schedule.mode == Mode::Paper {
                return Err(NibbleError::PreconditionViolated(format!(
                    "round {i}: Δ(Gᵢ) = {realized_delta} exceeds Δᵢ − 1 = {target}"
                )));
            }
            target = realized_delta;
        }
        let reg = regularize(&current, target, policy)?;
        let untouched = reg.phase1_edges + reg.phase2_edges == 0;
        let mut cfg = StepConfig::new(target + 1, params);
        if untouched {
            cfg.known_max_codegree = Some(realized_codegree);
        }
        let out = nibble_step(&reg.graph, &cfg, rng).map_err(|e| match e {
            NibbleError::RetriesExhausted { attempts, failures, .. } => NibbleError::RetriesExhausted {
                round: Some(i),
                attempts,
                failures,
            },
            other => other,
        })?;

        for &v in &out.a {
            local_in_a[v as usize] = true;
        }
        let picked: Vec<u32> = out
            .a
            .iter()
            .copied()
            .filter(|&v| current.neighbors(v as usize).iter().all(|&w| !local_in_a[w as usize]))
            .collect();
        let a_edges_here = current.induced_edge_count(&out.a, &local_in_a);
        for &v in &out.a {
            local_in_a[v as usize] = false;
        }
        assert!(
            picked.len() + 2 * a_edges_here >= out.a.len(),
            "extraction lost too many vertices"
        );
        let (gamma, alpha, d) = (params.gamma, params.alpha, (target + 1) as f64);
        let floor = (1.0 - alpha) * gamma * ni as f64 / d - 2.0 * gamma * gamma * ni as f64 / d;
        assert!(
            picked.len() as f64 >= floor - 1e-9,
            "round {i}: |Iᵢ| below the guaranteed floor"
        );

        for &v in &out.a {
            let w = current.label(v as usize) as usize;
            assert!(
                !in_earlier_a[w] && work.neighbors(w).iter().all(|&x| !in_earlier_a[x as usize]),
                "round {i}: Aᵢ touches an earlier bite"
            );
        }
        for &v in &out.a {
            in_earlier_a[current.label(v as usize) as usize] = true;
        }
        chosen.extend(picked.iter().map(|&v| current.label(v as usize)));

        rounds.push(RoundRecord {
            index: i,
            n: ni,
            max_degree: realized_delta,
            max_codegree: realized_codegree,
            step_delta: target + 1,
            over_schedule,
            deficient_left: reg.deficient_left,
            eta_delta: out.eta_delta,
            a_size: out.a.len(),
            a_edges: out.a_edges,
            i_size: picked.len(),
            retries: out.retries,
            millis: options.clock.now_ms().saturating_sub(started),
            warnings: out.warnings,
        });
        current = current.induced(&out.c);
    }

    chosen.sort_unstable();
    assert!(work.is_independent(&chosen), "nibble output is not independent");
    let (independent_set, blow_up) = if copies > 1 {
        let mut per_copy = vec![Vec::new(); copies];
        for &v in &chosen {
            per_copy[v as usize / n].push(v % n as u32);
        }
        let best = (0..copies)
            .max_by_key(|&c| (per_copy[c].len(), core::cmp::Reverse(c)))
            .unwrap_or(0);
        (
            core::mem::take(&mut per_copy[best]),
            Some(BlowUp {
                copies,
                total_size: chosen.len(),
                per_copy_density: chosen.len() as f64 / total as f64,
            }),
        )
    } else {
        (chosen, None)
    };
    assert!(
        g.is_independent(&independent_set),
        "nibble output is not independent in the input"
    );
    Ok(NibbleResult {
        independent_set,
        trace: NibbleTrace { rounds, stop },
        blow_up,
    })
}
