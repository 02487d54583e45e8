//! Independent sets by iterated nibbling.
//!
//! Each round regularizes the residual graph by adding edges between far-apart
//! vertices, then takes a sparse random bite `A` with [`nibble_step`] and keeps
//! only the part `C` of the graph that stayed degree- and codegree-controlled.
//! The bites are nearly independent; cleaning them gives the final set.

mod regularize;
mod schedule;
mod step;

use alloc::string::String;
use thiserror::Error;

use crate::graph::Graph;

pub use regularize::{regularize, RegularizePolicy, Regularized};
pub use schedule::{
    required_ln_delta, run_schedule, Clock, NibbleResult, NibbleTrace, NoClock, RoundRecord, RunOptions, Schedule,
    StopReason,
};
pub use step::{nibble_step, ConditionFailures, StepConfig, StepOutcome, StepWarnings};

/// Paper mode enforces every hypothesis of the underlying lemmas and fails
/// loudly; custom mode runs anyway and records which ones were violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Paper,
    #[default]
    Custom,
}

/// How `ηΔ`, the codegree scale of a round, is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EtaPolicy {
    /// `ηΔ = max{Δ₂(G), 2√Δ}` for the graph being nibbled.
    #[default]
    Paper,
    /// A fixed `η`, so `ηΔ = η · Δ`.
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NibbleParams {
    pub gamma: f64,
    pub alpha: f64,
    pub eta: EtaPolicy,
    pub max_retries: usize,
    pub mode: Mode,
}

pub const DEFAULT_MAX_RETRIES: usize = 64;

impl NibbleParams {
    pub fn custom(gamma: f64, alpha: f64) -> Self {
        NibbleParams {
            gamma,
            alpha,
            eta: EtaPolicy::Paper,
            max_retries: DEFAULT_MAX_RETRIES,
            mode: Mode::Custom,
        }
    }

    /// `γ ∈ (0, 1/2]` and `α ∈ [2γ², γ]`.
    pub fn validate(&self) -> Result<(), NibbleError> {
        if !(self.gamma > 0.0 && self.gamma <= 0.5) {
            return Err(NibbleError::InvalidParameters(alloc::format!(
                "gamma = {} must lie in (0, 1/2]",
                self.gamma
            )));
        }
        let lo = 2.0 * self.gamma * self.gamma;
        if !(self.alpha >= lo * (1.0 - 1e-12) && self.alpha <= self.gamma) {
            return Err(NibbleError::InvalidParameters(alloc::format!(
                "alpha = {} must lie in [2·gamma², gamma] = [{lo}, {}]",
                self.alpha,
                self.gamma
            )));
        }
        if let EtaPolicy::Explicit(eta) = self.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(NibbleError::InvalidParameters(alloc::format!(
                    "eta = {eta} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// The five conclusions of a nibble step, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `|A| ≥ (1−α)γn/Δ`
    ASize,
    /// `e(G[A]) ≤ γ²n/Δ`
    AEdges,
    /// `|C| ≥ (1−γ−α)n`
    CSize,
    /// `Δ(G[C]) ≤ (1−γ+α)Δ`
    CDegree,
    /// `Δ₂(G[C]) ≤ (1−γ+α)ηΔ`
    CCodegree,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NibbleError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(
        "nibble step failed after {attempts} attempts{}; failures per condition: {failures}",
        round.map(|r| alloc::format!(" in round {r}")).unwrap_or_default()
    )]
    RetriesExhausted {
        round: Option<usize>,
        attempts: usize,
        failures: ConditionFailures,
    },
    #[error(
        "paper schedule is infeasible at Δ = {delta}: {}; it needs ln Δ ≥ {required_ln_delta:.2}, i.e. Δ ≥ {:.3e}",
        describe_rounds(*rounds),
        libm::exp(*required_ln_delta)
    )]
    ScheduleInfeasible {
        delta: usize,
        rounds: f64,
        required_ln_delta: f64,
    },
    #[error("regularization found no partner for deficient vertex {vertex}")]
    InternalExhaustion { vertex: usize },
}

fn describe_rounds(rounds: f64) -> alloc::string::String {
    if rounds.is_finite() {
        alloc::format!("T = {rounds:.3} < 1")
    } else {
        "log log Δ is undefined".into()
    }
}

/// True iff no edge of `g` has both endpoints in `set`.
pub fn verify_independent(g: &Graph, set: &[u32]) -> bool {
    g.is_independent(set)
}
