//! Oracles, baselines and empirical checks of the probabilistic lemmas.
//!
//! [`brute_force_mis`] is an exact solver for small graphs and
//! [`greedy_mis`] the sequential baseline. [`concentration_tail`] measures the
//! upper tails of degrees and codegrees after one random bite, and
//! [`abstract_lemma_tail`] the tail of the bipartite survivor count, each
//! against its proven bound. [`chung_lu_bound`] evaluates the martingale
//! inequality both rest on.

mod concentration;
mod martingale;
mod mis;

use alloc::string::String;
use thiserror::Error;

pub use concentration::{
    concentration_tail, ClassTail, ConcentrationReport, ConcentrationSetup, TailReport, TrialTally,
    DEFAULT_PAIR_SAMPLES,
};
pub use martingale::{
    abstract_lemma_bound, abstract_lemma_tail, chung_lu_bound, AbstractTail, Bipartite, MartingaleBound,
};
pub use mis::{brute_force_mis, greedy_mis, GreedyOrder, MaxIndependentSet, BRUTE_FORCE_LIMIT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("graph has {n} vertices; the exact solver handles at most {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no partner found after {attempts} attempts")]
    RetriesExhausted { attempts: usize },
}
