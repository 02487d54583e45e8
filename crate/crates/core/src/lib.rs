//! Sphere packings and spherical codes from sparse random graphs.
//!
//! The pipeline has two halves. A Poisson point process is sampled on a
//! periodic box, a ball, or the unit sphere and pruned so that its threshold
//! graph has bounded degree and codegree ([`pointproc`], [`graph`]). A large
//! independent set is then extracted with an iterated nibble that alternates
//! greedy regularization with a random sparse bite ([`nibble`]). Every
//! independent set of the threshold graph is a packing (or a code).
//!
//! [`geometry`] holds the volume and cap-area routines, [`analysis`] the
//! oracles, baselines and empirical tail checks used to test the rest.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the CLI and
//! thread pools live in the `nibblepack` crate.

#![no_std]
// Index loops mirror the formulas; negated comparisons also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod geometry;
pub mod graph;
mod math;
pub mod nibble;
pub mod pointproc;
pub mod stats;

/// Deterministic RNG used throughout the crate.
///
/// All randomized operations are generic over [`rand::Rng`], but the CLI and
/// the test suites seed this generator so results are reproducible across
/// platforms.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Builds a [`SeededRng`] from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

/// Builds an independent stream derived from `seed`, e.g. one per trial.
pub fn stream_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(stream);
    rng
}
