//! Bounded affine permutations that avoid decreasing patterns.
//!
//! An affine permutation of size `N` is a bijection `σ : Z -> Z` with
//! `σ(i + N) = σ(i) + N` and window sum `σ(1) + ... + σ(N) = 1 + ... + N`.
//! It is *bounded* when `|σ(i) - i| < N` for all `i`. This crate provides:
//!
//! * the window representation and its invariants ([`affine`]),
//! * pattern containment and the rank decomposition into increasing
//!   periodic subsequences ([`patterns`]),
//! * exact and asymptotic enumeration of the avoider classes ([`counting`]),
//! * the tuple encoding `(n, G, H, Δ) -> σ` and its restricted domains
//!   ([`decomposition`]),
//! * empirical measures, slope-one line mixtures and exact discrete
//!   Wasserstein-1 transport ([`measures`]),
//! * exact and MCMC samplers for avoiders ([`sampling`]),
//! * the self-verification suite backing `affperm verify` ([`verify`]).
//!
//! With the default `parallel` feature the heavy sweeps (brute-force
//! enumeration, transport cost matrices, sampled domain verification) run
//! on rayon; building with `--no-default-features` gives a purely
//! sequential crate with identical results.

pub mod affine;
pub mod counting;
pub mod decomposition;
pub mod error;
pub(crate) mod transport;
pub mod measures;
pub mod patterns;
pub mod sampling;
pub mod verify;

pub use affine::{AffinePermutation, OrdinaryPermutation};
pub use error::Error;

/// Brute-force size cap used by the exhaustive enumerators, overridable
/// through the `AFFPERM_CAP` environment variable.
pub fn brute_cap() -> usize {
    std::env::var("AFFPERM_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(7)
}
