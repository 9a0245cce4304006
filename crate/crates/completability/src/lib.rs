//! Decide whether a partially observed low-rank matrix has a unique
//! completion.
//!
//! Observed entries of a rank-`d` Gram or rectangular matrix are inner
//! products of unknown factor vectors. This crate tests, for a given pattern
//! of observed entries, whether a rank-`d` completion is generically locally
//! unique (finitely many completions) and globally unique, by randomized
//! rank probes of the completion matrix and of the stress matrix built from
//! its left null space. It also ships an exact rank-1 toolbox (combinatorial
//! characterizations plus a solver over log-moduli and sign parities) and an
//! experiment harness that estimates, by logistic regression, the
//! observation density at which random patterns become completable.
//!
//! Start from [`pattern`] to build or parse an observation pattern, then
//! [`verdict::test_local`] / [`verdict::test_global`]. The `examples/`
//! directory has one runnable program per capability.

pub mod completion;
pub mod harness;
pub mod numkit;
pub mod pattern;
pub mod rank1;
pub mod verdict;
