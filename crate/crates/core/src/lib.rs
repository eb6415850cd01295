//! Parameter-free online learning via coin betting.
//!
//! The crate is organized around a single idea: an online learner is a
//! gambler repeatedly betting a signed fraction of its wealth on "coin"
//! outcomes in [-1, 1]. A betting strategy whose wealth provably dominates a
//! *potential function* of the cumulative coin sum converts into an online
//! linear optimizer (and from there into an experts algorithm) whose regret
//! bound needs no learning rate.
//!
//! Module map:
//!
//! - [`numerics`]: scalar special functions (log-gamma, Lambert W, KL
//!   divergences), a grid Fenchel-conjugate oracle, and the probability
//!   simplex type.
//! - [`potentials`]: the coin-betting potential families
//!   (Krichevsky-Trofimov, shifted KT, exp-square), their betting fractions,
//!   inverses, lower bounds, a structural condition checker, and closed-form
//!   regret bound certificates.
//! - [`coin_betting`]: the wealth-accounting engine and concrete bettors
//!   (KT, Kelly, retrospectively optimal fixed fraction).
//! - [`olo`]: online linear optimization over a Hilbert space — the KT
//!   learner, its generic potential-based form, and an OGD baseline.
//! - [`lea`]: learning with expert advice via per-expert coin betting, a
//!   Hedge baseline, and a doubling-trick anytime wrapper.
//! - [`harness`]: dataset parsing, synthetic experiment generators, and
//!   deterministic CSV-emitting experiment runners behind the CLI.

// Negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN in
// the same branch that rejects out-of-range values. Frozen reference
// constants keep every digit the oracle printed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod coin_betting;
mod error;
pub mod harness;
pub mod lea;
pub mod numerics;
pub mod olo;
pub mod potentials;

pub use error::{Error, Result};
pub use numerics::ProbSimplex;
pub use olo::HilbertVector;
pub use potentials::{PotentialDescriptor, PotentialEval, PotentialKind};
