//! Symbolic calculus for scattered P-spaces of weight ω₁.
//!
//! Spaces are finite terms (points, sums, cones over ω₁-indexed slice
//! families, and two limit-rank primitives). The crate computes
//! Cantor–Bendixson derivatives and ranks, normalizes terms to canonical
//! stable-set sums, decides homeomorphism and dimensional-type
//! embeddability with checkable certificates and refutation witnesses,
//! constructs embeddings into ordinals below ω₂, and realizes the
//! derivative-induced isomorphism between the rank-window classes.

pub mod cb;
pub mod cli;
pub mod dimtype;
pub mod embed;
pub mod mult;
pub mod ordinal;
pub mod parse;
pub mod poset;
pub mod stable;
pub mod term;

pub use mult::Mult;
pub use ordinal::{Countable, Ordinal};
pub use term::SpaceTerm;
