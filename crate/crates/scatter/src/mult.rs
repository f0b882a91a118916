//! The multiplicity alphabet: finite cardinals together with ω and ω₁.
//!
//! Multiplicities count copies of a summand in a topological sum, points of
//! a derivative, or disjoint copies of a piece inside a host. Arithmetic is
//! cardinal arithmetic truncated to this alphabet: infinite values absorb.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

/// A cardinal in `{0, 1, 2, …} ∪ {ω, ω₁}`.
///
/// Finite values saturate at `u64::MAX`; the acceptance corpus never gets
/// anywhere near that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mult {
    Fin(u64),
    Omega,
    Omega1,
}

pub use Mult::{Fin, Omega, Omega1};

impl Mult {
    pub const ZERO: Mult = Fin(0);
    pub const ONE: Mult = Fin(1);

    pub fn is_zero(self) -> bool {
        self == Fin(0)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Fin(_))
    }

    pub fn is_countable(self) -> bool {
        self != Omega1
    }

    /// Cardinal sum: finite values add, infinite values absorb.
    pub fn add(self, other: Mult) -> Mult {
        match (self, other) {
            (Fin(a), Fin(b)) => Fin(a.saturating_add(b)),
            (Omega1, _) | (_, Omega1) => Omega1,
            _ => Omega,
        }
    }

    /// Cardinal product: zero annihilates, otherwise the larger infinite wins.
    pub fn mul(self, other: Mult) -> Mult {
        if self.is_zero() || other.is_zero() {
            return Fin(0);
        }
        match (self, other) {
            (Fin(a), Fin(b)) => Fin(a.saturating_mul(b)),
            (Omega1, _) | (_, Omega1) => Omega1,
            _ => Omega,
        }
    }

    pub fn sum<I: IntoIterator<Item = Mult>>(iter: I) -> Mult {
        iter.into_iter().fold(Fin(0), Mult::add)
    }
}

impl PartialOrd for Mult {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mult {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Fin(a), Fin(b)) => a.cmp(b),
            (Fin(_), _) => Ordering::Less,
            (_, Fin(_)) => Ordering::Greater,
            (Omega, Omega) => Ordering::Equal,
            (Omega, Omega1) => Ordering::Less,
            (Omega1, Omega) => Ordering::Greater,
            (Omega1, Omega1) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(n) => write!(f, "{n}"),
            Omega => write!(f, "w"),
            Omega1 => write!(f, "w1"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_order() {
        assert!(Fin(0) < Fin(1));
        assert!(Fin(1_000_000) < Omega);
        assert!(Omega < Omega1);
    }

    #[test]
    fn addition_absorbs() {
        assert_eq!(Fin(2).add(Fin(3)), Fin(5));
        assert_eq!(Fin(7).add(Omega), Omega);
        assert_eq!(Omega.add(Omega), Omega);
        assert_eq!(Omega.add(Omega1), Omega1);
        assert_eq!(Omega1.add(Fin(0)), Omega1);
    }

    #[test]
    fn multiplication_annihilates_and_absorbs() {
        assert_eq!(Fin(0).mul(Omega1), Fin(0));
        assert_eq!(Omega1.mul(Fin(0)), Fin(0));
        assert_eq!(Fin(2).mul(Omega), Omega);
        assert_eq!(Omega.mul(Omega), Omega);
        assert_eq!(Omega.mul(Omega1), Omega1);
        assert_eq!(Fin(3).mul(Fin(4)), Fin(12));
    }
}
