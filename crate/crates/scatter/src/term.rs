//! The finite term language for scattered P-spaces of weight ≤ ω₁.
//!
//! A term denotes a space up to homeomorphism: a point, a disjoint sum of
//! weighted copies, a cone (one top point over ω₁ identical slices), or one
//! of the two limit-rank primitives `J(λ)` and `⊕{i(n) : n<ω}`.
//!
//! Sums are kept flat, merged and sorted on construction, so structural
//! equality is insensitive to presentation order.

use std::collections::BTreeSet;
use std::fmt;

use crate::mult::{Fin, Mult, Omega, Omega1};
use crate::ordinal::{Countable, Ordinal};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("cone slice must be nonempty")]
    EmptyConeSlice,
    #[error("sum entries must have multiplicity >= 1 and nonempty summands")]
    BadSumEntry,
    #[error("J index must be a countable ordinal (below omega-1)")]
    UncountableJIndex,
    #[error("J limit index must be a limit ordinal")]
    NotALimit,
    #[error("indicator: lambda must be a positive even integer")]
    IndicatorOddLambda,
    #[error("indicator: A must contain even numbers below lambda")]
    IndicatorBadSet,
    #[error("term nesting too deep")]
    TooDeep,
}

/// A scattered P-space of weight ≤ ω₁, as a finite term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpaceTerm {
    /// The empty space.
    Empty,
    /// A single point.
    Pt,
    /// Disjoint sum `⊕ κ_i · T_i`; entries sorted, merged, nonempty.
    Sum(Vec<(Mult, SpaceTerm)>),
    /// One top point with a P-base of ω₁ slices, each homeomorphic to the
    /// slice term.
    Cone(Box<SpaceTerm>),
    /// `⊕ { J(γ) : γ < λ }` for a countable limit λ, kept primitive.
    Jlim(Countable),
    /// `⊕ { i(n) : n < ω }`, kept primitive.
    ISumOmega,
}

use SpaceTerm::*;

impl SpaceTerm {
    /// Canonical sum constructor: flattens nested sums, drops empties,
    /// merges equal summands, sorts, and unwraps trivial wrappers.
    pub fn sum(entries: Vec<(Mult, SpaceTerm)>) -> SpaceTerm {
        let mut flat: Vec<(Mult, SpaceTerm)> = Vec::new();
        for (k, t) in entries {
            if k.is_zero() {
                continue;
            }
            match t {
                Empty => {}
                Sum(inner) => {
                    for (k2, t2) in inner {
                        flat.push((k.mul(k2), t2));
                    }
                }
                other => flat.push((k, other)),
            }
        }
        flat.retain(|(k, _)| !k.is_zero());
        flat.sort_by(|a, b| a.1.cmp_canonical(&b.1));
        let mut merged: Vec<(Mult, SpaceTerm)> = Vec::new();
        for (k, t) in flat {
            match merged.last_mut() {
                Some((k0, t0)) if *t0 == t => *k0 = k0.add(k),
                _ => merged.push((k, t)),
            }
        }
        match merged.len() {
            0 => Empty,
            1 if merged[0].0 == Fin(1) => merged.pop().unwrap().1,
            _ => Sum(merged),
        }
    }

    /// `κ` copies of a term, canonically.
    pub fn times(k: Mult, t: SpaceTerm) -> SpaceTerm {
        SpaceTerm::sum(vec![(k, t)])
    }

    pub fn cone(slice: SpaceTerm) -> Result<SpaceTerm, TermError> {
        if slice == Empty {
            return Err(TermError::EmptyConeSlice);
        }
        Ok(Cone(Box::new(slice)))
    }

    pub fn jlim(lambda: Countable) -> Result<SpaceTerm, TermError> {
        if !lambda.is_limit() {
            return Err(TermError::NotALimit);
        }
        Ok(Jlim(lambda))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Empty)
    }

    /// Entries view: a non-sum term is a singleton entry.
    pub fn entries(&self) -> Vec<(Mult, SpaceTerm)> {
        match self {
            Empty => Vec::new(),
            Sum(es) => es.clone(),
            other => vec![(Fin(1), other.clone())],
        }
    }

    /// Fixed total order on terms: rank first, then shape, then components.
    pub fn cmp_canonical(&self, other: &SpaceTerm) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match self.rank().cmp(&other.rank()) {
            Equal => {}
            o => return o,
        }
        let tag = |t: &SpaceTerm| match t {
            Empty => 0u8,
            Pt => 1,
            Cone(_) => 2,
            Sum(_) => 3,
            Jlim(_) => 4,
            ISumOmega => 5,
        };
        match tag(self).cmp(&tag(other)) {
            Equal => {}
            o => return o,
        }
        match (self, other) {
            (Cone(a), Cone(b)) => a.cmp_canonical(b),
            (Jlim(a), Jlim(b)) => a.cmp(b),
            (Sum(a), Sum(b)) => {
                for ((ka, ta), (kb, tb)) in a.iter().zip(b.iter()) {
                    match ta.cmp_canonical(tb) {
                        Equal => {}
                        o => return o,
                    }
                    match ka.cmp(kb) {
                        Equal => {}
                        o => return o,
                    }
                }
                a.len().cmp(&b.len())
            }
            _ => Equal,
        }
    }

    /// Maximal constructor nesting depth.
    pub fn height(&self) -> usize {
        match self {
            Empty | Pt | Jlim(_) | ISumOmega => 0,
            Cone(s) => 1 + s.height(),
            Sum(es) => 1 + es.iter().map(|(_, t)| t.height()).max().unwrap_or(0),
        }
    }
}

/// The maximal tower `J(α)`: ω₁-wide slices all the way down.
///
/// `J(0)` is empty, `J(1)` a point, `J(γ+1)` the cone over `⊕_{ω₁} J(γ)`,
/// and `J(λ)` for limit λ the primitive member sum.
pub fn build_j(alpha: &Ordinal) -> Result<SpaceTerm, TermError> {
    let c = alpha
        .as_countable()
        .ok_or(TermError::UncountableJIndex)?
        .clone();
    build_j_countable(&c)
}

pub fn build_j_countable(alpha: &Countable) -> Result<SpaceTerm, TermError> {
    if alpha.is_zero() {
        return Ok(Empty);
    }
    let n = alpha.finite_part();
    let mu = alpha.limit_part();
    let mut t = if mu.is_zero() {
        // Finite index: bottom of the tower is a point (J(1)).
        Pt
    } else {
        SpaceTerm::jlim(mu)?
    };
    let steps = if mu.is_zero() { n - 1 } else { n };
    for _ in 0..steps {
        t = SpaceTerm::cone(SpaceTerm::times(Omega1, t))?;
    }
    Ok(t)
}

/// The minimal tower `i(n)`: countable slices all the way down.
pub fn build_i(n: u64) -> SpaceTerm {
    if n == 0 {
        return Empty;
    }
    let mut t = Pt;
    for _ in 1..n {
        t = Cone(Box::new(SpaceTerm::times(Omega, t)));
    }
    t
}

/// Indicator tower for a set of even levels below `lambda`.
///
/// Produces a rank-λ term whose two-level segment starting at even level α
/// is ω₁ many copies of the countable-slice pattern when α ∈ A, and of the
/// ω₁-slice pattern otherwise.
pub fn build_indicator(a_set: &BTreeSet<u64>, lambda: u64) -> Result<SpaceTerm, TermError> {
    if lambda == 0 || lambda % 2 != 0 {
        return Err(TermError::IndicatorOddLambda);
    }
    if a_set.iter().any(|&a| a % 2 != 0 || a >= lambda) {
        return Err(TermError::IndicatorBadSet);
    }
    // Tower of height λ; the segment at level α reads the multiplicity at
    // depth λ-2-α, so the set is written in reversed order.
    let mut t = Pt;
    for j in (0..=lambda - 2).rev() {
        let m = if a_set.contains(&(lambda - 2 - j)) {
            Omega
        } else {
            Omega1
        };
        t = Cone(Box::new(SpaceTerm::times(m, t)));
    }
    Ok(SpaceTerm::times(Omega1, t))
}

impl fmt::Display for SpaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Empty => write!(f, "0"),
            Pt => write!(f, "pt"),
            Cone(s) => write!(f, "cone({s})"),
            Jlim(l) => write!(f, "J({l})"),
            ISumOmega => write!(f, "isum"),
            Sum(es) => {
                let mut first = true;
                for (k, t) in es {
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    if *k == Fin(1) {
                        write!(f, "{t}")?;
                    } else {
                        write!(f, "{k}*{t}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_flattens_and_merges() {
        let s = SpaceTerm::sum(vec![
            (Fin(2), SpaceTerm::sum(vec![(Fin(3), Pt)])),
            (Fin(4), Pt),
        ]);
        assert_eq!(s, Sum(vec![(Fin(10), Pt)]));
        // Singleton with multiplicity one unwraps.
        assert_eq!(SpaceTerm::sum(vec![(Fin(1), Pt)]), Pt);
        assert_eq!(SpaceTerm::sum(vec![]), Empty);
        assert_eq!(SpaceTerm::sum(vec![(Fin(0), Pt), (Fin(2), Empty)]), Empty);
    }

    #[test]
    fn builders_match_recursions() {
        assert_eq!(build_i(0), Empty);
        assert_eq!(build_i(1), Pt);
        assert_eq!(build_i(2), Cone(Box::new(SpaceTerm::times(Omega, Pt))));
        assert_eq!(
            build_i(3),
            Cone(Box::new(SpaceTerm::times(Omega, build_i(2))))
        );

        assert_eq!(build_j(&Ordinal::zero()).unwrap(), Empty);
        assert_eq!(build_j(&Ordinal::one()).unwrap(), Pt);
        assert_eq!(
            build_j(&Ordinal::from_u64(2)).unwrap(),
            Cone(Box::new(SpaceTerm::times(Omega1, Pt)))
        );
        assert_eq!(
            build_j(&Ordinal::omega()).unwrap(),
            Jlim(Countable::omega())
        );
        assert!(build_j(&Ordinal::omega1()).is_err());
    }

    #[test]
    fn indicator_validation() {
        let a: BTreeSet<u64> = [0].into_iter().collect();
        assert!(build_indicator(&a, 2).is_ok());
        assert!(build_indicator(&a, 3).is_err());
        let bad: BTreeSet<u64> = [1].into_iter().collect();
        assert!(build_indicator(&bad, 4).is_err());
        let out_of_range: BTreeSet<u64> = [4].into_iter().collect();
        assert!(build_indicator(&out_of_range, 4).is_err());
    }

    #[test]
    fn print_shapes() {
        assert_eq!(format!("{}", build_i(2)), "cone(w*pt)");
        assert_eq!(
            format!("{}", build_j(&Ordinal::from_u64(2)).unwrap()),
            "cone(w1*pt)"
        );
        assert_eq!(
            format!("{}", build_j(&Ordinal::omega()).unwrap()),
            "J(w)"
        );
        let s = SpaceTerm::sum(vec![(Fin(1), build_i(2)), (Omega1, Pt)]);
        assert_eq!(format!("{s}"), "w1*pt + cone(w*pt)");
    }
}
