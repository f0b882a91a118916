//! Ordinal notations below ω₂.
//!
//! Two layers: [`Countable`] is base-ω Cantor normal form for ordinals below
//! ε₀, and [`Ordinal`] is base-ω₁ normal form `Σ ω₁^{e_i}·c_i + tail` whose
//! exponents and coefficients are countable notations. Every value is kept
//! canonical on construction, so structural equality is ordinal equality.

use std::cmp::Ordering;
use std::fmt;

use crate::mult::{Fin, Mult, Omega, Omega1};

/// Arithmetic error for the partial operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrdinalError {
    #[error("left subtraction requires a <= b (got a > b)")]
    SubtractUnderflow,
    #[error("operand must be countable (no omega-1 part)")]
    NotCountable,
}

// ---------------------------------------------------------------------------
// Countable notations (base-omega CNF, range < epsilon-0)
// ---------------------------------------------------------------------------

/// A countable ordinal in base-ω Cantor normal form.
///
/// `terms` is a strictly descending list of `(exponent, coefficient)` with
/// coefficients ≥ 1; the empty list is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Countable {
    terms: Vec<(Countable, u64)>,
}

impl Countable {
    pub fn zero() -> Self {
        Countable { terms: Vec::new() }
    }

    pub fn from_u64(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Countable {
                terms: vec![(Self::zero(), n)],
            }
        }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// ω^e (with ω^0 = 1).
    pub fn omega_pow(e: Countable) -> Self {
        Countable { terms: vec![(e, 1)] }
    }

    /// Builds `Σ ω^{e_i}·c_i` from raw parts, normalizing order and merges.
    pub fn from_terms(mut parts: Vec<(Countable, u64)>) -> Self {
        parts.retain(|(_, c)| *c > 0);
        // Ordinal sum of the parts as listed.
        let mut acc = Countable::zero();
        for (e, c) in parts {
            acc = acc.add(&Countable { terms: vec![(e, c)] });
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Countable, u64)] {
        &self.terms
    }

    pub fn is_limit(&self) -> bool {
        match self.terms.last() {
            None => false,
            Some((e, _)) => !e.is_zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.terms.len() <= 1 && self.terms.first().map_or(true, |(e, _)| e.is_zero())
    }

    pub fn as_u64(&self) -> Option<u64> {
        if self.is_zero() {
            Some(0)
        } else if self.is_finite() {
            Some(self.terms[0].1)
        } else {
            None
        }
    }

    /// Trailing finite summand.
    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some((e, c)) if e.is_zero() => *c,
            _ => 0,
        }
    }

    /// The notation with its trailing finite summand removed (a limit or 0).
    pub fn limit_part(&self) -> Countable {
        let mut t = self.terms.clone();
        if let Some((e, _)) = t.last() {
            if e.is_zero() {
                t.pop();
            }
        }
        Countable { terms: t }
    }

    pub fn succ(&self) -> Countable {
        self.add(&Countable::one())
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Countable) -> Countable {
        if other.is_zero() {
            return self.clone();
        }
        let (be, bc) = &other.terms[0];
        let mut out: Vec<(Countable, u64)> = Vec::new();
        let mut merged_first = (be.clone(), *bc);
        for (e, c) in &self.terms {
            match e.cmp(be) {
                Ordering::Greater => out.push((e.clone(), *c)),
                Ordering::Equal => merged_first.1 = c.saturating_add(*bc),
                Ordering::Less => {}
            }
        }
        out.push(merged_first);
        out.extend(other.terms[1..].iter().cloned());
        Countable { terms: out }
    }

    /// The unique γ with `self + γ = other`; errors when `self > other`.
    pub fn left_subtract(&self, other: &Countable) -> Result<Countable, OrdinalError> {
        if self > other {
            return Err(OrdinalError::SubtractUnderflow);
        }
        let a = &self.terms;
        let b = &other.terms;
        let mut i = 0;
        while i < a.len() && i < b.len() && a[i] == b[i] {
            i += 1;
        }
        if i == a.len() {
            return Ok(Countable {
                terms: b[i..].to_vec(),
            });
        }
        // First difference: exponents equal with smaller coefficient on the
        // left, or a strictly smaller exponent (absorbed entirely).
        let (ae, ac) = &a[i];
        let (be, bc) = &b[i];
        if ae == be {
            debug_assert!(ac < bc);
            let mut terms = vec![(be.clone(), bc - ac)];
            terms.extend(b[i + 1..].iter().cloned());
            Ok(Countable { terms })
        } else {
            Ok(Countable {
                terms: b[i..].to_vec(),
            })
        }
    }

    /// `self · n` for finite n.
    pub fn mul_fin(&self, n: u64) -> Countable {
        if n == 0 || self.is_zero() {
            return Countable::zero();
        }
        let mut t = self.terms.clone();
        t[0].1 = t[0].1.saturating_mul(n);
        Countable { terms: t }
    }

    /// `self · ω` (the supremum of the finite multiples).
    pub fn mul_omega(&self) -> Countable {
        if self.is_zero() {
            return Countable::zero();
        }
        Countable::omega_pow(self.terms[0].0.succ())
    }

    /// The ξ with `ω·ξ = self`; requires a limit (or zero) notation.
    pub fn div_omega(&self) -> Countable {
        debug_assert!(self.is_zero() || self.is_limit());
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let e2 = Countable::one().left_subtract(e).expect("exponent >= 1");
                (e2, *c)
            })
            .collect();
        Countable { terms }
    }

    /// Cardinality of this ordinal as a set, within the `Mult` alphabet.
    pub fn cardinality(&self) -> Mult {
        if let Some(n) = self.as_u64() {
            Fin(n)
        } else {
            Omega
        }
    }
}

impl PartialOrd for Countable {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Countable {
    fn cmp(&self, other: &Self) -> Ordering {
        for (x, y) in self.terms.iter().zip(other.terms.iter()) {
            match x.0.cmp(&y.0) {
                Ordering::Equal => {}
                o => return o,
            }
            match x.1.cmp(&y.1) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl fmt::Display for Countable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                if e.as_u64() == Some(1) {
                    write!(f, "w")?;
                } else if e.is_finite() {
                    write!(f, "w^{}", e.finite_part())?;
                } else {
                    write!(f, "w^({e})")?;
                }
                if *c != 1 {
                    write!(f, "*{c}")?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Ordinals below omega-2 (base-omega-1 CNF with countable tail)
// ---------------------------------------------------------------------------

/// An ordinal below ω₂: `Σ ω₁^{e_i}·c_i + tail` with strictly descending
/// countable exponents `e_i ≥ 1`, countable coefficients `c_i ≥ 1`, and a
/// countable tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    w1_terms: Vec<(Countable, Countable)>,
    tail: Countable,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal::default()
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn from_u64(n: u64) -> Self {
        Ordinal {
            w1_terms: Vec::new(),
            tail: Countable::from_u64(n),
        }
    }

    pub fn omega() -> Self {
        Self::from_countable(Countable::omega())
    }

    pub fn omega1() -> Self {
        Self::w1_pow(Countable::one())
    }

    /// ω₁^e for countable e ≥ 1.
    pub fn w1_pow(e: Countable) -> Self {
        debug_assert!(!e.is_zero());
        Ordinal {
            w1_terms: vec![(e, Countable::one())],
            tail: Countable::zero(),
        }
    }

    pub fn from_countable(c: Countable) -> Self {
        Ordinal {
            w1_terms: Vec::new(),
            tail: c,
        }
    }

    /// Builds from raw ω₁-terms and tail by ordinal summation.
    pub fn from_parts(parts: Vec<(Countable, Countable)>, tail: Countable) -> Self {
        let mut acc = Ordinal::zero();
        for (e, c) in parts {
            if e.is_zero() {
                acc = acc.add(&Ordinal::from_countable(c));
            } else if !c.is_zero() {
                acc = acc.add(&Ordinal {
                    w1_terms: vec![(e, c)],
                    tail: Countable::zero(),
                });
            }
        }
        acc.add(&Ordinal::from_countable(tail))
    }

    pub fn is_zero(&self) -> bool {
        self.w1_terms.is_empty() && self.tail.is_zero()
    }

    pub fn is_countable(&self) -> bool {
        self.w1_terms.is_empty()
    }

    /// The countable value, if no ω₁ part is present.
    pub fn as_countable(&self) -> Option<&Countable> {
        if self.is_countable() {
            Some(&self.tail)
        } else {
            None
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_countable().and_then(Countable::as_u64)
    }

    /// Leading ω₁-exponent (0 for countable values).
    pub fn omega1_degree(&self) -> Countable {
        self.w1_terms
            .first()
            .map(|(e, _)| e.clone())
            .unwrap_or_else(Countable::zero)
    }

    pub fn w1_terms(&self) -> &[(Countable, Countable)] {
        &self.w1_terms
    }

    pub fn tail(&self) -> &Countable {
        &self.tail
    }

    pub fn finite_part(&self) -> u64 {
        self.tail.finite_part()
    }

    /// Everything except the trailing finite summand (a limit or 0).
    pub fn limit_part(&self) -> Ordinal {
        Ordinal {
            w1_terms: self.w1_terms.clone(),
            tail: self.tail.limit_part(),
        }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// True iff nonzero with no trailing finite summand.
    pub fn is_limit(&self) -> bool {
        if self.tail.is_zero() {
            !self.w1_terms.is_empty()
        } else {
            self.tail.is_limit()
        }
    }

    pub fn is_successor(&self) -> bool {
        !self.is_zero() && !self.is_limit()
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        if other.is_zero() {
            return self.clone();
        }
        if other.w1_terms.is_empty() {
            return Ordinal {
                w1_terms: self.w1_terms.clone(),
                tail: self.tail.add(&other.tail),
            };
        }
        let (be, bc) = &other.w1_terms[0];
        let mut out: Vec<(Countable, Countable)> = Vec::new();
        let mut merged = (be.clone(), bc.clone());
        for (e, c) in &self.w1_terms {
            match e.cmp(be) {
                Ordering::Greater => out.push((e.clone(), c.clone())),
                Ordering::Equal => merged.1 = c.add(bc),
                Ordering::Less => {}
            }
        }
        out.push(merged);
        out.extend(other.w1_terms[1..].iter().cloned());
        Ordinal {
            w1_terms: out,
            tail: other.tail.clone(),
        }
    }

    /// The unique γ with `self + γ = other`; errors when `self > other`.
    pub fn left_subtract(&self, other: &Ordinal) -> Result<Ordinal, OrdinalError> {
        if self > other {
            return Err(OrdinalError::SubtractUnderflow);
        }
        let a = &self.w1_terms;
        let b = &other.w1_terms;
        let mut i = 0;
        while i < a.len() && i < b.len() && a[i] == b[i] {
            i += 1;
        }
        if i == a.len() && i == b.len() {
            return Ok(Ordinal {
                w1_terms: Vec::new(),
                tail: self.tail.left_subtract(&other.tail)?,
            });
        }
        if i == a.len() {
            // Remaining b-terms absorb the left tail.
            return Ok(Ordinal {
                w1_terms: b[i..].to_vec(),
                tail: other.tail.clone(),
            });
        }
        let (ae, ac) = &a[i];
        let (be, bc) = &b[i];
        if ae == be {
            let delta = ac.left_subtract(bc)?;
            debug_assert!(!delta.is_zero());
            let mut terms = vec![(be.clone(), delta)];
            terms.extend(b[i + 1..].iter().cloned());
            Ok(Ordinal {
                w1_terms: terms,
                tail: other.tail.clone(),
            })
        } else {
            Ok(Ordinal {
                w1_terms: b[i..].to_vec(),
                tail: other.tail.clone(),
            })
        }
    }

    /// Right multiplication `self · k` for k in the multiplicity alphabet.
    ///
    /// `a·ω` is the supremum of the finite multiples and `a·ω₁` is
    /// ω₁^{deg(a)+1} for a ≥ 1.
    pub fn rmul(&self, k: Mult) -> Ordinal {
        if self.is_zero() {
            return Ordinal::zero();
        }
        match k {
            Fin(0) => Ordinal::zero(),
            Fin(n) => {
                if let Some((e, c)) = self.w1_terms.first() {
                    let mut terms = self.w1_terms.clone();
                    terms[0] = (e.clone(), c.mul_fin(n));
                    Ordinal {
                        w1_terms: terms,
                        tail: self.tail.clone(),
                    }
                } else {
                    Ordinal::from_countable(self.tail.mul_fin(n))
                }
            }
            Omega => {
                if let Some((e, c)) = self.w1_terms.first() {
                    Ordinal {
                        w1_terms: vec![(e.clone(), c.mul_omega())],
                        tail: Countable::zero(),
                    }
                } else {
                    Ordinal::from_countable(self.tail.mul_omega())
                }
            }
            Omega1 => Ordinal::w1_pow(self.omega1_degree().succ()),
        }
    }

    /// Cardinality of this ordinal as a set.
    pub fn cardinality(&self) -> Mult {
        if !self.w1_terms.is_empty() {
            Omega1
        } else {
            self.tail.cardinality()
        }
    }

    /// Number of limit ordinals strictly between `self` and the countable
    /// limit `lambda`.
    pub fn limits_between(&self, lambda: &Countable) -> Mult {
        let alpha = match self.as_countable() {
            Some(c) => c.clone(),
            None => return Fin(0),
        };
        if &alpha >= lambda {
            return Fin(0);
        }
        let xi_alpha = alpha.limit_part().div_omega();
        let xi_lambda = lambda.div_omega();
        let lo = xi_alpha.succ();
        if lo >= xi_lambda {
            return Fin(0);
        }
        match lo.left_subtract(&xi_lambda) {
            Ok(delta) => delta.cardinality(),
            Err(_) => Fin(0),
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (x, y) in self.w1_terms.iter().zip(other.w1_terms.iter()) {
            match x.0.cmp(&y.0) {
                Ordering::Equal => {}
                o => return o,
            }
            match x.1.cmp(&y.1) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        match self.w1_terms.len().cmp(&other.w1_terms.len()) {
            Ordering::Equal => self.tail.cmp(&other.tail),
            o => o,
        }
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.w1_terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.as_u64() == Some(1) {
                write!(f, "w1")?;
            } else if e.is_finite() {
                write!(f, "w1^{}", e.finite_part())?;
            } else {
                write!(f, "w1^({e})")?;
            }
            if c.as_u64() != Some(1) {
                if c.is_finite() {
                    write!(f, "*{}", c.finite_part())?;
                } else {
                    write!(f, "*({c})")?;
                }
            }
        }
        if !self.tail.is_zero() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{}", self.tail)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Ordinal {
        Ordinal::omega()
    }
    fn w1() -> Ordinal {
        Ordinal::omega1()
    }
    fn fin(n: u64) -> Ordinal {
        Ordinal::from_u64(n)
    }

    #[test]
    fn comparison_examples() {
        // w^2 < w1
        let w2 = Ordinal::from_countable(Countable::omega_pow(Countable::from_u64(2)));
        assert!(w2 < w1());
        // w1*3 == w1*3
        let a = w1().rmul(Fin(3));
        assert_eq!(a, w1().rmul(Fin(3)));
        // w1^2 > w1*5 + w
        let lhs = w1().rmul(Omega1);
        let rhs = w1().rmul(Fin(5)).add(&w());
        assert!(lhs > rhs);
    }

    #[test]
    fn addition_examples() {
        // (w1*2 + w) + w1 = w1*3
        let a = w1().rmul(Fin(2)).add(&w());
        assert_eq!(a.add(&w1()), w1().rmul(Fin(3)));
        // 5 + w = w
        assert_eq!(fin(5).add(&w()), w());
        // w1 + 5
        let e = w1().add(&fin(5));
        assert_eq!(e.finite_part(), 5);
        assert_eq!(e.omega1_degree(), Countable::one());
    }

    #[test]
    fn rmul_examples() {
        // (w1*2 + 5) * w1 = w1^2
        let a = w1().rmul(Fin(2)).add(&fin(5));
        assert_eq!(a.rmul(Omega1), Ordinal::w1_pow(Countable::from_u64(2)));
        // w1 * 3 = w1*3
        assert_eq!(w1().rmul(Fin(3)), w1().add(&w1()).add(&w1()));
        // w * w = w^2
        assert_eq!(
            w().rmul(Omega),
            Ordinal::from_countable(Countable::omega_pow(Countable::from_u64(2)))
        );
    }

    #[test]
    fn left_subtract_examples() {
        // w + γ = w*2 → γ = w
        let w2 = w().add(&w());
        assert_eq!(w().left_subtract(&w2).unwrap(), w());
        // w1 − w1 = 0
        assert_eq!(w1().left_subtract(&w1()).unwrap(), Ordinal::zero());
        // 3 + γ = w+3 → γ = w+3
        let target = w().add(&fin(3));
        assert_eq!(fin(3).left_subtract(&target).unwrap(), target);
        // underflow
        assert!(w1().left_subtract(&w()).is_err());
    }

    #[test]
    fn succ_and_limits() {
        assert_eq!(w1().succ().finite_part(), 1);
        assert!(w().is_limit());
        assert!(!w().succ().is_limit());
        assert!(w1().is_limit());
        assert!(!fin(0).is_limit());
        assert!(w1().rmul(Fin(3)).is_limit());
    }

    #[test]
    fn subtraction_inverts_addition() {
        let vals = [
            fin(0),
            fin(7),
            w(),
            w().add(&fin(2)),
            w1(),
            w1().add(&w()),
            w1().rmul(Fin(2)).add(&fin(5)),
            Ordinal::w1_pow(Countable::from_u64(2)),
        ];
        for a in &vals {
            for b in &vals {
                if a <= b {
                    let g = a.left_subtract(b).unwrap();
                    assert_eq!(&a.add(&g), b, "a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn limits_between_counts() {
        // Limits in (1, w) : none.
        assert_eq!(fin(1).limits_between(&Countable::omega()), Fin(0));
        // Limits in (1, w*2): just w.
        let w2 = Countable::omega().add(&Countable::omega());
        assert_eq!(fin(1).limits_between(&w2), Fin(1));
        // Limits in (w+2, w*3): w*2.
        let w3 = w2.add(&Countable::omega());
        assert_eq!(w().add(&fin(2)).limits_between(&w3), Fin(1));
        // Limits in (0-ish, w^2): infinitely many.
        let wsq = Countable::omega_pow(Countable::from_u64(2));
        assert_eq!(fin(1).limits_between(&wsq), Omega);
    }

    #[test]
    fn display_roundtrip_shapes() {
        let x = Ordinal::w1_pow(Countable::from_u64(2))
            .rmul(Fin(3))
            .add(&w1().rmul(Fin(5)))
            .add(&Ordinal::from_countable(Countable::omega_pow(
                Countable::from_u64(2),
            )))
            .add(&fin(4));
        assert_eq!(format!("{x}"), "w1^2*3 + w1*5 + w^2 + 4");
    }
}
