//! Derivatives, ranks, truncations and cardinalities of space terms.
//!
//! The derivative removes isolated points; iterating it transfinitely
//! stratifies a scattered space. All rules here operate structurally on
//! terms and agree with the pointwise semantics: cones lose their slices
//! level by level and collapse to their top exactly at the slice rank, and
//! the limit-rank primitives are derivative fixed points below their rank.

use crate::mult::{Fin, Mult, Omega1};
use crate::ordinal::Ordinal;
use crate::term::{build_i, build_j_countable, SpaceTerm};

impl SpaceTerm {
    /// Cantor–Bendixson rank: least α with the α-th derivative empty.
    pub fn rank(&self) -> Ordinal {
        match self {
            SpaceTerm::Empty => Ordinal::zero(),
            SpaceTerm::Pt => Ordinal::one(),
            SpaceTerm::Sum(es) => es
                .iter()
                .map(|(_, t)| t.rank())
                .max()
                .unwrap_or_else(Ordinal::zero),
            SpaceTerm::Cone(s) => s.rank().succ(),
            SpaceTerm::Jlim(l) => Ordinal::from_countable(l.clone()),
            SpaceTerm::ISumOmega => Ordinal::omega(),
        }
    }
}

/// One derivative step.
pub fn derivative(x: &SpaceTerm) -> SpaceTerm {
    match x {
        SpaceTerm::Empty | SpaceTerm::Pt => SpaceTerm::Empty,
        SpaceTerm::Sum(es) => SpaceTerm::sum(
            es.iter()
                .map(|(k, t)| (*k, derivative(t)))
                .collect::<Vec<_>>(),
        ),
        SpaceTerm::Cone(s) => {
            let d = derivative(s);
            if d.is_empty() {
                SpaceTerm::Pt
            } else {
                SpaceTerm::Cone(Box::new(d))
            }
        }
        SpaceTerm::Jlim(l) => SpaceTerm::Jlim(l.clone()),
        SpaceTerm::ISumOmega => SpaceTerm::ISumOmega,
    }
}

/// The α-th derivative.
pub fn derive(x: &SpaceTerm, alpha: &Ordinal) -> SpaceTerm {
    if alpha.is_zero() {
        return x.clone();
    }
    match x {
        SpaceTerm::Empty | SpaceTerm::Pt => SpaceTerm::Empty,
        SpaceTerm::Sum(es) => SpaceTerm::sum(
            es.iter()
                .map(|(k, t)| (*k, derive(t, alpha)))
                .collect::<Vec<_>>(),
        ),
        SpaceTerm::Cone(s) => {
            let r = s.rank();
            if *alpha > r {
                SpaceTerm::Empty
            } else if *alpha == r {
                SpaceTerm::Pt
            } else {
                SpaceTerm::Cone(Box::new(derive(s, alpha)))
            }
        }
        SpaceTerm::Jlim(l) => {
            let lam = Ordinal::from_countable(l.clone());
            if *alpha >= lam {
                SpaceTerm::Empty
            } else {
                // Members below α die; the rest shift down by left
                // subtraction, which is again a countable limit.
                let rest = alpha.left_subtract(&lam).expect("alpha < lambda");
                let c = rest.as_countable().expect("countable").clone();
                SpaceTerm::Jlim(c)
            }
        }
        SpaceTerm::ISumOmega => {
            if alpha.as_u64().is_some() {
                SpaceTerm::ISumOmega
            } else {
                SpaceTerm::Empty
            }
        }
    }
}

/// Term denoting `X ∖ X^{(α)}`: the part of X below level α.
pub fn truncate(x: &SpaceTerm, alpha: &Ordinal) -> SpaceTerm {
    if alpha.is_zero() {
        return SpaceTerm::Empty;
    }
    match x {
        SpaceTerm::Empty => SpaceTerm::Empty,
        SpaceTerm::Pt => SpaceTerm::Pt,
        SpaceTerm::Sum(es) => SpaceTerm::sum(
            es.iter()
                .map(|(k, t)| (*k, truncate(t, alpha)))
                .collect::<Vec<_>>(),
        ),
        SpaceTerm::Cone(s) => {
            if x.rank() <= *alpha {
                x.clone()
            } else {
                SpaceTerm::times(Omega1, truncate(s, alpha))
            }
        }
        SpaceTerm::Jlim(l) => {
            let lam = Ordinal::from_countable(l.clone());
            if lam <= *alpha {
                return x.clone();
            }
            let ca = alpha.as_countable().expect("alpha < lambda").clone();
            // Whole members J(γ) for γ ≤ α, each repeated once per limit
            // member of the family that recursively contains the prefix.
            let copies = match alpha.limits_between(l) {
                Fin(k) => Fin(1u64 << k.min(63)),
                _ => Mult::Omega,
            };
            let mut entries: Vec<(Mult, SpaceTerm)> = Vec::new();
            let mu = ca.limit_part();
            let n = ca.finite_part();
            if mu.is_zero() {
                for j in 1..=n {
                    entries.push((
                        copies,
                        build_j_countable(&crate::ordinal::Countable::from_u64(j)).unwrap(),
                    ));
                }
            } else {
                // The package of members below μ, plus the member J(μ)
                // itself, plus the successor members up to α.
                entries.push((copies.mul(Fin(2)), SpaceTerm::Jlim(mu.clone())));
                let mut idx = mu;
                for _ in 0..n {
                    idx = idx.succ();
                    entries.push((copies, build_j_countable(&idx).unwrap()));
                }
            }
            // Members above α each contribute ω₁ copies of J(α).
            entries.push((Omega1, build_j_countable(&ca).unwrap()));
            SpaceTerm::sum(entries)
        }
        SpaceTerm::ISumOmega => {
            let m = match alpha.as_u64() {
                Some(m) => m,
                None => return x.clone(), // α ≥ ω keeps the whole sum
            };
            let mut entries: Vec<(Mult, SpaceTerm)> = Vec::new();
            for j in 1..m {
                entries.push((Fin(1), build_i(j)));
            }
            entries.push((Omega1, build_i(m)));
            SpaceTerm::sum(entries)
        }
    }
}

/// Cardinality of the denoted space.
pub fn card(x: &SpaceTerm) -> Mult {
    match x {
        SpaceTerm::Empty => Fin(0),
        SpaceTerm::Pt => Fin(1),
        SpaceTerm::Sum(es) => Mult::sum(es.iter().map(|(k, t)| k.mul(card(t)))),
        SpaceTerm::Cone(_) => Omega1,
        SpaceTerm::Jlim(_) => Omega1,
        SpaceTerm::ISumOmega => Omega1,
    }
}

/// Cardinality of the α-th derivative.
pub fn card_at(x: &SpaceTerm, alpha: &Ordinal) -> Mult {
    card(&derive(x, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mult::Omega;
    use crate::ordinal::Countable;
    use crate::term::build_j;

    fn j(n: u64) -> SpaceTerm {
        build_j(&Ordinal::from_u64(n)).unwrap()
    }
    fn jw() -> SpaceTerm {
        build_j(&Ordinal::omega()).unwrap()
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(derivative(&j(3)), j(2));
        assert_eq!(derivative(&SpaceTerm::Pt), SpaceTerm::Empty);
        assert_eq!(derivative(&jw()), jw());
        assert_eq!(derivative(&build_i(2)), SpaceTerm::Pt);
        assert_eq!(derivative(&SpaceTerm::ISumOmega), SpaceTerm::ISumOmega);
    }

    #[test]
    fn derive_examples() {
        // J(ω+1) at ω collapses to the top point.
        let jw1 = build_j(&Ordinal::omega().succ()).unwrap();
        assert_eq!(derive(&jw1, &Ordinal::omega()), SpaceTerm::Pt);
        // Identity at 0.
        assert_eq!(derive(&j(3), &Ordinal::zero()), j(3));
        // i(4) at 3 is the top point.
        assert_eq!(derive(&build_i(4), &Ordinal::from_u64(3)), SpaceTerm::Pt);
        // Cross-check the ω stage by iterating single steps below it.
        let mut t = jw1;
        for _ in 0..10 {
            t = derivative(&t);
            assert!(!t.is_empty());
        }
    }

    #[test]
    fn derive_jlim_shifts_by_left_subtraction() {
        let w2 = Countable::omega().add(&Countable::omega());
        let x = SpaceTerm::Jlim(w2);
        assert_eq!(
            derive(&x, &Ordinal::omega()),
            SpaceTerm::Jlim(Countable::omega())
        );
        assert_eq!(derive(&x, &Ordinal::from_u64(5)), x);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(j(2).rank(), Ordinal::from_u64(2));
        assert_eq!(SpaceTerm::Empty.rank(), Ordinal::zero());
        let c = SpaceTerm::cone(SpaceTerm::times(Omega, jw())).unwrap();
        assert_eq!(c.rank(), Ordinal::omega().succ());
        assert_eq!(SpaceTerm::ISumOmega.rank(), Ordinal::omega());
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(
            truncate(&j(3), &Ordinal::one()),
            SpaceTerm::times(Omega1, SpaceTerm::Pt)
        );
        assert_eq!(truncate(&SpaceTerm::Pt, &Ordinal::zero()), SpaceTerm::Empty);
        assert_eq!(truncate(&build_i(2), &Ordinal::from_u64(2)), build_i(2));
        // Whole-term and empty boundaries.
        let x = j(3);
        assert_eq!(truncate(&x, &x.rank()), x);
        assert_eq!(truncate(&x, &Ordinal::zero()), SpaceTerm::Empty);
    }

    #[test]
    fn truncate_limit_primitives() {
        // J(ω) below 2: members J(1), J(2) whole, the rest collapse.
        let t = truncate(&jw(), &Ordinal::from_u64(2));
        let expected = SpaceTerm::sum(vec![
            (Fin(1), SpaceTerm::Pt),
            (Omega1, j(2)),
        ]);
        assert_eq!(t, expected);
        // The ω-indexed minimal sum below 2.
        let t = truncate(&SpaceTerm::ISumOmega, &Ordinal::from_u64(2));
        let expected = SpaceTerm::sum(vec![
            (Fin(1), SpaceTerm::Pt),
            (Omega1, build_i(2)),
        ]);
        assert_eq!(t, expected);
    }

    #[test]
    fn card_examples() {
        assert_eq!(card_at(&j(2), &Ordinal::one()), Fin(1));
        assert_eq!(card_at(&jw(), &Ordinal::zero()), Omega1);
        assert_eq!(
            card_at(&SpaceTerm::times(Omega, SpaceTerm::Pt), &Ordinal::one()),
            Fin(0)
        );
    }

    #[test]
    fn vanishing_iff_rank() {
        let terms = [
            SpaceTerm::Pt,
            j(3),
            build_i(4),
            jw(),
            SpaceTerm::ISumOmega,
            SpaceTerm::sum(vec![(Omega, build_i(2)), (Fin(2), j(2))]),
        ];
        for t in &terms {
            let r = t.rank();
            assert!(derive(t, &r).is_empty(), "term {t}");
            if let Some(n) = r.as_u64() {
                if n > 0 {
                    assert!(!derive(t, &Ordinal::from_u64(n - 1)).is_empty(), "term {t}");
                }
            } else if !r.is_zero() {
                assert!(!derive(t, &Ordinal::zero()).is_empty());
            }
        }
    }
}
