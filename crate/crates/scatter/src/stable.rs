//! Stable sets, rewrite normalization, and homeomorphism of terms.
//!
//! Normal forms are sums of *stable* building blocks: a point, or a cone
//! whose slice is a saturated sum (every non-primitive multiplicity inside a
//! slice is ω or ω₁) reduced under absorption. The rewrites:
//!
//! - flatten/merge/sort (maintained by the sum constructor),
//! - saturate: inside a slice, a finite multiplicity k ≥ 1 becomes ω
//!   (regrouping ω consecutive slices of the P-base),
//! - base-shift absorption: a cone swallows any clopen part that fits into
//!   countably many of its own slices,
//! - tower collapse: any number of copies of `J(λ)` is one copy, countably
//!   many copies of the minimal ω-indexed sum is one copy, and a `J(λ)`
//!   summand swallows every lower maximal tower.
//!
//! Each rewrite is backed by a homeomorphism, so equal normal forms denote
//! homeomorphic spaces; the decision procedure cross-checks the converse on
//! the corpus.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::mult::{Fin, Mult, Omega, Omega1};
use crate::ordinal::{Countable, Ordinal};
use crate::term::SpaceTerm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StableError {
    #[error("stable enumeration level must be >= 1")]
    ZeroLevel,
    #[error("stable enumeration level {0} is too large to materialize")]
    LevelTooLarge(u32),
    #[error("term has rank above the requested bound")]
    RankOverflow,
    #[error("normal form contains a summand outside the stable basis")]
    NotInBasis,
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

thread_local! {
    static NORMAL_MEMO: RefCell<HashMap<SpaceTerm, SpaceTerm>> = RefCell::new(HashMap::new());
}

/// Confluent normal form under the rewrite system.
pub fn normalize(x: &SpaceTerm) -> SpaceTerm {
    if let Some(hit) = NORMAL_MEMO.with(|m| m.borrow().get(x).cloned()) {
        return hit;
    }
    let out = match x {
        SpaceTerm::Empty | SpaceTerm::Pt | SpaceTerm::Jlim(_) | SpaceTerm::ISumOmega => x.clone(),
        SpaceTerm::Cone(s) => SpaceTerm::Cone(Box::new(normalize_slice(s))),
        SpaceTerm::Sum(es) => norm_sum(es.clone(), false),
    };
    NORMAL_MEMO.with(|m| m.borrow_mut().insert(x.clone(), out.clone()));
    out
}

/// Normal form of a cone slice: normalized, saturated, absorption-reduced.
pub fn normalize_slice(s: &SpaceTerm) -> SpaceTerm {
    match normalize(s) {
        SpaceTerm::Sum(es) => norm_sum(es, true),
        other => norm_sum(other.entries(), true),
    }
}

fn saturate_entry(k: Mult, t: &SpaceTerm) -> Mult {
    match t {
        SpaceTerm::Jlim(_) | SpaceTerm::ISumOmega => k,
        _ => match k {
            Fin(n) if n >= 1 => Omega,
            other => other,
        },
    }
}

fn collapse_entry(k: Mult, t: &SpaceTerm) -> Mult {
    match t {
        SpaceTerm::Jlim(_) => Fin(1),
        SpaceTerm::ISumOmega if k.is_countable() => Fin(1),
        _ => k,
    }
}

fn norm_sum(entries: Vec<(Mult, SpaceTerm)>, slice_mode: bool) -> SpaceTerm {
    let mut cur: Vec<(Mult, SpaceTerm)> = entries
        .into_iter()
        .map(|(k, t)| (k, normalize(&t)))
        .collect();
    loop {
        // Canonical shape first: flatten, merge, sort.
        let built = SpaceTerm::sum(cur.clone());
        let mut es = built.entries();
        if slice_mode {
            for e in es.iter_mut() {
                e.0 = saturate_entry(e.0, &e.1);
            }
        }
        for e in es.iter_mut() {
            e.0 = collapse_entry(e.0, &e.1);
        }
        // Re-merge after multiplicity edits.
        let built = SpaceTerm::sum(es);
        let mut es = built.entries();
        let before = es.clone();

        let absorbed = absorption_pass(&mut es);
        if !absorbed && es == before {
            return SpaceTerm::sum(es);
        }
        cur = es;
    }
}

/// One absorption sweep; true if anything was removed.
fn absorption_pass(es: &mut Vec<(Mult, SpaceTerm)>) -> bool {
    // Absorber candidates, largest rank first so that deep cones eat early.
    let mut order: Vec<usize> = (0..es.len()).collect();
    order.sort_by(|&a, &b| es[b].1.rank().cmp(&es[a].1.rank()));
    for &ai in &order {
        let (absorber_mult, absorber) = es[ai].clone();
        if absorber_mult.is_zero() {
            continue;
        }
        let mut victim: Option<usize> = None;
        for (bi, (k, f)) in es.iter().enumerate() {
            if bi == ai || k.is_zero() {
                continue;
            }
            if absorbs(&absorber, *k, f) {
                victim = Some(bi);
                break;
            }
        }
        if let Some(bi) = victim {
            es.remove(bi);
            return true;
        }
    }
    false
}

/// Can one copy of `absorber` swallow the clopen part `k·f`?
fn absorbs(absorber: &SpaceTerm, k: Mult, f: &SpaceTerm) -> bool {
    match absorber {
        SpaceTerm::Cone(t) => {
            if f.rank() >= absorber.rank() {
                return false;
            }
            // Base shift: the cone absorbs anything that vanishes into
            // countably many of its own slices.
            let omega_slices = normalize(&SpaceTerm::times(Omega, (**t).clone()));
            let with_extra = normalize(&SpaceTerm::sum(vec![
                (k, f.clone()),
                (Fin(1), omega_slices.clone()),
            ]));
            with_extra == omega_slices
        }
        SpaceTerm::Jlim(beta) => match as_j_tower(f) {
            Some(gamma) => gamma < *beta,
            None => false,
        },
        SpaceTerm::ISumOmega => k.is_countable() && as_i_tower(f).is_some(),
        _ => false,
    }
}

/// Recognizes the normal form of a maximal tower; returns its rank index.
pub fn as_j_tower(t: &SpaceTerm) -> Option<Countable> {
    match t {
        SpaceTerm::Pt => Some(Countable::one()),
        SpaceTerm::Jlim(l) => Some(l.clone()),
        SpaceTerm::Cone(s) => {
            let inner = match &**s {
                SpaceTerm::Jlim(l) => Some(l.clone()),
                SpaceTerm::Sum(es) if es.len() == 1 && es[0].0 == Omega1 => as_j_tower(&es[0].1),
                _ => None,
            }?;
            Some(inner.succ())
        }
        _ => None,
    }
}

/// Recognizes the normal form of a minimal tower; returns its height.
pub fn as_i_tower(t: &SpaceTerm) -> Option<u64> {
    match t {
        SpaceTerm::Pt => Some(1),
        SpaceTerm::Cone(s) => match &**s {
            SpaceTerm::Sum(es) if es.len() == 1 && es[0].0 == Omega => {
                as_i_tower(&es[0].1).map(|n| n + 1)
            }
            _ => None,
        },
        _ => None,
    }
}

/// True iff the two terms denote homeomorphic spaces (normal forms equal).
pub fn is_homeo(x: &SpaceTerm, y: &SpaceTerm) -> bool {
    normalize(x) == normalize(y)
}

// ---------------------------------------------------------------------------
// Single-step rewriting (used by the confluence suite)
// ---------------------------------------------------------------------------

/// All terms reachable from `x` by one applicable rewrite, in a fixed order.
///
/// The sum constructor silently maintains flattening and merging, so the
/// enumerated steps are saturation, tower collapse, and single absorptions,
/// at any depth.
pub fn rewrite_candidates(x: &SpaceTerm) -> Vec<SpaceTerm> {
    let mut out = Vec::new();
    step_term(x, false, &mut |t2| out.push(t2));
    out
}

fn step_term(x: &SpaceTerm, slice_mode: bool, emit: &mut dyn FnMut(SpaceTerm)) {
    match x {
        SpaceTerm::Empty | SpaceTerm::Pt | SpaceTerm::Jlim(_) | SpaceTerm::ISumOmega => {}
        SpaceTerm::Cone(s) => {
            step_sum_like(s, true, &mut |s2| emit(SpaceTerm::Cone(Box::new(s2))));
        }
        SpaceTerm::Sum(_) => step_sum_like(x, slice_mode, emit),
    }
}

fn step_sum_like(x: &SpaceTerm, slice_mode: bool, emit: &mut dyn FnMut(SpaceTerm)) {
    let es = x.entries();
    if es.is_empty() {
        return;
    }
    // Rewrites inside one entry.
    for (i, (k, t)) in es.iter().enumerate() {
        let mut inner = |t2: SpaceTerm| {
            let mut es2 = es.clone();
            es2[i] = (*k, t2);
            emit(SpaceTerm::sum(es2));
        };
        step_term(t, false, &mut inner);
    }
    // Multiplicity rewrites on entries.
    for (i, (k, t)) in es.iter().enumerate() {
        if slice_mode {
            let k2 = saturate_entry(*k, t);
            if k2 != *k {
                let mut es2 = es.clone();
                es2[i] = (k2, t.clone());
                emit(SpaceTerm::sum(es2));
            }
        }
        let k3 = collapse_entry(*k, t);
        if k3 != *k {
            let mut es2 = es.clone();
            es2[i] = (k3, t.clone());
            emit(SpaceTerm::sum(es2));
        }
    }
    // Absorptions between entries.
    for ai in 0..es.len() {
        for bi in 0..es.len() {
            if ai == bi {
                continue;
            }
            let (k, f) = &es[bi];
            if absorbs(&es[ai].1, *k, f) {
                let mut es2 = es.clone();
                es2.remove(bi);
                emit(SpaceTerm::sum(es2));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Stable basis enumeration and canonical vectors
// ---------------------------------------------------------------------------

/// The finitely many stable normal forms of each rank level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableBasis {
    pub rank_bound: u32,
    /// All elements of levels `1..=rank_bound`, rank-major, canonical order.
    pub elements: Vec<SpaceTerm>,
    level_sizes: Vec<usize>,
}

impl StableBasis {
    pub fn level(&self, k: u32) -> &[SpaceTerm] {
        let k = k as usize;
        let start: usize = self.level_sizes[..k - 1].iter().sum();
        &self.elements[start..start + self.level_sizes[k - 1]]
    }

    pub fn level_size(&self, k: u32) -> usize {
        self.level_sizes[k as usize - 1]
    }

    pub fn index_of(&self, t: &SpaceTerm) -> Option<usize> {
        self.elements.iter().position(|e| e == t)
    }
}

/// Enumerates all stable normal forms with rank ≤ n.
///
/// Level 1 is the point; level k+1 ranges over cones whose slices are
/// saturated sums over the lower levels with a rank-k component, quotiented
/// by slice normal form. Candidate slices grow triple-exponentially, so
/// levels whose candidate space cannot be materialized are rejected.
pub fn enumerate_stable(n: u32) -> Result<StableBasis, StableError> {
    if n == 0 {
        return Err(StableError::ZeroLevel);
    }
    let mut elements: Vec<SpaceTerm> = vec![SpaceTerm::Pt];
    let mut level_sizes = vec![1usize];
    for level in 2..=n {
        let lower = elements.clone();
        let m = lower.len();
        if m > 15 {
            return Err(StableError::LevelTooLarge(level));
        }
        let prev_level_start = m - level_sizes[level as usize - 2];
        let mut slices: Vec<SpaceTerm> = Vec::new();
        // Ternary counter over {0, ω, ω₁}^m.
        let total = 3usize.pow(m as u32);
        for code in 0..total {
            let mut c = code;
            let mut entries: Vec<(Mult, SpaceTerm)> = Vec::new();
            let mut has_top_rank = false;
            for (j, f) in lower.iter().enumerate() {
                let tau = match c % 3 {
                    0 => Fin(0),
                    1 => Omega,
                    _ => Omega1,
                };
                c /= 3;
                if !tau.is_zero() {
                    if j >= prev_level_start {
                        has_top_rank = true;
                    }
                    entries.push((tau, f.clone()));
                }
            }
            if !has_top_rank {
                continue;
            }
            let slice = normalize_slice(&SpaceTerm::sum(entries));
            // Absorption may have erased the top-rank component; the cone
            // then duplicates a lower level and is skipped.
            let top_rank = Ordinal::from_u64(u64::from(level) - 1);
            if slice.rank() != top_rank {
                continue;
            }
            if !slices.contains(&slice) {
                slices.push(slice);
            }
        }
        slices.sort_by(|a, b| a.cmp_canonical(b));
        let mut new_elems: Vec<SpaceTerm> = slices
            .into_iter()
            .map(|s| SpaceTerm::Cone(Box::new(s)))
            .collect();
        level_sizes.push(new_elems.len());
        elements.append(&mut new_elems);
    }
    Ok(StableBasis {
        rank_bound: n,
        elements,
        level_sizes,
    })
}

/// The count vector of a finite-rank term over a stable basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonVector {
    pub counts: Vec<Mult>,
}

impl CanonVector {
    /// Coordinate-wise order.
    pub fn le(&self, other: &CanonVector) -> bool {
        self.counts.len() == other.counts.len()
            && self
                .counts
                .iter()
                .zip(other.counts.iter())
                .all(|(a, b)| a <= b)
    }
}

/// Decomposes a finite-rank term over the stable basis of the given bound.
pub fn canon_vector(
    x: &SpaceTerm,
    basis: &StableBasis,
) -> Result<CanonVector, StableError> {
    let r = x.rank();
    if r > Ordinal::from_u64(u64::from(basis.rank_bound)) {
        return Err(StableError::RankOverflow);
    }
    let nf = normalize(x);
    let mut counts = vec![Mult::ZERO; basis.elements.len()];
    for (k, f) in nf.entries() {
        let idx = basis.index_of(&f).ok_or(StableError::NotInBasis)?;
        counts[idx] = counts[idx].add(k);
    }
    Ok(CanonVector { counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{build_i, build_j};

    fn j(n: u64) -> SpaceTerm {
        build_j(&Ordinal::from_u64(n)).unwrap()
    }
    fn jw() -> SpaceTerm {
        SpaceTerm::Jlim(Countable::omega())
    }

    #[test]
    fn normalize_spec_examples() {
        // J(3) ⊕ ω₁·J(2) collapses into J(3).
        let x = SpaceTerm::sum(vec![(Fin(1), j(3)), (Omega1, j(2))]);
        assert_eq!(normalize(&x), normalize(&j(3)));
        // ω₁·J(ω) is J(ω).
        let y = SpaceTerm::times(Omega1, jw());
        assert_eq!(normalize(&y), jw());
        // i(2) ⊕ ω·pt is i(2).
        let z = SpaceTerm::sum(vec![(Fin(1), build_i(2)), (Omega, SpaceTerm::Pt)]);
        assert_eq!(normalize(&z), normalize(&build_i(2)));
    }

    #[test]
    fn saturation_is_slice_internal_only() {
        // Top-level finite multiplicities survive.
        let x = SpaceTerm::times(Fin(3), j(2));
        assert_eq!(normalize(&x), x);
        // Slice-internal finite multiplicities saturate to ω.
        let c = SpaceTerm::cone(SpaceTerm::times(Fin(1), SpaceTerm::Pt)).unwrap();
        assert_eq!(normalize(&c), build_i(2));
    }

    #[test]
    fn distinct_types_stay_distinct() {
        // i(2), i(2) ⊕ ω₁·pt, J(2): three distinct normal forms.
        let a = normalize(&build_i(2));
        let b = normalize(&SpaceTerm::sum(vec![
            (Fin(1), build_i(2)),
            (Omega1, SpaceTerm::Pt),
        ]));
        let c = normalize(&j(2));
        assert_ne!(a, b);
        assert_ne!(b, c);
        assert_ne!(a, c);
        // The ω₁-discrete part is not swallowed by i(2)'s countable slices.
        assert!(matches!(b, SpaceTerm::Sum(_)));
    }

    #[test]
    fn j_tower_recognition() {
        assert_eq!(as_j_tower(&SpaceTerm::Pt), Some(Countable::one()));
        assert_eq!(as_j_tower(&j(2)), Some(Countable::from_u64(2)));
        assert_eq!(as_j_tower(&jw()), Some(Countable::omega()));
        let jw1 = normalize(&build_j(&Ordinal::omega().succ()).unwrap());
        assert_eq!(as_j_tower(&jw1), Some(Countable::omega().succ()));
        assert_eq!(as_j_tower(&build_i(2)), None);
        assert_eq!(as_i_tower(&build_i(3)), Some(3));
        assert_eq!(as_i_tower(&j(2)), None);
    }

    #[test]
    fn jlim_absorbs_lower_towers() {
        let x = SpaceTerm::sum(vec![
            (Fin(1), jw()),
            (Omega1, j(3)),
            (Omega1, SpaceTerm::Pt),
        ]);
        assert_eq!(normalize(&x), jw());
        // But not the countable-slice towers.
        let y = SpaceTerm::sum(vec![(Fin(1), jw()), (Fin(1), build_i(2))]);
        assert!(matches!(normalize(&y), SpaceTerm::Sum(_)));
    }

    #[test]
    fn isum_absorbs_countable_i_stuff() {
        let x = SpaceTerm::sum(vec![
            (Fin(1), SpaceTerm::ISumOmega),
            (Omega, build_i(5)),
            (Fin(7), SpaceTerm::Pt),
        ]);
        assert_eq!(normalize(&x), SpaceTerm::ISumOmega);
        // ω₁ copies stay outside.
        let y = SpaceTerm::sum(vec![(Fin(1), SpaceTerm::ISumOmega), (Omega1, build_i(2))]);
        assert!(matches!(normalize(&y), SpaceTerm::Sum(_)));
        // Countably many whole copies collapse to one.
        let z = SpaceTerm::times(Omega, SpaceTerm::ISumOmega);
        assert_eq!(normalize(&z), SpaceTerm::ISumOmega);
    }

    #[test]
    fn idempotence() {
        let samples = [
            SpaceTerm::sum(vec![(Fin(2), j(3)), (Omega, build_i(4)), (Omega1, j(2))]),
            SpaceTerm::cone(SpaceTerm::sum(vec![
                (Fin(3), build_i(2)),
                (Omega1, SpaceTerm::Pt),
            ]))
            .unwrap(),
            SpaceTerm::sum(vec![(Fin(1), jw()), (Omega1, build_i(3))]),
        ];
        for s in &samples {
            let n1 = normalize(s);
            assert_eq!(normalize(&n1), n1);
        }
    }

    #[test]
    fn stable_level_counts() {
        let b = enumerate_stable(3).unwrap();
        assert_eq!(b.level_size(1), 1);
        assert_eq!(b.level_size(2), 2);
        assert_eq!(b.level(1), &[SpaceTerm::Pt]);
        // Level 2 in canonical order: countable-slice tower first.
        assert_eq!(b.level(2)[0], build_i(2));
        assert_eq!(b.level(2)[1], j(2));
        // Level 3 is computed; the acceptance suite pins the count against
        // an independent oracle.
        assert!(b.level_size(3) > 2);
        // Determinism.
        let b2 = enumerate_stable(3).unwrap();
        assert_eq!(b, b2);
    }

    #[test]
    fn canon_vector_examples() {
        let basis = enumerate_stable(2).unwrap();
        // i(2) ⊕ ω₁·pt: nothing absorbs.
        let x = SpaceTerm::sum(vec![(Fin(1), build_i(2)), (Omega1, SpaceTerm::Pt)]);
        let v = canon_vector(&x, &basis).unwrap();
        assert_eq!(v.counts, vec![Omega1, Fin(1), Fin(0)]);
        // pt alone.
        let v = canon_vector(&SpaceTerm::Pt, &basis).unwrap();
        assert_eq!(v.counts, vec![Fin(1), Fin(0), Fin(0)]);
        // J(2) ⊕ ω₁·pt: the ω₁-slice cone absorbs the discrete part.
        let y = SpaceTerm::sum(vec![(Fin(1), j(2)), (Omega1, SpaceTerm::Pt)]);
        let v = canon_vector(&y, &basis).unwrap();
        assert_eq!(v.counts, vec![Fin(0), Fin(0), Fin(1)]);
        // Rank overflow.
        assert!(canon_vector(&j(3), &basis).is_err());
    }
}
