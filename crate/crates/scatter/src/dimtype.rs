//! The dimensional-type order: does one space embed into another?
//!
//! Three-valued decisions. `Proved` carries a certificate tree whose nodes
//! are checkable rule applications; `Refuted` carries a measured invariant
//! violation that can be re-verified independently; `Unknown` is the honest
//! fallback when the budget runs out or the rule calculus is silent.
//!
//! The prover works over normalized terms. A cone source embeds exactly when
//! its slice embeds into countably many slices of some host cone position of
//! the target, so the generic engine routes every cone summand to a host
//! position and checks a capacity transport. Fast paths decide tower-shaped
//! queries by rank comparison alone.
//!
//! The refuter measures rank, level cardinalities, a family of wideness
//! counts (points at which ω₁-many wide points of a lower grade pile up in
//! every neighborhood base) and detachment counts (points with an ω₁-sized
//! clopen set bounded away). All are monotone under embeddings.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::cb::{card, card_at, derive};
use crate::mult::{Fin, Mult, Omega, Omega1};
use crate::ordinal::{Countable, Ordinal};
use crate::stable::{as_i_tower, as_j_tower, normalize, CanonVector};
use crate::term::SpaceTerm;

// ---------------------------------------------------------------------------
// Decisions, certificates, witnesses
// ---------------------------------------------------------------------------

/// Named fast-path rules (rank-arithmetic shortcuts for tower shapes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremTag {
    /// Finite-rank elementary set into the maximal tower of its rank.
    P8,
    /// Maximal tower J(n+1) into any space with a point of level 2n.
    P9,
    /// Rank-ω spaces all share the dimensional type of J(ω).
    P14,
    /// Elementary set of rank α+1 into J(α+1).
    P15,
    /// Anything of rank ≤ β into J(β), for limit β.
    P17,
    /// J(β+n) into any space of rank ≥ β+2n−1; rank-β spaces carry J(β).
    P18,
    /// Elementary sets of rank β+1 over a limit β are all equivalent.
    P19,
    /// Rank ω+1 elementary sets are all equivalent.
    C16,
    /// Embedding lifts from the λ-th derivatives.
    L25,
    /// A rank λ+n elementary set contains a copy of J(λ+1).
    L25a,
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TheoremTag::P8 => "P8",
            TheoremTag::P9 => "P9",
            TheoremTag::P14 => "P14",
            TheoremTag::P15 => "P15",
            TheoremTag::P17 => "P17",
            TheoremTag::P18 => "P18",
            TheoremTag::P19 => "P19",
            TheoremTag::C16 => "C16",
            TheoremTag::L25 => "L25",
            TheoremTag::L25a => "L25a",
        };
        write!(f, "{s}")
    }
}

/// How one source summand class is placed in the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    /// A discrete class: fits among the target's points.
    Isolated { class: SpaceTerm, mult: Mult },
    /// A limit-rank primitive class: needs only target rank.
    LimitPack { class: SpaceTerm, mult: Mult },
    /// Cone copies placed top-to-top on a host position with this slice.
    TopUser {
        class: SpaceTerm,
        mult: Mult,
        host_slice: SpaceTerm,
        sub: Box<Certificate>,
    },
}

/// A checkable embedding proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Equal normal forms.
    Reflexivity,
    /// Composition through a middle term.
    Transitivity {
        mid: SpaceTerm,
        first: Box<Certificate>,
        second: Box<Certificate>,
    },
    /// Cone into cone, top to top: the slice goes into ω·(target slice).
    ConeToCone(Box<Certificate>),
    /// Whole source into the ω₁ slices of a cone, avoiding the top.
    IntoSlices(Box<Certificate>),
    /// Class-by-class placement over host positions.
    SumTransport { routes: Vec<Route> },
    /// A rank-arithmetic rule.
    FastPath {
        tag: TheoremTag,
        lambda: Option<Ordinal>,
        sub: Option<Box<Certificate>>,
    },
}

/// Which monotone measure a refutation compares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureKind {
    /// Cardinality of the level-α derivative.
    Card,
    /// Points of wideness grade k over base level β, counted at level ≥ α.
    Wide { depth: u32, base: Ordinal },
    /// Points with an ω₁-sized clopen set bounded away from them.
    Detach,
}

/// A re-checkable invariant violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefutationWitness {
    RankDrop {
        source: Ordinal,
        target: Ordinal,
    },
    CardDrop {
        at_derivative: Ordinal,
        level: Ordinal,
        source: Mult,
        target: Mult,
    },
    SegmentDrop {
        measure: MeasureKind,
        at_derivative: Ordinal,
        level: Ordinal,
        source: Mult,
        target: Mult,
    },
}

/// Verdict of an embeddability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Proved(Certificate),
    Refuted(RefutationWitness),
    Unknown { budget_spent: u64 },
}

impl Decision {
    pub fn is_proved(&self) -> bool {
        matches!(self, Decision::Proved(_))
    }
    pub fn is_refuted(&self) -> bool {
        matches!(self, Decision::Refuted(_))
    }
    pub fn is_unknown(&self) -> bool {
        matches!(self, Decision::Unknown { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimtypeError {
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("capacity arguments must be stable basis elements")]
    NotStable,
    #[error("capacity query hit the budget")]
    CapacityUnknown,
    #[error("vectors must share one basis")]
    MixedBases,
}

// ---------------------------------------------------------------------------
// Monotone measures
// ---------------------------------------------------------------------------

/// Number of points of wideness grade `k` over base `beta`, at level ≥
/// `alpha`.
///
/// Grade 0 wideness over β is just "level ≥ β". A point has grade k+1 when
/// no decreasing clopen neighborhood base has all slices with countably many
/// grade-k points. Embeddings preserve grades and never lower levels, so
/// each of these counts is monotone along embeddings.
pub fn wide_count(t: &SpaceTerm, k: u32, beta: &Ordinal, alpha: &Ordinal) -> Mult {
    if k == 0 {
        let level = beta.max(alpha);
        return card_at(t, level);
    }
    match t {
        SpaceTerm::Empty | SpaceTerm::Pt => Fin(0),
        SpaceTerm::Sum(es) => Mult::sum(
            es.iter()
                .map(|(m, u)| m.mul(wide_count(u, k, beta, alpha))),
        ),
        SpaceTerm::Cone(s) => {
            let inner = Omega1.mul(wide_count(s, k, beta, alpha));
            let top_wide = wide_count(s, k - 1, beta, &Ordinal::zero()) == Omega1;
            let top_level_ok = s.rank() >= *alpha;
            let top = if top_wide && top_level_ok { Fin(1) } else { Fin(0) };
            inner.add(top)
        }
        SpaceTerm::Jlim(l) => {
            // Tops of nested towers J(δ+1) at level δ are wide at grade k
            // once δ clears β+k; positions repeat ω₁-fold below the family
            // bound.
            let lam = Ordinal::from_countable(l.clone());
            let mstar = beta.add(&Ordinal::from_u64(u64::from(k))).max(alpha.clone());
            if lam > mstar.add(&Ordinal::from_u64(2)) {
                Omega1
            } else if lam > mstar.add(&Ordinal::from_u64(1)) {
                Fin(1)
            } else {
                Fin(0)
            }
        }
        SpaceTerm::ISumOmega => {
            // Minimal towers need two extra levels per wideness grade.
            if beta.as_u64().is_some() && alpha.as_u64().is_some() {
                Omega1
            } else {
                Fin(0)
            }
        }
    }
}

fn dec(m: Mult) -> Mult {
    match m {
        Fin(n) => Fin(n.saturating_sub(1)),
        other => other,
    }
}

/// Number of points at level ≥ `alpha` that have an ω₁-sized clopen set
/// bounded away from them; `outside` is the cardinality of the rest of the
/// ambient space.
pub fn detach_count(t: &SpaceTerm, outside: Mult, alpha: &Ordinal) -> Mult {
    match t {
        SpaceTerm::Empty => Fin(0),
        SpaceTerm::Pt => {
            if alpha.is_zero() && outside == Omega1 {
                Fin(1)
            } else {
                Fin(0)
            }
        }
        SpaceTerm::Sum(es) => {
            let cards: Vec<Mult> = es.iter().map(|(m, u)| m.mul(card(u))).collect();
            let mut acc = Fin(0);
            for (j, (m, u)) in es.iter().enumerate() {
                // Everything outside one copy of this summand: the ambient
                // rest, the other classes, and sibling copies.
                let others = Mult::sum(
                    cards
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != j)
                        .map(|(_, c)| *c),
                )
                .add(outside)
                .add(dec(*m).mul(card(u)));
                acc = acc.add(m.mul(detach_count(u, others, alpha)));
            }
            acc
        }
        SpaceTerm::Cone(s) => {
            // Every slice point has the clopen tail of the base detached
            // (ω₁ points); the top detaches a slice only when slices are
            // uncountable, or inherits the ambient chunk.
            let inner = Omega1.mul(card_at(s, alpha));
            let top_heavy = outside == Omega1 || card(s) == Omega1;
            let top = if top_heavy && s.rank() >= *alpha {
                Fin(1)
            } else {
                Fin(0)
            };
            inner.add(top)
        }
        // Member sums: every point sits in a clopen member with ω₁-sized
        // clopen complement inside the family.
        SpaceTerm::Jlim(_) | SpaceTerm::ISumOmega => card_at(t, alpha),
    }
}

/// Probe levels: limit bases occurring in either term, padded by the finite
/// offsets in play.
fn probe_levels(x: &SpaceTerm, y: &SpaceTerm) -> Vec<Ordinal> {
    let mut bases: BTreeSet<Ordinal> = BTreeSet::new();
    bases.insert(Ordinal::zero());
    let mut maxfin: u64 = 0;
    for t in [x, y] {
        collect_bases(t, &mut bases, &mut maxfin);
    }
    let maxfin = maxfin.min(10) + 2;
    let mut out: BTreeSet<Ordinal> = BTreeSet::new();
    for b in bases {
        for j in 0..=maxfin {
            out.insert(b.add(&Ordinal::from_u64(j)));
        }
    }
    out.into_iter().collect()
}

fn collect_bases(t: &SpaceTerm, bases: &mut BTreeSet<Ordinal>, maxfin: &mut u64) {
    let r = t.rank();
    bases.insert(r.limit_part());
    *maxfin = (*maxfin).max(r.finite_part());
    match t {
        SpaceTerm::Sum(es) => {
            for (_, u) in es {
                collect_bases(u, bases, maxfin);
            }
        }
        SpaceTerm::Cone(s) => collect_bases(s, bases, maxfin),
        _ => {}
    }
}

/// Searches the measure grid for a monotonicity violation.
pub fn refute(x: &SpaceTerm, y: &SpaceTerm) -> Option<RefutationWitness> {
    let rx = x.rank();
    let ry = y.rank();
    if rx > ry {
        return Some(RefutationWitness::RankDrop {
            source: rx,
            target: ry,
        });
    }
    // Derivative probes: the zero stage plus limit stages below the source
    // rank (an embedding maps the λ-th derivative into the λ-th derivative).
    let mut stages: Vec<Ordinal> = vec![Ordinal::zero()];
    for b in probe_levels(x, y) {
        if b.is_limit() && b < rx {
            stages.push(b);
        }
    }
    for stage in stages {
        let dx = derive(x, &stage);
        let dy = derive(y, &stage);
        let levels = probe_levels(&dx, &dy);
        let maxk = (dx.height().max(dy.height()) as u32 + 3).min(12);
        for alpha in &levels {
            let cs = card_at(&dx, alpha);
            let ct = card_at(&dy, alpha);
            if cs > ct {
                return Some(RefutationWitness::CardDrop {
                    at_derivative: stage,
                    level: alpha.clone(),
                    source: cs,
                    target: ct,
                });
            }
            let ds = detach_count(&dx, Fin(0), alpha);
            let dt = detach_count(&dy, Fin(0), alpha);
            if ds > dt {
                return Some(RefutationWitness::SegmentDrop {
                    measure: MeasureKind::Detach,
                    at_derivative: stage,
                    level: alpha.clone(),
                    source: ds,
                    target: dt,
                });
            }
        }
        for k in 1..=maxk {
            for beta in &levels {
                for alpha in &levels {
                    let ms = wide_count(&dx, k, beta, alpha);
                    let mt = wide_count(&dy, k, beta, alpha);
                    if ms > mt {
                        return Some(RefutationWitness::SegmentDrop {
                            measure: MeasureKind::Wide {
                                depth: k,
                                base: beta.clone(),
                            },
                            at_derivative: stage,
                            level: alpha.clone(),
                            source: ms,
                            target: mt,
                        });
                    }
                }
            }
        }
    }
    None
}

/// Re-checks a refutation witness against the stated terms.
pub fn verify_witness(w: &RefutationWitness, x: &SpaceTerm, y: &SpaceTerm) -> bool {
    let x = normalize(x);
    let y = normalize(y);
    match w {
        RefutationWitness::RankDrop { source, target } => {
            x.rank() == *source && y.rank() == *target && source > target
        }
        RefutationWitness::CardDrop {
            at_derivative,
            level,
            source,
            target,
        } => {
            let dx = derive(&x, at_derivative);
            let dy = derive(&y, at_derivative);
            card_at(&dx, level) == *source && card_at(&dy, level) == *target && source > target
        }
        RefutationWitness::SegmentDrop {
            measure,
            at_derivative,
            level,
            source,
            target,
        } => {
            let dx = derive(&x, at_derivative);
            let dy = derive(&y, at_derivative);
            let (ms, mt) = match measure {
                MeasureKind::Card => (card_at(&dx, level), card_at(&dy, level)),
                MeasureKind::Wide { depth, base } => (
                    wide_count(&dx, *depth, base, level),
                    wide_count(&dy, *depth, base, level),
                ),
                MeasureKind::Detach => (
                    detach_count(&dx, Fin(0), level),
                    detach_count(&dy, Fin(0), level),
                ),
            };
            ms == *source && mt == *target && source > target
        }
    }
}

// ---------------------------------------------------------------------------
// Host positions
// ---------------------------------------------------------------------------

/// A cone position of the target: a place whose top can host a source cone.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Position {
    slice: SpaceTerm,
    count: Mult,
}

/// Enumerates cone positions with copy counts. `needed_ranks` guides the
/// expansion of the limit-rank primitives, which contain host cones of
/// every smaller rank with ω₁ repetition.
fn positions(t: &SpaceTerm, needed: &BTreeSet<Ordinal>, out: &mut Vec<(SpaceTerm, Mult)>, scale: Mult) {
    match t {
        SpaceTerm::Empty | SpaceTerm::Pt => {}
        SpaceTerm::Sum(es) => {
            for (m, u) in es {
                positions(u, needed, out, scale.mul(*m));
            }
        }
        SpaceTerm::Cone(s) => {
            out.push(((**s).clone(), scale));
            positions(s, needed, out, scale.mul(Omega1));
        }
        SpaceTerm::Jlim(l) => {
            let lam = Ordinal::from_countable(l.clone());
            for r in needed {
                // Host the maximal tower of rank exactly r: slice ω₁·J(r−1).
                if r.is_zero() || *r >= lam {
                    continue;
                }
                if let Some(rc) = r.as_countable() {
                    if rc.finite_part() == 0 {
                        continue; // cone hosts have successor rank
                    }
                    // Predecessor of the successor ordinal rc.
                    let n = rc.finite_part();
                    let prev = rc.limit_part().add(&Countable::from_u64(n - 1));
                    if let Ok(j) = crate::term::build_j_countable(&prev) {
                        if j.is_empty() {
                            continue;
                        }
                        let slice = SpaceTerm::times(Omega1, normalize(&j));
                        out.push((slice, scale.mul(Omega1)));
                    }
                }
            }
        }
        SpaceTerm::ISumOmega => {
            for r in needed {
                if let Some(n) = r.as_u64() {
                    if n < 2 {
                        continue;
                    }
                    // Hosts up to twice the needed rank help (maximal towers
                    // fit into minimal towers of nearly double height).
                    for h in n..=(2 * n).min(24) {
                        let slice =
                            SpaceTerm::times(Omega, normalize(&crate::term::build_i(h - 1)));
                        out.push((slice, scale.mul(Omega1)));
                    }
                }
            }
        }
    }
}

fn host_positions(t: &SpaceTerm, needed: &BTreeSet<Ordinal>) -> Vec<Position> {
    let mut raw = Vec::new();
    positions(t, needed, &mut raw, Fin(1));
    // Merge equal slices.
    let mut merged: Vec<Position> = Vec::new();
    for (slice, count) in raw {
        match merged.iter_mut().find(|p| p.slice == slice) {
            Some(p) => p.count = p.count.add(count),
            None => merged.push(Position { slice, count }),
        }
    }
    merged
}

// ---------------------------------------------------------------------------
// The decision engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Res {
    Proved(Certificate),
    Refuted(RefutationWitness),
    Unknown,
}

thread_local! {
    // Decided facts are budget-independent and shared across queries.
    static DECIDED: RefCell<HashMap<(SpaceTerm, SpaceTerm), Res>> = RefCell::new(HashMap::new());
}

struct Ctx {
    budget: u64,
    spent: u64,
}

impl Ctx {
    fn tick(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        self.spent += 1;
        true
    }
}

/// Decides whether `x` embeds into `y`.
pub fn le_h(x: &SpaceTerm, y: &SpaceTerm, budget: u64) -> Result<Decision, DimtypeError> {
    if budget == 0 {
        return Err(DimtypeError::ZeroBudget);
    }
    let mut ctx = Ctx { budget, spent: 0 };
    let nx = normalize(x);
    let ny = normalize(y);
    Ok(match prove_le(&nx, &ny, &mut ctx) {
        Res::Proved(c) => Decision::Proved(c),
        Res::Refuted(w) => Decision::Refuted(w),
        Res::Unknown => Decision::Unknown {
            budget_spent: ctx.spent,
        },
    })
}

/// Decides mutual embeddability; `Proved` carries both certificates.
pub fn eq_h(x: &SpaceTerm, y: &SpaceTerm, budget: u64) -> Result<(Decision, Decision), DimtypeError> {
    let fwd = le_h(x, y, budget)?;
    let bwd = le_h(y, x, budget)?;
    Ok((fwd, bwd))
}

fn prove_le(x: &SpaceTerm, y: &SpaceTerm, ctx: &mut Ctx) -> Res {
    if x.is_empty() {
        return Res::Proved(Certificate::SumTransport { routes: vec![] });
    }
    if x == y {
        return Res::Proved(Certificate::Reflexivity);
    }
    if let Some(hit) = DECIDED.with(|m| m.borrow().get(&(x.clone(), y.clone())).cloned()) {
        return hit;
    }
    if !ctx.tick() {
        return Res::Unknown;
    }
    let res = prove_le_inner(x, y, ctx);
    if !matches!(res, Res::Unknown) {
        DECIDED.with(|m| {
            m.borrow_mut()
                .insert((x.clone(), y.clone()), res.clone())
        });
    }
    res
}

fn prove_le_inner(x: &SpaceTerm, y: &SpaceTerm, ctx: &mut Ctx) -> Res {
    if let Some(w) = refute(x, y) {
        return Res::Refuted(w);
    }
    if let Some(cert) = fast_paths(x, y, ctx) {
        return Res::Proved(cert);
    }
    // Into-slices shortcut for a cone target whose top is not needed.
    if let SpaceTerm::Cone(t) = y {
        if x.rank() <= t.rank() {
            let widened = normalize(&SpaceTerm::times(Omega1, (**t).clone()));
            if let Res::Proved(sub) = prove_le(x, &widened, ctx) {
                return Res::Proved(Certificate::IntoSlices(Box::new(sub)));
            }
        }
    }
    transport(x, y, ctx)
}

/// Rank-arithmetic fast paths for tower shapes.
fn fast_paths(x: &SpaceTerm, y: &SpaceTerm, ctx: &mut Ctx) -> Option<Certificate> {
    let rx = x.rank();
    let ry = y.rank();

    // Target is a maximal tower J(g).
    if let Some(g) = as_j_tower(y) {
        let go = Ordinal::from_countable(g.clone());
        if rx <= go {
            // Elementary (cone/point) sources of fitting rank.
            if matches!(x, SpaceTerm::Cone(_) | SpaceTerm::Pt) {
                let tag = if g.is_finite() {
                    TheoremTag::P8
                } else {
                    TheoremTag::P15
                };
                return Some(Certificate::FastPath {
                    tag,
                    lambda: None,
                    sub: None,
                });
            }
            // Arbitrary sources fit below a limit index.
            if g.is_limit() {
                return Some(Certificate::FastPath {
                    tag: TheoremTag::P17,
                    lambda: None,
                    sub: None,
                });
            }
        }
    }

    // Source is a maximal tower J(m).
    if let Some(m) = as_j_tower(x) {
        let mu = m.limit_part();
        let n = m.finite_part();
        if n == 0 {
            // Limit index: the tower embeds wherever the rank reaches it.
            if ry >= Ordinal::from_countable(m.clone()) {
                return Some(Certificate::FastPath {
                    tag: TheoremTag::P18,
                    lambda: None,
                    sub: None,
                });
            }
        } else {
            // Successor index μ+n: needs target rank μ+2n−1.
            let need = Ordinal::from_countable(mu.clone()).add(&Ordinal::from_u64(2 * n - 1));
            if ry >= need {
                let tag = if mu.is_zero() {
                    TheoremTag::P9
                } else {
                    TheoremTag::P18
                };
                return Some(Certificate::FastPath {
                    tag,
                    lambda: None,
                    sub: None,
                });
            }
        }
    }

    // Source of limit rank β: route through J(β).
    if rx.is_limit() && ry >= rx {
        if let Some(b) = rx.as_countable() {
            let mid = crate::term::build_j_countable(b).ok()?;
            let mid = normalize(&mid);
            let first = Certificate::FastPath {
                tag: if *b == Countable::omega() {
                    TheoremTag::P14
                } else {
                    TheoremTag::P17
                },
                lambda: None,
                sub: None,
            };
            let second = Certificate::FastPath {
                tag: TheoremTag::P18,
                lambda: None,
                sub: None,
            };
            return Some(Certificate::Transitivity {
                mid,
                first: Box::new(first),
                second: Box::new(second),
            });
        }
    }

    // Elementary source of rank β+1 over a limit β: equivalent to J(β+1).
    if let SpaceTerm::Cone(_) = x {
        if rx.is_successor() {
            let below = rx.limit_part();
            if below.is_limit() && rx == below.succ() && ry >= rx {
                if let Some(b) = rx.as_countable() {
                    let mid = normalize(&crate::term::build_j_countable(b).ok()?);
                    if mid != *x {
                        let tag = if *b == Countable::omega().succ() {
                            TheoremTag::C16
                        } else {
                            TheoremTag::P19
                        };
                        let first = Certificate::FastPath {
                            tag,
                            lambda: None,
                            sub: None,
                        };
                        let second = Certificate::FastPath {
                            tag: TheoremTag::L25a,
                            lambda: None,
                            sub: None,
                        };
                        return Some(Certificate::Transitivity {
                            mid,
                            first: Box::new(first),
                            second: Box::new(second),
                        });
                    }
                }
            }
        }
    }

    // λ-derivative lift: if both sides survive past a limit λ and the λ-th
    // derivatives embed, the embedding lifts (everything below λ rides
    // inside elementary neighborhoods of the surviving points).
    for lam in probe_levels(x, y) {
        if !lam.is_limit() || rx <= lam {
            continue;
        }
        let dx = normalize(&derive(x, &lam));
        let dy = normalize(&derive(y, &lam));
        if dx.is_empty() || (dx == *x && dy == *y) {
            continue;
        }
        if let Res::Proved(sub) = prove_le(&dx, &dy, ctx) {
            return Some(Certificate::FastPath {
                tag: TheoremTag::L25,
                lambda: Some(lam),
                sub: Some(Box::new(sub)),
            });
        }
    }
    None
}

/// Generic placement of source classes over target host positions.
fn transport(x: &SpaceTerm, y: &SpaceTerm, ctx: &mut Ctx) -> Res {
    let entries = x.entries();
    let mut routes: Vec<Route> = Vec::new();
    let mut cone_classes: Vec<(Mult, SpaceTerm, SpaceTerm)> = Vec::new(); // (mult, cone, slice)
    let mut needed: BTreeSet<Ordinal> = BTreeSet::new();

    for (m, f) in &entries {
        match f {
            SpaceTerm::Pt => {
                if *m > card(y) {
                    return Res::Unknown; // rank/card grid should have fired
                }
                routes.push(Route::Isolated {
                    class: f.clone(),
                    mult: *m,
                });
            }
            SpaceTerm::Jlim(b) => {
                if y.rank() < Ordinal::from_countable(b.clone()) {
                    return Res::Unknown;
                }
                routes.push(Route::LimitPack {
                    class: f.clone(),
                    mult: *m,
                });
            }
            SpaceTerm::ISumOmega => {
                if y.rank() < Ordinal::omega() {
                    return Res::Unknown;
                }
                routes.push(Route::LimitPack {
                    class: f.clone(),
                    mult: *m,
                });
            }
            SpaceTerm::Cone(s) => {
                needed.insert(f.rank());
                cone_classes.push((*m, f.clone(), (**s).clone()));
            }
            SpaceTerm::Empty | SpaceTerm::Sum(_) => unreachable!("canonical entries"),
        }
    }

    let hosts = host_positions(y, &needed);

    // Eligibility: class j can sit top-to-top on host q iff its slice
    // embeds into countably many host slices.
    let mut elig: Vec<Vec<Option<Certificate>>> = Vec::new();
    for (_, _, slice) in &cone_classes {
        let mut row = Vec::new();
        for q in &hosts {
            let widened = normalize(&SpaceTerm::times(Omega, q.slice.clone()));
            match prove_le(&normalize(slice), &widened, ctx) {
                Res::Proved(c) => row.push(Some(c)),
                _ => row.push(None),
            }
        }
        elig.push(row);
    }

    match assign(&cone_classes, &hosts, &elig) {
        Some(assignment) => {
            for (j, per_host) in assignment.into_iter().enumerate() {
                for (q, amount) in per_host {
                    let sub = elig[j][q].clone().expect("assigned host is eligible");
                    routes.push(Route::TopUser {
                        class: cone_classes[j].1.clone(),
                        mult: amount,
                        host_slice: hosts[q].slice.clone(),
                        sub: Box::new(sub),
                    });
                }
            }
            // Single cone into single cone, top to top: report the direct
            // rule shape.
            if let (SpaceTerm::Cone(_), SpaceTerm::Cone(t)) = (x, y) {
                if routes.len() == 1 {
                    if let Route::TopUser { host_slice, sub, .. } = &routes[0] {
                        if *host_slice == **t {
                            return Res::Proved(Certificate::ConeToCone(sub.clone()));
                        }
                    }
                }
            }
            Res::Proved(Certificate::SumTransport { routes })
        }
        None => Res::Unknown,
    }
}

/// Capacity assignment: every class fully routed to eligible hosts, host
/// counts respected. Returns per-class lists of (host index, amount).
fn assign(
    classes: &[(Mult, SpaceTerm, SpaceTerm)],
    hosts: &[Position],
    elig: &[Vec<Option<Certificate>>],
) -> Option<Vec<Vec<(usize, Mult)>>> {
    let n = classes.len();
    let mut result: Vec<Vec<(usize, Mult)>> = vec![Vec::new(); n];

    // Uncountable and countably infinite demands ride on an infinite host.
    for (j, (m, _, _)) in classes.iter().enumerate() {
        match m {
            Omega1 => {
                let q = (0..hosts.len()).find(|&q| elig[j][q].is_some() && hosts[q].count == Omega1)?;
                result[j].push((q, Omega1));
            }
            Omega => {
                let q = (0..hosts.len())
                    .find(|&q| elig[j][q].is_some() && hosts[q].count >= Omega)?;
                result[j].push((q, Omega));
            }
            Fin(_) => {}
        }
    }

    // Finite demands: exact bipartite flow against finite host counts, with
    // infinite hosts as unlimited.
    let fins: Vec<usize> = classes
        .iter()
        .enumerate()
        .filter(|(_, (m, _, _))| m.is_finite())
        .map(|(j, _)| j)
        .collect();
    if fins.is_empty() {
        return Some(result);
    }
    let cap_of = |q: usize| -> u64 {
        match hosts[q].count {
            Fin(c) => c,
            _ => u64::MAX / 4,
        }
    };
    // Greedy with augmentation is overkill at this scale; run a small
    // Ford–Fulkerson on the bipartite graph.
    let m = hosts.len();
    let mut flow: Vec<HashMap<usize, u64>> = vec![HashMap::new(); n];
    let mut host_used: Vec<u64> = vec![0; m];
    for &j in &fins {
        let mut need = match classes[j].0 {
            Fin(v) => v,
            _ => unreachable!(),
        };
        while need > 0 {
            // Find an augmenting path from class j to spare host capacity:
            // direct spare, or displace another class's flow.
            let mut parent: Vec<Option<(usize, usize)>> = vec![None; m]; // host -> (class, via host)
            let mut visited_host = vec![false; m];
            let mut queue: Vec<usize> = Vec::new();
            for q in 0..m {
                if elig[j][q].is_some() && !visited_host[q] {
                    visited_host[q] = true;
                    parent[q] = Some((j, usize::MAX));
                    queue.push(q);
                }
            }
            let mut found: Option<usize> = None;
            let mut qi = 0;
            while qi < queue.len() {
                let q = queue[qi];
                qi += 1;
                if host_used[q] < cap_of(q) {
                    found = Some(q);
                    break;
                }
                // Displace: classes with flow on q may move to other hosts.
                for (k, fl) in flow.iter().enumerate() {
                    if fl.get(&q).copied().unwrap_or(0) > 0 {
                        for q2 in 0..m {
                            if !visited_host[q2] && elig[k][q2].is_some() {
                                visited_host[q2] = true;
                                parent[q2] = Some((k, q));
                                queue.push(q2);
                            }
                        }
                    }
                }
            }
            let end = found?;
            // Walk back, shifting one unit along the path.
            let mut q = end;
            loop {
                let (k, via) = parent[q].expect("path");
                *flow[k].entry(q).or_insert(0) += 1;
                host_used[q] += 1;
                if via == usize::MAX {
                    break;
                }
                *flow[k].get_mut(&via).expect("flow present") -= 1;
                host_used[via] -= 1;
                q = via;
            }
            need -= 1;
        }
    }
    for &j in &fins {
        for (q, amount) in &flow[j] {
            if *amount > 0 {
                result[j].push((*q, Fin(*amount)));
            }
        }
    }
    Some(result)
}

// ---------------------------------------------------------------------------
// Certificate verification
// ---------------------------------------------------------------------------

/// Checks every node of a certificate against the actual terms.
pub fn verify_certificate(c: &Certificate, x: &SpaceTerm, y: &SpaceTerm) -> bool {
    let nx = normalize(x);
    let ny = normalize(y);
    verify_cert_nf(c, &nx, &ny)
}

fn verify_cert_nf(c: &Certificate, x: &SpaceTerm, y: &SpaceTerm) -> bool {
    match c {
        Certificate::Reflexivity => x == y,
        Certificate::Transitivity { mid, first, second } => {
            verify_cert_nf(first, x, &normalize(mid)) && verify_cert_nf(second, &normalize(mid), y)
        }
        Certificate::ConeToCone(sub) => match (x, y) {
            (SpaceTerm::Cone(s), SpaceTerm::Cone(t)) => {
                let widened = normalize(&SpaceTerm::times(Omega, (**t).clone()));
                verify_cert_nf(sub, &normalize(s), &widened)
            }
            _ => false,
        },
        Certificate::IntoSlices(sub) => match y {
            SpaceTerm::Cone(t) => {
                let widened = normalize(&SpaceTerm::times(Omega1, (**t).clone()));
                verify_cert_nf(sub, x, &widened)
            }
            _ => false,
        },
        Certificate::SumTransport { routes } => verify_transport(routes, x, y),
        Certificate::FastPath {
            tag: TheoremTag::L25,
            lambda: Some(lam),
            sub: Some(sub),
        } => {
            lam.is_limit()
                && x.rank() > *lam
                && verify_cert_nf(
                    sub,
                    &normalize(&derive(x, lam)),
                    &normalize(&derive(y, lam)),
                )
        }
        Certificate::FastPath { tag, .. } => verify_fast_path(*tag, x, y),
    }
}

fn verify_fast_path(tag: TheoremTag, x: &SpaceTerm, y: &SpaceTerm) -> bool {
    let rx = x.rank();
    let ry = y.rank();
    match tag {
        TheoremTag::P8 | TheoremTag::P15 => {
            matches!(x, SpaceTerm::Cone(_) | SpaceTerm::Pt)
                && as_j_tower(y).is_some()
                && rx <= ry
        }
        TheoremTag::P17 | TheoremTag::P14 => match as_j_tower(y) {
            Some(g) => g.is_limit() && rx <= Ordinal::from_countable(g),
            None => false,
        },
        TheoremTag::P9 | TheoremTag::P18 => match as_j_tower(x) {
            Some(m) => {
                let n = m.finite_part();
                let mu = m.limit_part();
                if n == 0 {
                    ry >= Ordinal::from_countable(m)
                } else {
                    ry >= Ordinal::from_countable(mu).add(&Ordinal::from_u64(2 * n - 1))
                }
            }
            None => false,
        },
        TheoremTag::P19 | TheoremTag::C16 => {
            // Elementary source of rank β+1 over a limit β, equivalent to
            // the equally ranked maximal tower target.
            matches!(x, SpaceTerm::Cone(_))
                && rx.is_successor()
                && rx.limit_part().is_limit()
                && rx == rx.limit_part().succ()
                && as_j_tower(y).map(Ordinal::from_countable) == Some(rx.clone())
        }
        TheoremTag::L25a => {
            // Source is the maximal tower J(β+1), β limit; target rank ≥ β+1.
            match as_j_tower(x) {
                Some(m) => {
                    m.finite_part() == 1
                        && m.limit_part().is_limit()
                        && ry >= Ordinal::from_countable(m)
                }
                None => false,
            }
        }
        TheoremTag::L25 => false, // not emitted standalone
    }
}

fn verify_transport(routes: &[Route], x: &SpaceTerm, y: &SpaceTerm) -> bool {
    let entries = x.entries();
    let mut needed: BTreeSet<Ordinal> = BTreeSet::new();
    for (_, f) in &entries {
        if matches!(f, SpaceTerm::Cone(_)) {
            needed.insert(f.rank());
        }
    }
    let hosts = host_positions(y, &needed);

    // Every class fully covered.
    for (m, f) in &entries {
        let total = Mult::sum(routes.iter().filter_map(|r| match r {
            Route::Isolated { class, mult } if class == f => Some(*mult),
            Route::LimitPack { class, mult } if class == f => Some(*mult),
            Route::TopUser { class, mult, .. } if class == f => Some(*mult),
            _ => None,
        }));
        if total < *m {
            return false;
        }
    }
    // Route side conditions.
    for r in routes {
        match r {
            Route::Isolated { class, mult } => {
                if *class != SpaceTerm::Pt || *mult > card(y) {
                    return false;
                }
            }
            Route::LimitPack { class, mult: _ } => {
                let ok = match class {
                    SpaceTerm::Jlim(b) => y.rank() >= Ordinal::from_countable(b.clone()),
                    SpaceTerm::ISumOmega => y.rank() >= Ordinal::omega(),
                    _ => false,
                };
                if !ok {
                    return false;
                }
            }
            Route::TopUser {
                class,
                mult: _,
                host_slice,
                sub,
            } => {
                let slice = match class {
                    SpaceTerm::Cone(s) => (**s).clone(),
                    _ => return false,
                };
                if !hosts.iter().any(|p| p.slice == *host_slice) {
                    return false;
                }
                let widened = normalize(&SpaceTerm::times(Omega, host_slice.clone()));
                if !verify_cert_nf(sub, &normalize(&slice), &widened) {
                    return false;
                }
            }
        }
    }
    // Host capacities.
    for p in &hosts {
        let used = Mult::sum(routes.iter().filter_map(|r| match r {
            Route::TopUser {
                mult, host_slice, ..
            } if *host_slice == p.slice => Some(*mult),
            _ => None,
        }));
        if used > p.count {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Capacity, Dickson, chains and antichains
// ---------------------------------------------------------------------------

/// Maximal number of pairwise disjoint copies of stable `f` inside stable
/// `g`: none, one through the top, or ω₁ through the slices.
pub fn capacity(f: &SpaceTerm, g: &SpaceTerm, budget: u64) -> Result<Mult, DimtypeError> {
    let nf = normalize(f);
    let ng = normalize(g);
    let stable = |t: &SpaceTerm| matches!(t, SpaceTerm::Pt | SpaceTerm::Cone(_));
    if !stable(&nf) || !stable(&ng) {
        return Err(DimtypeError::NotStable);
    }
    match le_h(&nf, &ng, budget)? {
        Decision::Refuted(_) => Ok(Fin(0)),
        Decision::Unknown { .. } => Err(DimtypeError::CapacityUnknown),
        Decision::Proved(_) => {
            if let SpaceTerm::Cone(t) = &ng {
                match le_h(&nf, t, budget)? {
                    Decision::Proved(_) => Ok(Omega1),
                    Decision::Refuted(_) => Ok(Fin(1)),
                    Decision::Unknown { .. } => Err(DimtypeError::CapacityUnknown),
                }
            } else {
                Ok(Fin(1)) // point into point
            }
        }
    }
}

/// First coordinate-wise increasing pair in a finite vector sequence.
pub fn dickson_find_increasing(
    seq: &[CanonVector],
) -> Result<Option<(usize, usize)>, DimtypeError> {
    let m = match seq.first() {
        Some(v) => v.counts.len(),
        None => return Ok(None),
    };
    if seq.iter().any(|v| v.counts.len() != m) {
        return Err(DimtypeError::MixedBases);
    }
    // Store of current minimal elements, with original indices.
    let mut store: Vec<usize> = Vec::new();
    for (j, v) in seq.iter().enumerate() {
        for &i in &store {
            if seq[i].le(v) {
                return Ok(Some((i, j)));
            }
        }
        store.retain(|&i| !v.le(&seq[i]));
        store.push(j);
    }
    Ok(None)
}

/// Outcome of an antichain check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntichainReport {
    pub comparable: Vec<(usize, usize)>,
    pub unknown: Vec<(usize, usize)>,
}

impl AntichainReport {
    pub fn confirmed(&self) -> bool {
        self.comparable.is_empty() && self.unknown.is_empty()
    }
}

/// Verifies pairwise incomparability.
pub fn check_antichain(terms: &[SpaceTerm], budget: u64) -> Result<AntichainReport, DimtypeError> {
    let mut report = AntichainReport {
        comparable: Vec::new(),
        unknown: Vec::new(),
    };
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            let fwd = le_h(&terms[i], &terms[j], budget)?;
            let bwd = le_h(&terms[j], &terms[i], budget)?;
            if fwd.is_proved() || bwd.is_proved() {
                report.comparable.push((i, j));
            } else if fwd.is_unknown() || bwd.is_unknown() {
                report.unknown.push((i, j));
            }
        }
    }
    Ok(report)
}

/// Outcome of a strict descending chain check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    pub failures: Vec<(usize, String)>,
}

impl ChainReport {
    pub fn confirmed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies that each adjacent pair strictly descends (next embeds into
/// previous, previous does not embed into next).
pub fn check_descending_chain(
    terms: &[SpaceTerm],
    budget: u64,
) -> Result<ChainReport, DimtypeError> {
    let mut failures = Vec::new();
    for (i, w) in terms.windows(2).enumerate() {
        let down = le_h(&w[1], &w[0], budget)?;
        let up = le_h(&w[0], &w[1], budget)?;
        if !down.is_proved() {
            failures.push((i, "next element does not embed into previous".into()));
        } else if !up.is_refuted() {
            failures.push((i, "descent is not strict".into()));
        }
    }
    Ok(ChainReport { failures })
}

/// Runs the prover and refuter independently; used by the soundness audit.
pub fn decide_parts(
    x: &SpaceTerm,
    y: &SpaceTerm,
    budget: u64,
) -> (Option<Certificate>, Option<RefutationWitness>) {
    let nx = normalize(x);
    let ny = normalize(y);
    let witness = refute(&nx, &ny);
    let mut ctx = Ctx { budget, spent: 0 };
    let cert = match prove_le(&nx, &ny, &mut ctx) {
        Res::Proved(c) => Some(c),
        _ => None,
    };
    (cert, witness)
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
    fn le(x: &SpaceTerm, y: &SpaceTerm) -> Decision {
        le_h(x, y, 100_000).unwrap()
    }

    #[test]
    fn paper_chain_rank_two() {
        let i2 = build_i(2);
        let i2d = SpaceTerm::sum(vec![(Fin(1), build_i(2)), (Omega1, SpaceTerm::Pt)]);
        let j2 = j(2);
        assert!(le(&i2, &i2d).is_proved());
        assert!(le(&i2d, &i2).is_refuted());
        assert!(le(&i2d, &j2).is_proved());
        assert!(le(&j2, &i2d).is_refuted());
        assert!(le(&j2, &i2).is_refuted());
        assert!(le(&i2, &j2).is_proved());
    }

    #[test]
    fn incomparable_pair() {
        let a = build_i(4);
        let b = j(3);
        assert!(le(&a, &b).is_refuted());
        assert!(le(&b, &a).is_refuted());
    }

    #[test]
    fn tower_fast_paths() {
        for n in 1..=5 {
            assert!(le(&build_i(n), &j(n)).is_proved(), "i({n}) into J({n})");
        }
        for n in 1..=3u64 {
            assert!(
                le(&j(n + 1), &build_i(2 * n + 1)).is_proved(),
                "J({}) into i({})",
                n + 1,
                2 * n + 1
            );
        }
        // Minimality of the double-rank bound.
        assert!(le(&j(3), &build_i(4)).is_refuted());
    }

    #[test]
    fn limit_rank_facts() {
        // isum and J(ω) have the same dimensional type, but are not
        // homeomorphic.
        let (f, b) = eq_h(&SpaceTerm::ISumOmega, &jw(), 100_000).unwrap();
        assert!(f.is_proved() && b.is_proved());
        assert!(!crate::stable::is_homeo(&SpaceTerm::ISumOmega, &jw()));
        // cone(ω·J(ω)) is J(ω+1) up to homeomorphism already.
        let c = SpaceTerm::cone(SpaceTerm::times(Omega, jw())).unwrap();
        let jw1 = build_j(&Ordinal::omega().succ()).unwrap();
        let (f, b) = eq_h(&c, &jw1, 100_000).unwrap();
        assert!(f.is_proved() && b.is_proved());
    }

    #[test]
    fn certificates_verify() {
        let queries = [
            (build_i(2), j(2)),
            (build_i(3), j(3)),
            (j(2), build_i(3)),
            (j(3), build_i(5)),
            (
                SpaceTerm::sum(vec![(Fin(2), j(2)), (Omega, build_i(2))]),
                j(3),
            ),
            (SpaceTerm::ISumOmega, jw()),
        ];
        for (x, y) in &queries {
            match le(x, y) {
                Decision::Proved(c) => {
                    assert!(verify_certificate(&c, x, y), "{x} into {y}");
                }
                other => panic!("expected Proved for {x} into {y}, got {other:?}"),
            }
        }
    }

    #[test]
    fn witnesses_verify() {
        let queries = [
            (j(2), build_i(2)),
            (j(3), build_i(4)),
            (SpaceTerm::times(Fin(2), j(2)), j(2)),
            (
                SpaceTerm::sum(vec![(Fin(1), build_i(2)), (Omega1, SpaceTerm::Pt)]),
                build_i(2),
            ),
        ];
        for (x, y) in &queries {
            match le(x, y) {
                Decision::Refuted(w) => {
                    assert!(verify_witness(&w, x, y), "{x} into {y}: {w:?}");
                }
                other => panic!("expected Refuted for {x} into {y}, got {other:?}"),
            }
        }
        // Malformed witnesses fail.
        let bogus = RefutationWitness::RankDrop {
            source: Ordinal::from_u64(9),
            target: Ordinal::from_u64(1),
        };
        assert!(!verify_witness(&bogus, &j(2), &j(3)));
    }

    #[test]
    fn fast_path_side_conditions_checked() {
        // A fast-path certificate presented for the wrong pair fails.
        let cert = Certificate::FastPath {
            tag: TheoremTag::P8,
            lambda: None,
            sub: None,
        };
        assert!(!verify_certificate(&cert, &build_i(3), &j(2)));
        assert!(verify_certificate(&cert, &build_i(2), &j(2)));
        assert!(verify_certificate(&Certificate::Reflexivity, &j(2), &j(2)));
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(&SpaceTerm::Pt, &j(2), 100_000).unwrap(), Omega1);
        assert_eq!(capacity(&j(2), &j(2), 100_000).unwrap(), Fin(1));
        assert_eq!(capacity(&build_i(2), &j(3), 100_000).unwrap(), Omega1);
        assert_eq!(capacity(&j(2), &build_i(2), 100_000).unwrap(), Fin(0));
        assert!(capacity(&SpaceTerm::times(Fin(2), j(2)), &j(2), 100_000).is_err());
    }

    #[test]
    fn dickson_examples() {
        let v = |xs: &[Mult]| CanonVector {
            counts: xs.to_vec(),
        };
        let seq = vec![
            v(&[Fin(0), Omega1]),
            v(&[Fin(1), Omega]),
            v(&[Fin(2), Fin(3)]),
            v(&[Fin(3), Fin(4)]),
        ];
        assert_eq!(dickson_find_increasing(&seq).unwrap(), Some((2, 3)));
        let seq = vec![v(&[Fin(1)]), v(&[Fin(1)])];
        assert_eq!(dickson_find_increasing(&seq).unwrap(), Some((0, 1)));
        let seq = vec![v(&[Omega1]), v(&[Omega]), v(&[Fin(5)])];
        assert_eq!(dickson_find_increasing(&seq).unwrap(), None);
        let bad = vec![v(&[Fin(1)]), v(&[Fin(1), Fin(2)])];
        assert!(dickson_find_increasing(&bad).is_err());
    }

    #[test]
    fn antichain_and_chain_reports() {
        let r = check_antichain(&[build_i(4), j(3)], 100_000).unwrap();
        assert!(r.confirmed());
        let r = check_antichain(&[build_i(2), j(2)], 100_000).unwrap();
        assert_eq!(r.comparable, vec![(0, 1)]);
        let r = check_antichain(&[j(2)], 100_000).unwrap();
        assert!(r.confirmed());

        let chain = [
            j(2),
            SpaceTerm::sum(vec![(Fin(1), build_i(2)), (Omega1, SpaceTerm::Pt)]),
            build_i(2),
        ];
        assert!(check_descending_chain(&chain, 100_000).unwrap().confirmed());
        let not_strict = [j(2), j(2)];
        assert!(!check_descending_chain(&not_strict, 100_000)
            .unwrap()
            .confirmed());
        let counting = [
            SpaceTerm::times(Fin(3), j(2)),
            SpaceTerm::times(Fin(2), j(2)),
            SpaceTerm::times(Fin(1), j(2)),
        ];
        assert!(check_descending_chain(&counting, 100_000)
            .unwrap()
            .confirmed());
    }
}
