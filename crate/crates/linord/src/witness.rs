//! Closed-form descriptors for the maps inside witness bundles, and their
//! exact evaluation on points.
//!
//! A descriptor is a small piece of data — never a point table over an
//! infinite carrier — that together with the source and target terms
//! determines a total map on points. Evaluation is deterministic, and shared
//! machinery (back-and-forth schedules, ordinal block maps) is memoized in an
//! [`EvalCtx`] so that a quotient and its section always consult the same
//! underlying isomorphism.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baf::{Baf, BafExhausted};
use crate::classify::{cardinality, has_max, has_min, Cardinality, EtaFamily};
use crate::cnf::Cnf;
use crate::dense::{dense_point, dense_value, family_bounds, interval_to_full, Bnd, Val};
use crate::points::{
    approach_from_above, approach_from_below, cmp_points, coinitial_reach, cofinal_reach,
    enumerate_points, max_point, min_point, point_le, validate_point, EndBehavior, PSeq, Point, Q,
};
use crate::terms::Term;

/// Evaluation failures. A witness bundle evaluated on valid points of the
/// declared orders only fails by exhausting an iteration budget.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("point does not belong to the source order: {0}")]
    InvalidPoint(String),
    #[error("back-and-forth schedule exhausted its step budget")]
    Exhausted,
    #[error("probe budget exceeded while ranking against a sequence")]
    ProbeBudget,
    #[error("descriptor cannot be evaluated here: {0}")]
    Unsupported(String),
}

impl From<BafExhausted> for EvalError {
    fn from(_: BafExhausted) -> EvalError {
        EvalError::Exhausted
    }
}

/// Direction of a monotone sequence hunt: increasing or decreasing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqDir {
    Inc,
    Dec,
}

impl SeqDir {
    fn flip(self) -> SeqDir {
        match self {
            SeqDir::Inc => SeqDir::Dec,
            SeqDir::Dec => SeqDir::Inc,
        }
    }
}

/// Locates one bounded strictly monotone sequence inside an order, as data.
/// The same locator shape serves both directions; `Rev` flips direction as it
/// passes through a reversal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "seq", rename_all = "snake_case")]
pub enum BddSeqDesc {
    /// A limit point: the sequence approaches it strictly from the open side,
    /// and the point itself is the bound.
    AtLimit { point: Point },
    /// A climb through all of one summand, bounded by a point of the
    /// neighbouring summand.
    SumGap { part: usize },
    /// A climb through one copy of the left factor, bounded inside the copy
    /// at index `bnd`.
    ProdGap { at: Point, bnd: Point },
    InSum {
        part: usize,
        inner: Box<BddSeqDesc>,
    },
    InProdLeft {
        at: Point,
        inner: Box<BddSeqDesc>,
    },
    InProdRight { inner: Box<BddSeqDesc> },
    Rev { inner: Box<BddSeqDesc> },
}

fn first_point(t: &Term) -> Point {
    enumerate_points(t).next().expect("orders are nonempty")
}

fn second_point(t: &Term) -> Point {
    enumerate_points(t).nth(1).expect("order has at least two points")
}

/// Builds a locator for a bounded monotone sequence, mirroring the
/// classifier's existence test clause by clause: the result is `Some` exactly
/// when `has_bdd_inc` (resp. `has_bdd_dec`) holds.
pub fn find_bdd(t: &Term, dir: SeqDir) -> Option<BddSeqDesc> {
    match t {
        Term::Fin(_) | Term::Omega | Term::OmegaStar => None,
        Term::Eta => Some(BddSeqDesc::AtLimit { point: Point::rat_int(0) }),
        Term::Ord(c) => match dir {
            SeqDir::Inc if *c > Cnf::omega() => {
                Some(BddSeqDesc::AtLimit { point: Point::OrdPt(Cnf::omega()) })
            }
            _ => None,
        },
        Term::Sum(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if let Some(inner) = find_bdd(p, dir) {
                    return Some(BddSeqDesc::InSum { part: i, inner: Box::new(inner) });
                }
            }
            match dir {
                SeqDir::Inc => parts[..parts.len() - 1]
                    .iter()
                    .position(|p| !has_max(p))
                    .map(|part| BddSeqDesc::SumGap { part }),
                SeqDir::Dec => parts
                    .iter()
                    .enumerate()
                    .skip(1)
                    .find(|(_, p)| !has_min(p))
                    .map(|(part, _)| BddSeqDesc::SumGap { part }),
            }
        }
        Term::Product(a, b) => {
            if let Some(inner) = find_bdd(a, dir) {
                return Some(BddSeqDesc::InProdLeft {
                    at: first_point(b),
                    inner: Box::new(inner),
                });
            }
            if let Some(inner) = find_bdd(b, dir) {
                return Some(BddSeqDesc::InProdRight { inner: Box::new(inner) });
            }
            let endless = match dir {
                SeqDir::Inc => !has_max(a),
                SeqDir::Dec => !has_min(a),
            };
            if endless && cardinality(b) != Cardinality::Finite(1) {
                let p1 = first_point(b);
                let p2 = second_point(b);
                let want = match dir {
                    SeqDir::Inc => Ordering::Greater,
                    SeqDir::Dec => Ordering::Less,
                };
                let (at, bnd) = if cmp_points(&p2, &p1) == want { (p1, p2) } else { (p2, p1) };
                return Some(BddSeqDesc::ProdGap { at, bnd });
            }
            None
        }
        Term::Reverse(e) => {
            find_bdd(e, dir.flip()).map(|inner| BddSeqDesc::Rev { inner: Box::new(inner) })
        }
    }
}

/// A strictly monotone chain passing every point of `t` on the open end.
fn end_seq(t: &Term, dir: SeqDir) -> PSeq {
    let reach = match dir {
        SeqDir::Inc => cofinal_reach(t),
        SeqDir::Dec => coinitial_reach(t),
    };
    match reach {
        EndBehavior::Approach(s) => s,
        EndBehavior::Endpoint(_) => unreachable!("caller established the end is open"),
    }
}

/// Any canonical point on the chosen end of `t`: the endpoint when it exists,
/// otherwise the first step of the end chain.
fn end_point(t: &Term, dir: SeqDir) -> Point {
    let reach = match dir {
        SeqDir::Inc => cofinal_reach(t),
        SeqDir::Dec => coinitial_reach(t),
    };
    match reach {
        EndBehavior::Endpoint(p) => p,
        EndBehavior::Approach(s) => s(0),
    }
}

/// The `n`-th element of the located sequence (strictly monotone in `n`).
pub fn bdd_seq(t: &Term, d: &BddSeqDesc, dir: SeqDir, n: u64) -> Point {
    match (t, d) {
        (_, BddSeqDesc::AtLimit { point }) => match dir {
            SeqDir::Inc => approach_from_below(t, point).expect("limit from below")(n),
            SeqDir::Dec => approach_from_above(t, point).expect("limit from above")(n),
        },
        (Term::Sum(parts), BddSeqDesc::SumGap { part }) => {
            Point::sum(*part, end_seq(&parts[*part], dir)(n))
        }
        (Term::Product(a, _), BddSeqDesc::ProdGap { at, .. }) => {
            Point::prod(end_seq(a, dir)(n), at.clone())
        }
        (Term::Sum(parts), BddSeqDesc::InSum { part, inner }) => {
            Point::sum(*part, bdd_seq(&parts[*part], inner, dir, n))
        }
        (Term::Product(a, _), BddSeqDesc::InProdLeft { at, inner }) => {
            Point::prod(bdd_seq(a, inner, dir, n), at.clone())
        }
        (Term::Product(a, b), BddSeqDesc::InProdRight { inner }) => {
            Point::prod(first_point(a), bdd_seq(b, inner, dir, n))
        }
        (Term::Reverse(e), BddSeqDesc::Rev { inner }) => {
            Point::rev(bdd_seq(e, inner, dir.flip(), n))
        }
        _ => unreachable!("locator does not match the term"),
    }
}

/// A point strictly beyond every element of the located sequence.
pub fn bdd_bound(t: &Term, d: &BddSeqDesc, dir: SeqDir) -> Point {
    match (t, d) {
        (_, BddSeqDesc::AtLimit { point }) => point.clone(),
        (Term::Sum(parts), BddSeqDesc::SumGap { part }) => match dir {
            SeqDir::Inc => Point::sum(part + 1, end_point(&parts[part + 1], SeqDir::Dec)),
            SeqDir::Dec => Point::sum(part - 1, end_point(&parts[part - 1], SeqDir::Inc)),
        },
        (Term::Product(a, _), BddSeqDesc::ProdGap { bnd, .. }) => {
            Point::prod(first_point(a), bnd.clone())
        }
        (Term::Sum(parts), BddSeqDesc::InSum { part, inner }) => {
            Point::sum(*part, bdd_bound(&parts[*part], inner, dir))
        }
        (Term::Product(a, _), BddSeqDesc::InProdLeft { at, inner }) => {
            Point::prod(bdd_bound(a, inner, dir), at.clone())
        }
        (Term::Product(a, b), BddSeqDesc::InProdRight { inner }) => {
            Point::prod(first_point(a), bdd_bound(b, inner, dir))
        }
        (Term::Reverse(e), BddSeqDesc::Rev { inner }) => {
            Point::rev(bdd_bound(e, inner, dir.flip()))
        }
        _ => unreachable!("locator does not match the term"),
    }
}

/// Whether `p` lies strictly beyond every element of the located sequence
/// (above it for `Inc`, below it for `Dec`). The set of such points is
/// closed toward that end, and its complement is exactly the set of points
/// trapped at some finite rank.
pub fn bdd_beyond(t: &Term, d: &BddSeqDesc, dir: SeqDir, p: &Point) -> bool {
    match (t, d, p) {
        (_, BddSeqDesc::AtLimit { point }, _) => match dir {
            SeqDir::Inc => cmp_points(p, point) != Ordering::Less,
            SeqDir::Dec => cmp_points(p, point) != Ordering::Greater,
        },
        (Term::Sum(_), BddSeqDesc::SumGap { part }, Point::SumPt(j, _)) => match dir {
            SeqDir::Inc => j > part,
            SeqDir::Dec => j < part,
        },
        (Term::Product(..), BddSeqDesc::ProdGap { at, .. }, Point::ProdPt(_, r)) => {
            let want = match dir {
                SeqDir::Inc => Ordering::Greater,
                SeqDir::Dec => Ordering::Less,
            };
            cmp_points(r, at) == want
        }
        (Term::Sum(parts), BddSeqDesc::InSum { part, inner }, Point::SumPt(j, q)) => {
            let strict = match dir {
                SeqDir::Inc => j > part,
                SeqDir::Dec => j < part,
            };
            strict || (j == part && bdd_beyond(&parts[*part], inner, dir, q))
        }
        (Term::Product(a, _), BddSeqDesc::InProdLeft { at, inner }, Point::ProdPt(l, r)) => {
            let want = match dir {
                SeqDir::Inc => Ordering::Greater,
                SeqDir::Dec => Ordering::Less,
            };
            let c = cmp_points(r, at);
            c == want || (c == Ordering::Equal && bdd_beyond(a, inner, dir, l))
        }
        (Term::Product(_, b), BddSeqDesc::InProdRight { inner }, Point::ProdPt(_, r)) => {
            bdd_beyond(b, inner, dir, r)
        }
        (Term::Reverse(e), BddSeqDesc::Rev { inner }, Point::RevPt(q)) => {
            bdd_beyond(e, inner, dir.flip(), q)
        }
        _ => unreachable!("locator does not match the term"),
    }
}

// ---------------------------------------------------------------------------
// Ordinal position adapters.
//
// Normalization rewrites every term denoting an ordinal into `Fin`, `Omega`,
// or `Ord`, so translating between points and ordinal positions only needs
// these three shapes.

pub(crate) fn position_of(t: &Term, p: &Point) -> Option<Cnf> {
    match (t, p) {
        (Term::Fin(_), Point::FinIdx(i)) => Some(Cnf::from_nat(*i)),
        (Term::Omega, Point::Nat(n)) => Some(Cnf::from_nat(*n)),
        (Term::Ord(_), Point::OrdPt(x)) => Some(x.clone()),
        _ => None,
    }
}

pub(crate) fn point_at(t: &Term, pos: &Cnf) -> Option<Point> {
    match t {
        Term::Fin(n) => pos.as_nat().filter(|i| i < n).map(Point::FinIdx),
        Term::Omega => pos.as_nat().map(Point::Nat),
        Term::Ord(c) => (pos < c).then(|| Point::OrdPt(pos.clone())),
        _ => None,
    }
}

fn position(t: &Term, p: &Point) -> Result<Cnf, EvalError> {
    position_of(t, p).ok_or_else(|| EvalError::Unsupported(format!("no ordinal position in {t}")))
}

fn at_position(t: &Term, pos: &Cnf) -> Result<Point, EvalError> {
    point_at(t, pos)
        .ok_or_else(|| EvalError::Unsupported(format!("position {pos} outside {t}")))
}

// ---------------------------------------------------------------------------
// Dense canonical forms.

/// The canonical term of each dense family.
pub fn canon_term(f: EtaFamily) -> Term {
    match f {
        EtaFamily::Open => Term::Eta,
        EtaFamily::ClosedBelow => Term::Sum(vec![Term::Fin(1), Term::Eta]),
        EtaFamily::ClosedAbove => Term::Sum(vec![Term::Eta, Term::Fin(1)]),
        EtaFamily::Closed => Term::Sum(vec![Term::Fin(1), Term::Eta, Term::Fin(1)]),
    }
}

/// A dense cover of `k` in the requested family: `k` fibers of the rationals,
/// wrapped with the family's endpoints. The product is deliberately left
/// unsimplified so its points keep the fiber index.
pub fn eta_cover(k: &Term, f: EtaFamily) -> Term {
    let core = Term::Product(Box::new(Term::Eta), Box::new(k.clone()));
    match f {
        EtaFamily::Open => core,
        EtaFamily::ClosedBelow => Term::Sum(vec![Term::Fin(1), core]),
        EtaFamily::ClosedAbove => Term::Sum(vec![core, Term::Fin(1)]),
        EtaFamily::Closed => Term::Sum(vec![Term::Fin(1), core, Term::Fin(1)]),
    }
}

/// Collapses a cover point to its fiber index in `dst`; the added endpoints
/// collapse to the endpoints of `dst`.
fn project_cover(cover: &Term, dst: &Term, m: &Point) -> Result<Point, EvalError> {
    let fiber = |q: &Point| match q {
        Point::ProdPt(_, k) => Ok((**k).clone()),
        _ => Err(EvalError::Unsupported("cover core expects product points".into())),
    };
    match (cover, m) {
        (Term::Product(..), _) => fiber(m),
        (Term::Sum(parts), Point::SumPt(i, q)) => match &parts[*i] {
            Term::Product(..) => fiber(q),
            _ if *i == 0 => min_point(dst)
                .ok_or_else(|| EvalError::Unsupported("target lacks the covered minimum".into())),
            _ => max_point(dst)
                .ok_or_else(|| EvalError::Unsupported("target lacks the covered maximum".into())),
        },
        _ => Err(EvalError::Unsupported("malformed cover point".into())),
    }
}

/// The canonical section of the cover projection: every fiber is entered at
/// rational coordinate zero.
fn section_cover(cover: &Term, p: &Point) -> Point {
    let core = Point::prod(Point::rat_int(0), p.clone());
    match cover {
        Term::Product(..) => core,
        Term::Sum(parts) => {
            let i = parts
                .iter()
                .position(|q| matches!(q, Term::Product(..)))
                .expect("cover holds its core");
            Point::sum(i, core)
        }
        _ => unreachable!("covers are products or wrapped products"),
    }
}

fn val_to_canon(f: EtaFamily, v: &Val) -> Result<Point, EvalError> {
    let inner = |q: &Q| Point::Rat(interval_to_full(f, q));
    let side = |msg: &str| Err(EvalError::Unsupported(format!("endpoint on an open side: {msg}")));
    Ok(match (f, v) {
        (EtaFamily::Open, Val::In(q)) => inner(q),
        (EtaFamily::ClosedBelow, Val::Lo) => Point::sum(0, Point::FinIdx(0)),
        (EtaFamily::ClosedBelow, Val::In(q)) => Point::sum(1, inner(q)),
        (EtaFamily::ClosedAbove, Val::In(q)) => Point::sum(0, inner(q)),
        (EtaFamily::ClosedAbove, Val::Hi) => Point::sum(1, Point::FinIdx(0)),
        (EtaFamily::Closed, Val::Lo) => Point::sum(0, Point::FinIdx(0)),
        (EtaFamily::Closed, Val::In(q)) => Point::sum(1, inner(q)),
        (EtaFamily::Closed, Val::Hi) => Point::sum(2, Point::FinIdx(0)),
        (_, Val::Lo) => return side("lo"),
        (_, Val::Hi) => return side("hi"),
    })
}

fn canon_to_val(f: EtaFamily, p: &Point) -> Result<Val, EvalError> {
    let inner = |q: &Q| Val::In(crate::dense::full_to_interval(f, q));
    let bad = || EvalError::Unsupported("not a canonical dense point".into());
    match (f, p) {
        (EtaFamily::Open, Point::Rat(q)) => Ok(inner(q)),
        (EtaFamily::ClosedBelow, Point::SumPt(0, _)) => Ok(Val::Lo),
        (EtaFamily::ClosedBelow, Point::SumPt(1, q)) | (EtaFamily::ClosedAbove, Point::SumPt(0, q)) => {
            match &**q {
                Point::Rat(r) => Ok(inner(r)),
                _ => Err(bad()),
            }
        }
        (EtaFamily::ClosedAbove, Point::SumPt(1, _)) => Ok(Val::Hi),
        (EtaFamily::Closed, Point::SumPt(0, _)) => Ok(Val::Lo),
        (EtaFamily::Closed, Point::SumPt(1, q)) => match &**q {
            Point::Rat(r) => Ok(inner(r)),
            _ => Err(bad()),
        },
        (EtaFamily::Closed, Point::SumPt(2, _)) => Ok(Val::Hi),
        _ => Err(bad()),
    }
}

// ---------------------------------------------------------------------------
// Map descriptors.

/// A closed-form point map between two orders. The source and target terms
/// are supplied at evaluation time; the descriptor itself stays small.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapDescriptor {
    /// The identity on a shared carrier.
    Identity,
    /// Everything maps to one point of the target.
    Constant { value: Point },
    /// Finite source: position `i` maps to `points[i]`.
    PointList { points: Vec<Point> },
    /// Finite target: a point maps to the number of `cuts` at or below it.
    ThresholdCount { cuts: Vec<Point> },
    /// Ordinal positions map by `u ↦ min(u, at)`.
    OrdTruncate { at: Cnf },
    /// Ordinal positions map to themselves inside a larger ordinal.
    OrdEmbedId,
    /// The limit-onto-limit surjection: identity below `alpha_prime`, the
    /// stretch up to `base` collapses onto `alpha_prime`, and the final block
    /// pulls back through the block-wise sup-inverse.
    OrdLimitEpi {
        alpha_prime: Cnf,
        base: Cnf,
        gamma: Cnf,
        delta: Cnf,
    },
    /// The matching right inverse: identity below `alpha_prime`, then the
    /// cofinal block embedding shifted to `base`.
    OrdLimitEmbed {
        alpha_prime: Cnf,
        base: Cnf,
        gamma: Cnf,
        delta: Cnf,
    },
    /// Ranks a point against the canonical cofinal chain of the source.
    CofinalRank,
    /// Sends rank `n` to the `n`-th point of the target's cofinal chain.
    CofinalPoints,
    /// Ranks a point against the canonical coinitial chain of the source.
    CoinitialRank,
    /// Sends rank `n` to the `n`-th point of the target's coinitial chain.
    CoinitialPoints,
    /// Ranks against a located bounded increasing sequence; points beyond the
    /// whole sequence collapse onto the target's maximum.
    BoundedIncRank { seq: BddSeqDesc },
    /// Right inverse of the above: ranks re-enter along the sequence, the
    /// maximum enters at the bound.
    BoundedIncPoints { seq: BddSeqDesc },
    /// Dual ranking along a bounded decreasing sequence.
    BoundedDecRank { seq: BddSeqDesc },
    BoundedDecPoints { seq: BddSeqDesc },
    /// Dense source: transport to the cover and collapse fibers.
    EtaQuotient { cover: Term },
    /// Enter the cover at rational coordinate zero and transport back.
    EtaSection { cover: Term },
    /// Dense target: collapse the source onto the family's interval, then
    /// transport through the canonical family term.
    DenseQuotient { family: EtaFamily },
    DenseSection { family: EtaFamily },
    /// The completeness construction: `g(y) = sup {x | f(x) ≤ y}` (cases 1,
    /// 2, 4) or `inf {x | f(x) ≥ y}` (case 3), with `f` the enclosed
    /// descriptor read against the swapped orders.
    CompleteSup { inner: Box<MapDescriptor>, case: u8 },
    /// Function composition through the middle order.
    Compose {
        outer: Box<MapDescriptor>,
        mid: Term,
        inner: Box<MapDescriptor>,
    },
}

/// Memoized evaluation state shared across the maps of one bundle.
#[derive(Default)]
pub struct EvalCtx {
    bafs: HashMap<(String, String), Baf>,
    ord_maps: HashMap<(String, String), crate::ordinals::OrdCofinalMap>,
}

impl EvalCtx {
    pub fn new() -> EvalCtx {
        EvalCtx::default()
    }

    fn baf(&mut self, src: &Term, dst: &Term) -> &mut Baf {
        self.bafs
            .entry((src.to_string(), dst.to_string()))
            .or_insert_with(|| Baf::new(src, dst))
    }

    fn ord_map(&mut self, gamma: &Cnf, delta: &Cnf) -> &mut crate::ordinals::OrdCofinalMap {
        self.ord_maps
            .entry((gamma.to_string(), delta.to_string()))
            .or_insert_with(|| crate::ordinals::OrdCofinalMap::new(gamma, delta))
    }
}

const GALLOP_CAP: u64 = 1 << 32;

/// Least `n` with `p <= s(n)`, for strictly increasing `s`; the caller
/// guarantees such an `n` exists.
fn least_above(s: &PSeq, p: &Point) -> Result<u64, EvalError> {
    let mut hi = 0u64;
    while cmp_points(p, &s(hi)) == Ordering::Greater {
        hi = if hi == 0 { 1 } else { hi.saturating_mul(2) };
        if hi > GALLOP_CAP {
            return Err(EvalError::ProbeBudget);
        }
    }
    let mut lo = 0u64;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cmp_points(p, &s(mid)) == Ordering::Greater {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Least `n` with `p >= s(n)`, for strictly decreasing `s`.
fn least_below(s: &PSeq, p: &Point) -> Result<u64, EvalError> {
    let mut hi = 0u64;
    while cmp_points(p, &s(hi)) == Ordering::Less {
        hi = if hi == 0 { 1 } else { hi.saturating_mul(2) };
        if hi > GALLOP_CAP {
            return Err(EvalError::ProbeBudget);
        }
    }
    let mut lo = 0u64;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cmp_points(p, &s(mid)) == Ordering::Less {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn seq_closure(t: &Term, d: &BddSeqDesc, dir: SeqDir) -> PSeq {
    let t = t.clone();
    let d = d.clone();
    Rc::new(move |n| bdd_seq(&t, &d, dir, n))
}

/// Evaluates a descriptor as a map from points of `src` to points of `dst`.
pub fn eval_map(
    ctx: &mut EvalCtx,
    d: &MapDescriptor,
    src: &Term,
    dst: &Term,
    p: &Point,
) -> Result<Point, EvalError> {
    if !validate_point(src, p) {
        return Err(EvalError::InvalidPoint(format!("{p:?} in {src}")));
    }
    match d {
        MapDescriptor::Identity => Ok(p.clone()),
        MapDescriptor::Constant { value } => Ok(value.clone()),
        MapDescriptor::PointList { points } => match p {
            Point::FinIdx(i) => points
                .get(*i as usize)
                .cloned()
                .ok_or_else(|| EvalError::InvalidPoint(format!("index {i} beyond the list"))),
            _ => Err(EvalError::Unsupported("point list needs a finite source".into())),
        },
        MapDescriptor::ThresholdCount { cuts } => {
            let count = cuts.iter().take_while(|c| point_le(c, p)).count() as u64;
            at_position(dst, &Cnf::from_nat(count))
        }
        MapDescriptor::OrdTruncate { at } => {
            let u = position(src, p)?;
            let tgt = if u <= *at { u } else { at.clone() };
            at_position(dst, &tgt)
        }
        MapDescriptor::OrdEmbedId => {
            let u = position(src, p)?;
            at_position(dst, &u)
        }
        MapDescriptor::OrdLimitEpi { alpha_prime, base, gamma, delta } => {
            let u = position(src, p)?;
            if u < *alpha_prime {
                return at_position(dst, &u);
            }
            if u < *base {
                return at_position(dst, alpha_prime);
            }
            let v = u.minus(base).expect("u >= base");
            if v >= Cnf::monomial(delta.clone(), 1) {
                return Err(EvalError::Unsupported("position beyond the final block".into()));
            }
            let zeta = ctx.ord_map(gamma, delta).sup_inverse(&v);
            at_position(dst, &alpha_prime.plus(&zeta))
        }
        MapDescriptor::OrdLimitEmbed { alpha_prime, base, gamma, delta } => {
            let xi = position(src, p)?;
            if xi < *alpha_prime {
                return at_position(dst, &xi);
            }
            let rho = xi.minus(alpha_prime).expect("xi >= alpha_prime");
            if rho >= Cnf::monomial(gamma.clone(), 1) {
                return Err(EvalError::Unsupported("position beyond the final block".into()));
            }
            let img = ctx.ord_map(gamma, delta).embed(&rho);
            at_position(dst, &base.plus(&img))
        }
        MapDescriptor::CofinalRank => match cofinal_reach(src) {
            EndBehavior::Approach(s) => {
                let n = least_above(&s, p)?;
                at_position(dst, &Cnf::from_nat(n))
            }
            EndBehavior::Endpoint(_) => {
                Err(EvalError::Unsupported("source has a maximum".into()))
            }
        },
        MapDescriptor::CofinalPoints => {
            let n = position(src, p)?
                .as_nat()
                .ok_or_else(|| EvalError::Unsupported("rank must be finite".into()))?;
            match cofinal_reach(dst) {
                EndBehavior::Approach(s) => Ok(s(n)),
                EndBehavior::Endpoint(_) => {
                    Err(EvalError::Unsupported("target has a maximum".into()))
                }
            }
        }
        MapDescriptor::CoinitialRank => match coinitial_reach(src) {
            EndBehavior::Approach(s) => {
                let n = least_below(&s, p)?;
                match dst {
                    Term::OmegaStar => Ok(Point::NegNat(n)),
                    _ => Err(EvalError::Unsupported("target is not the reversed naturals".into())),
                }
            }
            EndBehavior::Endpoint(_) => {
                Err(EvalError::Unsupported("source has a minimum".into()))
            }
        },
        MapDescriptor::CoinitialPoints => match p {
            Point::NegNat(n) => match coinitial_reach(dst) {
                EndBehavior::Approach(s) => Ok(s(*n)),
                EndBehavior::Endpoint(_) => {
                    Err(EvalError::Unsupported("target has a minimum".into()))
                }
            },
            _ => Err(EvalError::Unsupported("source is not the reversed naturals".into())),
        },
        MapDescriptor::BoundedIncRank { seq } => {
            if bdd_beyond(src, seq, SeqDir::Inc, p) {
                max_point(dst)
                    .ok_or_else(|| EvalError::Unsupported("target lacks a maximum".into()))
            } else {
                let s = seq_closure(src, seq, SeqDir::Inc);
                let n = least_above(&s, p)?;
                at_position(dst, &Cnf::from_nat(n))
            }
        }
        MapDescriptor::BoundedIncPoints { seq } => {
            if Some(p) == max_point(src).as_ref() {
                Ok(bdd_bound(dst, seq, SeqDir::Inc))
            } else {
                let n = position(src, p)?
                    .as_nat()
                    .ok_or_else(|| EvalError::Unsupported("rank must be finite".into()))?;
                Ok(bdd_seq(dst, seq, SeqDir::Inc, n))
            }
        }
        MapDescriptor::BoundedDecRank { seq } => {
            if bdd_beyond(src, seq, SeqDir::Dec, p) {
                min_point(dst)
                    .ok_or_else(|| EvalError::Unsupported("target lacks a minimum".into()))
            } else {
                let s = seq_closure(src, seq, SeqDir::Dec);
                let n = least_below(&s, p)?;
                match dst {
                    Term::Sum(parts)
                        if parts.len() == 2
                            && parts[0] == Term::Fin(1)
                            && parts[1] == Term::OmegaStar =>
                    {
                        Ok(Point::sum(1, Point::NegNat(n)))
                    }
                    _ => Err(EvalError::Unsupported(
                        "target is not a point below the reversed naturals".into(),
                    )),
                }
            }
        }
        MapDescriptor::BoundedDecPoints { seq } => match p {
            Point::SumPt(0, _) => Ok(bdd_bound(dst, seq, SeqDir::Dec)),
            Point::SumPt(1, q) => match &**q {
                Point::NegNat(n) => Ok(bdd_seq(dst, seq, SeqDir::Dec, *n)),
                _ => Err(EvalError::Unsupported("malformed rank point".into())),
            },
            _ => Err(EvalError::Unsupported("malformed rank point".into())),
        },
        MapDescriptor::EtaQuotient { cover } => {
            let m = ctx.baf(src, cover).forward(p)?;
            project_cover(cover, dst, &m)
        }
        MapDescriptor::EtaSection { cover } => {
            let q = section_cover(cover, p);
            Ok(ctx.baf(dst, cover).backward(&q)?)
        }
        MapDescriptor::DenseQuotient { family } => {
            let (lo, hi) = family_bounds(*family);
            let v = dense_value(src, &lo, &hi, p);
            let cp = val_to_canon(*family, &v)?;
            let c = canon_term(*family);
            if &c == dst {
                Ok(cp)
            } else {
                Ok(ctx.baf(&c, dst).forward(&cp)?)
            }
        }
        MapDescriptor::DenseSection { family } => {
            let c = canon_term(*family);
            let cp = if &c == src {
                p.clone()
            } else {
                ctx.baf(&c, src).backward(p)?
            };
            let v = canon_to_val(*family, &cp)?;
            let (lo, hi): (Bnd, Bnd) = family_bounds(*family);
            Ok(dense_point(dst, &lo, &hi, &v))
        }
        MapDescriptor::CompleteSup { inner, case } => {
            crate::supeval::complete_sup_eval(ctx, inner, *case, src, dst, p)
        }
        MapDescriptor::Compose { outer, mid, inner } => {
            let q = eval_map(ctx, inner, src, mid, p)?;
            eval_map(ctx, outer, mid, dst, &q)
        }
    }
}
