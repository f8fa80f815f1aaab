//! Canonical surjections from a non-scattered order onto a rational interval.
//!
//! [`dense_value`] maps each point of a non-scattered term to a value of a
//! target interval: one of the included endpoint values (`Lo`/`Hi`) or an
//! interior rational (`In`). [`dense_point`] is a deterministic right inverse.
//! Interval boundaries live in the quadratic field Q(√2): scattered material
//! collapses onto rational seam values, while seams that no point can reach
//! are placed at irrational cuts so that no rational value is ever missed.
//!
//! Both functions are stateless: every call recomputes the same cut values
//! from the term and the interval alone, so the maps they describe are
//! well-defined functions regardless of query order.

use std::cmp::Ordering;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::classify::{decompose_nonscattered, EtaFamily};
use crate::cnf::Cnf;
use crate::points::{enumerate_points, Point, Q};
use crate::terms::{is_scattered, Term};

type R = BigRational;

fn rint(n: i64) -> R {
    BigRational::from_integer(BigInt::from(n))
}

fn rnat(n: u64) -> R {
    BigRational::from_integer(BigInt::from(n))
}

/// An exact value `r + s·√2`; irrational exactly when `s != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutVal {
    pub r: R,
    pub s: R,
}

impl CutVal {
    pub fn rational(q: &Q) -> CutVal {
        CutVal { r: q.0.clone(), s: R::zero() }
    }

    pub fn from_r(r: R) -> CutVal {
        CutVal { r, s: R::zero() }
    }

    pub fn int(n: i64) -> CutVal {
        CutVal::from_r(rint(n))
    }

    pub fn sqrt2() -> CutVal {
        CutVal { r: R::zero(), s: R::one() }
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_zero()
    }

    pub fn as_q(&self) -> Option<Q> {
        self.is_rational().then(|| Q(self.r.clone()))
    }

    pub fn neg(&self) -> CutVal {
        CutVal { r: -&self.r, s: -&self.s }
    }

    fn sub(&self, o: &CutVal) -> CutVal {
        CutVal { r: &self.r - &o.r, s: &self.s - &o.s }
    }

    fn scale(&self, k: &R) -> CutVal {
        CutVal { r: &self.r * k, s: &self.s * k }
    }

    fn sign(&self) -> Ordering {
        use Ordering::*;
        let rs = if self.r.is_zero() {
            Equal
        } else if self.r.is_positive() {
            Greater
        } else {
            Less
        };
        let ss = if self.s.is_zero() {
            Equal
        } else if self.s.is_positive() {
            Greater
        } else {
            Less
        };
        match (rs, ss) {
            (x, Equal) => x,
            (Equal, y) => y,
            (Greater, Greater) => Greater,
            (Less, Less) => Less,
            // Opposite signs: whichever of |r| and |s|·√2 is larger decides,
            // so compare r² with 2s² (never equal: √2 is irrational).
            _ => {
                let r2 = &self.r * &self.r;
                let s2 = (&self.s * &self.s) * rint(2);
                match r2.cmp(&s2) {
                    Greater => rs,
                    Less => ss,
                    Equal => unreachable!("√2 is irrational"),
                }
            }
        }
    }
}

impl PartialOrd for CutVal {
    fn partial_cmp(&self, other: &CutVal) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CutVal {
    fn cmp(&self, other: &CutVal) -> Ordering {
        self.sub(other).sign()
    }
}

/// One side of a target interval. `At(v, true)` means the endpoint value `v`
/// itself belongs to the target and must be realized by collapsing material
/// of the source; `At(v, false)` is a strict cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bnd {
    NegInf,
    At(CutVal, bool),
    PosInf,
}

impl Bnd {
    pub fn included(v: CutVal) -> Bnd {
        Bnd::At(v, true)
    }

    pub fn excluded(v: CutVal) -> Bnd {
        Bnd::At(v, false)
    }

    fn neg(&self) -> Bnd {
        match self {
            Bnd::NegInf => Bnd::PosInf,
            Bnd::PosInf => Bnd::NegInf,
            Bnd::At(v, i) => Bnd::At(v.neg(), *i),
        }
    }

    fn cut(&self) -> Option<&CutVal> {
        match self {
            Bnd::At(v, _) => Some(v),
            _ => None,
        }
    }

    fn is_included(&self) -> bool {
        matches!(self, Bnd::At(_, true))
    }
}

/// A value of the target interval: an included endpoint or an interior
/// rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Val {
    Lo,
    In(Q),
    Hi,
}

/// Total order on interval values (`Lo` below every `In`, `Hi` above).
pub fn val_cmp(a: &Val, b: &Val) -> Ordering {
    use Val::*;
    match (a, b) {
        (Lo, Lo) | (Hi, Hi) => Ordering::Equal,
        (Lo, _) | (_, Hi) => Ordering::Less,
        (_, Lo) | (Hi, _) => Ordering::Greater,
        (In(x), In(y)) => x.0.cmp(&y.0),
    }
}

fn mirror(v: &Val) -> Val {
    match v {
        Val::Lo => Val::Hi,
        Val::Hi => Val::Lo,
        Val::In(q) => Val::In(Q(-&q.0)),
    }
}

// ---------------------------------------------------------------------------
// Exact cut selection.

/// Some rational strictly above `x` (using √2 < 2).
fn rat_above(x: &CutVal) -> R {
    if x.s.is_negative() {
        &x.r + rint(1)
    } else {
        &x.r + &x.s * rint(2) + rint(1)
    }
}

fn rat_below(x: &CutVal) -> R {
    -rat_above(&x.neg())
}

/// A rational strictly between `x` and `y`, by bisecting a rational bracket.
fn rat_between(x: &CutVal, y: &CutVal) -> R {
    debug_assert!(x < y, "empty interval");
    let mut a = rat_below(x);
    let mut b = rat_above(y);
    loop {
        let m: R = (&a + &b) / rint(2);
        let mc = CutVal::from_r(m.clone());
        if mc <= *x {
            a = m;
        } else if mc >= *y {
            b = m;
        } else {
            return m;
        }
    }
}

/// An irrational value strictly between `x` and `y`.
fn irr_between(x: &CutVal, y: &CutVal) -> CutVal {
    let m = rat_between(x, y);
    let m2 = rat_between(&CutVal::from_r(m.clone()), y);
    // m + s·√2 with 2s = m2 − m stays inside (m, m2).
    let s = (&m2 - &m) / rint(2);
    CutVal { r: m, s }
}

/// A cut strictly inside the interval, rational iff `rational` asks for it.
fn bnd_between(lo: &Bnd, hi: &Bnd, rational: bool) -> CutVal {
    let (x, y) = match (lo, hi) {
        (Bnd::NegInf, Bnd::PosInf) => (CutVal::int(-1), CutVal::int(1)),
        (Bnd::NegInf, Bnd::At(h, _)) => (CutVal::from_r(rat_below(h)), h.clone()),
        (Bnd::At(l, _), Bnd::PosInf) => (l.clone(), CutVal::from_r(rat_above(l))),
        (Bnd::At(l, _), Bnd::At(h, _)) => (l.clone(), h.clone()),
        _ => unreachable!("inverted interval"),
    };
    if rational {
        CutVal::from_r(rat_between(&x, &y))
    } else {
        irr_between(&x, &y)
    }
}

/// Disjoint windows marching up to `hi`: the `k`-th cut of an infinite chain
/// is chosen inside window `k`, so any per-window choice has supremum `hi`.
fn chain_window(lo: &Bnd, hi: &Bnd, k: u64) -> (CutVal, CutVal) {
    debug_assert!(k >= 1);
    match hi {
        Bnd::PosInf => {
            let a = match lo {
                Bnd::NegInf => R::zero(),
                Bnd::At(l, _) => rat_above(l),
                Bnd::PosInf => unreachable!("inverted interval"),
            };
            (CutVal::from_r(&a + rnat(k - 1)), CutVal::from_r(a + rnat(k)))
        }
        Bnd::At(h, _) => {
            let anchor = match lo {
                Bnd::NegInf => CutVal::from_r(rat_below(h)),
                Bnd::At(l, _) => CutVal::from_r(rat_between(l, h)),
                Bnd::PosInf => unreachable!("inverted interval"),
            };
            let w = h.sub(&anchor);
            let lo_k = h.sub(&w.scale(&half_pow(k - 1)));
            let hi_k = h.sub(&w.scale(&half_pow(k)));
            (lo_k, hi_k)
        }
        Bnd::NegInf => unreachable!("inverted interval"),
    }
}

fn half_pow(k: u64) -> R {
    BigRational::new(BigInt::one(), BigInt::one() << (k as usize))
}

// ---------------------------------------------------------------------------
// Rational enumeration and the value-level back-and-forth map.

const QBAF_STEP_CAP: usize = 200_000;
const HEIGHT_CAP: u64 = 2_000_000;

/// The base enumeration of all rationals, in the fixed order used everywhere.
fn rationals() -> Box<dyn Iterator<Item = R>> {
    Box::new(enumerate_points(&Term::Eta).map(|p| match p {
        Point::Rat(q) => q.0,
        _ => unreachable!("dense carrier yields rationals"),
    }))
}

fn in_window(x: &R, lo: &Option<CutVal>, hi: &Option<CutVal>) -> bool {
    let c = CutVal::from_r(x.clone());
    lo.as_ref().is_none_or(|l| c > *l) && hi.as_ref().is_none_or(|h| c < *h)
}

/// First rational of the base enumeration strictly below `c`.
fn first_rat_below(c: &CutVal) -> R {
    rationals()
        .find(|x| CutVal::from_r(x.clone()) < *c)
        .expect("rationals are unbounded below")
}

fn first_rat_above(c: &CutVal) -> R {
    rationals()
        .find(|x| CutVal::from_r(x.clone()) > *c)
        .expect("rationals are unbounded above")
}

/// Exact floor of a cut value: a √2 convergent supplies a candidate, exact
/// comparisons settle it.
fn floor_cut(x: &CutVal) -> BigInt {
    let approx = BigRational::new(BigInt::from(665_857), BigInt::from(470_832));
    let mut m = (&x.r + &x.s * approx).floor().to_integer();
    while CutVal::from_r(BigRational::from_integer(m.clone())) > *x {
        m -= 1;
    }
    loop {
        let next: BigInt = &m + 1;
        if CutVal::from_r(BigRational::from_integer(next.clone())) <= *x {
            m = next;
        } else {
            return m;
        }
    }
}

/// Multiplicative inverse of a nonzero cut value: conjugate over the norm.
fn inv_cut(c: &CutVal) -> CutVal {
    let norm = &c.r * &c.r - (&c.s * &c.s) * rint(2);
    assert!(!norm.is_zero(), "inverting zero");
    CutVal { r: &c.r / &norm, s: -&c.s / &norm }
}

/// The simplest rational strictly inside an open interval, by continued
/// fraction descent: take an integer when one fits (the one nearest zero),
/// otherwise recurse on the reciprocal of the fractional parts.
fn simplest_between(x: &Option<CutVal>, y: &Option<CutVal>) -> R {
    let lo_int: Option<BigInt> = x.as_ref().map(|x| floor_cut(x) + 1);
    let hi_int: Option<BigInt> = y.as_ref().map(|y| -floor_cut(&y.neg()) - 1);
    let nonempty = match (&lo_int, &hi_int) {
        (Some(a), Some(b)) => a <= b,
        _ => true,
    };
    if nonempty {
        let zero = BigInt::zero();
        let pick = match (&lo_int, &hi_int) {
            (Some(a), _) if *a > zero => a.clone(),
            (_, Some(b)) if *b < zero => b.clone(),
            _ => zero,
        };
        return BigRational::from_integer(pick);
    }
    // Both bounds live strictly inside one integer cell (n, n+1).
    let x = x.as_ref().expect("bounded on both sides");
    let y = y.as_ref().expect("bounded on both sides");
    let n = floor_cut(x);
    let nc = CutVal::from_r(BigRational::from_integer(n.clone()));
    let x_frac = x.sub(&nc);
    let y_frac = y.sub(&nc);
    // v = n + 1/w maps w ∈ (1/y_frac, 1/x_frac) onto (x, y), reversing order.
    let inner_lo = Some(inv_cut(&y_frac));
    let inner_hi = (x_frac.sign() != Ordering::Equal).then(|| inv_cut(&x_frac));
    let w = simplest_between(&inner_lo, &inner_hi);
    BigRational::from_integer(n) + w.recip()
}

/// Enumerates every rational of an open window, in rounds of increasing
/// height `max(|numerator|, denominator)`. For each denominator the
/// numerators inside the window form an integer range, so narrow windows are
/// reached directly instead of by filtering a global enumeration.
/// Unreduced fractions repeat earlier values; consumers tolerate duplicates.
struct WEnum {
    lo: Option<CutVal>,
    hi: Option<CutVal>,
    h: u64,
    buf: std::collections::VecDeque<R>,
    cache: Vec<R>,
}

impl WEnum {
    fn window(lo: Option<CutVal>, hi: Option<CutVal>) -> WEnum {
        WEnum { lo, hi, h: 0, buf: std::collections::VecDeque::new(), cache: Vec::new() }
    }

    /// Strict numerator range for denominator `d`, before height clamping.
    fn num_range(&self, d: u64) -> (Option<BigInt>, Option<BigInt>) {
        let dd = rnat(d);
        let lo_n = self.lo.as_ref().map(|l| floor_cut(&l.scale(&dd)) + 1);
        let hi_n = self.hi.as_ref().map(|h| -floor_cut(&h.neg().scale(&dd)) - 1);
        (lo_n, hi_n)
    }

    fn round(&mut self) {
        self.h += 1;
        assert!(self.h <= HEIGHT_CAP, "window enumeration cap exceeded");
        let h = self.h;
        let hb = BigInt::from(h);
        for d in 1..=h {
            let (lo_n, hi_n) = self.num_range(d);
            let lo_n = lo_n.unwrap_or_else(|| -&hb).max(-&hb);
            let hi_n = hi_n.unwrap_or_else(|| hb.clone()).min(hb.clone());
            if d == h {
                let mut n = lo_n;
                while n <= hi_n {
                    self.buf.push_back(BigRational::new(n.clone(), BigInt::from(d)));
                    n += 1;
                }
            } else {
                for n in [-&hb, hb.clone()] {
                    if lo_n <= n && n <= hi_n {
                        self.buf.push_back(BigRational::new(n, BigInt::from(d)));
                    }
                }
            }
        }
    }

    fn get(&mut self, i: usize) -> R {
        while self.cache.len() <= i {
            match self.buf.pop_front() {
                Some(x) => self.cache.push(x),
                None => self.round(),
            }
        }
        self.cache[i].clone()
    }
}

/// Deterministic back-and-forth order isomorphism between the rationals of
/// two open intervals. Equal windows use the identity; otherwise the
/// construction schedule alternates between the two enumerations and never
/// depends on the queries, so `fwd` and `bwd` describe fixed mutually inverse
/// monotone bijections.
struct QBaf {
    src: WEnum,
    dst: WEnum,
    ident: bool,
    pairs: Vec<(R, R)>,
    step: usize,
}

impl QBaf {
    fn new(src: WEnum, dst: WEnum) -> QBaf {
        let ident = src.lo == dst.lo && src.hi == dst.hi;
        QBaf { src, dst, ident, pairs: Vec::new(), step: 0 }
    }

    fn lookup_fwd(&self, x: &R) -> Option<R> {
        self.pairs
            .binary_search_by(|(a, _)| a.cmp(x))
            .ok()
            .map(|i| self.pairs[i].1.clone())
    }

    fn lookup_bwd(&self, y: &R) -> Option<R> {
        self.pairs
            .binary_search_by(|(_, b)| b.cmp(y))
            .ok()
            .map(|i| self.pairs[i].0.clone())
    }

    fn advance(&mut self) {
        let idx = self.step / 2;
        if self.step % 2 == 0 {
            let x = self.src.get(idx);
            if self.lookup_fwd(&x).is_none() {
                let at = self.pairs.partition_point(|(a, _)| *a < x);
                let gl = (at > 0).then(|| self.pairs[at - 1].1.clone());
                let gh = (at < self.pairs.len()).then(|| self.pairs[at].1.clone());
                let y = self.scan_gap(false, &gl, &gh);
                self.pairs.insert(at, (x, y));
            }
        } else {
            let y = self.dst.get(idx);
            if self.lookup_bwd(&y).is_none() {
                let at = self.pairs.partition_point(|(_, b)| *b < y);
                let gl = (at > 0).then(|| self.pairs[at - 1].0.clone());
                let gh = (at < self.pairs.len()).then(|| self.pairs[at].0.clone());
                let x = self.scan_gap(true, &gl, &gh);
                self.pairs.insert(at, (x, y));
            }
        }
        self.step += 1;
    }

    /// Deterministic partner for a gap: the simplest rational strictly inside
    /// the gap intersected with the chosen side's window. Direct construction
    /// keeps narrow gaps against irrational window bounds cheap.
    fn scan_gap(&self, from_src: bool, gl: &Option<R>, gh: &Option<R>) -> R {
        let side = if from_src { &self.src } else { &self.dst };
        let mut lo = side.lo.clone();
        if let Some(g) = gl {
            let g = CutVal::from_r(g.clone());
            lo = Some(lo.map_or(g.clone(), |l| l.max(g)));
        }
        let mut hi = side.hi.clone();
        if let Some(g) = gh {
            let g = CutVal::from_r(g.clone());
            hi = Some(hi.map_or(g.clone(), |h| h.min(g)));
        }
        simplest_between(&lo, &hi)
    }

    fn fwd(&mut self, x: &R) -> R {
        if self.ident {
            return x.clone();
        }
        loop {
            if let Some(y) = self.lookup_fwd(x) {
                return y;
            }
            assert!(self.step < QBAF_STEP_CAP, "back-and-forth step cap exceeded");
            self.advance();
        }
    }

    fn bwd(&mut self, y: &R) -> R {
        if self.ident {
            return y.clone();
        }
        loop {
            if let Some(x) = self.lookup_bwd(y) {
                return x;
            }
            assert!(self.step < QBAF_STEP_CAP, "back-and-forth step cap exceeded");
            self.advance();
        }
    }
}

// ---------------------------------------------------------------------------
// Structural tails.

fn lt_tail(t: &Term) -> bool {
    decompose_nonscattered(t).expect("non-scattered segment").prefix.is_some()
}

fn rt_tail(t: &Term) -> bool {
    decompose_nonscattered(t).expect("non-scattered segment").suffix.is_some()
}

fn first_point(t: &Term) -> Point {
    enumerate_points(t).next().expect("nonempty carrier")
}

// ---------------------------------------------------------------------------
// The dense leaf: a single rational coordinate.

/// Where a dense coordinate splits off its endpoint-collapse chunks: points
/// below −√2 realize an included left endpoint, points above √2 an included
/// right endpoint. The cuts are irrational, so no rational coordinate sits on
/// a boundary.
fn eta_like_eval(r: &R, lo: &Bnd, hi: &Bnd) -> Val {
    let x = CutVal::from_r(r.clone());
    let lcut = CutVal::sqrt2().neg();
    let rcut = CutVal::sqrt2();
    if lo.is_included() && x < lcut {
        return Val::Lo;
    }
    if hi.is_included() && x > rcut {
        return Val::Hi;
    }
    let src = WEnum::window(
        lo.is_included().then_some(lcut),
        hi.is_included().then_some(rcut),
    );
    let dst = WEnum::window(lo.cut().cloned(), hi.cut().cloned());
    Val::In(Q(QBaf::new(src, dst).fwd(r)))
}

fn eta_like_section(v: &Val, lo: &Bnd, hi: &Bnd) -> R {
    let lcut = CutVal::sqrt2().neg();
    let rcut = CutVal::sqrt2();
    match v {
        Val::Lo => {
            assert!(lo.is_included(), "left endpoint is not part of the target");
            first_rat_below(&lcut)
        }
        Val::Hi => {
            assert!(hi.is_included(), "right endpoint is not part of the target");
            first_rat_above(&rcut)
        }
        Val::In(q) => {
            let src = WEnum::window(
                lo.is_included().then_some(lcut),
                hi.is_included().then_some(rcut),
            );
            let dst = WEnum::window(lo.cut().cloned(), hi.cut().cloned());
            QBaf::new(src, dst).bwd(&q.0)
        }
    }
}

// ---------------------------------------------------------------------------
// Sums: scattered runs collapse to seam values, non-scattered parts get
// nested subintervals.

struct SumPlan {
    /// Indices of the non-scattered parts.
    dense: Vec<usize>,
    /// Cut between consecutive non-scattered parts, and whether it is a
    /// covered (rational) seam.
    cuts: Vec<(CutVal, bool)>,
}

fn plan_sum(parts: &[Term], lo: &Bnd, hi: &Bnd) -> SumPlan {
    let dense: Vec<usize> = parts
        .iter()
        .enumerate()
        .filter(|(_, t)| !is_scattered(t))
        .map(|(i, _)| i)
        .collect();
    assert!(!dense.is_empty(), "sum without a dense part");
    let mut cuts = Vec::new();
    let mut prev = lo.clone();
    for j in 0..dense.len() - 1 {
        // The seam value is reachable when the left part ends in a scattered
        // tail, the run between the parts is nonempty, or the right part
        // starts with one; otherwise park it at an irrational.
        let covered = rt_tail(&parts[dense[j]])
            || dense[j + 1] - dense[j] > 1
            || lt_tail(&parts[dense[j + 1]]);
        let c = bnd_between(&prev, hi, covered);
        prev = Bnd::excluded(c.clone());
        cuts.push((c, covered));
    }
    SumPlan { dense, cuts }
}

impl SumPlan {
    fn m(&self) -> usize {
        self.dense.len()
    }

    fn sub_lo(&self, j: usize, parts: &[Term], lo: &Bnd) -> Bnd {
        if j == 0 {
            if self.dense[0] == 0 {
                lo.clone()
            } else {
                let v = lo
                    .cut()
                    .filter(|_| lo.is_included())
                    .expect("leading scattered run needs an included left endpoint")
                    .clone();
                Bnd::At(v, lt_tail(&parts[self.dense[0]]))
            }
        } else {
            Bnd::At(self.cuts[j - 1].0.clone(), lt_tail(&parts[self.dense[j]]))
        }
    }

    fn sub_hi(&self, j: usize, parts: &[Term], hi: &Bnd) -> Bnd {
        if j == self.m() - 1 {
            if self.dense[j] == parts.len() - 1 {
                hi.clone()
            } else {
                let v = hi
                    .cut()
                    .filter(|_| hi.is_included())
                    .expect("trailing scattered run needs an included right endpoint")
                    .clone();
                Bnd::At(v, rt_tail(&parts[self.dense[j]]))
            }
        } else {
            Bnd::At(self.cuts[j].0.clone(), rt_tail(&parts[self.dense[j]]))
        }
    }

    fn seam_q(&self, j: usize) -> Q {
        self.cuts[j].0.as_q().expect("covered seam is rational")
    }
}

fn sum_eval(parts: &[Term], lo: &Bnd, hi: &Bnd, p: &Point) -> Val {
    let (i, inner) = match p {
        Point::SumPt(i, q) => (*i, &**q),
        _ => panic!("point does not match a sum"),
    };
    let plan = plan_sum(parts, lo, hi);
    match plan.dense.binary_search(&i) {
        Ok(j) => {
            let v = eval(
                &parts[i],
                &plan.sub_lo(j, parts, lo),
                &plan.sub_hi(j, parts, hi),
                inner,
            );
            match v {
                Val::Lo if j == 0 => Val::Lo,
                Val::Lo => Val::In(plan.seam_q(j - 1)),
                Val::Hi if j == plan.m() - 1 => Val::Hi,
                Val::Hi => Val::In(plan.seam_q(j)),
                x => x,
            }
        }
        Err(pos) => {
            // The point sits in a scattered run; `pos` counts the dense parts
            // before it.
            if pos == 0 {
                assert!(lo.is_included(), "scattered prefix with no left endpoint");
                Val::Lo
            } else if pos == plan.m() {
                assert!(hi.is_included(), "scattered suffix with no right endpoint");
                Val::Hi
            } else {
                Val::In(plan.seam_q(pos - 1))
            }
        }
    }
}

fn sum_section(parts: &[Term], lo: &Bnd, hi: &Bnd, v: &Val) -> Point {
    let plan = plan_sum(parts, lo, hi);
    let last = plan.m() - 1;
    match v {
        Val::Lo => {
            if plan.dense[0] > 0 {
                Point::sum(0, first_point(&parts[0]))
            } else {
                let i = plan.dense[0];
                Point::sum(
                    i,
                    section(&parts[i], &plan.sub_lo(0, parts, lo), &plan.sub_hi(0, parts, hi), v),
                )
            }
        }
        Val::Hi => {
            if plan.dense[last] < parts.len() - 1 {
                let i = plan.dense[last] + 1;
                Point::sum(i, first_point(&parts[i]))
            } else {
                let i = plan.dense[last];
                Point::sum(
                    i,
                    section(
                        &parts[i],
                        &plan.sub_lo(last, parts, lo),
                        &plan.sub_hi(last, parts, hi),
                        v,
                    ),
                )
            }
        }
        Val::In(q) => {
            let x = CutVal::rational(q);
            for j in 0..last {
                match x.cmp(&plan.cuts[j].0) {
                    Ordering::Less => {
                        let i = plan.dense[j];
                        return Point::sum(
                            i,
                            section(
                                &parts[i],
                                &plan.sub_lo(j, parts, lo),
                                &plan.sub_hi(j, parts, hi),
                                v,
                            ),
                        );
                    }
                    Ordering::Equal => return sum_seam_section(parts, lo, hi, &plan, j),
                    Ordering::Greater => {}
                }
            }
            let i = plan.dense[last];
            Point::sum(
                i,
                section(
                    &parts[i],
                    &plan.sub_lo(last, parts, lo),
                    &plan.sub_hi(last, parts, hi),
                    v,
                ),
            )
        }
    }
}

/// Deterministic representative for a covered seam value: the run between
/// the parts first, then the left part's tail, then the right part's head.
fn sum_seam_section(parts: &[Term], lo: &Bnd, hi: &Bnd, plan: &SumPlan, j: usize) -> Point {
    if plan.dense[j + 1] - plan.dense[j] > 1 {
        let i = plan.dense[j] + 1;
        Point::sum(i, first_point(&parts[i]))
    } else if rt_tail(&parts[plan.dense[j]]) {
        let i = plan.dense[j];
        Point::sum(
            i,
            section(&parts[i], &plan.sub_lo(j, parts, lo), &plan.sub_hi(j, parts, hi), &Val::Hi),
        )
    } else {
        let i = plan.dense[j + 1];
        Point::sum(
            i,
            section(
                &parts[i],
                &plan.sub_lo(j + 1, parts, lo),
                &plan.sub_hi(j + 1, parts, hi),
                &Val::Lo,
            ),
        )
    }
}

// ---------------------------------------------------------------------------
// Chains: products whose right factor is an infinite ordinal are split into
// fundamental-sequence difference blocks marching up the interval.

fn cterm(c: &Cnf) -> Term {
    if let Some(n) = c.as_nat() {
        assert!(n >= 1, "empty block width");
        Term::Fin(n)
    } else if *c == Cnf::omega() {
        Term::Omega
    } else {
        Term::Ord(c.clone())
    }
}

fn idx_point(b: &Term, v: &Cnf) -> Point {
    match b {
        Term::Fin(_) => Point::FinIdx(v.as_nat().expect("finite index")),
        Term::Omega => Point::Nat(v.as_nat().expect("finite index")),
        Term::Ord(_) => Point::OrdPt(v.clone()),
        _ => unreachable!("ordinal-indexed factor"),
    }
}

fn idx_cnf(p: &Point) -> Cnf {
    match p {
        Point::FinIdx(k) | Point::Nat(k) => Cnf::from_nat(*k),
        Point::OrdPt(v) => v.clone(),
        _ => unreachable!("ordinal-indexed coordinate"),
    }
}

struct Chain<'a> {
    a: &'a Term,
    c: &'a Cnf,
    lo: &'a Bnd,
    hi: &'a Bnd,
}

impl Chain<'_> {
    fn boundary(&self, n: u64) -> Cnf {
        if n == 0 {
            Cnf::zero()
        } else {
            self.c.fund_step(n).expect("limit index order")
        }
    }

    fn delta(&self, n: u64) -> Cnf {
        self.boundary(n + 1)
            .minus(&self.boundary(n))
            .expect("fundamental steps increase")
    }

    fn block_term(&self, n: u64) -> Term {
        let d = self.delta(n);
        if d == Cnf::one() {
            self.a.clone()
        } else {
            Term::Product(Box::new(self.a.clone()), Box::new(cterm(&d)))
        }
    }

    fn block_point(&self, n: u64, apt: &Point, off: &Cnf) -> Point {
        let d = self.delta(n);
        if d == Cnf::one() {
            apt.clone()
        } else {
            Point::prod(apt.clone(), idx_point(&cterm(&d), off))
        }
    }

    /// Splits a block-level point back into the product's coordinates.
    fn unblock(&self, b: &Term, n: u64, pt: Point) -> Point {
        let d = self.delta(n);
        if d == Cnf::one() {
            Point::prod(pt, idx_point(b, &self.boundary(n)))
        } else {
            match pt {
                Point::ProdPt(x, y) => {
                    let v = self.boundary(n).plus(&idx_cnf(&y));
                    Point::prod(*x, idx_point(b, &v))
                }
                _ => unreachable!("block point shape"),
            }
        }
    }

    /// Seam `k ≥ 1` sits between blocks `k−1` and `k`.
    fn covered(&self, k: u64) -> bool {
        rt_tail(&self.block_term(k - 1)) || lt_tail(&self.block_term(k))
    }

    fn cut(&self, k: u64) -> CutVal {
        let (wl, wh) = chain_window(self.lo, self.hi, k);
        if self.covered(k) {
            CutVal::from_r(rat_between(&wl, &wh))
        } else {
            irr_between(&wl, &wh)
        }
    }

    fn sub_lo(&self, n: u64) -> Bnd {
        if n == 0 {
            self.lo.clone()
        } else {
            Bnd::At(self.cut(n), lt_tail(&self.block_term(n)))
        }
    }

    fn sub_hi(&self, n: u64) -> Bnd {
        Bnd::At(self.cut(n + 1), rt_tail(&self.block_term(n)))
    }

    fn locate(&self, v: &Cnf) -> u64 {
        let mut n = 0;
        while !(*v < self.boundary(n + 1)) {
            n += 1;
        }
        n
    }

    fn seam_q(&self, k: u64) -> Q {
        self.cut(k).as_q().expect("covered seam is rational")
    }
}

fn chain_eval(a: &Term, c: &Cnf, lo: &Bnd, hi: &Bnd, apt: &Point, v: &Cnf) -> Val {
    let ch = Chain { a, c, lo, hi };
    if hi.is_included() {
        // A single leading block covers the open part; all later blocks
        // collapse onto the right endpoint.
        if *v < ch.boundary(1) {
            let t0 = ch.block_term(0);
            let sub_hi = Bnd::At(hi.cut().expect("included bound").clone(), rt_tail(&t0));
            return eval(&t0, lo, &sub_hi, &ch.block_point(0, apt, v));
        }
        return Val::Hi;
    }
    let n = ch.locate(v);
    let off = v.minus(&ch.boundary(n)).expect("offset within block");
    let val = eval(
        &ch.block_term(n),
        &ch.sub_lo(n),
        &ch.sub_hi(n),
        &ch.block_point(n, apt, &off),
    );
    match val {
        Val::Lo if n == 0 => Val::Lo,
        Val::Lo => Val::In(ch.seam_q(n)),
        Val::Hi => Val::In(ch.seam_q(n + 1)),
        x => x,
    }
}

fn chain_section(a: &Term, b: &Term, c: &Cnf, lo: &Bnd, hi: &Bnd, v: &Val) -> Point {
    let ch = Chain { a, c, lo, hi };
    if hi.is_included() {
        if matches!(v, Val::Hi) {
            return Point::prod(first_point(a), idx_point(b, &ch.boundary(1)));
        }
        let t0 = ch.block_term(0);
        let sub_hi = Bnd::At(hi.cut().expect("included bound").clone(), rt_tail(&t0));
        return ch.unblock(b, 0, section(&t0, lo, &sub_hi, v));
    }
    match v {
        Val::Lo => ch.unblock(b, 0, section(&ch.block_term(0), &ch.sub_lo(0), &ch.sub_hi(0), v)),
        Val::Hi => unreachable!("open upper bound has no top value"),
        Val::In(q) => {
            let x = CutVal::rational(q);
            let mut k = 1;
            loop {
                match x.cmp(&ch.cut(k)) {
                    Ordering::Less => {
                        let n = k - 1;
                        return ch.unblock(
                            b,
                            n,
                            section(&ch.block_term(n), &ch.sub_lo(n), &ch.sub_hi(n), v),
                        );
                    }
                    Ordering::Equal => {
                        // Seam representative: the left block's tail first,
                        // then the right block's head.
                        return if rt_tail(&ch.block_term(k - 1)) {
                            let n = k - 1;
                            ch.unblock(
                                b,
                                n,
                                section(&ch.block_term(n), &ch.sub_lo(n), &ch.sub_hi(n), &Val::Hi),
                            )
                        } else {
                            ch.unblock(
                                b,
                                k,
                                section(&ch.block_term(k), &ch.sub_lo(k), &ch.sub_hi(k), &Val::Lo),
                            )
                        };
                    }
                    Ordering::Greater => k += 1,
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Products, by case analysis on the right factor.

fn prod_eval(a: &Term, b: &Term, lo: &Bnd, hi: &Bnd, p: &Point) -> Val {
    let (apt, bpt) = match p {
        Point::ProdPt(x, y) => (&**x, &**y),
        _ => panic!("point does not match a product"),
    };
    match b {
        Term::Fin(n) => {
            // Finitely many copies laid end to end.
            let k = match bpt {
                Point::FinIdx(k) => *k as usize,
                _ => panic!("point does not match the factor"),
            };
            let parts = vec![a.clone(); *n as usize];
            sum_eval(&parts, lo, hi, &Point::sum(k, apt.clone()))
        }
        Term::Eta => {
            // Copies collapse; the dense index coordinate carries the value.
            let r = match bpt {
                Point::Rat(q) => &q.0,
                _ => panic!("point does not match the factor"),
            };
            eta_like_eval(r, lo, hi)
        }
        Term::Omega => chain_eval(a, &Cnf::omega(), lo, hi, apt, &idx_cnf(bpt)),
        Term::Ord(c) if c.is_limit() => chain_eval(a, c, lo, hi, apt, &idx_cnf(bpt)),
        Term::Ord(c) => {
            // Successor ordinal: split off the final copy.
            let c1 = c.pred().expect("successor ordinal");
            let v = idx_cnf(bpt);
            if c1.is_zero() {
                return eval(a, lo, hi, apt);
            }
            let head = Term::Product(Box::new(a.clone()), Box::new(cterm(&c1)));
            let parts = vec![head, a.clone()];
            let p2 = if v < c1 {
                Point::sum(0, Point::prod(apt.clone(), idx_point(&cterm(&c1), &v)))
            } else {
                Point::sum(1, apt.clone())
            };
            sum_eval(&parts, lo, hi, &p2)
        }
        Term::Sum(bs) => {
            // Multiplication distributes over the index sum.
            let (i, qb) = match bpt {
                Point::SumPt(i, q) => (*i, &**q),
                _ => panic!("point does not match the factor"),
            };
            let parts: Vec<Term> = bs
                .iter()
                .map(|pb| Term::Product(Box::new(a.clone()), Box::new(pb.clone())))
                .collect();
            sum_eval(&parts, lo, hi, &Point::sum(i, Point::prod(apt.clone(), qb.clone())))
        }
        Term::Product(b1, b2) => {
            // Reassociate towards an atomic right factor.
            let (b1pt, b2pt) = match bpt {
                Point::ProdPt(x, y) => (&**x, &**y),
                _ => panic!("point does not match the factor"),
            };
            let t2 = Term::Product(
                Box::new(Term::Product(Box::new(a.clone()), b1.clone())),
                b2.clone(),
            );
            let p2 = Point::prod(Point::prod(apt.clone(), b1pt.clone()), b2pt.clone());
            eval(&t2, lo, hi, &p2)
        }
        Term::OmegaStar => {
            let k = match bpt {
                Point::NegNat(k) => *k,
                _ => panic!("point does not match the factor"),
            };
            let (t2, _) = rev_product(a, &Term::Omega);
            let p2 = Point::rev(Point::prod(Point::rev(apt.clone()), Point::Nat(k)));
            eval(&t2, lo, hi, &p2)
        }
        Term::Reverse(e) => {
            let ept = match bpt {
                Point::RevPt(x) => &**x,
                _ => panic!("point does not match the factor"),
            };
            let (t2, _) = rev_product(a, e);
            let p2 = Point::rev(Point::prod(Point::rev(apt.clone()), ept.clone()));
            eval(&t2, lo, hi, &p2)
        }
    }
}

/// `A·rev(E)` rearranged as `rev(rev(A)·E)`, the shape the mirror rule eats.
fn rev_product(a: &Term, e: &Term) -> (Term, ()) {
    (
        Term::Reverse(Box::new(Term::Product(
            Box::new(Term::Reverse(Box::new(a.clone()))),
            Box::new(e.clone()),
        ))),
        (),
    )
}

fn prod_section(a: &Term, b: &Term, lo: &Bnd, hi: &Bnd, v: &Val) -> Point {
    match b {
        Term::Fin(n) => {
            let parts = vec![a.clone(); *n as usize];
            match sum_section(&parts, lo, hi, v) {
                Point::SumPt(k, inner) => Point::prod(*inner, Point::FinIdx(k as u64)),
                _ => unreachable!("sum section shape"),
            }
        }
        Term::Eta => {
            let r = eta_like_section(v, lo, hi);
            Point::prod(first_point(a), Point::Rat(Q(r)))
        }
        Term::Omega => chain_section(a, b, &Cnf::omega(), lo, hi, v),
        Term::Ord(c) if c.is_limit() => chain_section(a, b, c, lo, hi, v),
        Term::Ord(c) => {
            let c1 = c.pred().expect("successor ordinal");
            if c1.is_zero() {
                return Point::prod(section(a, lo, hi, v), Point::OrdPt(Cnf::zero()));
            }
            let head = Term::Product(Box::new(a.clone()), Box::new(cterm(&c1)));
            let parts = vec![head, a.clone()];
            match sum_section(&parts, lo, hi, v) {
                Point::SumPt(0, inner) => match *inner {
                    Point::ProdPt(x, y) => Point::prod(*x, Point::OrdPt(idx_cnf(&y))),
                    _ => unreachable!("head copy point shape"),
                },
                Point::SumPt(1, inner) => Point::prod(*inner, Point::OrdPt(c1)),
                _ => unreachable!("sum section shape"),
            }
        }
        Term::Sum(bs) => {
            let parts: Vec<Term> = bs
                .iter()
                .map(|pb| Term::Product(Box::new(a.clone()), Box::new(pb.clone())))
                .collect();
            match sum_section(&parts, lo, hi, v) {
                Point::SumPt(i, inner) => match *inner {
                    Point::ProdPt(x, y) => Point::prod(*x, Point::sum(i, *y)),
                    _ => unreachable!("distributed point shape"),
                },
                _ => unreachable!("sum section shape"),
            }
        }
        Term::Product(b1, b2) => {
            let t2 = Term::Product(
                Box::new(Term::Product(Box::new(a.clone()), b1.clone())),
                b2.clone(),
            );
            match section(&t2, lo, hi, v) {
                Point::ProdPt(xy, z) => match *xy {
                    Point::ProdPt(x, y) => Point::prod(*x, Point::prod(*y, *z)),
                    _ => unreachable!("reassociated point shape"),
                },
                _ => unreachable!("product section shape"),
            }
        }
        Term::OmegaStar => {
            let (t2, _) = rev_product(a, &Term::Omega);
            match section(&t2, lo, hi, v) {
                Point::RevPt(inner) => match *inner {
                    Point::ProdPt(ra, k) => match (*ra, k) {
                        (Point::RevPt(x), kk) => {
                            let n = match *kk {
                                Point::Nat(n) => n,
                                _ => unreachable!("mirrored index shape"),
                            };
                            Point::prod(*x, Point::NegNat(n))
                        }
                        _ => unreachable!("mirrored point shape"),
                    },
                    _ => unreachable!("mirrored point shape"),
                },
                _ => unreachable!("mirror section shape"),
            }
        }
        Term::Reverse(e) => {
            let (t2, _) = rev_product(a, e);
            match section(&t2, lo, hi, v) {
                Point::RevPt(inner) => match *inner {
                    Point::ProdPt(ra, ept) => match *ra {
                        Point::RevPt(x) => Point::prod(*x, Point::rev(*ept)),
                        _ => unreachable!("mirrored point shape"),
                    },
                    _ => unreachable!("mirrored point shape"),
                },
                _ => unreachable!("mirror section shape"),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The recursion proper.

fn eval(d: &Term, lo: &Bnd, hi: &Bnd, p: &Point) -> Val {
    match d {
        Term::Eta => match p {
            Point::Rat(q) => eta_like_eval(&q.0, lo, hi),
            _ => panic!("point does not match a dense leaf"),
        },
        Term::Sum(parts) => sum_eval(parts, lo, hi, p),
        Term::Product(a, b) => prod_eval(a, b, lo, hi, p),
        Term::Reverse(e) => match p {
            Point::RevPt(inner) => mirror(&eval(e, &hi.neg(), &lo.neg(), inner)),
            _ => panic!("point does not match a reversed order"),
        },
        _ => unreachable!("scattered term in a dense construction"),
    }
}

fn section(d: &Term, lo: &Bnd, hi: &Bnd, v: &Val) -> Point {
    match d {
        Term::Eta => Point::Rat(Q(eta_like_section(v, lo, hi))),
        Term::Sum(parts) => sum_section(parts, lo, hi, v),
        Term::Product(a, b) => prod_section(a, b, lo, hi, v),
        Term::Reverse(e) => Point::rev(section(e, &hi.neg(), &lo.neg(), &mirror(v))),
        _ => unreachable!("scattered term in a dense construction"),
    }
}

/// Image of `p` under the canonical surjection from `d` onto the interval
/// `(lo, hi)` (with the included endpoint values, if any).
pub fn dense_value(d: &Term, lo: &Bnd, hi: &Bnd, p: &Point) -> Val {
    debug_assert!(!is_scattered(d), "dense construction needs a non-scattered order");
    eval(d, lo, hi, p)
}

/// Deterministic right inverse of [`dense_value`]: a point of `d` whose image
/// is `v`, order-preserving in `v`.
pub fn dense_point(d: &Term, lo: &Bnd, hi: &Bnd, v: &Val) -> Point {
    debug_assert!(!is_scattered(d), "dense construction needs a non-scattered order");
    section(d, lo, hi, v)
}

// ---------------------------------------------------------------------------
// Target intervals for the four dense carriers, and the monotone bijections
// between their interiors and the full rational line.

/// The interval a dense carrier of the given family is realized on: endpoints
/// are included exactly where the family has them.
pub fn family_bounds(f: EtaFamily) -> (Bnd, Bnd) {
    match f {
        EtaFamily::Open => (Bnd::NegInf, Bnd::PosInf),
        EtaFamily::ClosedBelow => (Bnd::included(CutVal::int(0)), Bnd::PosInf),
        EtaFamily::ClosedAbove => (Bnd::NegInf, Bnd::included(CutVal::int(0))),
        EtaFamily::Closed => (Bnd::included(CutVal::int(0)), Bnd::included(CutVal::int(1))),
    }
}

/// Monotone bijection from the positive rationals onto all rationals.
pub fn pos_to_q(x: &Q) -> Q {
    assert!(x.0.is_positive());
    if x.0 < R::one() {
        Q(rint(2) - R::one() / &x.0)
    } else {
        Q(x.0.clone())
    }
}

pub fn q_to_pos(y: &Q) -> Q {
    if y.0 < R::one() {
        Q(R::one() / (rint(2) - &y.0))
    } else {
        Q(y.0.clone())
    }
}

/// Monotone bijection from the rationals of `(0, 1)` onto all rationals.
pub fn unit_to_q(x: &Q) -> Q {
    assert!(x.0.is_positive() && x.0 < R::one());
    pos_to_q(&Q(&x.0 / (R::one() - &x.0)))
}

pub fn q_to_unit(y: &Q) -> Q {
    let t = q_to_pos(y).0;
    Q(&t / (R::one() + &t))
}

/// Monotone bijection from the negative rationals onto all rationals.
pub fn neg_to_q(x: &Q) -> Q {
    Q(-pos_to_q(&Q(-&x.0)).0)
}

pub fn q_to_neg(y: &Q) -> Q {
    Q(-q_to_pos(&Q(-&y.0)).0)
}

/// Interior value of a family's interval, rephrased as an unconstrained
/// rational coordinate of the dense core.
pub fn interval_to_full(f: EtaFamily, q: &Q) -> Q {
    match f {
        EtaFamily::Open => q.clone(),
        EtaFamily::ClosedBelow => pos_to_q(q),
        EtaFamily::ClosedAbove => neg_to_q(q),
        EtaFamily::Closed => unit_to_q(q),
    }
}

pub fn full_to_interval(f: EtaFamily, q: &Q) -> Q {
    match f {
        EtaFamily::Open => q.clone(),
        EtaFamily::ClosedBelow => q_to_pos(q),
        EtaFamily::ClosedAbove => q_to_neg(q),
        EtaFamily::Closed => q_to_unit(q),
    }
}
