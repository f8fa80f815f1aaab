//! Concrete points of the orders denoted by terms.
//!
//! Every term shape has a matching point shape: indices for finite orders,
//! naturals for `w` (and top-down naturals for `w*`), exact rationals for
//! `eta`, smaller ordinals for ordinal literals, a part index plus an inner
//! point for sums, a pair for products (compared right component first, to
//! match the product orientation), and a wrapper for reversals.
//!
//! Beyond validation and comparison the module provides:
//!
//! - a deterministic enumeration of all points of any term, fair in the sense
//!   that every point shows up at a fixed finite index;
//! - endpoint and neighbor probes (`min_point`, `max_point`, `succ_point`,
//!   `pred_point`);
//! - cofinal/coinitial data: either the endpoint itself or a strictly
//!   monotone sequence reaching arbitrarily far ([`cofinal_reach`]);
//! - limit approach sequences ([`approach_from_below`], [`approach_from_above`]):
//!   a strictly monotone sequence with the given point as its exact supremum
//!   (infimum), existing precisely when the point is a limit from that side;
//! - a seeded [`Sampler`] and a conservative continuity check used to probe
//!   witness maps on limit families.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cnf::Cnf;
use crate::terms::Term;

/// An exact rational, serialized as a string like `-3/4` or `2`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub BigRational);

impl Q {
    pub fn from_int(n: i64) -> Q {
        Q(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(num: i64, den: i64) -> Q {
        assert!(den != 0, "zero denominator");
        Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

fn parse_q(s: &str) -> Result<Q, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
    let den = BigInt::from_str(den).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
    if den.is_zero() {
        return Err("zero denominator".to_string());
    }
    Ok(Q(BigRational::new(num, den)))
}

/// A point of the order denoted by a term; the variant mirrors the term
/// shape it belongs to.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    /// Point `i` of `Fin(n)`, zero-based from the bottom.
    FinIdx(u64),
    /// Point `n` of `w`.
    Nat(u64),
    /// Point `k` of `w*`, zero-based from the *top*: `NegNat(0)` is the
    /// greatest point and `NegNat(k+1)` lies directly below `NegNat(k)`.
    NegNat(u64),
    /// A rational point of `eta`.
    Rat(Q),
    /// A point of `Ord(c)`: any ordinal strictly below `c`.
    OrdPt(Cnf),
    /// A point of `Sum(parts)`: the part index and a point of that part.
    SumPt(usize, Box<Point>),
    /// A point of `Product(a, b)`: a point of `a` inside the copy indexed by
    /// a point of `b`. Comparison is by the `b` component first.
    ProdPt(Box<Point>, Box<Point>),
    /// A point of `Reverse(d)`: a point of `d` with the order flipped.
    RevPt(Box<Point>),
}

impl Point {
    pub fn sum(i: usize, p: Point) -> Point {
        Point::SumPt(i, Box::new(p))
    }

    pub fn prod(l: Point, r: Point) -> Point {
        Point::ProdPt(Box::new(l), Box::new(r))
    }

    pub fn rev(p: Point) -> Point {
        Point::RevPt(Box::new(p))
    }

    pub fn rat_int(n: i64) -> Point {
        Point::Rat(Q::from_int(n))
    }

    pub fn rat(num: i64, den: i64) -> Point {
        Point::Rat(Q::new(num, den))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::FinIdx(i) => write!(f, "#{i}"),
            Point::Nat(n) => write!(f, "n{n}"),
            Point::NegNat(k) => write!(f, "-{k}"),
            Point::Rat(q) => write!(f, "q{}", q.0),
            Point::OrdPt(c) => write!(f, "o[{c}]"),
            Point::SumPt(i, p) => write!(f, "s{i}:{p:?}"),
            Point::ProdPt(l, r) => write!(f, "({l:?},{r:?})"),
            Point::RevPt(p) => write!(f, "r:{p:?}"),
        }
    }
}

/// Does `p` denote a point of the order `t`?
pub fn validate_point(t: &Term, p: &Point) -> bool {
    match (t, p) {
        (Term::Fin(n), Point::FinIdx(i)) => i < n,
        (Term::Omega, Point::Nat(_)) => true,
        (Term::OmegaStar, Point::NegNat(_)) => true,
        (Term::Eta, Point::Rat(_)) => true,
        (Term::Ord(c), Point::OrdPt(d)) => d < c,
        (Term::Sum(parts), Point::SumPt(i, q)) => {
            parts.get(*i).is_some_and(|part| validate_point(part, q))
        }
        (Term::Product(a, b), Point::ProdPt(l, r)) => validate_point(a, l) && validate_point(b, r),
        (Term::Reverse(d), Point::RevPt(q)) => validate_point(d, q),
        _ => false,
    }
}

/// Compares two valid points of the same order. Panics when the shapes do
/// not belong to a common term; validate first.
pub fn cmp_points(p: &Point, q: &Point) -> Ordering {
    match (p, q) {
        (Point::FinIdx(a), Point::FinIdx(b)) => a.cmp(b),
        (Point::Nat(a), Point::Nat(b)) => a.cmp(b),
        // top-down indexing, so larger index means smaller point
        (Point::NegNat(a), Point::NegNat(b)) => b.cmp(a),
        (Point::Rat(a), Point::Rat(b)) => a.cmp(b),
        (Point::OrdPt(a), Point::OrdPt(b)) => a.cmp(b),
        (Point::SumPt(i, a), Point::SumPt(j, b)) => i.cmp(j).then_with(|| cmp_points(a, b)),
        (Point::ProdPt(l1, r1), Point::ProdPt(l2, r2)) => {
            cmp_points(r1, r2).then_with(|| cmp_points(l1, l2))
        }
        (Point::RevPt(a), Point::RevPt(b)) => cmp_points(a, b).reverse(),
        _ => panic!("points of different shapes: {p:?} vs {q:?}"),
    }
}

pub fn point_le(p: &Point, q: &Point) -> bool {
    cmp_points(p, q) != Ordering::Greater
}

// ---------------------------------------------------------------------------
// Enumeration

/// Enumerates every point of the order exactly once, deterministically.
/// The stream is infinite unless the order is finite.
pub fn enumerate_points(t: &Term) -> Box<dyn Iterator<Item = Point>> {
    match t {
        Term::Fin(n) => Box::new((0..*n).map(Point::FinIdx)),
        Term::Omega => Box::new((0..).map(Point::Nat)),
        Term::OmegaStar => Box::new((0..).map(Point::NegNat)),
        Term::Eta => Box::new(EtaEnum::new().map(|q| Point::Rat(Q(q)))),
        Term::Ord(c) => Box::new(enum_cnf_below(c).map(Point::OrdPt)),
        Term::Sum(parts) => Box::new(RoundRobin::new(
            parts.iter().map(enumerate_points).collect(),
        )),
        Term::Product(a, b) => Box::new(Diagonal::new(enumerate_points(a), enumerate_points(b))),
        Term::Reverse(d) => Box::new(enumerate_points(d).map(Point::rev)),
    }
}

/// Positive rationals in Calkin-Wilf order (`1, 1/2, 2, 1/3, 3/2, ...`),
/// interleaved with their negations one step behind, after an initial zero:
/// `0, 1, 1/2, -1, 2, -1/2, 1/3, -2, ...`.
struct EtaEnum {
    emitted: u64,
    cur: BigRational,
    pending_neg: VecDeque<BigRational>,
    next_is_neg: bool,
}

impl EtaEnum {
    fn new() -> EtaEnum {
        EtaEnum {
            emitted: 0,
            cur: BigRational::one(),
            pending_neg: VecDeque::new(),
            next_is_neg: false,
        }
    }

    fn advance(x: &BigRational) -> BigRational {
        // next Calkin-Wilf value: 1 / (2*floor(x) - x + 1)
        let two = BigRational::from_integer(BigInt::from(2));
        let d = two * x.floor() - x + BigRational::one();
        BigRational::one() / d
    }
}

impl Iterator for EtaEnum {
    type Item = BigRational;

    fn next(&mut self) -> Option<BigRational> {
        if self.emitted == 0 {
            self.emitted = 1;
            return Some(BigRational::zero());
        }
        if self.emitted == 1 {
            self.emitted = 2;
            self.pending_neg.push_back(self.cur.clone());
            return Some(self.cur.clone());
        }
        self.emitted += 1;
        if self.next_is_neg {
            self.next_is_neg = false;
            let q = self.pending_neg.pop_front().expect("a positive was queued");
            Some(-q)
        } else {
            self.next_is_neg = true;
            self.cur = EtaEnum::advance(&self.cur);
            self.pending_neg.push_back(self.cur.clone());
            Some(self.cur.clone())
        }
    }
}

/// Enumerates every ordinal strictly below `c`, fairly and without
/// repetition, by structural recursion on the normal form:
///
/// - below `w^e*n + rest`: round-robin over the `n` blocks
///   `w^e*k + [0, w^e)` and the tail `w^e*n + [0, rest)`;
/// - below `w^(d+1)`: anti-diagonal pairing of `w^d*k + [0, w^d)`;
/// - below `w^g` for limit `g`: the bands `[w^(g[n-1]), w^(g[n]))` along the
///   fundamental sequence of `g`, dovetailed.
pub fn enum_cnf_below(c: &Cnf) -> Box<dyn Iterator<Item = Cnf>> {
    if let Some(n) = c.as_nat() {
        return Box::new((0..n).map(Cnf::from_nat));
    }
    let (e0, n0) = c.leading().expect("nonzero");
    let e0 = e0.clone();
    if c.is_monomial() && n0 == 1 {
        return match e0.pred() {
            Some(delta) => {
                if delta.is_zero() {
                    Box::new((0..).map(Cnf::from_nat))
                } else {
                    Box::new(DiagCnf::new(delta))
                }
            }
            None => Box::new(BandsCnf::new(e0)),
        };
    }
    let mono = Cnf::monomial(e0.clone(), n0);
    let rest = c.minus(&mono).expect("leading monomial is a prefix");
    let power = Cnf::monomial(e0.clone(), 1);
    let mut streams: Vec<Box<dyn Iterator<Item = Cnf>>> = Vec::new();
    for k in 0..n0 {
        let offset = Cnf::monomial(e0.clone(), k);
        streams.push(Box::new(enum_cnf_below(&power).map(move |v| offset.plus(&v))));
    }
    if !rest.is_zero() {
        streams.push(Box::new(enum_cnf_below(&rest).map(move |v| mono.plus(&v))));
    }
    Box::new(RoundRobinCnf { streams, pos: 0 })
}

/// Fair interleaving of finitely many ordinal streams.
struct RoundRobinCnf {
    streams: Vec<Box<dyn Iterator<Item = Cnf>>>,
    pos: usize,
}

impl Iterator for RoundRobinCnf {
    type Item = Cnf;

    fn next(&mut self) -> Option<Cnf> {
        while !self.streams.is_empty() {
            if self.pos >= self.streams.len() {
                self.pos = 0;
            }
            match self.streams[self.pos].next() {
                Some(v) => {
                    self.pos += 1;
                    return Some(v);
                }
                None => {
                    drop(self.streams.remove(self.pos));
                }
            }
        }
        None
    }
}

/// Values below `w^(delta+1)` as pairs `w^delta*k + u` with `u < w^delta`,
/// explored along anti-diagonals of `(k, u)`.
struct DiagCnf {
    delta: Cnf,
    inner: Box<dyn Iterator<Item = Cnf>>,
    cache: Vec<Cnf>,
    inner_done: bool,
    d: u64,
    i: u64,
}

impl DiagCnf {
    fn new(delta: Cnf) -> DiagCnf {
        let inner = enum_cnf_below(&Cnf::monomial(delta.clone(), 1));
        DiagCnf { delta, inner, cache: Vec::new(), inner_done: false, d: 0, i: 0 }
    }
}

impl Iterator for DiagCnf {
    type Item = Cnf;

    fn next(&mut self) -> Option<Cnf> {
        loop {
            if self.i > self.d {
                self.d += 1;
                self.i = 0;
            }
            let k = self.i;
            let uidx = (self.d - self.i) as usize;
            self.i += 1;
            while !self.inner_done && self.cache.len() <= uidx {
                match self.inner.next() {
                    Some(v) => self.cache.push(v),
                    None => self.inner_done = true,
                }
            }
            if uidx < self.cache.len() {
                return Some(Cnf::monomial(self.delta.clone(), k).plus(&self.cache[uidx]));
            }
        }
    }
}

/// Values below `w^g` for a limit exponent `g`: band `n` holds the values in
/// `[w^(g[n-1]), w^(g[n]))`, which partition `[0, w^g)`. Bands are opened
/// lazily and pulled from in widening rounds.
struct BandsCnf {
    gamma: Cnf,
    bands: Vec<Option<Box<dyn Iterator<Item = Cnf>>>>,
    round: usize,
    pos: usize,
}

impl BandsCnf {
    fn new(gamma: Cnf) -> BandsCnf {
        BandsCnf { gamma, bands: Vec::new(), round: 0, pos: 0 }
    }

    fn open(&mut self, n: usize) {
        while self.bands.len() <= n {
            let idx = self.bands.len() as u64;
            let hi = Cnf::monomial(self.gamma.fund_step(idx).expect("limit"), 1);
            let it: Box<dyn Iterator<Item = Cnf>> = if idx == 0 {
                enum_cnf_below(&hi)
            } else {
                let lo = Cnf::monomial(self.gamma.fund_step(idx - 1).expect("limit"), 1);
                Box::new(enum_cnf_below(&hi).filter(move |v| *v >= lo))
            };
            self.bands.push(Some(it));
        }
    }
}

impl Iterator for BandsCnf {
    type Item = Cnf;

    fn next(&mut self) -> Option<Cnf> {
        loop {
            if self.pos > self.round {
                self.round += 1;
                self.pos = 0;
            }
            let n = self.pos;
            self.pos += 1;
            self.open(n);
            if let Some(it) = &mut self.bands[n] {
                match it.next() {
                    Some(v) => return Some(v),
                    None => self.bands[n] = None,
                }
            }
        }
    }
}

/// Fair interleaving of the part enumerations of a sum.
struct RoundRobin {
    iters: Vec<(usize, Box<dyn Iterator<Item = Point>>)>,
    pos: usize,
}

impl RoundRobin {
    fn new(iters: Vec<Box<dyn Iterator<Item = Point>>>) -> RoundRobin {
        RoundRobin { iters: iters.into_iter().enumerate().collect(), pos: 0 }
    }
}

impl Iterator for RoundRobin {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        while !self.iters.is_empty() {
            if self.pos >= self.iters.len() {
                self.pos = 0;
            }
            let (part, it) = &mut self.iters[self.pos];
            match it.next() {
                Some(p) => {
                    let part = *part;
                    self.pos += 1;
                    return Some(Point::sum(part, p));
                }
                None => {
                    drop(self.iters.remove(self.pos));
                }
            }
        }
        None
    }
}

/// Anti-diagonal pairing of two enumerations.
struct Diagonal {
    a: std::iter::Fuse<Box<dyn Iterator<Item = Point>>>,
    b: std::iter::Fuse<Box<dyn Iterator<Item = Point>>>,
    a_cache: Vec<Point>,
    b_cache: Vec<Point>,
    a_done: bool,
    b_done: bool,
    d: usize,
    i: usize,
}

impl Diagonal {
    fn new(a: Box<dyn Iterator<Item = Point>>, b: Box<dyn Iterator<Item = Point>>) -> Diagonal {
        Diagonal {
            a: a.fuse(),
            b: b.fuse(),
            a_cache: Vec::new(),
            b_cache: Vec::new(),
            a_done: false,
            b_done: false,
            d: 0,
            i: 0,
        }
    }

    fn fill_a(&mut self, upto: usize) {
        while !self.a_done && self.a_cache.len() <= upto {
            match self.a.next() {
                Some(p) => self.a_cache.push(p),
                None => self.a_done = true,
            }
        }
    }

    fn fill_b(&mut self, upto: usize) {
        while !self.b_done && self.b_cache.len() <= upto {
            match self.b.next() {
                Some(p) => self.b_cache.push(p),
                None => self.b_done = true,
            }
        }
    }
}

impl Iterator for Diagonal {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        loop {
            if self.i > self.d {
                self.d += 1;
                self.i = 0;
                if self.a_done && self.b_done && self.d > self.a_cache.len() + self.b_cache.len() {
                    return None;
                }
            }
            let i = self.i;
            let j = self.d - i;
            self.i += 1;
            self.fill_a(i);
            self.fill_b(j);
            if i < self.a_cache.len() && j < self.b_cache.len() {
                return Some(Point::prod(self.a_cache[i].clone(), self.b_cache[j].clone()));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Endpoints and neighbors

pub fn min_point(t: &Term) -> Option<Point> {
    match t {
        Term::Fin(_) => Some(Point::FinIdx(0)),
        Term::Omega => Some(Point::Nat(0)),
        Term::OmegaStar | Term::Eta => None,
        Term::Ord(_) => Some(Point::OrdPt(Cnf::zero())),
        Term::Sum(parts) => min_point(parts.first()?).map(|p| Point::sum(0, p)),
        Term::Product(a, b) => Some(Point::prod(min_point(a)?, min_point(b)?)),
        Term::Reverse(d) => max_point(d).map(Point::rev),
    }
}

pub fn max_point(t: &Term) -> Option<Point> {
    match t {
        Term::Fin(n) => Some(Point::FinIdx(n - 1)),
        Term::Omega | Term::Eta => None,
        Term::OmegaStar => Some(Point::NegNat(0)),
        Term::Ord(c) => c.pred().map(Point::OrdPt),
        Term::Sum(parts) => {
            let i = parts.len() - 1;
            max_point(parts.last()?).map(|p| Point::sum(i, p))
        }
        Term::Product(a, b) => Some(Point::prod(max_point(a)?, max_point(b)?)),
        Term::Reverse(d) => min_point(d).map(Point::rev),
    }
}

/// The immediate successor of `p` in `t`, when one exists.
pub fn succ_point(t: &Term, p: &Point) -> Option<Point> {
    match (t, p) {
        (Term::Fin(n), Point::FinIdx(i)) => (i + 1 < *n).then(|| Point::FinIdx(i + 1)),
        (Term::Omega, Point::Nat(k)) => Some(Point::Nat(k + 1)),
        (Term::OmegaStar, Point::NegNat(k)) => (*k > 0).then(|| Point::NegNat(k - 1)),
        (Term::Eta, Point::Rat(_)) => None,
        (Term::Ord(c), Point::OrdPt(d)) => {
            let s = d.succ();
            (&s < c).then_some(Point::OrdPt(s))
        }
        (Term::Sum(parts), Point::SumPt(i, q)) => {
            if let Some(s) = succ_point(&parts[*i], q) {
                return Some(Point::sum(*i, s));
            }
            if max_point(&parts[*i]).as_ref() == Some(&**q) && i + 1 < parts.len() {
                return min_point(&parts[i + 1]).map(|m| Point::sum(i + 1, m));
            }
            None
        }
        (Term::Product(a, b), Point::ProdPt(l, r)) => {
            if let Some(s) = succ_point(a, l) {
                return Some(Point::prod(s, (**r).clone()));
            }
            if max_point(a).as_ref() == Some(&**l) {
                let sr = succ_point(b, r)?;
                return min_point(a).map(|m| Point::prod(m, sr));
            }
            None
        }
        (Term::Reverse(d), Point::RevPt(q)) => pred_point(d, q).map(Point::rev),
        _ => panic!("point {p:?} does not belong to {t}"),
    }
}

/// The immediate predecessor of `p` in `t`, when one exists.
pub fn pred_point(t: &Term, p: &Point) -> Option<Point> {
    match (t, p) {
        (Term::Fin(_), Point::FinIdx(i)) => (*i > 0).then(|| Point::FinIdx(i - 1)),
        (Term::Omega, Point::Nat(k)) => (*k > 0).then(|| Point::Nat(k - 1)),
        (Term::OmegaStar, Point::NegNat(k)) => Some(Point::NegNat(k + 1)),
        (Term::Eta, Point::Rat(_)) => None,
        (Term::Ord(_), Point::OrdPt(d)) => d.pred().map(Point::OrdPt),
        (Term::Sum(parts), Point::SumPt(i, q)) => {
            if let Some(s) = pred_point(&parts[*i], q) {
                return Some(Point::sum(*i, s));
            }
            if min_point(&parts[*i]).as_ref() == Some(&**q) && *i > 0 {
                return max_point(&parts[i - 1]).map(|m| Point::sum(i - 1, m));
            }
            None
        }
        (Term::Product(a, b), Point::ProdPt(l, r)) => {
            if let Some(s) = pred_point(a, l) {
                return Some(Point::prod(s, (**r).clone()));
            }
            if min_point(a).as_ref() == Some(&**l) {
                let pr = pred_point(b, r)?;
                return max_point(a).map(|m| Point::prod(m, pr));
            }
            None
        }
        (Term::Reverse(d), Point::RevPt(q)) => succ_point(d, q).map(Point::rev),
        _ => panic!("point {p:?} does not belong to {t}"),
    }
}

// ---------------------------------------------------------------------------
// Cofinal and coinitial data, limit approach sequences

/// A strictly monotone point sequence given by its indexing function.
pub type PSeq = Rc<dyn Fn(u64) -> Point>;

/// How an order reaches one of its ends: either it attains it, or a strictly
/// monotone sequence passes every point on that side.
#[derive(Clone)]
pub enum EndBehavior {
    /// The order has this endpoint.
    Endpoint(Point),
    /// No endpoint; the sequence is strictly monotone and unbounded on that
    /// side (increasing for [`cofinal_reach`], decreasing for
    /// [`coinitial_reach`]).
    Approach(PSeq),
}

impl EndBehavior {
    pub fn endpoint(&self) -> Option<&Point> {
        match self {
            EndBehavior::Endpoint(p) => Some(p),
            EndBehavior::Approach(_) => None,
        }
    }
}

fn lift_sum(i: usize, s: PSeq) -> PSeq {
    Rc::new(move |n| Point::sum(i, s(n)))
}

fn lift_prod_left(s: PSeq, r: Point) -> PSeq {
    Rc::new(move |n| Point::prod(s(n), r.clone()))
}

fn lift_prod_right(l: Point, s: PSeq) -> PSeq {
    Rc::new(move |n| Point::prod(l.clone(), s(n)))
}

fn lift_rev(s: PSeq) -> PSeq {
    Rc::new(move |n| Point::rev(s(n)))
}

pub fn cofinal_reach(t: &Term) -> EndBehavior {
    match t {
        Term::Fin(n) => EndBehavior::Endpoint(Point::FinIdx(n - 1)),
        Term::Omega => EndBehavior::Approach(Rc::new(|n| Point::Nat(n))),
        Term::OmegaStar => EndBehavior::Endpoint(Point::NegNat(0)),
        Term::Eta => EndBehavior::Approach(Rc::new(|n| Point::Rat(Q(BigRational::from_integer(BigInt::from(n)))))),
        Term::Ord(c) => match c.pred() {
            Some(d) => EndBehavior::Endpoint(Point::OrdPt(d)),
            None => {
                let c = c.clone();
                EndBehavior::Approach(Rc::new(move |n| {
                    Point::OrdPt(c.fund_step(n).expect("no predecessor, so a limit"))
                }))
            }
        },
        Term::Sum(parts) => {
            let i = parts.len() - 1;
            match cofinal_reach(parts.last().expect("nonempty sum")) {
                EndBehavior::Endpoint(p) => EndBehavior::Endpoint(Point::sum(i, p)),
                EndBehavior::Approach(s) => EndBehavior::Approach(lift_sum(i, s)),
            }
        }
        Term::Product(a, b) => match cofinal_reach(b) {
            EndBehavior::Endpoint(mb) => match cofinal_reach(a) {
                EndBehavior::Endpoint(ma) => EndBehavior::Endpoint(Point::prod(ma, mb)),
                EndBehavior::Approach(sa) => EndBehavior::Approach(lift_prod_left(sa, mb)),
            },
            EndBehavior::Approach(sb) => {
                let a0 = enumerate_points(a).next().expect("orders are nonempty");
                EndBehavior::Approach(lift_prod_right(a0, sb))
            }
        },
        Term::Reverse(d) => match coinitial_reach(d) {
            EndBehavior::Endpoint(p) => EndBehavior::Endpoint(Point::rev(p)),
            EndBehavior::Approach(s) => EndBehavior::Approach(lift_rev(s)),
        },
    }
}

pub fn coinitial_reach(t: &Term) -> EndBehavior {
    match t {
        Term::Fin(_) => EndBehavior::Endpoint(Point::FinIdx(0)),
        Term::Omega => EndBehavior::Endpoint(Point::Nat(0)),
        Term::OmegaStar => EndBehavior::Approach(Rc::new(|n| Point::NegNat(n))),
        Term::Eta => EndBehavior::Approach(Rc::new(|n| {
            Point::Rat(Q(-BigRational::from_integer(BigInt::from(n))))
        })),
        Term::Ord(_) => EndBehavior::Endpoint(Point::OrdPt(Cnf::zero())),
        Term::Sum(parts) => match coinitial_reach(parts.first().expect("nonempty sum")) {
            EndBehavior::Endpoint(p) => EndBehavior::Endpoint(Point::sum(0, p)),
            EndBehavior::Approach(s) => EndBehavior::Approach(lift_sum(0, s)),
        },
        Term::Product(a, b) => match coinitial_reach(b) {
            EndBehavior::Endpoint(mb) => match coinitial_reach(a) {
                EndBehavior::Endpoint(ma) => EndBehavior::Endpoint(Point::prod(ma, mb)),
                EndBehavior::Approach(sa) => EndBehavior::Approach(lift_prod_left(sa, mb)),
            },
            EndBehavior::Approach(sb) => {
                let a0 = enumerate_points(a).next().expect("orders are nonempty");
                EndBehavior::Approach(lift_prod_right(a0, sb))
            }
        },
        Term::Reverse(d) => match cofinal_reach(d) {
            EndBehavior::Endpoint(p) => EndBehavior::Endpoint(Point::rev(p)),
            EndBehavior::Approach(s) => EndBehavior::Approach(lift_rev(s)),
        },
    }
}

/// A strictly increasing sequence whose exact supremum is `p`, when `p` is a
/// limit from below (no predecessor and not the minimum); `None` otherwise.
pub fn approach_from_below(t: &Term, p: &Point) -> Option<PSeq> {
    match (t, p) {
        (Term::Fin(_), _) | (Term::Omega, _) | (Term::OmegaStar, _) => None,
        (Term::Eta, Point::Rat(q)) => {
            let q = q.clone();
            Some(Rc::new(move |n| {
                let step = BigRational::new(BigInt::one(), BigInt::one() << n);
                Point::Rat(Q(&q.0 - step))
            }))
        }
        (Term::Ord(_), Point::OrdPt(d)) => {
            if !d.is_limit() {
                return None;
            }
            let d = d.clone();
            Some(Rc::new(move |n| Point::OrdPt(d.fund_step(n).expect("limit"))))
        }
        (Term::Sum(parts), Point::SumPt(i, q)) => {
            if let Some(s) = approach_from_below(&parts[*i], q) {
                return Some(lift_sum(*i, s));
            }
            if min_point(&parts[*i]).as_ref() == Some(&**q) && *i > 0 {
                if let EndBehavior::Approach(s) = cofinal_reach(&parts[i - 1]) {
                    return Some(lift_sum(i - 1, s));
                }
            }
            None
        }
        (Term::Product(a, b), Point::ProdPt(l, r)) => {
            if let Some(s) = approach_from_below(a, l) {
                return Some(lift_prod_left(s, (**r).clone()));
            }
            if min_point(a).as_ref() != Some(&**l) {
                return None;
            }
            if let Some(s) = approach_from_below(b, r) {
                // copies below approach the seam; stay at the left minimum
                return Some(lift_prod_right((**l).clone(), s));
            }
            if let Some(pr) = pred_point(b, r) {
                if let EndBehavior::Approach(sa) = cofinal_reach(a) {
                    return Some(lift_prod_left(sa, pr));
                }
            }
            None
        }
        (Term::Reverse(d), Point::RevPt(q)) => approach_from_above(d, q).map(lift_rev),
        _ => panic!("point {p:?} does not belong to {t}"),
    }
}

/// A strictly decreasing sequence whose exact infimum is `p`, when `p` is a
/// limit from above; `None` otherwise.
pub fn approach_from_above(t: &Term, p: &Point) -> Option<PSeq> {
    match (t, p) {
        (Term::Fin(_), _) | (Term::Omega, _) | (Term::OmegaStar, _) | (Term::Ord(_), _) => None,
        (Term::Eta, Point::Rat(q)) => {
            let q = q.clone();
            Some(Rc::new(move |n| {
                let step = BigRational::new(BigInt::one(), BigInt::one() << n);
                Point::Rat(Q(&q.0 + step))
            }))
        }
        (Term::Sum(parts), Point::SumPt(i, q)) => {
            if let Some(s) = approach_from_above(&parts[*i], q) {
                return Some(lift_sum(*i, s));
            }
            if max_point(&parts[*i]).as_ref() == Some(&**q) && i + 1 < parts.len() {
                if let EndBehavior::Approach(s) = coinitial_reach(&parts[i + 1]) {
                    return Some(lift_sum(i + 1, s));
                }
            }
            None
        }
        (Term::Product(a, b), Point::ProdPt(l, r)) => {
            if let Some(s) = approach_from_above(a, l) {
                return Some(lift_prod_left(s, (**r).clone()));
            }
            if max_point(a).as_ref() != Some(&**l) {
                return None;
            }
            if let Some(s) = approach_from_above(b, r) {
                return Some(lift_prod_right((**l).clone(), s));
            }
            if let Some(sr) = succ_point(b, r) {
                if let EndBehavior::Approach(sa) = coinitial_reach(a) {
                    return Some(lift_prod_left(sa, sr));
                }
            }
            None
        }
        (Term::Reverse(d), Point::RevPt(q)) => approach_from_below(d, q).map(lift_rev),
        _ => panic!("point {p:?} does not belong to {t}"),
    }
}

// ---------------------------------------------------------------------------
// Sampling and continuity probes

/// Deterministic point sampling driven by a seed: enumeration prefixes plus
/// seeded picks deeper into the stream.
#[derive(Clone, Copy, Debug)]
pub struct Sampler {
    pub seed: u64,
    pub depth: usize,
}

impl Default for Sampler {
    fn default() -> Sampler {
        Sampler { seed: 0, depth: 64 }
    }
}

impl Sampler {
    pub fn new(seed: u64, depth: usize) -> Sampler {
        Sampler { seed, depth: depth.max(1) }
    }

    /// Up to `depth` sample points: an enumeration prefix plus seeded picks
    /// from the first `4 * depth` enumerated points.
    pub fn points(&self, t: &Term) -> Vec<Point> {
        let prefix = self.depth / 2 + 1;
        let pool: Vec<Point> = enumerate_points(t).take(self.depth * 4).collect();
        let mut out: Vec<Point> = pool.iter().take(prefix).cloned().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        while out.len() < self.depth.min(pool.len()) {
            let k = rng.gen_range(0..pool.len());
            if !out.contains(&pool[k]) {
                out.push(pool[k].clone());
            }
        }
        out
    }

    pub fn pairs(&self, t: &Term) -> Vec<(Point, Point)> {
        let pts = self.points(t);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(1));
        let mut out = Vec::new();
        for _ in 0..self.depth {
            let i = rng.gen_range(0..pts.len());
            let j = rng.gen_range(0..pts.len());
            out.push((pts[i].clone(), pts[j].clone()));
        }
        out
    }
}

/// A sampled limit: a strictly monotone chain together with its exact
/// supremum (when `from_below`) or infimum (otherwise).
#[derive(Clone, Debug)]
pub struct LimitFamily {
    pub chain: Vec<Point>,
    pub limit: Point,
    pub from_below: bool,
}

/// Collects limit families among the sampled points of `t`.
pub fn limit_families(t: &Term, sampler: &Sampler, chain_len: u64) -> Vec<LimitFamily> {
    let mut out = Vec::new();
    for p in sampler.points(t) {
        if let Some(s) = approach_from_below(t, &p) {
            out.push(LimitFamily {
                chain: (0..chain_len).map(&*s).collect(),
                limit: p.clone(),
                from_below: true,
            });
        }
        if let Some(s) = approach_from_above(t, &p) {
            out.push(LimitFamily {
                chain: (0..chain_len).map(&*s).collect(),
                limit: p.clone(),
                from_below: false,
            });
        }
    }
    out
}

/// Outcome of probing one image chain against its image limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContinuityVerdict {
    /// Nothing contradicts continuity on this family.
    Consistent,
    /// The sampled images sit strictly inside a gap below (above) the image
    /// of the limit; not conclusive, because unsampled chain elements could
    /// still close the gap.
    Suspect(String),
    /// The images contradict order preservation on the family, which is
    /// conclusive.
    Refuted(String),
}

/// Checks the image of a limit family for continuity of an order-preserving
/// map: images must be monotone and bounded by the image of the limit, and
/// the image of the limit should be their exact supremum (infimum). Only
/// order violations are conclusive; see [`ContinuityVerdict`].
pub fn check_continuity(
    dst: &Term,
    mapped_chain: &[Point],
    mapped_limit: &Point,
    from_below: bool,
) -> ContinuityVerdict {
    let expect = if from_below { Ordering::Less } else { Ordering::Greater };
    for w in mapped_chain.windows(2) {
        let c = cmp_points(&w[0], &w[1]);
        if c != expect && c != Ordering::Equal {
            return ContinuityVerdict::Refuted(format!(
                "images out of order: {:?} then {:?}",
                w[0], w[1]
            ));
        }
    }
    let mut hit = false;
    for q in mapped_chain {
        let c = cmp_points(q, mapped_limit);
        if c == expect.reverse() {
            return ContinuityVerdict::Refuted(format!(
                "image {q:?} passes the image of the limit {mapped_limit:?}"
            ));
        }
        if c == Ordering::Equal {
            hit = true;
        }
    }
    if hit {
        return ContinuityVerdict::Consistent;
    }
    // A finite sample casts suspicion only when the images have visibly
    // plateaued strictly short of the limit image; a chain whose images are
    // still moving is inconclusive.
    let n = mapped_chain.len();
    let plateaued =
        n >= 2 && cmp_points(&mapped_chain[n - 2], &mapped_chain[n - 1]) == Ordering::Equal;
    if !plateaued {
        return ContinuityVerdict::Consistent;
    }
    let stop = &mapped_chain[n - 1];
    let neighbor = if from_below {
        pred_point(dst, mapped_limit)
    } else {
        succ_point(dst, mapped_limit)
    };
    if neighbor.as_ref() == Some(stop) {
        ContinuityVerdict::Suspect(format!(
            "all sampled images stop at {stop:?}, a neighbor of the limit image {mapped_limit:?}"
        ))
    } else {
        ContinuityVerdict::Suspect(format!(
            "sampled images plateau at {stop:?}, strictly short of the limit image {mapped_limit:?}"
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::Term;

    fn t(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    fn cnf(s: &str) -> Cnf {
        s.parse().unwrap()
    }

    fn take(t: &Term, n: usize) -> Vec<Point> {
        enumerate_points(t).take(n).collect()
    }

    #[test]
    fn validates_points_structurally() {
        assert!(validate_point(&t("3"), &Point::FinIdx(2)));
        assert!(!validate_point(&t("3"), &Point::FinIdx(3)));
        assert!(validate_point(&t("w*2"), &Point::OrdPt(cnf("w*1+5"))));
        assert!(!validate_point(&t("w*2"), &Point::OrdPt(cnf("w*2"))));
        assert!(validate_point(&t("z"), &Point::sum(1, Point::Nat(3))));
        assert!(!validate_point(&t("z"), &Point::sum(2, Point::Nat(3))));
        assert!(validate_point(&t("w.2"), &Point::prod(Point::Nat(1), Point::FinIdx(1))));
        assert!(validate_point(&t("rev(w+1)"), &Point::rev(Point::sum(0, Point::Nat(0)))));
        assert!(!validate_point(&t("w"), &Point::FinIdx(0)));
    }

    #[test]
    fn product_points_compare_right_component_first() {
        let a = Point::prod(Point::Nat(9), Point::FinIdx(0));
        let b = Point::prod(Point::Nat(0), Point::FinIdx(1));
        assert_eq!(cmp_points(&a, &b), Ordering::Less);
        let c = Point::prod(Point::Nat(1), Point::FinIdx(1));
        assert_eq!(cmp_points(&b, &c), Ordering::Less);
    }

    #[test]
    fn reversal_flips_comparisons() {
        let a = Point::rev(Point::Nat(0));
        let b = Point::rev(Point::Nat(5));
        assert_eq!(cmp_points(&a, &b), Ordering::Greater);
        assert_eq!(cmp_points(&Point::NegNat(0), &Point::NegNat(3)), Ordering::Greater);
    }

    #[test]
    fn eta_enumeration_has_the_pinned_prefix() {
        let pts = take(&Term::Eta, 8);
        let expect = [
            Point::rat_int(0),
            Point::rat_int(1),
            Point::rat(1, 2),
            Point::rat_int(-1),
            Point::rat_int(2),
            Point::rat(-1, 2),
            Point::rat(1, 3),
            Point::rat_int(-2),
        ];
        assert_eq!(pts, expect);
    }

    #[test]
    fn ordinal_enumeration_interleaves_blocks() {
        let pts: Vec<Cnf> = take(&t("w*2"), 8)
            .into_iter()
            .map(|p| match p {
                Point::OrdPt(c) => c,
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        let expect: Vec<Cnf> = ["0", "w*1", "1", "w*1+1", "2", "w*1+2", "3", "w*1+3"]
            .iter()
            .map(|s| cnf(s))
            .collect();
        assert_eq!(pts, expect);

        // every value below the bound appears exactly once, reasonably early
        for bound in ["w^(2)*1", "w^(w*1)*1", "w^(2)*2+w*1+2"] {
            let b = cnf(bound);
            let seen: Vec<Cnf> = enum_cnf_below(&b).take(300).collect();
            for v in &seen {
                assert!(*v < b, "{bound}: {v} out of range");
            }
            for i in 0..seen.len() {
                for j in i + 1..seen.len() {
                    assert_ne!(seen[i], seen[j], "{bound}: duplicate");
                }
            }
            for probe in ["0", "1", "w*1", "w*1+1", "w*2"] {
                let p = cnf(probe);
                if p < b {
                    assert!(seen.contains(&p), "{bound}: {probe} missing from prefix");
                }
            }
        }
    }

    #[test]
    fn finite_orders_enumerate_exactly() {
        assert_eq!(take(&t("4"), 10).len(), 4);
        assert_eq!(take(&t("2.3"), 100).len(), 6);
        assert_eq!(take(&t("2+3"), 100).len(), 5);
        assert_eq!(take(&t("rev(4)"), 100).len(), 4);
    }

    #[test]
    fn enumeration_is_injective_and_valid() {
        for s in ["w*2", "z", "w.eta", "eta+2+eta", "rev(w^(2)*1)", "(1+eta).w", "w^(w*1)*1"] {
            let term = t(s);
            let pts = take(&term, 120);
            for p in &pts {
                assert!(validate_point(&term, p), "{s}: invalid {p:?}");
            }
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    assert_ne!(pts[i], pts[j], "{s}: duplicate at {i},{j}");
                }
            }
        }
    }

    #[test]
    fn sum_enumeration_round_robins() {
        let pts = take(&t("z"), 4);
        assert_eq!(
            pts,
            vec![
                Point::sum(0, Point::NegNat(0)),
                Point::sum(1, Point::Nat(0)),
                Point::sum(0, Point::NegNat(1)),
                Point::sum(1, Point::Nat(1)),
            ]
        );
    }

    #[test]
    fn endpoints_match_structure() {
        assert_eq!(min_point(&t("w")), Some(Point::Nat(0)));
        assert_eq!(max_point(&t("w")), None);
        assert_eq!(max_point(&t("w*")), Some(Point::NegNat(0)));
        assert_eq!(min_point(&t("z")), None);
        assert_eq!(max_point(&t("w+1")), Some(Point::sum(1, Point::FinIdx(0))));
        assert_eq!(max_point(&t("w*2")), None);
        assert_eq!(max_point(&t("w*1+1")), Some(Point::OrdPt(cnf("w*1"))));
        assert_eq!(
            min_point(&t("w.2")),
            Some(Point::prod(Point::Nat(0), Point::FinIdx(0)))
        );
        assert_eq!(min_point(&t("rev(w)")), None);
        assert_eq!(max_point(&t("rev(w)")), Some(Point::rev(Point::Nat(0))));
    }

    #[test]
    fn neighbors_cross_seams() {
        let two_omega = t("2.w");
        let p = Point::prod(Point::FinIdx(1), Point::Nat(0));
        let s = succ_point(&two_omega, &p).unwrap();
        assert_eq!(s, Point::prod(Point::FinIdx(0), Point::Nat(1)));
        assert_eq!(pred_point(&two_omega, &s), Some(p));

        let zplus = t("w*+w");
        let seam = Point::sum(1, Point::Nat(0));
        // the first part ends at its maximum -0, so the seam has a predecessor
        assert_eq!(
            pred_point(&zplus, &seam),
            Some(Point::sum(0, Point::NegNat(0)))
        );
        assert_eq!(succ_point(&zplus, &Point::sum(0, Point::NegNat(0))), Some(seam));

        let ww = t("w+w");
        // here the first part has no maximum, so the seam has no predecessor
        assert_eq!(pred_point(&ww, &Point::sum(1, Point::Nat(0))), None);

        let o = t("w*2+1");
        assert_eq!(
            succ_point(&o, &Point::OrdPt(cnf("w*1"))),
            Some(Point::OrdPt(cnf("w*1+1")))
        );
        assert_eq!(pred_point(&o, &Point::OrdPt(cnf("w*1"))), None);
        assert_eq!(succ_point(&o, &Point::OrdPt(cnf("w*2"))), None);
    }

    #[test]
    fn approach_sequences_reach_limits() {
        let o = t("w*2");
        let s = approach_from_below(&o, &Point::OrdPt(cnf("w*1"))).unwrap();
        assert_eq!(s(0), Point::OrdPt(cnf("0")));
        assert_eq!(s(3), Point::OrdPt(cnf("3")));
        assert!(approach_from_below(&o, &Point::OrdPt(cnf("w*1+1"))).is_none());
        assert!(approach_from_below(&o, &Point::OrdPt(cnf("0"))).is_none());

        let wp1 = t("w+1");
        let top = Point::sum(1, Point::FinIdx(0));
        let s = approach_from_below(&wp1, &top).unwrap();
        assert_eq!(s(4), Point::sum(0, Point::Nat(4)));
        assert!(approach_from_above(&wp1, &top).is_none());

        let e = Term::Eta;
        let s = approach_from_below(&e, &Point::rat_int(0)).unwrap();
        assert_eq!(s(1), Point::rat(-1, 2));
        let s = approach_from_above(&e, &Point::rat_int(0)).unwrap();
        assert_eq!(s(2), Point::rat(1, 4));

        // in rev(w+1) the wrapped top is the minimum: nothing below it
        let r = t("rev(w+1)");
        let bottom = Point::rev(Point::sum(1, Point::FinIdx(0)));
        assert!(approach_from_below(&r, &bottom).is_none());
        let s = approach_from_above(&r, &bottom).unwrap();
        assert_eq!(s(2), Point::rev(Point::sum(0, Point::Nat(2))));

        // seam limits inside products: (0, n1) in w.w is approached by (k, n0)
        let ww = t("w.w");
        let seam = Point::prod(Point::Nat(0), Point::Nat(1));
        let s = approach_from_below(&ww, &seam).unwrap();
        assert_eq!(s(5), Point::prod(Point::Nat(5), Point::Nat(0)));
    }

    #[test]
    fn approach_sequences_are_strictly_monotone_with_correct_bound() {
        let cases = ["w*2", "w+1", "z.w", "eta+2+eta", "rev(w^(2)*1)", "(1+eta).w", "w.z"];
        for s in cases {
            let term = t(s);
            for p in Sampler::new(7, 24).points(&term) {
                if let Some(seq) = approach_from_below(&term, &p) {
                    let mut prev: Option<Point> = None;
                    for n in 0..8 {
                        let x = seq(n);
                        assert!(validate_point(&term, &x), "{s}: {x:?} invalid");
                        assert_eq!(cmp_points(&x, &p), Ordering::Less, "{s}: below {p:?}");
                        if let Some(pr) = &prev {
                            assert_eq!(cmp_points(pr, &x), Ordering::Less, "{s}: increasing");
                        }
                        prev = Some(x);
                    }
                }
                if let Some(seq) = approach_from_above(&term, &p) {
                    let mut prev: Option<Point> = None;
                    for n in 0..8 {
                        let x = seq(n);
                        assert!(validate_point(&term, &x), "{s}: {x:?} invalid");
                        assert_eq!(cmp_points(&x, &p), Ordering::Greater, "{s}: above {p:?}");
                        if let Some(pr) = &prev {
                            assert_eq!(cmp_points(pr, &x), Ordering::Greater, "{s}: decreasing");
                        }
                        prev = Some(x);
                    }
                }
            }
        }
    }

    #[test]
    fn limit_points_have_no_neighbor_on_the_limit_side() {
        for s in ["w*2", "w+1", "z.w", "rev(w^(2)*1)", "w.z"] {
            let term = t(s);
            for p in Sampler::new(3, 24).points(&term) {
                if approach_from_below(&term, &p).is_some() {
                    assert_eq!(pred_point(&term, &p), None, "{s}: {p:?}");
                    assert_ne!(min_point(&term).as_ref(), Some(&p), "{s}: {p:?}");
                }
                if approach_from_above(&term, &p).is_some() {
                    assert_eq!(succ_point(&term, &p), None, "{s}: {p:?}");
                    assert_ne!(max_point(&term).as_ref(), Some(&p), "{s}: {p:?}");
                }
            }
        }
    }

    #[test]
    fn cofinal_reach_is_cofinal() {
        for s in ["w", "w*2", "z", "eta", "w.z", "(w+1).w", "rev(w*)"] {
            let term = t(s);
            match cofinal_reach(&term) {
                EndBehavior::Endpoint(m) => {
                    assert_eq!(max_point(&term), Some(m));
                }
                EndBehavior::Approach(seq) => {
                    assert_eq!(max_point(&term), None, "{s}");
                    let mut prev = seq(0);
                    for n in 1..6 {
                        let x = seq(n);
                        assert_eq!(cmp_points(&prev, &x), Ordering::Less, "{s} increasing");
                        prev = x;
                    }
                    // passes every enumerated point eventually
                    for p in take(&term, 12) {
                        let mut ok = false;
                        for n in 0..64 {
                            if cmp_points(&seq(n), &p) != Ordering::Less {
                                ok = true;
                                break;
                            }
                        }
                        assert!(ok, "{s}: {p:?} never passed");
                    }
                }
            }
        }
    }

    #[test]
    fn continuity_check_accepts_and_refutes() {
        let dst = t("w+1");
        let chain: Vec<Point> = (0..6).map(|n| Point::sum(0, Point::Nat(n))).collect();
        let top = Point::sum(1, Point::FinIdx(0));
        // images equal to the limit image count as reaching it
        let images: Vec<Point> = chain.clone();
        assert_eq!(
            check_continuity(&dst, &images, &Point::sum(0, Point::Nat(9)), true),
            ContinuityVerdict::Consistent
        );
        // constant images strictly under a successor limit image: suspect gap
        let const_images = vec![Point::sum(0, Point::Nat(0)); 6];
        let succ_of_limit = Point::sum(0, Point::Nat(1));
        assert!(matches!(
            check_continuity(&dst, &const_images, &succ_of_limit, true),
            ContinuityVerdict::Suspect(_)
        ));
        // out-of-order images refute
        let bad = vec![Point::sum(0, Point::Nat(3)), Point::sum(0, Point::Nat(1))];
        assert!(matches!(
            check_continuity(&dst, &bad, &top, true),
            ContinuityVerdict::Refuted(_)
        ));
        // an image beyond the limit image refutes
        let beyond = vec![Point::sum(0, Point::Nat(3))];
        assert!(matches!(
            check_continuity(&dst, &beyond, &Point::sum(0, Point::Nat(2)), true),
            ContinuityVerdict::Refuted(_)
        ));
    }

    #[test]
    fn sampler_is_deterministic() {
        let term = t("w.eta+z");
        let a = Sampler::new(11, 32).points(&term);
        let b = Sampler::new(11, 32).points(&term);
        assert_eq!(a, b);
        let c = Sampler::new(12, 32).points(&term);
        assert_ne!(a, c);
    }

    #[test]
    fn point_serde_shapes() {
        let p = Point::sum(1, Point::prod(Point::rat(1, 2), Point::OrdPt(cnf("w*1"))));
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"sum_pt":[1,{"prod_pt":[{"rat":"1/2"},{"ord_pt":"w*1"}]}]}"#);
        let back: Point = serde_json::from_str(&j).unwrap();
        assert_eq!(back, p);
    }
}
