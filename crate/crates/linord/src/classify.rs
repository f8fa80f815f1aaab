//! Order-theoretic classification of terms.
//!
//! [`profile`] computes decidable invariants of a term: endpoints,
//! cardinality, scatteredness, Dedekind completeness, and the cofinality and
//! coinitiality tags. The auxiliary predicates ([`has_adjacent_pair`],
//! [`limit_from_below`], [`has_bdd_inc`], …) are exact structural recursions,
//! and [`decompose_nonscattered`] splits a non-scattered term into a
//! scattered prefix, a dense-reaching core, and a scattered suffix.

use serde::{Deserialize, Serialize};

use crate::cnf::Cnf;
use crate::points::{max_point, min_point};
use crate::slice::slice;
use crate::terms::{is_scattered, Term};

/// Exact size of a countable order, with finite sizes saturating at
/// `u64::MAX`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cardinality {
    Finite(u64),
    Infinite,
}

impl Cardinality {
    fn plus(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => {
                Cardinality::Finite(a.saturating_add(b))
            }
            _ => Cardinality::Infinite,
        }
    }

    fn times(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => {
                Cardinality::Finite(a.saturating_mul(b))
            }
            _ => Cardinality::Infinite,
        }
    }

    /// The finite size, if the order is finite.
    pub fn finite(self) -> Option<u64> {
        match self {
            Cardinality::Finite(n) => Some(n),
            Cardinality::Infinite => None,
        }
    }
}

/// How the top end of a countable order is reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cofinality {
    /// The order has a maximum.
    HasMax,
    /// No maximum; some strictly increasing sequence is cofinal.
    Omega,
}

/// How the bottom end of a countable order is reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coinitiality {
    /// The order has a minimum.
    HasMin,
    /// No minimum; some strictly decreasing sequence is coinitial.
    OmegaStar,
}

/// The decidable invariants of a term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub has_min: bool,
    pub has_max: bool,
    pub scattered: bool,
    pub cardinality: Cardinality,
    pub complete: bool,
    pub cofinality: Cofinality,
    pub coinitiality: Coinitiality,
}

/// Number of points of the order.
pub fn cardinality(t: &Term) -> Cardinality {
    match t {
        Term::Fin(n) => Cardinality::Finite(*n),
        Term::Omega | Term::OmegaStar | Term::Eta => Cardinality::Infinite,
        Term::Ord(c) => match c.as_nat() {
            Some(n) => Cardinality::Finite(n),
            None => Cardinality::Infinite,
        },
        Term::Sum(parts) => parts
            .iter()
            .map(cardinality)
            .fold(Cardinality::Finite(0), Cardinality::plus),
        Term::Product(a, b) => cardinality(a).times(cardinality(b)),
        Term::Reverse(d) => cardinality(d),
    }
}

/// Whether the order has a least point.
pub fn has_min(t: &Term) -> bool {
    min_point(t).is_some()
}

/// Whether the order has a greatest point.
pub fn has_max(t: &Term) -> bool {
    max_point(t).is_some()
}

/// Whether some two points are adjacent (nothing strictly between them).
/// An infinite order with no adjacent pair is dense.
pub fn has_adjacent_pair(t: &Term) -> bool {
    match t {
        Term::Fin(n) => *n >= 2,
        Term::Omega | Term::OmegaStar => true,
        Term::Eta => false,
        Term::Ord(c) => c.as_nat().map_or(true, |n| n >= 2),
        Term::Sum(parts) => {
            parts.iter().any(has_adjacent_pair)
                || parts.windows(2).any(|w| has_max(&w[0]) && has_min(&w[1]))
        }
        Term::Product(a, b) => {
            has_adjacent_pair(a) || (has_adjacent_pair(b) && has_max(a) && has_min(a))
        }
        Term::Reverse(d) => has_adjacent_pair(d),
    }
}

/// Whether some point is approached from below: it has points below it but
/// no immediate predecessor.
pub fn limit_from_below(t: &Term) -> bool {
    match t {
        Term::Fin(_) | Term::Omega | Term::OmegaStar => false,
        Term::Eta => true,
        Term::Ord(c) => *c > Cnf::omega(),
        Term::Sum(parts) => {
            parts.iter().any(limit_from_below)
                || parts.windows(2).any(|w| !has_max(&w[0]) && has_min(&w[1]))
        }
        Term::Product(a, b) => {
            limit_from_below(a)
                || (has_min(a)
                    && (limit_from_below(b) || (has_adjacent_pair(b) && !has_max(a))))
        }
        Term::Reverse(d) => limit_from_above(d),
    }
}

/// Whether some point is approached from above: it has points above it but
/// no immediate successor.
pub fn limit_from_above(t: &Term) -> bool {
    match t {
        Term::Fin(_) | Term::Omega | Term::OmegaStar | Term::Ord(_) => false,
        Term::Eta => true,
        Term::Sum(parts) => {
            parts.iter().any(limit_from_above)
                || parts.windows(2).any(|w| has_max(&w[0]) && !has_min(&w[1]))
        }
        Term::Product(a, b) => {
            limit_from_above(a)
                || (has_max(a)
                    && (limit_from_above(b) || (has_adjacent_pair(b) && !has_min(a))))
        }
        Term::Reverse(d) => limit_from_below(d),
    }
}

/// Whether the order contains a strictly increasing infinite sequence that is
/// bounded above by a point of the order.
pub fn has_bdd_inc(t: &Term) -> bool {
    match t {
        Term::Fin(_) | Term::Omega | Term::OmegaStar => false,
        Term::Eta => true,
        Term::Ord(c) => *c > Cnf::omega(),
        Term::Sum(parts) => {
            parts.iter().any(has_bdd_inc)
                || parts[..parts.len() - 1].iter().any(|p| !has_max(p))
        }
        Term::Product(a, b) => {
            has_bdd_inc(a)
                || has_bdd_inc(b)
                || (!has_max(a) && cardinality(b) != Cardinality::Finite(1))
        }
        Term::Reverse(d) => has_bdd_dec(d),
    }
}

/// Whether the order contains a strictly decreasing infinite sequence that is
/// bounded below by a point of the order.
pub fn has_bdd_dec(t: &Term) -> bool {
    match t {
        Term::Fin(_) | Term::Omega | Term::OmegaStar | Term::Ord(_) => false,
        Term::Eta => true,
        Term::Sum(parts) => {
            parts.iter().any(has_bdd_dec) || parts[1..].iter().any(|p| !has_min(p))
        }
        Term::Product(a, b) => {
            has_bdd_dec(a)
                || has_bdd_dec(b)
                || (!has_min(a) && cardinality(b) != Cardinality::Finite(1))
        }
        Term::Reverse(d) => has_bdd_inc(d),
    }
}

/// Dedekind completeness: every nonempty subset bounded above has a least
/// upper bound (equivalently, every cut is filled on one side).
pub fn complete(t: &Term) -> bool {
    match t {
        Term::Fin(_) | Term::Omega | Term::OmegaStar | Term::Ord(_) => true,
        Term::Eta => false,
        Term::Sum(parts) => {
            parts.iter().all(complete)
                && parts.windows(2).all(|w| has_max(&w[0]) || has_min(&w[1]))
        }
        Term::Product(a, b) => {
            complete(a)
                && complete(b)
                && (!has_adjacent_pair(b) || has_max(a) || has_min(a))
                && (!limit_from_below(b) || has_min(a))
                && (!limit_from_above(b) || has_max(a))
        }
        Term::Reverse(d) => complete(d),
    }
}

/// Computes the full invariant profile of a term.
pub fn profile(t: &Term) -> Profile {
    let has_min = has_min(t);
    let has_max = has_max(t);
    Profile {
        has_min,
        has_max,
        scattered: is_scattered(t),
        cardinality: cardinality(t),
        complete: complete(t),
        cofinality: if has_max { Cofinality::HasMax } else { Cofinality::Omega },
        coinitiality: if has_min {
            Coinitiality::HasMin
        } else {
            Coinitiality::OmegaStar
        },
    }
}

/// The four isomorphism types of countable dense orders, by endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaFamily {
    /// No endpoints: the rationals themselves.
    Open,
    /// A minimum only.
    ClosedBelow,
    /// A maximum only.
    ClosedAbove,
    /// Both endpoints.
    Closed,
}

/// Detects whether the order is densely ordered and infinite, in which case
/// it is isomorphic to the rationals with the indicated endpoints.
pub fn eta_family(t: &Term) -> Option<EtaFamily> {
    if has_adjacent_pair(t) || cardinality(t) != Cardinality::Infinite {
        return None;
    }
    Some(match (has_min(t), has_max(t)) {
        (false, false) => EtaFamily::Open,
        (true, false) => EtaFamily::ClosedBelow,
        (false, true) => EtaFamily::ClosedAbove,
        (true, true) => EtaFamily::Closed,
    })
}

/// Position of the scattered material around the dense core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecomposeCase {
    /// No scattered prefix or suffix: the order reaches both of its ends
    /// densely.
    DenseSum,
    /// A nonempty scattered prefix only.
    LeftTail,
    /// A nonempty scattered suffix only.
    RightTail,
    /// Scattered material at both ends.
    BothTails,
}

/// A non-scattered term split as `prefix + core + suffix` with the prefix and
/// suffix scattered (possibly absent) and the core reaching both of its ends
/// densely. The core never has endpoints; interior scattered chunks stay
/// inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub prefix: Option<Term>,
    pub core: Term,
    pub suffix: Option<Term>,
    pub case: DecomposeCase,
}

impl Decomposition {
    /// The three segments reassembled into one term.
    pub fn recombined(&self) -> Term {
        let mut parts = Vec::new();
        if let Some(p) = &self.prefix {
            parts.push(p.clone());
        }
        parts.push(self.core.clone());
        if let Some(s) = &self.suffix {
            parts.push(s.clone());
        }
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Term::Sum(parts)
        }
    }
}

fn sum_parts(parts: Vec<Term>) -> Option<Term> {
    let mut flat = Vec::new();
    for p in parts {
        match p {
            Term::Sum(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    match flat.len() {
        0 => None,
        1 => flat.pop(),
        _ => Some(Term::Sum(flat)),
    }
}

type Segments = (Vec<Term>, Vec<Term>, Vec<Term>);

fn dec(t: &Term) -> Segments {
    debug_assert!(!is_scattered(t));
    match t {
        Term::Eta => (Vec::new(), vec![Term::Eta], Vec::new()),
        Term::Sum(parts) => {
            let i = parts.iter().position(|p| !is_scattered(p)).unwrap();
            let j = parts.iter().rposition(|p| !is_scattered(p)).unwrap();
            let (p0, c0, s0) = dec(&parts[i]);
            let mut prefix: Vec<Term> = parts[..i].to_vec();
            prefix.extend(p0);
            if i == j {
                let mut suffix = s0;
                suffix.extend(parts[i + 1..].iter().cloned());
                return (prefix, c0, suffix);
            }
            let (p1, c1, s1) = dec(&parts[j]);
            let mut core = c0;
            core.extend(s0);
            core.extend(parts[i + 1..j].iter().cloned());
            core.extend(p1);
            core.extend(c1);
            let mut suffix = s1;
            suffix.extend(parts[j + 1..].iter().cloned());
            (prefix, core, suffix)
        }
        Term::Product(a, b) => {
            if is_scattered(a) {
                // all the density comes from the index order
                let (bp, bc, bs) = dec(b);
                let lift = |parts: Vec<Term>| -> Vec<Term> {
                    match sum_parts(parts) {
                        Some(s) => vec![Term::Product(a.clone(), Box::new(s))],
                        None => Vec::new(),
                    }
                };
                (lift(bp), lift(bc), lift(bs))
            } else if cardinality(b) == Cardinality::Finite(1) {
                dec(a)
            } else {
                let (a0, ac, a1) = dec(a);
                let bmin = min_point(b);
                let bmax = max_point(b);
                let inner = slice(
                    b,
                    bmin.as_ref().map(|m| (m, false)),
                    bmax.as_ref().map(|m| (m, false)),
                );
                let mut core = Vec::new();
                if bmin.is_some() {
                    core.extend(ac.clone());
                    core.extend(a1.clone());
                }
                if let Some(ib) = inner {
                    core.push(Term::Product(a.clone(), Box::new(ib)));
                } else if bmin.is_none() || bmax.is_none() {
                    // one unbounded side and no interior: impossible, the
                    // unbounded side is itself infinite
                    unreachable!("unbounded index order with empty interior");
                }
                if bmax.is_some() {
                    core.extend(a0.clone());
                    core.extend(ac.clone());
                }
                if bmin.is_none() && bmax.is_none() {
                    core = vec![t.clone()];
                }
                let prefix = if bmin.is_some() { a0 } else { Vec::new() };
                let suffix = if bmax.is_some() { a1 } else { Vec::new() };
                (prefix, core, suffix)
            }
        }
        Term::Reverse(d) => {
            let (p, c, s) = dec(d);
            let flip = |parts: Vec<Term>| -> Vec<Term> {
                parts
                    .into_iter()
                    .rev()
                    .map(|x| Term::Reverse(Box::new(x)))
                    .collect()
            };
            (flip(s), flip(c), flip(p))
        }
        Term::Fin(_) | Term::Omega | Term::OmegaStar | Term::Ord(_) => {
            unreachable!("scattered atom inside a dense decomposition")
        }
    }
}

/// Splits a non-scattered term into its maximal scattered prefix, the dense
/// core, and its maximal scattered suffix. Returns `None` on scattered terms.
pub fn decompose_nonscattered(t: &Term) -> Option<Decomposition> {
    if is_scattered(t) {
        return None;
    }
    let (p, c, s) = dec(t);
    let prefix = sum_parts(p);
    let core = sum_parts(c).expect("dense core is never empty");
    let suffix = sum_parts(s);
    let case = match (&prefix, &suffix) {
        (None, None) => DecomposeCase::DenseSum,
        (Some(_), None) => DecomposeCase::LeftTail,
        (None, Some(_)) => DecomposeCase::RightTail,
        (Some(_), Some(_)) => DecomposeCase::BothTails,
    };
    Some(Decomposition { prefix, core, suffix, case })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    #[test]
    fn profiles_of_basic_terms() {
        let p = profile(&t("w"));
        assert!(p.has_min && !p.has_max && p.scattered && p.complete);
        assert_eq!(p.cardinality, Cardinality::Infinite);
        assert_eq!(p.cofinality, Cofinality::Omega);
        assert_eq!(p.coinitiality, Coinitiality::HasMin);

        let p = profile(&t("w*"));
        assert!(!p.has_min && p.has_max && p.scattered && p.complete);
        assert_eq!(p.coinitiality, Coinitiality::OmegaStar);

        let p = profile(&t("z"));
        assert!(!p.has_min && !p.has_max && p.scattered && p.complete);

        let p = profile(&t("eta"));
        assert!(!p.has_min && !p.has_max && !p.scattered && !p.complete);

        let p = profile(&t("5"));
        assert_eq!(p.cardinality, Cardinality::Finite(5));
        assert!(p.complete && p.has_min && p.has_max);
    }

    #[test]
    fn cardinality_is_multiplicative() {
        assert_eq!(cardinality(&t("3.4")), Cardinality::Finite(12));
        assert_eq!(cardinality(&t("2+3")), Cardinality::Finite(5));
        assert_eq!(cardinality(&t("2.w")), Cardinality::Infinite);
        assert_eq!(cardinality(&t("rev(7)")), Cardinality::Finite(7));
    }

    #[test]
    fn adjacency_detects_density() {
        assert!(!has_adjacent_pair(&t("eta")));
        assert!(has_adjacent_pair(&t("2.eta")));
        assert!(!has_adjacent_pair(&t("eta.2")));
        assert!(!has_adjacent_pair(&t("eta+eta")));
        assert!(has_adjacent_pair(&t("eta+1+w")));
        assert!(!has_adjacent_pair(&t("eta+1+eta")));
        // each copy boundary is approached from below by the preceding
        // dense copy, so no two points are adjacent
        assert!(!has_adjacent_pair(&t("(1+eta).w")));
        assert!(has_adjacent_pair(&t("(1+eta+1).w")));
        assert!(!has_adjacent_pair(&t("(1+eta).eta")));
        assert!(has_adjacent_pair(&t("w^(2)*1")));
    }

    #[test]
    fn limits_from_each_side() {
        assert!(!limit_from_below(&t("w")));
        assert!(limit_from_below(&t("w+1")));
        assert!(limit_from_below(&t("w^(2)*1")));
        assert!(!limit_from_below(&t("w*")));
        assert!(!limit_from_below(&t("z")));
        assert!(limit_from_below(&t("eta")));
        assert!(limit_from_below(&t("w.2")));

        assert!(!limit_from_above(&t("w")));
        assert!(!limit_from_above(&t("w^(w*1)*1")));
        assert!(limit_from_above(&t("rev(w+1)")));
        assert!(limit_from_above(&t("1+w*")));
        assert!(!limit_from_above(&t("w+1")));
    }

    #[test]
    fn bounded_monotone_sequences() {
        assert!(!has_bdd_inc(&t("w")));
        assert!(has_bdd_inc(&t("w+1")));
        assert!(has_bdd_inc(&t("w.2")));
        assert!(!has_bdd_inc(&t("z")));
        assert!(has_bdd_inc(&t("eta")));
        assert!(!has_bdd_inc(&t("w*")));
        assert!(has_bdd_inc(&t("w^(2)*1")));

        assert!(!has_bdd_dec(&t("w")));
        assert!(!has_bdd_dec(&t("w*")));
        assert!(!has_bdd_dec(&t("z")));
        assert!(has_bdd_dec(&t("1+w*")));
        assert!(has_bdd_dec(&t("rev(w.2)")));
        assert!(has_bdd_dec(&t("eta")));
        assert!(!has_bdd_dec(&t("w^(w*1)*1")));
    }

    #[test]
    fn completeness_rules() {
        assert!(complete(&t("w")));
        assert!(complete(&t("z")));
        assert!(complete(&t("w^(2)*1+w*3+5")));
        assert!(!complete(&t("eta")));
        assert!(!complete(&t("1+eta+1")));
        assert!(!complete(&t("w+w*")));
        assert!(complete(&t("w+1+w*")));
        assert!(complete(&t("w.2")));
        assert!(complete(&t("2.w")));
        assert!(!complete(&t("z.w")));
        assert!(complete(&t("rev(w.2)")));
        assert!(!complete(&t("eta.w")));
        assert!(!complete(&t("z.z")));
        assert!(complete(&t("(1+z).w")));
    }

    #[test]
    fn eta_family_membership() {
        assert_eq!(eta_family(&t("eta")), Some(EtaFamily::Open));
        assert_eq!(eta_family(&t("1+eta")), Some(EtaFamily::ClosedBelow));
        assert_eq!(eta_family(&t("eta+1")), Some(EtaFamily::ClosedAbove));
        assert_eq!(eta_family(&t("1+eta+1")), Some(EtaFamily::Closed));
        assert_eq!(eta_family(&t("eta+1+eta")), Some(EtaFamily::Open));
        assert_eq!(eta_family(&t("eta.2")), Some(EtaFamily::Open));
        assert_eq!(eta_family(&t("(1+eta).eta")), Some(EtaFamily::Open));
        assert_eq!(eta_family(&t("2.eta")), None);
        assert_eq!(eta_family(&t("w+eta")), None);
        assert_eq!(eta_family(&t("1")), None);
        assert_eq!(eta_family(&t("rev(1+eta)")), Some(EtaFamily::ClosedAbove));
    }

    #[test]
    fn decomposition_basic_shapes() {
        let d = decompose_nonscattered(&t("w+eta+w*")).unwrap();
        assert_eq!(d.prefix, Some(Term::Omega));
        assert_eq!(d.core, Term::Eta);
        assert_eq!(d.suffix, Some(Term::OmegaStar));
        assert_eq!(d.case, DecomposeCase::BothTails);

        let d = decompose_nonscattered(&t("eta+1+eta")).unwrap();
        assert_eq!(d.case, DecomposeCase::DenseSum);
        assert_eq!(d.core, t("eta+1+eta"));

        let d = decompose_nonscattered(&t("1+eta")).unwrap();
        assert_eq!(d.case, DecomposeCase::LeftTail);
        assert_eq!(d.prefix, Some(Term::Fin(1)));

        assert!(decompose_nonscattered(&t("z.w")).is_none());
    }

    #[test]
    fn decomposition_through_products_and_reversals() {
        // density from the index order
        let d = decompose_nonscattered(&t("w.eta")).unwrap();
        assert_eq!(d.case, DecomposeCase::DenseSum);
        assert_eq!(d.core, t("w.eta"));

        // density from the factor, index order with a least point
        let d = decompose_nonscattered(&t("(1+eta).w")).unwrap();
        assert_eq!(d.case, DecomposeCase::LeftTail);
        assert_eq!(d.prefix, Some(Term::Fin(1)));

        let d = decompose_nonscattered(&t("rev(w+eta)")).unwrap();
        assert_eq!(d.case, DecomposeCase::RightTail);
        assert_eq!(d.suffix, Some(t("rev(w)")));

        let d = decompose_nonscattered(&t("(w+eta).2")).unwrap();
        assert_eq!(d.case, DecomposeCase::LeftTail);
        assert_eq!(d.prefix, Some(Term::Omega));
    }

    #[test]
    fn decomposition_invariants_over_a_corpus() {
        let corpus = [
            "eta", "1+eta", "eta+1", "1+eta+1", "w+eta", "eta+w*", "w+eta+w*",
            "eta+1+eta", "eta+w+eta", "w.eta", "eta.w", "2.eta", "eta.2",
            "(1+eta).w", "(eta+1).w*", "rev(w+eta)", "rev((1+eta).w)",
            "z+eta.w+z", "w.(1+eta)", "(w+eta).2", "eta.z", "(2.eta).w",
        ];
        for s in corpus {
            let term = t(s);
            let d = decompose_nonscattered(&term).unwrap_or_else(|| panic!("{s} scattered"));
            if let Some(p) = &d.prefix {
                assert!(is_scattered(p), "{s}: prefix not scattered");
            }
            if let Some(x) = &d.suffix {
                assert!(is_scattered(x), "{s}: suffix not scattered");
            }
            assert!(!is_scattered(&d.core), "{s}: core scattered");
            // the core reaches both ends densely, so it has no endpoints
            assert!(!has_min(&d.core), "{s}: core has a minimum");
            assert!(!has_max(&d.core), "{s}: core has a maximum");
            // the case tag reflects which sides are present
            let want = match (d.prefix.is_some(), d.suffix.is_some()) {
                (false, false) => DecomposeCase::DenseSum,
                (true, false) => DecomposeCase::LeftTail,
                (false, true) => DecomposeCase::RightTail,
                (true, true) => DecomposeCase::BothTails,
            };
            assert_eq!(d.case, want, "{s}");
            // reassembling the segments preserves the profile
            assert_eq!(profile(&d.recombined()), profile(&term), "{s}");
        }
    }
}
