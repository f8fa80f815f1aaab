//! Slicing terms by points: the order type of an interval of a term.
//!
//! [`slice`] computes a term denoting `{x : lo ≤ x ≤ hi}` (with either bound
//! optional and independently inclusive or exclusive) inside a given term.
//! The result is `None` when the interval is empty. Results are plain terms;
//! callers normalize if they need canonical shapes.

use crate::cnf::Cnf;
use crate::points::Point;
use crate::terms::Term;

/// An optional interval bound: the point and whether it is included.
pub type Bound<'a> = Option<(&'a Point, bool)>;

fn ord_term(c: Cnf) -> Option<Term> {
    if c.is_zero() {
        None
    } else if let Some(n) = c.as_nat() {
        Some(Term::Fin(n))
    } else if c == Cnf::omega() {
        Some(Term::Omega)
    } else {
        Some(Term::Ord(c))
    }
}

fn sum_of(mut parts: Vec<Term>) -> Option<Term> {
    match parts.len() {
        0 => None,
        1 => parts.pop(),
        _ => Some(Term::Sum(parts)),
    }
}

fn fin_range(start: u64, end_incl: Option<u64>) -> Option<Term> {
    match end_incl {
        Some(e) if e >= start => Some(Term::Fin(e - start + 1)),
        Some(_) => None,
        None => Some(Term::Omega),
    }
}

/// Order type of `{x ∈ t : lo ≤ x ≤ hi}`, with unbounded sides given as
/// `None` and each bound marked inclusive (`true`) or exclusive (`false`).
///
/// Returns `None` for the empty interval. Panics if a bound's point does not
/// have the shape required by `t`.
pub fn slice(t: &Term, lo: Bound<'_>, hi: Bound<'_>) -> Option<Term> {
    match t {
        Term::Fin(n) => {
            let start = match lo {
                Some((Point::FinIdx(a), inc)) => a + u64::from(!inc),
                None => 0,
                Some((p, _)) => panic!("slice: expected FinIdx in Fin, got {p:?}"),
            };
            let end = match hi {
                Some((Point::FinIdx(b), inc)) => {
                    if inc { Some(*b) } else { b.checked_sub(1) }?
                }
                None => n - 1,
                Some((p, _)) => panic!("slice: expected FinIdx in Fin, got {p:?}"),
            };
            if end >= start { Some(Term::Fin(end - start + 1)) } else { None }
        }
        Term::Omega => {
            let start = match lo {
                Some((Point::Nat(a), inc)) => a + u64::from(!inc),
                None => 0,
                Some((p, _)) => panic!("slice: expected Nat in Omega, got {p:?}"),
            };
            let end = match hi {
                Some((Point::Nat(b), inc)) => {
                    Some(if inc { Some(*b) } else { b.checked_sub(1) }?)
                }
                None => None,
                Some((p, _)) => panic!("slice: expected Nat in Omega, got {p:?}"),
            };
            fin_range(start, end)
        }
        Term::OmegaStar => {
            // NegNat(j): larger index means smaller point.
            let jmin = match hi {
                Some((Point::NegNat(b), inc)) => b + u64::from(!inc),
                None => 0,
                Some((p, _)) => panic!("slice: expected NegNat in OmegaStar, got {p:?}"),
            };
            match lo {
                Some((Point::NegNat(a), inc)) => {
                    let jmax = if inc { Some(*a) } else { a.checked_sub(1) }?;
                    if jmax >= jmin { Some(Term::Fin(jmax - jmin + 1)) } else { None }
                }
                None => Some(Term::OmegaStar),
                Some((p, _)) => panic!("slice: expected NegNat in OmegaStar, got {p:?}"),
            }
        }
        Term::Eta => {
            let (ql, il) = match lo {
                Some((Point::Rat(q), inc)) => (Some(q), inc),
                None => (None, false),
                Some((p, _)) => panic!("slice: expected Rat in Eta, got {p:?}"),
            };
            let (qh, ih) = match hi {
                Some((Point::Rat(q), inc)) => (Some(q), inc),
                None => (None, false),
                Some((p, _)) => panic!("slice: expected Rat in Eta, got {p:?}"),
            };
            if let (Some(a), Some(b)) = (ql, qh) {
                if a > b {
                    return None;
                }
                if a == b {
                    return if il && ih { Some(Term::Fin(1)) } else { None };
                }
            }
            let mut parts = Vec::new();
            if ql.is_some() && il {
                parts.push(Term::Fin(1));
            }
            parts.push(Term::Eta);
            if qh.is_some() && ih {
                parts.push(Term::Fin(1));
            }
            sum_of(parts)
        }
        Term::Ord(c) => {
            let lower = match lo {
                Some((Point::OrdPt(u), inc)) => {
                    if inc { u.clone() } else { u.succ() }
                }
                None => Cnf::zero(),
                Some((p, _)) => panic!("slice: expected OrdPt in Ord, got {p:?}"),
            };
            let upper = match hi {
                Some((Point::OrdPt(v), inc)) => {
                    if inc { v.succ() } else { v.clone() }
                }
                None => c.clone(),
                Some((p, _)) => panic!("slice: expected OrdPt in Ord, got {p:?}"),
            };
            ord_term(upper.minus(&lower)?)
        }
        Term::Sum(parts) => {
            let (i, alo) = match lo {
                Some((Point::SumPt(i, p), inc)) => (*i, Some((&**p, inc))),
                None => (0, None),
                Some((p, _)) => panic!("slice: expected SumPt in Sum, got {p:?}"),
            };
            let (j, ahi) = match hi {
                Some((Point::SumPt(j, q), inc)) => (*j, Some((&**q, inc))),
                None => (parts.len() - 1, None),
                Some((p, _)) => panic!("slice: expected SumPt in Sum, got {p:?}"),
            };
            if i > j {
                return None;
            }
            let alo = alo.map(|(p, b)| (p, b));
            let ahi = ahi.map(|(q, b)| (q, b));
            if i == j {
                return slice(&parts[i], alo, ahi);
            }
            let mut out = Vec::new();
            if let Some(h) = slice(&parts[i], alo, None) {
                out.push(h);
            }
            out.extend(parts[i + 1..j].iter().cloned());
            if let Some(tl) = slice(&parts[j], None, ahi) {
                out.push(tl);
            }
            sum_of(out)
        }
        Term::Product(a, b) => {
            let plo = match lo {
                Some((Point::ProdPt(pa, pb), inc)) => Some((&**pa, &**pb, inc)),
                None => None,
                Some((p, _)) => panic!("slice: expected ProdPt in Product, got {p:?}"),
            };
            let phi = match hi {
                Some((Point::ProdPt(pa, pb), inc)) => Some((&**pa, &**pb, inc)),
                None => None,
                Some((p, _)) => panic!("slice: expected ProdPt in Product, got {p:?}"),
            };
            if let (Some((_, bl, _)), Some((_, bh, _))) = (&plo, &phi) {
                match crate::points::cmp_points(bl, bh) {
                    std::cmp::Ordering::Greater => return None,
                    std::cmp::Ordering::Equal => {
                        let (al, _, il) = plo.unwrap();
                        let (ah, _, ih) = phi.unwrap();
                        return slice(a, Some((al, il)), Some((ah, ih)));
                    }
                    std::cmp::Ordering::Less => {}
                }
            }
            let mut out = Vec::new();
            let blo = match &plo {
                Some((al, bl, il)) => {
                    if let Some(h) = slice(a, Some((al, *il)), None) {
                        out.push(h);
                    }
                    Some((*bl, false))
                }
                None => None,
            };
            let bhi = match &phi {
                Some((_, bh, _)) => Some((*bh, false)),
                None => None,
            };
            if let Some(mid) = slice(b, blo, bhi) {
                out.push(Term::Product(a.clone(), Box::new(mid)));
            }
            if let Some((ah, _, ih)) = &phi {
                if let Some(tl) = slice(a, None, Some((ah, *ih))) {
                    out.push(tl);
                }
            }
            sum_of(out)
        }
        Term::Reverse(d) => {
            let rlo = match hi {
                Some((Point::RevPt(p), inc)) => Some((&**p, inc)),
                None => None,
                Some((p, _)) => panic!("slice: expected RevPt in Reverse, got {p:?}"),
            };
            let rhi = match lo {
                Some((Point::RevPt(p), inc)) => Some((&**p, inc)),
                None => None,
                Some((p, _)) => panic!("slice: expected RevPt in Reverse, got {p:?}"),
            };
            slice(d, rlo, rhi).map(|s| Term::Reverse(Box::new(s)))
        }
    }
}

/// Order type of `{x ∈ t : x > p}` — everything strictly above `p`.
pub fn strict_suffix(t: &Term, p: &Point) -> Option<Term> {
    slice(t, Some((p, false)), None)
}

/// Order type of `{x ∈ t : x < p}` — everything strictly below `p`.
pub fn strict_prefix(t: &Term, p: &Point) -> Option<Term> {
    slice(t, None, Some((p, false)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{enumerate_points, min_point, point_le};
    use crate::terms::normalize;

    fn t(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    fn cnf(s: &str) -> Cnf {
        s.parse().unwrap()
    }

    #[test]
    fn natural_number_slices() {
        let w = t("w");
        assert_eq!(slice(&w, Some((&Point::Nat(3), true)), None), Some(Term::Omega));
        assert_eq!(
            slice(&w, Some((&Point::Nat(3), true)), Some((&Point::Nat(7), true))),
            Some(Term::Fin(5))
        );
        assert_eq!(
            slice(&w, Some((&Point::Nat(3), false)), Some((&Point::Nat(7), false))),
            Some(Term::Fin(3))
        );
        assert_eq!(slice(&w, None, Some((&Point::Nat(0), false))), None);
        assert_eq!(slice(&t("5"), Some((&Point::FinIdx(2), true)), None), Some(Term::Fin(3)));
    }

    #[test]
    fn reversed_natural_slices() {
        let ws = t("w*");
        // everything below a point of w* is again w*
        assert_eq!(slice(&ws, None, Some((&Point::NegNat(2), true))), Some(Term::OmegaStar));
        // everything above a point is finite
        assert_eq!(slice(&ws, Some((&Point::NegNat(4), true)), None), Some(Term::Fin(5)));
        assert_eq!(
            slice(&ws, Some((&Point::NegNat(4), false)), Some((&Point::NegNat(1), false))),
            Some(Term::Fin(2))
        );
    }

    #[test]
    fn rational_slices_keep_density() {
        let e = t("eta");
        let q0 = Point::rat_int(0);
        let q1 = Point::rat_int(1);
        assert_eq!(
            slice(&e, Some((&q0, true)), Some((&q1, true))),
            Some(t("1+eta+1"))
        );
        assert_eq!(slice(&e, Some((&q0, false)), Some((&q1, false))), Some(Term::Eta));
        assert_eq!(slice(&e, Some((&q0, true)), None), Some(t("1+eta")));
        assert_eq!(slice(&e, Some((&q0, true)), Some((&q0, true))), Some(Term::Fin(1)));
        assert_eq!(slice(&e, Some((&q0, false)), Some((&q0, true))), None);
        assert_eq!(slice(&e, Some((&q1, true)), Some((&q0, true))), None);
    }

    #[test]
    fn ordinal_slices_subtract() {
        let o = t("w^(2)*1");
        let u = Point::OrdPt(cnf("w*1+1"));
        let v = Point::OrdPt(cnf("w*2"));
        // {x : w+1 <= x <= w*2} is a copy of w followed by the top point
        assert_eq!(
            slice(&o, Some((&u, true)), Some((&v, true))),
            Some(Term::Ord(cnf("w*1+1")))
        );
        assert_eq!(slice(&o, Some((&u, true)), Some((&v, false))), Some(Term::Omega));
        // an unbounded upper end of w^2 is still w^2-like: w^2 - (w+1) = w^2
        assert_eq!(slice(&o, Some((&u, true)), None), Some(Term::Ord(cnf("w^(2)*1"))));
        assert_eq!(
            slice(&o, None, Some((&Point::OrdPt(cnf("3")), false))),
            Some(Term::Fin(3))
        );
    }

    #[test]
    fn sum_slices_cross_parts() {
        let s = t("w+eta+w*");
        let lo = Point::sum(0, Point::Nat(2));
        let hi = Point::sum(2, Point::NegNat(3));
        assert_eq!(
            slice(&s, Some((&lo, true)), Some((&hi, true))),
            Some(Term::Sum(vec![Term::Omega, Term::Eta, Term::OmegaStar]))
        );
        // within one part
        let a = Point::sum(1, Point::rat_int(0));
        let b = Point::sum(1, Point::rat_int(2));
        assert_eq!(slice(&s, Some((&a, false)), Some((&b, false))), Some(Term::Eta));
        // empty when bounds cross
        assert_eq!(slice(&s, Some((&hi, true)), Some((&lo, true))), None);
    }

    #[test]
    fn product_slices_split_copies() {
        let p = t("w.2");
        let lo = Point::prod(Point::Nat(3), Point::FinIdx(0));
        let hi = Point::prod(Point::Nat(2), Point::FinIdx(1));
        // the rest of the first copy, then an initial chunk of the second
        assert_eq!(
            slice(&p, Some((&lo, true)), Some((&hi, true))),
            Some(Term::Sum(vec![Term::Omega, Term::Fin(3)]))
        );
        // same copy
        let hi0 = Point::prod(Point::Nat(9), Point::FinIdx(0));
        assert_eq!(slice(&p, Some((&lo, true)), Some((&hi0, true))), Some(Term::Fin(7)));
        // unbounded above: rest of first copy, then all later copies
        assert_eq!(
            slice(&p, Some((&lo, true)), None),
            Some(Term::Sum(vec![
                Term::Omega,
                Term::Product(Box::new(Term::Omega), Box::new(Term::Fin(1)))
            ]))
        );
    }

    #[test]
    fn reversed_slices_mirror() {
        let r = t("rev(w+1)");
        // the image of the least point of w+1 is the maximum; above it is nothing
        let top = Point::rev(Point::sum(0, Point::Nat(0)));
        assert_eq!(slice(&r, Some((&top, false)), None), None);
        // everything above the image of n3: points n0..n3 reversed
        let p = Point::rev(Point::sum(0, Point::Nat(3)));
        assert_eq!(
            normalize(&slice(&r, Some((&p, true)), None).unwrap()),
            Term::Fin(4)
        );
        assert_eq!(
            normalize(&slice(&r, None, Some((&p, false)).map(|x| x)).unwrap()),
            normalize(&t("1+w*"))
        );
    }

    #[test]
    fn slices_agree_with_enumeration_on_small_terms() {
        // For several terms and sampled bounds, the sliced term's finite size
        // (when finite) matches a direct count over enumerated points.
        for s in ["w+3", "w*+w", "w.2", "rev(w+1)", "1+eta+1"] {
            let term = t(s);
            let pts: Vec<Point> = enumerate_points(&term).take(8).collect();
            for lo in &pts {
                for hi in &pts {
                    let sl = slice(&term, Some((lo, true)), Some((hi, true)));
                    let count = pts
                        .iter()
                        .filter(|x| point_le(lo, x) && point_le(x, hi))
                        .count() as u64;
                    match &sl {
                        None => assert_eq!(count, 0, "{s}: {lo:?}..{hi:?}"),
                        Some(Term::Fin(n)) => {
                            // every enumerated point in range is in the slice
                            assert!(count <= *n, "{s}: {lo:?}..{hi:?}")
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }

    #[test]
    fn strict_prefix_and_suffix_helpers() {
        let z = t("z");
        let m = Point::sum(1, Point::Nat(0));
        assert_eq!(strict_prefix(&z, &m), Some(Term::OmegaStar));
        assert_eq!(strict_suffix(&z, &m), Some(Term::Omega));
        let w1 = t("w+1");
        assert_eq!(strict_prefix(&w1, &min_point(&w1).unwrap()), None);
    }
}
