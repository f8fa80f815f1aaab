//! Back-and-forth isomorphisms between countable dense orders.
//!
//! Any two countable dense orders with the same endpoint profile are
//! isomorphic. [`Baf`] realizes one such isomorphism incrementally: a fixed
//! alternating schedule walks both point enumerations and extends a finite
//! partial isomorphism, always choosing the first enumerated point inside
//! the relevant gap. Because the schedule never depends on the queries, the
//! resulting map is a well-defined function of the two terms alone.

use thiserror::Error;

use crate::classify::eta_family;
use crate::points::{cmp_points, enumerate_points, max_point, min_point, Point};
use crate::terms::Term;
use std::cmp::Ordering;

/// The schedule refused to run any longer; the queried point is too deep in
/// its enumeration.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("back-and-forth schedule exhausted after {steps} steps looking for {point}")]
pub struct BafExhausted {
    pub steps: usize,
    pub point: String,
}

const STEP_CAP: usize = 200_000;
const GAP_SCAN_CAP: usize = 1_000_000;

struct EnumCache {
    it: Box<dyn Iterator<Item = Point>>,
    cache: Vec<Point>,
}

impl EnumCache {
    fn new(t: &Term) -> EnumCache {
        EnumCache { it: enumerate_points(t), cache: Vec::new() }
    }

    fn get(&mut self, i: usize) -> Option<&Point> {
        while self.cache.len() <= i {
            match self.it.next() {
                Some(p) => self.cache.push(p),
                None => return None,
            }
        }
        Some(&self.cache[i])
    }
}

/// An incremental order isomorphism between two dense terms.
pub struct Baf {
    src_enum: EnumCache,
    dst_enum: EnumCache,
    /// Matched pairs, sorted by source point (hence also by destination).
    pairs: Vec<(Point, Point)>,
    /// Next schedule step; even steps consume a source point, odd steps a
    /// destination point.
    step: usize,
}

impl Baf {
    /// Builds the isomorphism schedule between `src` and `dst`. Both must be
    /// densely ordered and infinite with the same endpoint profile.
    pub fn new(src: &Term, dst: &Term) -> Baf {
        let fs = eta_family(src);
        let fd = eta_family(dst);
        assert!(
            fs.is_some() && fs == fd,
            "back-and-forth requires matching dense orders, got {fs:?} vs {fd:?}"
        );
        let mut pairs = Vec::new();
        if let (Some(a), Some(b)) = (min_point(src), min_point(dst)) {
            pairs.push((a, b));
        }
        if let (Some(a), Some(b)) = (max_point(src), max_point(dst)) {
            pairs.push((a, b));
        }
        Baf {
            src_enum: EnumCache::new(src),
            dst_enum: EnumCache::new(dst),
            pairs,
            step: 0,
        }
    }

    fn lookup_fwd(&self, p: &Point) -> Option<Point> {
        self.pairs
            .binary_search_by(|(s, _)| cmp_points(s, p))
            .ok()
            .map(|i| self.pairs[i].1.clone())
    }

    fn lookup_bwd(&self, q: &Point) -> Option<Point> {
        self.pairs
            .binary_search_by(|(_, d)| cmp_points(d, q))
            .ok()
            .map(|i| self.pairs[i].0.clone())
    }

    /// Inserts the pair keeping both columns sorted.
    fn insert(&mut self, s: Point, d: Point) {
        let i = self
            .pairs
            .binary_search_by(|(a, _)| cmp_points(a, &s))
            .expect_err("point already matched");
        self.pairs.insert(i, (s, d));
    }

    /// Matches `p` (a point of the `fwd` side) against the first enumerated
    /// point of the other side lying in the corresponding gap.
    fn extend(&mut self, p: Point, fwd: bool) {
        let gap = self
            .pairs
            .binary_search_by(|pair| {
                let known = if fwd { &pair.0 } else { &pair.1 };
                cmp_points(known, &p)
            })
            .expect_err("extend called on matched point");
        let lo = gap.checked_sub(1).map(|i| {
            let pair = &self.pairs[i];
            if fwd { pair.1.clone() } else { pair.0.clone() }
        });
        let hi = self.pairs.get(gap).map(|pair| {
            if fwd { pair.1.clone() } else { pair.0.clone() }
        });
        for i in 0..GAP_SCAN_CAP {
            let cand = {
                let cache = if fwd { &mut self.dst_enum } else { &mut self.src_enum };
                cache.get(i).expect("dense orders are infinite").clone()
            };
            if let Some(l) = &lo {
                if cmp_points(&cand, l) != Ordering::Greater {
                    continue;
                }
            }
            if let Some(h) = &hi {
                if cmp_points(&cand, h) != Ordering::Less {
                    continue;
                }
            }
            if fwd {
                self.insert(p, cand);
            } else {
                self.insert(cand, p);
            }
            return;
        }
        panic!("no enumerated point found in a dense gap");
    }

    /// Runs one schedule step: match the next enumerated point of the side
    /// whose turn it is, skipping points that are already matched.
    fn advance(&mut self) {
        let fwd = self.step % 2 == 0;
        let idx = self.step / 2;
        self.step += 1;
        let p = {
            let cache = if fwd { &mut self.src_enum } else { &mut self.dst_enum };
            match cache.get(idx) {
                Some(p) => p.clone(),
                None => return,
            }
        };
        let matched = if fwd {
            self.lookup_fwd(&p).is_some()
        } else {
            self.lookup_bwd(&p).is_some()
        };
        if !matched {
            self.extend(p, fwd);
        }
    }

    /// The image of a source point under the isomorphism.
    pub fn forward(&mut self, p: &Point) -> Result<Point, BafExhausted> {
        loop {
            if let Some(q) = self.lookup_fwd(p) {
                return Ok(q);
            }
            if self.step >= STEP_CAP {
                return Err(BafExhausted { steps: self.step, point: format!("{p:?}") });
            }
            self.advance();
        }
    }

    /// The preimage of a destination point under the isomorphism.
    pub fn backward(&mut self, q: &Point) -> Result<Point, BafExhausted> {
        loop {
            if let Some(p) = self.lookup_bwd(q) {
                return Ok(p);
            }
            if self.step >= STEP_CAP {
                return Err(BafExhausted { steps: self.step, point: format!("{q:?}") });
            }
            self.advance();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::point_le;

    fn t(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    #[test]
    fn rationals_to_rationals_is_an_order_iso_on_samples() {
        let e = t("eta");
        let mut baf = Baf::new(&e, &e);
        let pts: Vec<Point> = enumerate_points(&e).take(24).collect();
        let imgs: Vec<Point> = pts.iter().map(|p| baf.forward(p).unwrap()).collect();
        for (i, p) in pts.iter().enumerate() {
            for (j, q) in pts.iter().enumerate() {
                assert_eq!(
                    point_le(p, q),
                    point_le(&imgs[i], &imgs[j]),
                    "order preserved"
                );
            }
            // roundtrip
            assert_eq!(baf.backward(&imgs[i]).unwrap(), *p);
        }
    }

    #[test]
    fn schedule_is_query_order_independent() {
        let src = t("eta");
        let dst = t("eta.w");
        let pts: Vec<Point> = enumerate_points(&src).take(16).collect();
        let mut a = Baf::new(&src, &dst);
        let mut b = Baf::new(&src, &dst);
        let fwd_a: Vec<Point> = pts.iter().map(|p| a.forward(p).unwrap()).collect();
        let fwd_b: Vec<Point> = pts.iter().rev().map(|p| b.forward(p).unwrap()).collect();
        let fwd_b: Vec<Point> = fwd_b.into_iter().rev().collect();
        assert_eq!(fwd_a, fwd_b, "same function regardless of query order");
    }

    #[test]
    fn endpoints_map_to_endpoints() {
        let src = t("1+eta+1");
        let dst = t("1+eta.2+1");
        let mut baf = Baf::new(&src, &dst);
        let smin = min_point(&src).unwrap();
        let dmin = min_point(&dst).unwrap();
        assert_eq!(baf.forward(&smin).unwrap(), dmin);
        let smax = max_point(&src).unwrap();
        let dmax = max_point(&dst).unwrap();
        assert_eq!(baf.forward(&smax).unwrap(), dmax);
        // an interior point maps strictly between
        let mid = Point::sum(1, Point::rat_int(0));
        let img = baf.forward(&mid).unwrap();
        assert!(point_le(&dmin, &img) && point_le(&img, &dmax));
        assert_ne!(img, dmin);
        assert_ne!(img, dmax);
    }

    #[test]
    fn backward_is_inverse_of_forward_across_shapes() {
        let src = t("1+eta");
        let dst = t("(1+eta).w");
        let mut baf = Baf::new(&src, &dst);
        for q in enumerate_points(&dst).take(20) {
            let p = baf.backward(&q).unwrap();
            assert_eq!(baf.forward(&p).unwrap(), q);
        }
    }

    #[test]
    #[should_panic(expected = "matching dense orders")]
    fn mismatched_endpoint_profiles_are_rejected() {
        let _ = Baf::new(&t("eta"), &t("1+eta"));
    }

    #[test]
    #[should_panic(expected = "matching dense orders")]
    fn non_dense_terms_are_rejected() {
        let _ = Baf::new(&t("w"), &t("w"));
    }
}
