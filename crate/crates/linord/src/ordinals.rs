//! Deciding order-preserving surjections between ordinals.
//!
//! For ordinals `alpha` and `beta` (in Cantor normal form below epsilon-0),
//! [`ordinal_leq_s`] decides whether some order-preserving surjection
//! `beta -> alpha` exists and, when it does, describes a witness pair: an
//! order-preserving right inverse `f : alpha -> beta` together with the
//! canonical surjection `g` that maps each point of `beta` to the largest
//! point of `alpha` whose image does not exceed it.
//!
//! The successor case truncates; the limit case splits `alpha` as
//! `alpha' + w^gamma` and `beta` as `B + w^delta` (one unit of the last
//! coefficient removed) and embeds the final `w^gamma` block cofinally into
//! the final `w^delta` block with [`OrdCofinalMap`].

use crate::cnf::Cnf;

/// Outcome of the ordinal decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdinalDecision {
    Yes(OrdinalWitness),
    No(OrdinalObstruction),
}

/// Shape of the witness maps for an ordinal pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdinalWitness {
    /// `alpha == beta`: both maps are the identity.
    Identity,
    /// `alpha` is a successor and `alpha <= beta`: `f` embeds identically,
    /// `g(y) = min(y, alpha - 1)`.
    Truncate,
    /// Both are limits, `alpha <= beta`, and the last exponents satisfy
    /// `gamma <= delta`: identity below `alpha_prime`, then a cofinal block
    /// embedding of `w^gamma` into `w^delta` starting at `base`.
    Limit {
        alpha_prime: Cnf,
        base: Cnf,
        gamma: Cnf,
        delta: Cnf,
    },
}

/// Why no order-preserving surjection exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrdinalObstruction {
    /// `alpha > beta`: a monotone image of `beta` has order type at most
    /// `beta`.
    NotLeq,
    /// `alpha` is a limit but `beta` has a greatest point, whose image would
    /// have to be a greatest point of `alpha`.
    LimitOntoSuccessor,
    /// The last exponent of `alpha` exceeds the last exponent of `beta`: no
    /// final block of `beta` can cover the final block of `alpha`.
    ExponentClause,
}

/// Whether every nonzero `alpha <= beta` admits a surjection from `beta`:
/// exactly the multiples of additively indecomposable ordinals, i.e. the
/// ordinals whose normal form is a single monomial `w^delta * m`.
pub fn is_multiple_indecomposable(beta: &Cnf) -> bool {
    beta.is_monomial()
}

/// Decides whether some order-preserving surjection `beta -> alpha` exists.
/// Both ordinals must be nonzero.
pub fn ordinal_leq_s(alpha: &Cnf, beta: &Cnf) -> OrdinalDecision {
    assert!(!alpha.is_zero() && !beta.is_zero(), "ordinals must be nonzero");
    if alpha == beta {
        return OrdinalDecision::Yes(OrdinalWitness::Identity);
    }
    if alpha.is_successor() {
        return if alpha <= beta {
            OrdinalDecision::Yes(OrdinalWitness::Truncate)
        } else {
            OrdinalDecision::No(OrdinalObstruction::NotLeq)
        };
    }
    // alpha is a limit
    if beta.is_successor() {
        return OrdinalDecision::No(OrdinalObstruction::LimitOntoSuccessor);
    }
    if alpha > beta {
        return OrdinalDecision::No(OrdinalObstruction::NotLeq);
    }
    let gamma = alpha.last_exponent().expect("nonzero").clone();
    let delta = beta.last_exponent().expect("nonzero").clone();
    if gamma > delta {
        return OrdinalDecision::No(OrdinalObstruction::ExponentClause);
    }
    let alpha_prime = alpha.drop_last_unit().expect("alpha is nonzero");
    let b = beta.drop_last_unit().expect("beta is nonzero");
    let base = if alpha_prime >= b { alpha_prime.clone() } else { b };
    OrdinalDecision::Yes(OrdinalWitness::Limit { alpha_prime, base, gamma, delta })
}

/// A cofinal order-embedding of `w^gamma` into `w^delta` (`1 <= gamma <=
/// delta`), built block by block along fundamental sequences, together with
/// its sup-inverse.
///
/// Writing `phi(n)` for the fundamental sequence of `w^gamma` (with
/// `phi(0) = 0`) and `psi(n)` for that of `w^delta`, the block origins are
///
/// ```text
/// psi'(0) = 0,
/// psi'(n+1) = max(psi(n+1), psi'(n) + (phi(n+1) - phi(n))),
/// ```
///
/// and the embedding sends `zeta` in `[phi(n), phi(n+1))` to
/// `psi'(n) + (zeta - phi(n))`. Since `psi'(n) >= psi(n)`, the image is
/// cofinal in `w^delta`.
pub struct OrdCofinalMap {
    omega_gamma: Cnf,
    omega_delta: Cnf,
    phi: Vec<Cnf>,
    psi_prime: Vec<Cnf>,
}

impl OrdCofinalMap {
    pub fn new(gamma: &Cnf, delta: &Cnf) -> OrdCofinalMap {
        assert!(!gamma.is_zero(), "gamma must be at least 1");
        assert!(gamma <= delta, "gamma must not exceed delta");
        OrdCofinalMap {
            omega_gamma: Cnf::monomial(gamma.clone(), 1),
            omega_delta: Cnf::monomial(delta.clone(), 1),
            phi: vec![Cnf::zero()],
            psi_prime: vec![Cnf::zero()],
        }
    }

    fn ensure(&mut self, n: usize) {
        while self.phi.len() <= n {
            let k = self.phi.len();
            let phi_k = self
                .omega_gamma
                .fund_step(k as u64)
                .expect("w^gamma is a limit for gamma >= 1");
            let psi_k = self
                .omega_delta
                .fund_step(k as u64)
                .expect("w^delta is a limit for delta >= 1");
            let step = phi_k
                .minus(&self.phi[k - 1])
                .expect("fundamental sequences increase");
            let shifted = self.psi_prime[k - 1].plus(&step);
            let psi_prime_k = if psi_k >= shifted { psi_k } else { shifted };
            self.phi.push(phi_k);
            self.psi_prime.push(psi_prime_k);
        }
    }

    /// `phi(n)`, the fundamental sequence of `w^gamma` with `phi(0) = 0`.
    pub fn phi(&mut self, n: usize) -> Cnf {
        self.ensure(n + 1);
        self.phi[n].clone()
    }

    /// `psi'(n)`, the origin of the `n`-th image block.
    pub fn psi_prime(&mut self, n: usize) -> Cnf {
        self.ensure(n + 1);
        self.psi_prime[n].clone()
    }

    /// The embedding: `zeta` must satisfy `zeta < w^gamma`.
    pub fn embed(&mut self, zeta: &Cnf) -> Cnf {
        assert!(*zeta < self.omega_gamma, "argument outside w^gamma");
        let mut n = 0;
        loop {
            self.ensure(n + 2);
            if *zeta < self.phi[n + 1] {
                let off = zeta.minus(&self.phi[n]).expect("block located");
                return self.psi_prime[n].plus(&off);
            }
            n += 1;
        }
    }

    /// The sup-inverse of the embedding: the largest `zeta` whose image does
    /// not exceed `u`, except that a `u` in the gap beyond block `n` answers
    /// `phi(n+1)`, the supremum of the exhausted blocks. `u` must satisfy
    /// `u < w^delta`.
    pub fn sup_inverse(&mut self, u: &Cnf) -> Cnf {
        assert!(*u < self.omega_delta, "argument outside w^delta");
        let mut n = 0;
        loop {
            self.ensure(n + 2);
            if *u < self.psi_prime[n + 1] {
                let r = u.minus(&self.psi_prime[n]).expect("block located");
                let width = self.phi[n + 1].minus(&self.phi[n]).expect("increasing");
                return if r >= width {
                    self.phi[n + 1].clone()
                } else {
                    self.phi[n].plus(&r)
                };
            }
            n += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::enum_cnf_below;

    fn c(s: &str) -> Cnf {
        s.parse().unwrap()
    }

    fn yes(a: &str, b: &str) -> OrdinalWitness {
        match ordinal_leq_s(&c(a), &c(b)) {
            OrdinalDecision::Yes(w) => w,
            OrdinalDecision::No(o) => panic!("expected yes for ({a},{b}), got {o:?}"),
        }
    }

    fn no(a: &str, b: &str) -> OrdinalObstruction {
        match ordinal_leq_s(&c(a), &c(b)) {
            OrdinalDecision::No(o) => o,
            OrdinalDecision::Yes(w) => panic!("expected no for ({a},{b}), got {w:?}"),
        }
    }

    #[test]
    fn successor_targets_truncate() {
        assert_eq!(yes("5", "w*1"), OrdinalWitness::Truncate);
        assert_eq!(yes("w*1+1", "w^(2)*1+1"), OrdinalWitness::Truncate);
        assert_eq!(yes("w*1+3", "w*2"), OrdinalWitness::Truncate);
        assert_eq!(no("w*1+1", "w*1"), OrdinalObstruction::NotLeq);
        assert_eq!(no("7", "5"), OrdinalObstruction::NotLeq);
        assert_eq!(yes("3", "3"), OrdinalWitness::Identity);
    }

    #[test]
    fn limits_never_map_onto_from_successors() {
        assert_eq!(no("w*1", "w*1+1"), OrdinalObstruction::LimitOntoSuccessor);
        assert_eq!(no("w*1", "5"), OrdinalObstruction::LimitOntoSuccessor);
        assert_eq!(
            no("w^(2)*1", "w^(3)*1+4"),
            OrdinalObstruction::LimitOntoSuccessor
        );
    }

    #[test]
    fn limit_pairs_compare_last_exponents() {
        // one copy of w onto two: identity below w, then the block embedding
        let w = yes("w*1", "w*2");
        assert_eq!(
            w,
            OrdinalWitness::Limit {
                alpha_prime: Cnf::zero(),
                base: c("w*1"),
                gamma: Cnf::one(),
                delta: Cnf::one(),
            }
        );
        let w = yes("w*2", "w^(2)*1");
        assert_eq!(
            w,
            OrdinalWitness::Limit {
                alpha_prime: c("w*1"),
                base: c("w*1"),
                gamma: Cnf::one(),
                delta: c("2"),
            }
        );
        // last exponent of the source exceeds the target's: impossible
        assert_eq!(no("w^(2)*1", "w^(2)*1+w*1"), OrdinalObstruction::ExponentClause);
        // but a smaller last exponent fits into the target's final block
        assert_eq!(
            yes("w^(2)*1+w*1", "w^(2)*2"),
            OrdinalWitness::Limit {
                alpha_prime: c("w^(2)*1"),
                base: c("w^(2)*1"),
                gamma: Cnf::one(),
                delta: c("2"),
            }
        );
    }

    #[test]
    fn block_map_is_monotone_and_cofinal() {
        for (g, d) in [("1", "1"), ("1", "2"), ("2", "2"), ("2", "3"), ("1", "w*1")] {
            let mut m = OrdCofinalMap::new(&c(g), &c(d));
            // psi' is strictly increasing and dominates psi
            let mut prev = m.psi_prime(0);
            for n in 1..60 {
                let cur = m.psi_prime(n);
                assert!(cur > prev, "psi' increases ({g},{d}) at {n}");
                let psi_n = Cnf::monomial(c(d), 1).fund_step(n as u64).unwrap();
                assert!(cur >= psi_n, "psi' dominates psi ({g},{d}) at {n}");
                prev = cur;
            }
            // the embedding is strictly increasing on an enumerated prefix
            let dom = Cnf::monomial(c(g), 1);
            let mut pts: Vec<Cnf> = enum_cnf_below(&dom).take(50).collect();
            pts.sort();
            let imgs: Vec<Cnf> = pts.iter().map(|z| m.embed(z)).collect();
            for w in imgs.windows(2) {
                assert!(w[0] < w[1], "embedding monotone ({g},{d})");
            }
            // sup-inverse undoes the embedding
            for (z, u) in pts.iter().zip(&imgs) {
                assert_eq!(m.sup_inverse(u), *z, "roundtrip ({g},{d})");
            }
        }
    }

    #[test]
    fn sup_inverse_is_monotone_between_blocks() {
        let mut m = OrdCofinalMap::new(&c("1"), &c("2"));
        // sample points of w^2 in order and check the inverse is monotone
        let bound = c("w^(2)*1");
        let mut us: Vec<Cnf> = enum_cnf_below(&bound).take(80).collect();
        us.sort();
        let invs: Vec<Cnf> = us.iter().map(|u| m.sup_inverse(u)).collect();
        for w in invs.windows(2) {
            assert!(w[0] <= w[1], "sup-inverse monotone");
        }
        // and surjective onto an initial chunk of w behind the embedding
        for k in 0..20u64 {
            let zeta = Cnf::from_nat(k);
            let u = m.embed(&zeta);
            assert_eq!(m.sup_inverse(&u), zeta);
        }
    }

    #[test]
    fn identity_when_exponents_match() {
        let mut m = OrdCofinalMap::new(&c("2"), &c("2"));
        for z in enum_cnf_below(&c("w^(2)*1")).take(40) {
            assert_eq!(m.embed(&z), z, "gamma == delta embeds identically");
        }
    }
}
