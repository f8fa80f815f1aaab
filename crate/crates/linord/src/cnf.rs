//! Ordinal arithmetic in Cantor normal form below epsilon-zero.
//!
//! An ordinal is a strictly descending list of monomials `w^e * n`, where the
//! exponents are themselves ordinals in the same representation and every
//! coefficient is at least one. The empty list is zero. All operations keep
//! values in normal form, so structural equality coincides with ordinal
//! equality, and lexicographic comparison of the monomial lists (a proper
//! prefix counting as smaller) coincides with the ordinal order.
//!
//! Addition and multiplication are the usual non-commutative ordinal
//! operations (`1 + w == w`, `2 * w == w`). Subtraction is the *left*
//! difference: `a.minus(&b)` is the unique `c` with `b + c == a`, when `b`
//! is at most `a`.
//!
//! The textual form used by `Display`/`FromStr` (and by the serde
//! implementation) writes monomials as `n`, `w*n`, or `w^(e)*n`, joined by
//! `+`, with `0` for zero: for example `w^(w)*1+w*3+5`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An ordinal below epsilon-zero in Cantor normal form.
///
/// Invariants: exponents strictly decrease along the monomial list and every
/// coefficient is nonzero. Constructors maintain both, so any two equal
/// ordinals are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Cnf {
    terms: Vec<(Cnf, u64)>,
}

impl Cnf {
    pub fn zero() -> Cnf {
        Cnf { terms: Vec::new() }
    }

    pub fn one() -> Cnf {
        Cnf::from_nat(1)
    }

    pub fn from_nat(n: u64) -> Cnf {
        Cnf::monomial(Cnf::zero(), n)
    }

    pub fn omega() -> Cnf {
        Cnf::monomial(Cnf::one(), 1)
    }

    /// `w^exp * coeff`; a zero coefficient yields zero.
    pub fn monomial(exp: Cnf, coeff: u64) -> Cnf {
        if coeff == 0 {
            Cnf::zero()
        } else {
            Cnf { terms: vec![(exp, coeff)] }
        }
    }

    /// Builds an ordinal from monomials given in strictly descending exponent
    /// order with nonzero coefficients. Panics when the invariant is violated;
    /// intended for literals whose shape is known statically.
    pub fn from_monomials(monomials: Vec<(Cnf, u64)>) -> Cnf {
        for pair in monomials.windows(2) {
            assert!(pair[0].0 > pair[1].0, "exponents must strictly decrease");
        }
        assert!(monomials.iter().all(|(_, n)| *n > 0), "coefficients must be nonzero");
        Cnf { terms: monomials }
    }

    pub fn terms(&self) -> &[(Cnf, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for `w^e * n` with a single monomial.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, n)] if e.is_zero() => Some(*n),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Cnf, u64)> {
        self.terms.first().map(|(e, n)| (e, *n))
    }

    pub fn last(&self) -> Option<(&Cnf, u64)> {
        self.terms.last().map(|(e, n)| (e, *n))
    }

    /// The exponent of the final monomial; `None` for zero.
    pub fn last_exponent(&self) -> Option<&Cnf> {
        self.terms.last().map(|(e, _)| e)
    }

    /// Nonzero with a trailing `w^0` monomial.
    pub fn is_successor(&self) -> bool {
        matches!(self.last_exponent(), Some(e) if e.is_zero())
    }

    /// Nonzero with a trailing monomial of positive exponent.
    pub fn is_limit(&self) -> bool {
        matches!(self.last_exponent(), Some(e) if !e.is_zero())
    }

    /// Ordinal addition. The left summand's tail below the right summand's
    /// leading exponent is absorbed: `1 + w == w`.
    pub fn plus(&self, rhs: &Cnf) -> Cnf {
        let Some((e0, n0)) = rhs.leading() else {
            return self.clone();
        };
        let mut terms: Vec<(Cnf, u64)> = Vec::new();
        let mut merged: Option<u64> = None;
        for (e, n) in &self.terms {
            match e.cmp(e0) {
                Ordering::Greater => terms.push((e.clone(), *n)),
                Ordering::Equal => {
                    merged = Some(n.checked_add(n0).expect("coefficient overflow"));
                    break;
                }
                Ordering::Less => break,
            }
        }
        terms.push((e0.clone(), merged.unwrap_or(n0)));
        terms.extend(rhs.terms[1..].iter().cloned());
        Cnf { terms }
    }

    /// Left difference: the unique `c` with `rhs + c == self`, or `None` when
    /// `self < rhs`.
    pub fn minus(&self, rhs: &Cnf) -> Option<Cnf> {
        let mut i = 0;
        while i < self.terms.len() && i < rhs.terms.len() && self.terms[i] == rhs.terms[i] {
            i += 1;
        }
        if i == rhs.terms.len() {
            // rhs is a prefix; the remaining tail adds without absorption.
            return Some(Cnf { terms: self.terms[i..].to_vec() });
        }
        if i == self.terms.len() {
            return None;
        }
        let (ea, na) = &self.terms[i];
        let (eb, nb) = &rhs.terms[i];
        match ea.cmp(eb) {
            // rhs's differing tail is absorbed below w^ea.
            Ordering::Greater => Some(Cnf { terms: self.terms[i..].to_vec() }),
            Ordering::Less => None,
            Ordering::Equal => {
                if na > nb {
                    let mut terms = vec![(ea.clone(), na - nb)];
                    terms.extend(self.terms[i + 1..].iter().cloned());
                    Some(Cnf { terms })
                } else {
                    None
                }
            }
        }
    }

    /// Ordinal multiplication: distributes over the right factor's monomials;
    /// a positive right exponent absorbs everything below the left factor's
    /// leading term (`(w+1) * w == w^2`), while a finite right factor scales
    /// only the leading coefficient (`(w+1) * 2 == w*2+1`).
    pub fn times(&self, rhs: &Cnf) -> Cnf {
        let Some((e0, n0)) = self.leading() else {
            return Cnf::zero();
        };
        let mut acc = Cnf::zero();
        for (d, m) in &rhs.terms {
            let part = if d.is_zero() {
                let mut terms = vec![(e0.clone(), n0.checked_mul(*m).expect("coefficient overflow"))];
                terms.extend(self.terms[1..].iter().cloned());
                Cnf { terms }
            } else {
                Cnf::monomial(e0.plus(d), *m)
            };
            acc = acc.plus(&part);
        }
        acc
    }

    pub fn succ(&self) -> Cnf {
        self.plus(&Cnf::one())
    }

    /// The ordinal directly below, for successors only.
    pub fn pred(&self) -> Option<Cnf> {
        if !self.is_successor() {
            return None;
        }
        Some(self.drop_last_unit().expect("successor is nonzero"))
    }

    /// Removes one unit from the final coefficient: `w*2` becomes `w*1`,
    /// `w+1` becomes `w`. `None` for zero.
    pub fn drop_last_unit(&self) -> Option<Cnf> {
        let (e, n) = self.last()?;
        let mut terms = self.terms.clone();
        if n > 1 {
            terms.last_mut().expect("nonzero").1 = n - 1;
        } else {
            terms.pop();
            let _ = e;
        }
        Some(Cnf { terms })
    }

    /// The `n`-th element of the canonical strictly increasing sequence
    /// converging to a limit ordinal from below: drop one unit of the final
    /// coefficient and climb back by `w^(e-1)*n` when the final exponent `e`
    /// is a successor, or by `w^(e[n])` when `e` is itself a limit.
    ///
    /// `None` unless `self` is a limit. The sequence starts at index zero,
    /// increases strictly, and has the limit as its least upper bound.
    pub fn fund_step(&self, n: u64) -> Option<Cnf> {
        if !self.is_limit() {
            return None;
        }
        let gamma = self.last_exponent().expect("limit is nonzero").clone();
        let prefix = self.drop_last_unit().expect("limit is nonzero");
        let step = if let Some(gamma0) = gamma.pred() {
            Cnf::monomial(gamma0, n)
        } else {
            let inner = gamma.fund_step(n).expect("positive non-successor exponent is a limit");
            Cnf::monomial(inner, 1)
        };
        Some(prefix.plus(&step))
    }

    /// Structural size used to enumerate ordinals level by level: the sum
    /// over monomials of the exponent's weight plus the coefficient. Each
    /// weight class is finite.
    pub fn weight(&self) -> u64 {
        self.terms
            .iter()
            .map(|(e, n)| e.weight().saturating_add(*n))
            .fold(0u64, |a, b| a.saturating_add(b))
    }
}

impl Ord for Cnf {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            match a.0.cmp(&b.0) {
                Ordering::Equal => {}
                o => return o,
            }
            match a.1.cmp(&b.1) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Cnf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, n)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{n}")?;
            } else if e.as_nat() == Some(1) {
                write!(f, "w*{n}")?;
            } else {
                write!(f, "w^({e})*{n}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cnf({self})")
    }
}

impl From<u64> for Cnf {
    fn from(n: u64) -> Cnf {
        Cnf::from_nat(n)
    }
}

impl From<Cnf> for String {
    fn from(c: Cnf) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Cnf {
    type Error = CnfParseError;

    fn try_from(s: String) -> Result<Cnf, CnfParseError> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfParseError {
    #[error("unexpected character at offset {0}")]
    Unexpected(usize),
    #[error("numbers must not have leading zeros (offset {0})")]
    LeadingZero(usize),
    #[error("zero cannot appear as a summand or coefficient (offset {0})")]
    ZeroTerm(usize),
    #[error("number too large at offset {0}")]
    NumberOverflow(usize),
    #[error("exponents must strictly decrease (offset {0})")]
    ExponentOrder(usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("trailing input at offset {0}")]
    Trailing(usize),
}

impl FromStr for Cnf {
    type Err = CnfParseError;

    fn from_str(s: &str) -> Result<Cnf, CnfParseError> {
        let mut p = CnfParser { s: s.as_bytes(), i: 0 };
        let c = p.parse_cnf()?;
        if p.i != p.s.len() {
            return Err(CnfParseError::Trailing(p.i));
        }
        Ok(c)
    }
}

struct CnfParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> CnfParser<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn parse_cnf(&mut self) -> Result<Cnf, CnfParseError> {
        if self.peek() == Some(b'0') {
            let at = self.i;
            self.i += 1;
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(CnfParseError::LeadingZero(at));
            }
            if self.peek() == Some(b'+') {
                return Err(CnfParseError::ZeroTerm(at));
            }
            return Ok(Cnf::zero());
        }
        let mut monos = Vec::new();
        loop {
            let at = self.i;
            let mono = self.parse_monomial()?;
            if let Some((prev, _)) = monos.last() {
                if *prev <= mono.0 {
                    return Err(CnfParseError::ExponentOrder(at));
                }
            }
            monos.push(mono);
            if self.peek() == Some(b'+') {
                self.i += 1;
            } else {
                break;
            }
        }
        Ok(Cnf { terms: monos })
    }

    fn parse_monomial(&mut self) -> Result<(Cnf, u64), CnfParseError> {
        match self.peek() {
            Some(b'w') => {
                self.i += 1;
                let exp = if self.peek() == Some(b'^') {
                    self.i += 1;
                    if self.peek() != Some(b'(') {
                        return self.peek().map_or(Err(CnfParseError::UnexpectedEnd), |_| {
                            Err(CnfParseError::Unexpected(self.i))
                        });
                    }
                    self.i += 1;
                    let e = self.parse_cnf()?;
                    if self.peek() != Some(b')') {
                        return self.peek().map_or(Err(CnfParseError::UnexpectedEnd), |_| {
                            Err(CnfParseError::Unexpected(self.i))
                        });
                    }
                    self.i += 1;
                    e
                } else {
                    Cnf::one()
                };
                let coeff = if self.peek() == Some(b'*') {
                    self.i += 1;
                    self.parse_nonzero_nat()?
                } else {
                    1
                };
                Ok((exp, coeff))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_nonzero_nat()?;
                Ok((Cnf::zero(), n))
            }
            Some(_) => Err(CnfParseError::Unexpected(self.i)),
            None => Err(CnfParseError::UnexpectedEnd),
        }
    }

    fn parse_nonzero_nat(&mut self) -> Result<u64, CnfParseError> {
        let at = self.i;
        let mut n: u64 = 0;
        let mut digits = 0;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            if digits > 0 && n == 0 {
                return Err(CnfParseError::LeadingZero(at));
            }
            n = n
                .checked_mul(10)
                .and_then(|m| m.checked_add(u64::from(c - b'0')))
                .ok_or(CnfParseError::NumberOverflow(at))?;
            digits += 1;
            self.i += 1;
        }
        if digits == 0 {
            return self
                .peek()
                .map_or(Err(CnfParseError::UnexpectedEnd), |_| Err(CnfParseError::Unexpected(self.i)));
        }
        if n == 0 {
            return Err(CnfParseError::ZeroTerm(at));
        }
        Ok(n)
    }
}
