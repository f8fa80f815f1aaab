//! The closed term grammar for countable linear orders.
//!
//! Terms denote nonempty countable linear orders:
//!
//! - `n` — the finite order with `n` points (`n >= 1`);
//! - `w` — the natural numbers; `w*` — the reversed natural numbers;
//! - `eta` — the rationals;
//! - `z` — shorthand for `w*+w` (the integers);
//! - ordinal literals such as `w^(2)*1+w*3+5`, read as Cantor normal forms;
//! - `A+B` — concatenation, `A.B` — the product that replaces every point of
//!   `B` by a copy of `A` (so `w.2` is two copies of `w`), and `rev(A)` — the
//!   reversed order.
//!
//! `.` binds tighter than `+` and associates to the left; parentheses group.
//! There is no whitespace in the grammar. Maximal runs of explicit monomial
//! summands (`w^(e)*m`, `w*m`) followed by further monomials or naturals with
//! strictly decreasing exponents are merged into a single ordinal literal at
//! parse time, so `w^(2)*1+w*3+5` is one [`Term::Ord`] node.
//!
//! Printing inverts parsing structurally: `parse(pretty(t)) == t` for every
//! term, with parentheses inserted exactly where reparsing would otherwise
//! merge or regroup (for example `Sum([Ord(w*2), Fin(3)])` prints as
//! `w*2+(3)` because `w*2+3` would reparse as the single ordinal `w*2+3`).
//!
//! [`normalize`] rewrites a term to a canonical isomorphic form: sums are
//! flattened, adjacent ordinal-valued summands are added out, `eta+eta` and
//! `eta+1+eta` collapse, products of ordinals are multiplied out, `eta.X`
//! collapses to `eta`, units are dropped, and reversals are pushed down to
//! leaves (only `rev(w^(e)*1)` with `e >= 2` survives as an irreducible
//! reversed leaf). All rewrites are isomorphisms of the denoted orders.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::Cnf;

/// A linear-order term. See the module documentation for the grammar.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Term {
    /// The finite linear order with `n` points; `n` is always at least one.
    Fin(u64),
    /// The order of the natural numbers.
    Omega,
    /// The order of the negative integers (reversed naturals).
    OmegaStar,
    /// The order of the rationals.
    Eta,
    /// A well-order given in Cantor normal form.
    Ord(Cnf),
    /// Concatenation of at least one part, in order.
    Sum(Vec<Term>),
    /// `Product(a, b)`: one copy of `a` for every point of `b`, copies
    /// ordered as in `b` (so the right factor is the index).
    Product(Box<Term>, Box<Term>),
    /// The same points with the order turned around.
    Reverse(Box<Term>),
}

impl Term {
    /// The integers: `w*+w`.
    pub fn zeta() -> Term {
        Term::Sum(vec![Term::OmegaStar, Term::Omega])
    }

    pub fn sum(parts: Vec<Term>) -> Term {
        assert!(!parts.is_empty(), "sums have at least one part");
        Term::Sum(parts)
    }

    pub fn product(a: Term, b: Term) -> Term {
        Term::Product(Box::new(a), Box::new(b))
    }

    pub fn rev(a: Term) -> Term {
        Term::Reverse(Box::new(a))
    }

    pub fn parse(s: &str) -> Result<Term, SyntaxError> {
        let mut p = Parser { s: s.as_bytes(), i: 0 };
        let t = p.expr()?;
        if p.i != p.s.len() {
            return Err(p.fail("end of input"));
        }
        Ok(t)
    }

    /// The canonical textual form; `Term::parse` inverts it structurally.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        write_summand_or_atom(&mut out, self);
        out
    }

    /// True when [`normalize`] leaves the term unchanged.
    pub fn is_normal(&self) -> bool {
        normalize(self) == *self
    }

    /// Number of syntax nodes, counting each ordinal literal as one.
    pub fn size(&self) -> usize {
        match self {
            Term::Fin(_) | Term::Omega | Term::OmegaStar | Term::Eta | Term::Ord(_) => 1,
            Term::Sum(parts) => 1 + parts.iter().map(Term::size).sum::<usize>(),
            Term::Product(a, b) => 1 + a.size() + b.size(),
            Term::Reverse(a) => 1 + a.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({self})")
    }
}

impl FromStr for Term {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Term, SyntaxError> {
        Term::parse(s)
    }
}

impl From<Term> for String {
    fn from(t: Term) -> String {
        t.pretty()
    }
}

impl TryFrom<String> for Term {
    type Error = SyntaxError;

    fn try_from(s: String) -> Result<Term, SyntaxError> {
        Term::parse(&s)
    }
}

/// Reports the byte offset where parsing stopped and what it was looking for.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: expected {expected}")]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: String,
}

// ---------------------------------------------------------------------------
// Parsing

/// How a summand was written, for ordinal-literal merging. Runs start at
/// explicit monomials (`w^(e)*m`, `w*m`) and extend over further explicit
/// monomials or bare naturals while exponents strictly decrease.
enum MonoInfo {
    Plain,
    Nat(u64),
    Explicit(Cnf, u64),
}

struct Summand {
    term: Term,
    mono: MonoInfo,
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Parser<'a> {
    fn fail(&self, expected: &str) -> SyntaxError {
        SyntaxError { offset: self.i, expected: expected.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Term, SyntaxError> {
        let mut parts = vec![self.summand()?];
        while self.eat(b'+') {
            parts.push(self.summand()?);
        }
        Ok(merge_summands(parts))
    }

    fn summand(&mut self) -> Result<Summand, SyntaxError> {
        let mut acc = self.atom()?;
        while self.eat(b'.') {
            let rhs = self.atom()?;
            acc = Summand {
                term: Term::Product(Box::new(acc.term), Box::new(rhs.term)),
                mono: MonoInfo::Plain,
            };
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Summand, SyntaxError> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let t = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.fail("')'"));
                }
                Ok(Summand { term: t, mono: MonoInfo::Plain })
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.nat()?;
                Ok(Summand { term: Term::Fin(n), mono: MonoInfo::Nat(n) })
            }
            Some(b'w') => {
                self.i += 1;
                self.after_w()
            }
            Some(b'e') => {
                self.keyword("eta")?;
                Ok(Summand { term: Term::Eta, mono: MonoInfo::Plain })
            }
            Some(b'z') => {
                self.i += 1;
                Ok(Summand { term: Term::zeta(), mono: MonoInfo::Plain })
            }
            Some(b'r') => {
                self.keyword("rev")?;
                if !self.eat(b'(') {
                    return Err(self.fail("'('"));
                }
                let t = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.fail("')'"));
                }
                Ok(Summand { term: Term::Reverse(Box::new(t)), mono: MonoInfo::Plain })
            }
            _ => Err(self.fail("a term")),
        }
    }

    /// The character after a consumed `w` decides between `w`, `w*`
    /// (reversed naturals), the coefficient form `w*m`, and the monomial
    /// form `w^(e)` with optional `*m`.
    fn after_w(&mut self) -> Result<Summand, SyntaxError> {
        match self.peek() {
            Some(b'^') => {
                self.i += 1;
                if !self.eat(b'(') {
                    return Err(self.fail("'('"));
                }
                let exp = self.exponent()?;
                if !self.eat(b')') {
                    return Err(self.fail("')'"));
                }
                let coeff = if self.peek() == Some(b'*') {
                    self.i += 1;
                    self.nat()?
                } else {
                    1
                };
                Ok(Summand {
                    term: Term::Ord(Cnf::monomial(exp.clone(), coeff)),
                    mono: MonoInfo::Explicit(exp, coeff),
                })
            }
            Some(b'*') => {
                if matches!(self.s.get(self.i + 1), Some(c) if c.is_ascii_digit()) {
                    self.i += 1;
                    let coeff = self.nat()?;
                    Ok(Summand {
                        term: Term::Ord(Cnf::monomial(Cnf::one(), coeff)),
                        mono: MonoInfo::Explicit(Cnf::one(), coeff),
                    })
                } else {
                    self.i += 1;
                    Ok(Summand { term: Term::OmegaStar, mono: MonoInfo::Plain })
                }
            }
            _ => Ok(Summand { term: Term::Omega, mono: MonoInfo::Plain }),
        }
    }

    /// Exponents are full expressions evaluated to ordinals, plus the literal
    /// `0` which the general grammar does not admit.
    fn exponent(&mut self) -> Result<Cnf, SyntaxError> {
        if self.peek() == Some(b'0') && self.s.get(self.i + 1) == Some(&b')') {
            self.i += 1;
            return Ok(Cnf::zero());
        }
        let at = self.i;
        let t = self.expr()?;
        match term_to_cnf(&t) {
            Some(c) => Ok(c),
            None => Err(SyntaxError { offset: at, expected: "an ordinal-valued exponent".to_string() }),
        }
    }

    fn nat(&mut self) -> Result<u64, SyntaxError> {
        let at = self.i;
        let mut n: u64 = 0;
        let mut digits = 0usize;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            if digits > 0 && n == 0 {
                return Err(SyntaxError { offset: at, expected: "a number without leading zeros".to_string() });
            }
            n = n
                .checked_mul(10)
                .and_then(|m| m.checked_add(u64::from(c - b'0')))
                .ok_or_else(|| SyntaxError { offset: at, expected: "a smaller number".to_string() })?;
            digits += 1;
            self.i += 1;
        }
        if digits == 0 {
            return Err(self.fail("a number"));
        }
        if n == 0 {
            return Err(SyntaxError { offset: at, expected: "a positive number".to_string() });
        }
        Ok(n)
    }

    fn keyword(&mut self, k: &str) -> Result<(), SyntaxError> {
        if self.s[self.i..].starts_with(k.as_bytes()) {
            self.i += k.len();
            Ok(())
        } else {
            Err(self.fail(&format!("'{k}'")))
        }
    }
}

fn merge_summands(parts: Vec<Summand>) -> Term {
    let mut out: Vec<Term> = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        if let MonoInfo::Explicit(e, n) = &parts[i].mono {
            let mut monos = vec![(e.clone(), *n)];
            i += 1;
            while i < parts.len() {
                let last_exp = &monos.last().expect("nonempty").0;
                match &parts[i].mono {
                    MonoInfo::Nat(m) if !last_exp.is_zero() => {
                        monos.push((Cnf::zero(), *m));
                        i += 1;
                    }
                    MonoInfo::Explicit(e2, n2) if e2 < last_exp => {
                        monos.push((e2.clone(), *n2));
                        i += 1;
                    }
                    _ => break,
                }
            }
            out.push(Term::Ord(Cnf::from_monomials(monos)));
        } else {
            out.push(parts[i].term.clone());
            i += 1;
        }
    }
    if out.len() == 1 {
        out.pop().expect("nonempty")
    } else {
        Term::Sum(out)
    }
}

// ---------------------------------------------------------------------------
// Printing

fn write_summand_or_atom(out: &mut String, t: &Term) {
    match t {
        Term::Sum(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push('+');
                }
                let hazard = i > 0 && merges_with_previous(&parts[i - 1], p);
                if matches!(p, Term::Sum(_)) || hazard {
                    out.push('(');
                    write_summand_or_atom(out, p);
                    out.push(')');
                } else {
                    write_summand_or_atom(out, p);
                }
            }
        }
        Term::Product(a, b) => {
            write_factor(out, a, false);
            out.push('.');
            write_factor(out, b, true);
        }
        _ => write_atom(out, t),
    }
}

/// Would reparsing `prev` directly followed by `+cur` pull `cur` into
/// `prev`'s ordinal literal? Printed ordinals always open a merge run, which
/// swallows a following natural (when the run's final exponent is positive)
/// or a following ordinal whose leading exponent continues the strict
/// descent.
fn merges_with_previous(prev: &Term, cur: &Term) -> bool {
    let Term::Ord(sigma) = prev else {
        return false;
    };
    let last = sigma.last_exponent().expect("ordinal literals are nonzero");
    match cur {
        Term::Fin(_) => !last.is_zero(),
        Term::Ord(tau) => {
            let lead = tau.leading().expect("ordinal literals are nonzero").0;
            lead < last
        }
        _ => false,
    }
}

fn write_factor(out: &mut String, t: &Term, right: bool) {
    let parens = match t {
        Term::Sum(_) => true,
        Term::Product(..) => right,
        Term::Ord(c) => c.terms().len() > 1,
        _ => false,
    };
    if parens {
        out.push('(');
        write_summand_or_atom(out, t);
        out.push(')');
    } else {
        write_summand_or_atom(out, t);
    }
}

fn write_atom(out: &mut String, t: &Term) {
    match t {
        Term::Fin(n) => out.push_str(&n.to_string()),
        Term::Omega => out.push('w'),
        Term::OmegaStar => out.push_str("w*"),
        Term::Eta => out.push_str("eta"),
        Term::Ord(c) => write_ord(out, c),
        Term::Reverse(a) => {
            out.push_str("rev(");
            write_summand_or_atom(out, a);
            out.push(')');
        }
        Term::Sum(_) | Term::Product(..) => unreachable!("handled by write_summand_or_atom"),
    }
}

/// Ordinal literals print with an explicit leading monomial so that they
/// reparse as literals: a purely finite ordinal node prints as `w^(0)*n`.
fn write_ord(out: &mut String, c: &Cnf) {
    debug_assert!(!c.is_zero(), "terms denote nonempty orders");
    for (i, (e, n)) in c.terms().iter().enumerate() {
        if i > 0 {
            out.push('+');
        }
        if e.is_zero() {
            if i == 0 {
                out.push_str(&format!("w^(0)*{n}"));
            } else {
                out.push_str(&n.to_string());
            }
        } else if e.as_nat() == Some(1) {
            out.push_str(&format!("w*{n}"));
        } else {
            out.push_str(&format!("w^({e})*{n}"));
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation to ordinals and normalization

/// The value of a term as an ordinal, when the term denotes a well-order.
/// `None` exactly when the denoted order embeds a descending sequence or a
/// dense suborder (reversed infinite parts, `w*`, `eta`).
pub fn term_to_cnf(t: &Term) -> Option<Cnf> {
    match t {
        Term::Fin(n) => Some(Cnf::from_nat(*n)),
        Term::Omega => Some(Cnf::omega()),
        Term::OmegaStar | Term::Eta => None,
        Term::Ord(c) => Some(c.clone()),
        Term::Sum(parts) => {
            let mut acc = Cnf::zero();
            for p in parts {
                acc = acc.plus(&term_to_cnf(p)?);
            }
            Some(acc)
        }
        Term::Product(a, b) => Some(term_to_cnf(a)?.times(&term_to_cnf(b)?)),
        Term::Reverse(a) => term_to_cnf(a).filter(Cnf::is_finite),
    }
}

/// True when the denoted order has no dense suborder. Every `eta`-free term
/// denotes a scattered order, and `eta` anywhere embeds the rationals.
pub fn is_scattered(t: &Term) -> bool {
    match t {
        Term::Fin(_) | Term::Omega | Term::OmegaStar | Term::Ord(_) => true,
        Term::Eta => false,
        Term::Sum(parts) => parts.iter().all(is_scattered),
        Term::Product(a, b) => is_scattered(a) && is_scattered(b),
        Term::Reverse(a) => is_scattered(a),
    }
}

/// Rewrites to a canonical isomorphic form; see the module documentation for
/// the rule set. Idempotent, and every rewrite preserves the isomorphism
/// class of the denoted order.
pub fn normalize(t: &Term) -> Term {
    let mut cur = t.clone();
    for _ in 0..1000 {
        let next = normalize_pass(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    unreachable!("normalization did not converge on {t}")
}

fn normalize_pass(t: &Term) -> Term {
    match t {
        Term::Fin(_) | Term::Omega | Term::OmegaStar | Term::Eta => t.clone(),
        Term::Ord(c) => canonical_ord(c),
        Term::Reverse(x) => push_reverse(&normalize_pass(x)),
        Term::Product(a, b) => {
            let a = normalize_pass(a);
            let b = normalize_pass(b);
            if a == Term::Fin(1) {
                return b;
            }
            if b == Term::Fin(1) {
                return a;
            }
            // Replacing every point of any order by a copy of the rationals
            // yields a countable dense order without endpoints.
            if a == Term::Eta {
                return Term::Eta;
            }
            if let (Some(ca), Some(cb)) = (term_to_cnf(&a), term_to_cnf(&b)) {
                return canonical_ord(&ca.times(&cb));
            }
            Term::Product(Box::new(a), Box::new(b))
        }
        Term::Sum(parts) => {
            let mut flat: Vec<Term> = Vec::new();
            for p in parts {
                match normalize_pass(p) {
                    Term::Sum(inner) => flat.extend(inner),
                    q => flat.push(q),
                }
            }
            let mut merged: Vec<Term> = Vec::new();
            let mut run: Option<Cnf> = None;
            for p in flat {
                if let Some(c) = term_to_cnf(&p) {
                    run = Some(match run.take() {
                        Some(acc) => acc.plus(&c),
                        None => c,
                    });
                } else {
                    if let Some(acc) = run.take() {
                        merged.push(canonical_ord(&acc));
                    }
                    merged.push(p);
                }
            }
            if let Some(acc) = run.take() {
                merged.push(canonical_ord(&acc));
            }
            absorb_eta(&mut merged);
            if merged.len() == 1 {
                merged.pop().expect("nonempty")
            } else {
                Term::Sum(merged)
            }
        }
    }
}

/// `eta+eta` and `eta+1+eta` are isomorphic to `eta`.
fn absorb_eta(parts: &mut Vec<Term>) {
    let mut i = 0;
    while i < parts.len() {
        if parts[i] == Term::Eta {
            if parts.get(i + 1) == Some(&Term::Eta) {
                parts.remove(i + 1);
                continue;
            }
            if parts.get(i + 1) == Some(&Term::Fin(1)) && parts.get(i + 2) == Some(&Term::Eta) {
                parts.drain(i + 1..i + 3);
                continue;
            }
        }
        i += 1;
    }
}

fn canonical_ord(c: &Cnf) -> Term {
    if let Some(n) = c.as_nat() {
        debug_assert!(n > 0, "terms denote nonempty orders");
        Term::Fin(n)
    } else if *c == Cnf::omega() {
        Term::Omega
    } else {
        Term::Ord(c.clone())
    }
}

/// Pushes one reversal over an already-normalized term.
fn push_reverse(x: &Term) -> Term {
    match x {
        Term::Fin(n) => Term::Fin(*n),
        Term::Omega => Term::OmegaStar,
        Term::OmegaStar => Term::Omega,
        Term::Eta => Term::Eta,
        Term::Reverse(y) => (**y).clone(),
        Term::Sum(parts) => Term::Sum(parts.iter().rev().map(push_reverse).collect()),
        Term::Product(a, b) => Term::Product(Box::new(push_reverse(a)), Box::new(push_reverse(b))),
        Term::Ord(c) => reverse_ord(c),
    }
}

/// The reverse of an ordinal written out monomial by monomial, last first:
/// `rev(w^(2)*1+w*2+3)` becomes `3+w*.2+rev(w^(2)*1)`. Reversed monomials
/// `rev(w^(e)*1)` with `e >= 2` stay as irreducible leaves.
fn reverse_ord(c: &Cnf) -> Term {
    if let Some(n) = c.as_nat() {
        return Term::Fin(n);
    }
    let mut parts: Vec<Term> = c
        .terms()
        .iter()
        .rev()
        .map(|(e, n)| reverse_monomial(e, *n))
        .collect();
    if parts.len() == 1 {
        parts.pop().expect("nonempty")
    } else {
        Term::Sum(parts)
    }
}

fn reverse_monomial(e: &Cnf, n: u64) -> Term {
    if e.is_zero() {
        return Term::Fin(n);
    }
    let base = if e.as_nat() == Some(1) {
        Term::OmegaStar
    } else {
        Term::Reverse(Box::new(Term::Ord(Cnf::monomial(e.clone(), 1))))
    };
    if n == 1 {
        base
    } else {
        Term::Product(Box::new(base), Box::new(Term::Fin(n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        Term::parse(s).unwrap_or_else(|e| panic!("parse {s:?}: {e}"))
    }

    fn cnf(s: &str) -> Cnf {
        s.parse().unwrap()
    }

    #[test]
    fn parses_atoms() {
        assert_eq!(t("w"), Term::Omega);
        assert_eq!(t("w*"), Term::OmegaStar);
        assert_eq!(t("eta"), Term::Eta);
        assert_eq!(t("7"), Term::Fin(7));
        assert_eq!(t("z"), Term::Sum(vec![Term::OmegaStar, Term::Omega]));
        assert_eq!(t("rev(w)"), Term::rev(Term::Omega));
        assert_eq!(t("(w)"), Term::Omega);
    }

    #[test]
    fn parses_ordinal_literals() {
        assert_eq!(t("w*2"), Term::Ord(cnf("w*2")));
        assert_eq!(t("w^(2)*1+w*3+5"), Term::Ord(cnf("w^(2)*1+w*3+5")));
        assert_eq!(t("w^(2)"), Term::Ord(cnf("w^(2)*1")));
        assert_eq!(t("w^(0)*5"), Term::Ord(cnf("5")));
        assert_eq!(t("w^(w)*2"), Term::Ord(cnf("w^(w*1)*2")));
        assert_eq!(t("w^(w*2+1)*3"), Term::Ord(Cnf::monomial(cnf("w*2+1"), 3)));
        // a bare `w` is not a literal monomial, so no merging happens
        assert_eq!(t("w+1"), Term::Sum(vec![Term::Omega, Term::Fin(1)]));
        assert_eq!(t("1+w"), Term::Sum(vec![Term::Fin(1), Term::Omega]));
        // runs stop when exponents stop decreasing
        assert_eq!(
            t("w*2+3+w"),
            Term::Sum(vec![Term::Ord(cnf("w*2+3")), Term::Omega])
        );
        assert_eq!(
            t("w*1+w*1"),
            Term::Sum(vec![Term::Ord(cnf("w*1")), Term::Ord(cnf("w*1"))])
        );
        assert_eq!(
            t("w^(2)*1+(w*1+1)"),
            Term::Sum(vec![Term::Ord(cnf("w^(2)*1")), Term::Ord(cnf("w*1+1"))])
        );
    }

    #[test]
    fn parses_products_and_precedence() {
        assert_eq!(t("w.2"), Term::product(Term::Omega, Term::Fin(2)));
        assert_eq!(t("2.w"), Term::product(Term::Fin(2), Term::Omega));
        assert_eq!(
            t("w.2+1.3"),
            Term::Sum(vec![
                Term::product(Term::Omega, Term::Fin(2)),
                Term::product(Term::Fin(1), Term::Fin(3)),
            ])
        );
        assert_eq!(
            t("w.2.3"),
            Term::product(Term::product(Term::Omega, Term::Fin(2)), Term::Fin(3))
        );
        assert_eq!(
            t("(w+1).w"),
            Term::product(Term::Sum(vec![Term::Omega, Term::Fin(1)]), Term::Omega)
        );
        assert_eq!(t("w*.2"), Term::product(Term::OmegaStar, Term::Fin(2)));
        // an explicit monomial atom keeps its meaning inside a product
        assert_eq!(t("w*2.3"), Term::product(Term::Ord(cnf("w*2")), Term::Fin(3)));
        // a product summand does not extend a preceding ordinal literal
        assert_eq!(
            t("w*2+w*1.3"),
            Term::Sum(vec![
                Term::Ord(cnf("w*2")),
                Term::product(Term::Ord(cnf("w*1")), Term::Fin(3)),
            ])
        );
    }

    #[test]
    fn rejects_malformed_input() {
        for s in [
            "", "0", "01", "w^2", "w^(", "w^()", "w^(w*)", "w*0", "1+", "+1", "rev(w", "rev",
            "(w", "x", "w w", "1 + 1", "eta*", "w^(2)*", "w..2", "w.", "()", "0+1", "rev()",
        ] {
            assert!(Term::parse(s).is_err(), "should reject {s:?}");
        }
        let e = Term::parse("w^(z)*1").unwrap_err();
        assert_eq!(e.expected, "an ordinal-valued exponent");
        let e = Term::parse("1+").unwrap_err();
        assert_eq!(e.offset, 2);
    }

    #[test]
    fn pretty_inverts_parse_on_printed_forms() {
        for s in [
            "w", "w*", "eta", "5", "w*2", "w^(2)*1+w*3+5", "w+1", "1+w", "w.2", "2.w",
            "w*.2", "rev(w^(2)*1)", "eta+1+eta", "(w+1).w", "w*2+3+w", "rev(w+1)",
            "w^(w*1)*1", "1+eta+1",
        ] {
            assert_eq!(t(s).pretty(), s, "stable printing of {s}");
        }
    }

    #[test]
    fn printing_guards_against_literal_merging() {
        let cases = [
            (Term::Sum(vec![Term::Ord(cnf("w*2")), Term::Fin(3)]), "w*2+(3)"),
            (
                Term::Sum(vec![Term::Ord(cnf("w^(2)*1")), Term::Ord(cnf("w*1+1"))]),
                "w^(2)*1+(w*1+1)",
            ),
            (
                Term::Sum(vec![Term::Ord(cnf("w*1+1")), Term::Fin(2)]),
                "w*1+1+2",
            ),
            (
                Term::Sum(vec![Term::Ord(cnf("w*2")), Term::Ord(cnf("w*1"))]),
                "w*2+w*1",
            ),
            (Term::product(Term::Ord(cnf("w*1+1")), Term::Fin(2)), "(w*1+1).2"),
            (Term::product(Term::Fin(2), Term::product(Term::Fin(3), Term::Fin(4))), "2.(3.4)"),
            (Term::Ord(cnf("5")), "w^(0)*5"),
            (Term::Sum(vec![Term::Ord(cnf("w^(0)*2")), Term::Fin(3)]), "w^(0)*2+3"),
        ];
        for (term, expected) in cases {
            assert_eq!(term.pretty(), expected);
            assert_eq!(t(expected), term, "reparse of {expected}");
        }
    }

    #[test]
    fn structural_round_trip_samples() {
        let samples = [
            Term::Sum(vec![Term::Ord(cnf("w^(3)*2")), Term::Ord(cnf("w^(2)*1+w*1"))]),
            Term::product(Term::Sum(vec![Term::Eta, Term::Fin(1)]), Term::OmegaStar),
            Term::rev(Term::product(Term::Omega, Term::Eta)),
            Term::Sum(vec![Term::Fin(1), Term::Fin(1), Term::Omega]),
            Term::rev(Term::Sum(vec![Term::Omega, Term::Ord(cnf("w*2+1"))])),
        ];
        for term in samples {
            assert_eq!(t(&term.pretty()), term, "round trip of {term}");
        }
    }

    #[test]
    fn evaluates_ordinal_valued_terms() {
        assert_eq!(term_to_cnf(&t("w+1")), Some(cnf("w*1+1")));
        assert_eq!(term_to_cnf(&t("(w+1).w")), Some(cnf("w^(2)*1")));
        assert_eq!(term_to_cnf(&t("w.w")), Some(cnf("w^(2)*1")));
        assert_eq!(term_to_cnf(&t("rev(5)")), Some(cnf("5")));
        assert_eq!(term_to_cnf(&t("rev(w)")), None);
        assert_eq!(term_to_cnf(&t("eta")), None);
        assert_eq!(term_to_cnf(&t("z")), None);
        assert_eq!(term_to_cnf(&t("w.eta")), None);
    }

    #[test]
    fn normalizes_sums() {
        assert_eq!(normalize(&t("1+w")), Term::Omega);
        assert_eq!(normalize(&t("w*1")), Term::Omega);
        assert_eq!(normalize(&t("w+1+w")), Term::Ord(cnf("w*2")));
        assert_eq!(normalize(&t("2+3")), Term::Fin(5));
        assert_eq!(normalize(&t("eta+eta")), Term::Eta);
        assert_eq!(normalize(&t("eta+1+eta")), Term::Eta);
        assert_eq!(normalize(&t("eta+2+eta")), t("eta+2+eta"));
        assert_eq!(normalize(&t("1+eta")), t("1+eta"));
        assert_eq!(normalize(&t("w*+w")), Term::zeta());
        assert_eq!(normalize(&t("(w+1)+(w+1)")), Term::Ord(cnf("w*2+1")));
        // 1+z has a least point, so the leading 1 must not be absorbed
        assert_eq!(
            normalize(&t("1+z")),
            Term::Sum(vec![Term::Fin(1), Term::OmegaStar, Term::Omega])
        );
    }

    #[test]
    fn normalizes_products() {
        assert_eq!(normalize(&t("2.w")), Term::Omega);
        assert_eq!(normalize(&t("w.2")), Term::Ord(cnf("w*2")));
        assert_eq!(normalize(&t("w.w")), Term::Ord(cnf("w^(2)*1")));
        assert_eq!(normalize(&t("eta.w")), Term::Eta);
        assert_eq!(normalize(&t("eta.z")), Term::Eta);
        assert_eq!(normalize(&t("w.eta")), t("w.eta"));
        assert_eq!(normalize(&t("2.eta")), t("2.eta"));
        assert_eq!(normalize(&t("w.1")), Term::Omega);
        assert_eq!(normalize(&t("1.w*")), Term::OmegaStar);
        assert_eq!(normalize(&t("(w+1).w")), Term::Ord(cnf("w^(2)*1")));
    }

    #[test]
    fn normalizes_reversals() {
        assert_eq!(normalize(&t("rev(rev(eta+2))")), t("eta+2"));
        assert_eq!(normalize(&t("rev(w)")), Term::OmegaStar);
        assert_eq!(normalize(&t("rev(w*)")), Term::Omega);
        assert_eq!(normalize(&t("rev(5)")), Term::Fin(5));
        assert_eq!(normalize(&t("rev(w+1)")), t("1+w*"));
        assert_eq!(normalize(&t("rev(z)")), Term::zeta());
        assert_eq!(normalize(&t("rev(w^(2)*1+w*2+3)")), t("3+w*.2+rev(w^(2)*1)"));
        assert_eq!(normalize(&t("rev(w^(2)*2)")), t("rev(w^(2)*1).2"));
        assert_eq!(normalize(&t("rev(w.eta)")), Term::product(Term::OmegaStar, Term::Eta));
    }

    #[test]
    fn normalize_is_idempotent_on_samples() {
        for s in [
            "w", "1+w", "w+1", "rev(w^(3)*2+w*1)", "eta+eta+eta", "(1+eta).(w+1)",
            "z.w", "w.z", "rev(eta+w)", "w^(w)*3+w*2", "(eta+2).w*", "rev((1+eta).w)",
        ] {
            let n = normalize(&t(s));
            assert_eq!(normalize(&n), n, "idempotent on {s}");
        }
    }

    #[test]
    fn scatteredness_is_syntactic() {
        assert!(is_scattered(&t("w.z+w*")));
        assert!(is_scattered(&t("rev(w^(2)*1)")));
        assert!(!is_scattered(&t("w.eta")));
        assert!(!is_scattered(&t("rev(eta+w)")));
        assert!(!is_scattered(&t("(1+eta).w")));
    }

    #[test]
    fn serde_round_trips_terms() {
        let term = t("rev(w^(2)*1)+eta.2");
        let j = serde_json::to_string(&term).unwrap();
        let back: Term = serde_json::from_str(&j).unwrap();
        assert_eq!(back, term);
    }
}
