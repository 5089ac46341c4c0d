//! Exact multivariate polynomials over the rationals.
//!
//! Terms are kept sorted in the ring's monomial order (largest first), with no
//! zero coefficients stored; equality is structural. Two order families are
//! supported: global graded reverse lexicographic and its local (negative)
//! counterpart used for computations at the origin.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub type Rat = BigRational;
/// Exponent vector; length always equals the number of ring variables.
pub type Exp = SmallVec<[u16; 8]>;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum MonomialOrder {
    /// Global graded reverse lexicographic order.
    GrevLex,
    /// Local negative graded reverse lexicographic order (1 is the largest
    /// monomial; leading terms pick out the tangent cone).
    LocalGrevLex,
}

impl MonomialOrder {
    pub fn is_global(self) -> bool {
        matches!(self, MonomialOrder::GrevLex)
    }

    /// Compare monomials, largest first means `Ordering::Greater`.
    pub fn cmp(self, a: &[u16], b: &[u16]) -> Ordering {
        let da: u64 = a.iter().map(|&e| e as u64).sum();
        let db: u64 = b.iter().map(|&e| e as u64).sum();
        let head = match self {
            MonomialOrder::GrevLex => da.cmp(&db),
            MonomialOrder::LocalGrevLex => db.cmp(&da),
        };
        head.then_with(|| {
            // reverse lexicographic tie break: the last coordinate where the
            // exponents differ decides, smaller exponent wins
            for i in (0..a.len()).rev() {
                if a[i] != b[i] {
                    return if a[i] < b[i] { Ordering::Greater } else { Ordering::Less };
                }
            }
            Ordering::Equal
        })
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct RingData {
    pub vars: Vec<String>,
    pub order: MonomialOrder,
}

/// A polynomial ring over Q, optionally a quotient by an ideal of the same
/// ring. All arithmetic happens on polynomial representatives; operations
/// that care about the quotient adjoin its generators themselves.
#[derive(Clone)]
pub struct PolyRing {
    data: Arc<RingData>,
    quotient: Option<Arc<Vec<Poly>>>,
}

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.same_data(other)
            && match (&self.quotient, &other.quotient) {
                (None, None) => true,
                (Some(a), Some(b)) => a.as_slice() == b.as_slice(),
                _ => false,
            }
    }
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyRing({:?}, {:?}", self.data.vars, self.data.order)?;
        if self.quotient.is_some() {
            write!(f, ", quotient")?;
        }
        write!(f, ")")
    }
}

impl PolyRing {
    pub fn new(vars: Vec<String>, order: MonomialOrder) -> Result<Self> {
        for i in 0..vars.len() {
            for j in (i + 1)..vars.len() {
                if vars[i] == vars[j] {
                    return Err(Error::validation(format!("duplicate variable name '{}'", vars[i])));
                }
            }
        }
        Ok(PolyRing { data: Arc::new(RingData { vars, order }), quotient: None })
    }

    pub fn named(vars: &[&str], order: MonomialOrder) -> Self {
        PolyRing::new(vars.iter().map(|s| s.to_string()).collect(), order).unwrap()
    }

    pub fn with_quotient(&self, gens: Vec<Poly>) -> Result<Self> {
        for g in &gens {
            if !Arc::ptr_eq(&g.ring, &self.data) && *g.ring != *self.data {
                return Err(Error::RingMismatch("quotient generators live in a different ring".into()));
            }
        }
        let gens: Vec<Poly> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(PolyRing { data: self.data.clone(), quotient: if gens.is_empty() { None } else { Some(Arc::new(gens)) } })
    }

    pub fn without_quotient(&self) -> Self {
        PolyRing { data: self.data.clone(), quotient: None }
    }

    /// Same variables and order, other order family.
    pub fn with_order(&self, order: MonomialOrder) -> Self {
        if order == self.data.order {
            return self.clone();
        }
        let data = Arc::new(RingData { vars: self.data.vars.clone(), order });
        let quotient = self.quotient.as_ref().map(|q| {
            Arc::new(q.iter().map(|p| p.reinterpret(&data)).collect::<Vec<_>>())
        });
        PolyRing { data, quotient }
    }

    pub fn data(&self) -> &Arc<RingData> {
        &self.data
    }

    pub fn quotient_gens(&self) -> &[Poly] {
        self.quotient.as_ref().map(|q| q.as_slice()).unwrap_or(&[])
    }

    pub fn has_quotient(&self) -> bool {
        self.quotient.is_some()
    }

    pub fn nvars(&self) -> usize {
        self.data.vars.len()
    }

    pub fn order(&self) -> MonomialOrder {
        self.data.order
    }

    pub fn vars(&self) -> &[String] {
        &self.data.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.data.vars.iter().position(|v| v == name)
    }

    pub fn same_data(&self, other: &PolyRing) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || *self.data == *other.data
    }

    pub fn zero(&self) -> Poly {
        Poly { ring: self.data.clone(), terms: Vec::new() }
    }

    pub fn one(&self) -> Poly {
        self.constant(Rat::one())
    }

    pub fn constant(&self, c: Rat) -> Poly {
        if c.is_zero() {
            return self.zero();
        }
        let exp: Exp = SmallVec::from_elem(0u16, self.nvars());
        Poly { ring: self.data.clone(), terms: vec![(exp, c)] }
    }

    pub fn var(&self, i: usize) -> Poly {
        assert!(i < self.nvars());
        let mut exp: Exp = SmallVec::from_elem(0u16, self.nvars());
        exp[i] = 1;
        Poly { ring: self.data.clone(), terms: vec![(exp, Rat::one())] }
    }

    pub fn monomial(&self, exp: &[u16], c: Rat) -> Poly {
        assert_eq!(exp.len(), self.nvars());
        if c.is_zero() {
            return self.zero();
        }
        Poly { ring: self.data.clone(), terms: vec![(SmallVec::from_slice(exp), c)] }
    }

    pub fn from_terms(&self, mut terms: Vec<(Exp, Rat)>) -> Poly {
        let order = self.data.order;
        terms.retain(|(_, c)| !c.is_zero());
        // descending in the ring order; equal monomials land adjacently
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out: Vec<(Exp, Rat)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == e {
                    last.1 += c;
                    continue;
                }
            }
            out.push((e, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { ring: self.data.clone(), terms: out }
    }

    /// Parse a polynomial in the text grammar used by problem files:
    /// identifiers for variables, `^` for powers, `*` optional, rationals as
    /// `p/q`, `+`/`-` and parentheses.
    pub fn parse(&self, input: &str) -> Result<Poly> {
        crate::poly::parser::parse_poly(self, input)
    }
}

/// Exact multivariate polynomial; terms sorted descending in the ring order.
#[derive(Clone)]
pub struct Poly {
    pub(crate) ring: Arc<RingData>,
    pub(crate) terms: Vec<(Exp, Rat)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Poly {
    pub fn ring_data(&self) -> &Arc<RingData> {
        &self.ring
    }

    pub(crate) fn reinterpret(&self, data: &Arc<RingData>) -> Poly {
        assert_eq!(self.ring.vars, data.vars);
        if self.ring.order == data.order {
            return Poly { ring: data.clone(), terms: self.terms.clone() };
        }
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| data.order.cmp(&b.0, &a.0));
        Poly { ring: data.clone(), terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0) && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(Exp, Rat)] {
        &self.terms
    }

    /// Coefficient of the constant monomial; this is the value at the origin.
    pub fn constant_term(&self) -> Rat {
        self.terms
            .iter()
            .find(|(e, _)| e.iter().all(|&x| x == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Unit in the local ring at the origin.
    pub fn is_local_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(e, _)| e.iter().map(|&x| x as u64).sum()).max()
    }

    /// Smallest total degree of a term (order of vanishing at 0).
    pub fn low_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(e, _)| e.iter().map(|&x| x as u64).sum()).min()
    }

    pub fn lead(&self) -> Option<(&Exp, &Rat)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn neg(&self) -> Poly {
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.add_scaled_mono(other, &Rat::one(), None)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add_scaled_mono(other, &-Rat::one(), None)
    }

    /// `self + c * x^shift * other`, merging sorted term lists.
    pub fn add_scaled_mono(&self, other: &Poly, c: &Rat, shift: Option<&[u16]>) -> Poly {
        debug_assert!(Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring);
        let order = self.ring.order;
        let mut out: Vec<(Exp, Rat)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        let shifted = |e: &Exp| -> Exp {
            match shift {
                None => e.clone(),
                Some(s) => {
                    let mut r = e.clone();
                    for (k, &sv) in s.iter().enumerate() {
                        r[k] += sv;
                    }
                    r
                }
            }
        };
        while i < self.terms.len() && j < other.terms.len() {
            let eo = shifted(&other.terms[j].0);
            match order.cmp(&self.terms[i].0, &eo) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let coef = c * &other.terms[j].1;
                    if !coef.is_zero() {
                        out.push((eo, coef));
                    }
                    j += 1;
                }
                Ordering::Equal => {
                    let coef = &self.terms[i].1 + c * &other.terms[j].1;
                    if !coef.is_zero() {
                        out.push((eo, coef));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        while j < other.terms.len() {
            let coef = c * &other.terms[j].1;
            if !coef.is_zero() {
                out.push((shifted(&other.terms[j].0), coef));
            }
            j += 1;
        }
        Poly { ring: self.ring.clone(), terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert!(Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring);
        if self.is_zero() || other.is_zero() {
            return Poly { ring: self.ring.clone(), terms: Vec::new() };
        }
        let (small, big) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        let mut acc = Poly { ring: self.ring.clone(), terms: Vec::new() };
        for (e, c) in &small.terms {
            acc = acc.add_scaled_mono(big, c, Some(e));
        }
        acc
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly { ring: self.ring.clone(), terms: Vec::new() };
        }
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let one = Poly {
            ring: self.ring.clone(),
            terms: vec![(SmallVec::from_elem(0, self.ring.vars.len()), Rat::one())],
        };
        let mut acc = one;
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut terms: Vec<(Exp, Rat)> = Vec::new();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                terms.push((ne, c * Rat::from(BigInt::from(e[i] as i64))));
            }
        }
        let order = self.ring.order;
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Poly { ring: self.ring.clone(), terms }
    }

    /// Substitution homomorphism: one image per source variable, all in the
    /// target ring. This is the entry point for every ring map in the crate.
    pub fn map_to(&self, target: &PolyRing, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.ring.vars.len() {
            return Err(Error::validation(format!(
                "ring map expects {} images, got {}",
                self.ring.vars.len(),
                images.len()
            )));
        }
        for im in images {
            if !target.same_data(&PolyRing { data: im.ring.clone(), quotient: None }) {
                return Err(Error::RingMismatch("ring map image lives outside the target ring".into()));
            }
        }
        let mut acc = target.zero();
        for (e, c) in &self.terms {
            let mut term = target.constant(c.clone());
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    term = term.mul(&images[i].pow(ei as u32));
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Rename-style embedding into a ring whose variable list contains the
    /// source variables (by name).
    pub fn embed(&self, target: &PolyRing) -> Result<Poly> {
        let mut idx = Vec::with_capacity(self.ring.vars.len());
        for v in &self.ring.vars {
            idx.push(
                target
                    .var_index(v)
                    .ok_or_else(|| Error::RingMismatch(format!("variable '{}' missing in target ring", v)))?,
            );
        }
        let mut terms: Vec<(Exp, Rat)> = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let mut ne: Exp = SmallVec::from_elem(0u16, target.nvars());
            for (i, &ei) in e.iter().enumerate() {
                ne[idx[i]] = ei;
            }
            terms.push((ne, c.clone()));
        }
        let order = target.order();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Ok(Poly { ring: target.data().clone(), terms })
    }

    /// Normalize to leading coefficient 1.
    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Rat::one() / c.clone();
                self.scale(&inv)
            }
        }
    }

    /// Clear denominators and divide by the integer content; sign fixed so the
    /// leading coefficient is positive. Keeps Buchberger's coefficients small.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            den = num::integer::lcm(den, c.denom().clone());
        }
        let mut content = BigInt::zero();
        for (_, c) in &self.terms {
            let int = c.numer() * (&den / c.denom());
            content = num::integer::gcd(content, int);
        }
        if content.is_zero() {
            return self.clone();
        }
        let mut factor = Rat::new(den, content);
        if (self.terms[0].1.clone() * &factor).is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Total-degree homogeneous component decomposition with respect to a set
    /// of variables; used to split results of graded computations.
    pub fn weighted_components(&self, weight_vars: &[usize]) -> Vec<(u64, Poly)> {
        use std::collections::BTreeMap;
        let mut buckets: BTreeMap<u64, Vec<(Exp, Rat)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let w: u64 = weight_vars.iter().map(|&i| e[i] as u64).sum();
            buckets.entry(w).or_default().push((e.clone(), c.clone()));
        }
        buckets
            .into_iter()
            .map(|(w, terms)| (w, Poly { ring: self.ring.clone(), terms }))
            .collect()
    }

    pub fn weighted_degree(&self, weight_vars: &[usize]) -> Option<u64> {
        self.terms.iter().map(|(e, _)| weight_vars.iter().map(|&i| e[i] as u64).sum()).max()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const_mono = e.iter().all(|&x| x == 0);
            let mut wrote = false;
            if !abs.is_one() || is_const_mono {
                if abs.denom().is_one() {
                    write!(f, "{}", abs.numer())?;
                } else {
                    write!(f, "{}/{}", abs.numer(), abs.denom())?;
                }
                wrote = true;
            }
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "{}", self.ring.vars[i])?;
                if ei > 1 {
                    write!(f, "^{}", ei)?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

/// Entrywise substitution homomorphism; the spec's `ring_map_apply`.
pub fn ring_map_apply(_source: &PolyRing, target: &PolyRing, images: &[Poly], p: &Poly) -> Result<Poly> {
    p.map_to(target, images)
}

pub(crate) mod parser {
    use super::*;

    struct Lexer<'a> {
        src: &'a [u8],
        pos: usize,
        line: usize,
        col: usize,
    }

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(BigInt),
        Ident(String),
        Plus,
        Minus,
        Star,
        Caret,
        Slash,
        LParen,
        RParen,
        End,
    }

    impl<'a> Lexer<'a> {
        fn new(src: &'a str) -> Self {
            Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
        }

        fn err(&self, msg: &str) -> Error {
            Error::Parse { line: self.line, col: self.col, msg: msg.to_string() }
        }

        fn bump(&mut self) -> Option<u8> {
            let c = self.src.get(self.pos).copied();
            if let Some(c) = c {
                self.pos += 1;
                if c == b'\n' {
                    self.line += 1;
                    self.col = 1;
                } else {
                    self.col += 1;
                }
            }
            c
        }

        fn peek(&self) -> Option<u8> {
            self.src.get(self.pos).copied()
        }

        fn next_tok(&mut self) -> Result<Tok> {
            while let Some(c) = self.peek() {
                if c.is_ascii_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let c = match self.peek() {
                None => return Ok(Tok::End),
                Some(c) => c,
            };
            match c {
                b'+' => {
                    self.bump();
                    Ok(Tok::Plus)
                }
                b'-' => {
                    self.bump();
                    Ok(Tok::Minus)
                }
                b'*' => {
                    self.bump();
                    Ok(Tok::Star)
                }
                b'^' => {
                    self.bump();
                    Ok(Tok::Caret)
                }
                b'/' => {
                    self.bump();
                    Ok(Tok::Slash)
                }
                b'(' => {
                    self.bump();
                    Ok(Tok::LParen)
                }
                b')' => {
                    self.bump();
                    Ok(Tok::RParen)
                }
                b'0'..=b'9' => {
                    let mut s = String::new();
                    while let Some(d) = self.peek() {
                        if d.is_ascii_digit() {
                            s.push(d as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Ok(Tok::Num(s.parse::<BigInt>().map_err(|_| self.err("bad integer"))?))
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut s = String::new();
                    while let Some(d) = self.peek() {
                        if d.is_ascii_alphanumeric() || d == b'_' {
                            s.push(d as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Ok(Tok::Ident(s))
                }
                _ => Err(self.err(&format!("unexpected character '{}'", c as char))),
            }
        }
    }

    pub struct Parser<'a> {
        ring: &'a PolyRing,
        lexer: Lexer<'a>,
        cur: Tok,
    }

    pub fn parse_poly(ring: &PolyRing, input: &str) -> Result<Poly> {
        let mut lexer = Lexer::new(input);
        let cur = lexer.next_tok()?;
        let mut p = Parser { ring, lexer, cur };
        let poly = p.expr()?;
        if p.cur != Tok::End {
            return Err(p.lexer.err("trailing input after polynomial"));
        }
        Ok(poly)
    }

    impl<'a> Parser<'a> {
        fn advance(&mut self) -> Result<()> {
            self.cur = self.lexer.next_tok()?;
            Ok(())
        }

        fn expr(&mut self) -> Result<Poly> {
            let mut neg = false;
            loop {
                match self.cur {
                    Tok::Minus => {
                        neg = !neg;
                        self.advance()?;
                    }
                    Tok::Plus => self.advance()?,
                    _ => break,
                }
            }
            let mut acc = self.term()?;
            if neg {
                acc = acc.neg();
            }
            loop {
                match self.cur {
                    Tok::Plus => {
                        self.advance()?;
                        let t = self.term()?;
                        acc = acc.add(&t);
                    }
                    Tok::Minus => {
                        self.advance()?;
                        let t = self.term()?;
                        acc = acc.sub(&t);
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn term(&mut self) -> Result<Poly> {
            let mut acc = self.factor()?;
            loop {
                match &self.cur {
                    Tok::Star => {
                        self.advance()?;
                        let f = self.factor()?;
                        acc = acc.mul(&f);
                    }
                    Tok::Slash => {
                        // rational coefficient p/q; only constant divisors
                        self.advance()?;
                        let f = self.factor()?;
                        if !f.is_constant() || f.is_zero() {
                            return Err(self.lexer.err("division only by nonzero constants"));
                        }
                        let inv = Rat::one() / f.constant_term();
                        acc = acc.scale(&inv);
                    }
                    Tok::Ident(_) | Tok::LParen | Tok::Num(_) => {
                        // juxtaposition
                        let f = self.factor()?;
                        acc = acc.mul(&f);
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn factor(&mut self) -> Result<Poly> {
            let base = match self.cur.clone() {
                Tok::Num(n) => {
                    self.advance()?;
                    self.ring.constant(Rat::from(n))
                }
                Tok::Ident(name) => {
                    self.advance()?;
                    match self.ring.var_index(&name) {
                        Some(i) => self.ring.var(i),
                        None => return Err(self.lexer.err(&format!("unknown variable '{}'", name))),
                    }
                }
                Tok::LParen => {
                    self.advance()?;
                    let e = self.expr()?;
                    if self.cur != Tok::RParen {
                        return Err(self.lexer.err("expected ')'"));
                    }
                    self.advance()?;
                    e
                }
                Tok::Minus => {
                    self.advance()?;
                    let f = self.factor()?;
                    f.neg()
                }
                _ => return Err(self.lexer.err("expected number, variable or '('")),
            };
            if self.cur == Tok::Caret {
                self.advance()?;
                match self.cur.clone() {
                    Tok::Num(n) => {
                        self.advance()?;
                        let exp: u32 = n.try_into().map_err(|_| self.lexer.err("exponent too large"))?;
                        Ok(base.pow(exp))
                    }
                    _ => Err(self.lexer.err("expected integer exponent after '^'")),
                }
            } else {
                Ok(base)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring2() -> PolyRing {
        PolyRing::named(&["x", "y"], MonomialOrder::GrevLex)
    }

    #[test]
    fn grevlex_basics() {
        let o = MonomialOrder::GrevLex;
        // x > y
        assert_eq!(o.cmp(&[1, 0], &[0, 1]), Ordering::Greater);
        // x^2 > x y > y^2
        assert_eq!(o.cmp(&[2, 0], &[1, 1]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 1], &[0, 2]), Ordering::Greater);
        // degree dominates
        assert_eq!(o.cmp(&[0, 3], &[2, 0]), Ordering::Greater);
    }

    #[test]
    fn local_order_prefers_low_degree() {
        let o = MonomialOrder::LocalGrevLex;
        assert_eq!(o.cmp(&[0, 0], &[1, 0]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 0], &[2, 0]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 0], &[0, 1]), Ordering::Greater);
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let r = ring2();
        let p = r.parse("3/2*x^2*y - y + 1").unwrap();
        let q = r.parse(&p.to_string()).unwrap();
        assert_eq!(p, q);
        assert_eq!(r.parse("x y").unwrap(), r.var(0).mul(&r.var(1)));
        assert_eq!(r.parse("(x + y)^2").unwrap(), r.parse("x^2 + 2x y + y^2").unwrap());
    }

    #[test]
    fn ring_map_kernel_element() {
        // x -> x, y -> x^2 sends y - x^2 to 0
        let r = ring2();
        let p = r.parse("y - x^2").unwrap();
        let images = vec![r.var(0), r.parse("x^2").unwrap()];
        let q = ring_map_apply(&r, &r, &images, &p).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn derivative_and_units() {
        let r = ring2();
        let p = r.parse("x^3*y + 2*y").unwrap();
        assert_eq!(p.derivative(0), r.parse("3*x^2*y").unwrap());
        assert_eq!(p.derivative(1), r.parse("x^3 + 2").unwrap());
        assert!(r.parse("1 + x").unwrap().is_local_unit());
        assert!(!r.parse("x + y^2").unwrap().is_local_unit());
    }

    #[test]
    fn primitive_normalization() {
        let r = ring2();
        let p = r.parse("2/3*x - 4/3*y").unwrap();
        let q = p.primitive();
        assert_eq!(q, r.parse("x - 2*y").unwrap());
        let n = r.parse("-2*x + 4*y").unwrap().primitive();
        assert_eq!(n, r.parse("x - 2*y").unwrap());
        // leading coefficient positive
        assert!(!n.lead().unwrap().1.is_negative());
    }
}
