//! Groebner and standard bases, module syzygies, ideal arithmetic and
//! colengths at the origin.
//!
//! Everything runs over submodules of a free module `R^rank`; ideals are the
//! `rank = 1` case. Global orders use plain Buchberger with the normal pair
//! strategy, local orders use Mora's normal form with the ecart bound.
//! Module monomials are ordered position-over-term with position 0 largest,
//! which doubles as the elimination order for kernel computations.

use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{Exp, MonomialOrder, Poly, PolyRing, Rat};
use num::{One, Signed, Zero};
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;
use std::sync::OnceLock;

const MORA_GUARD: usize = 2_000_000;

/// Finite length or the distinguished infinite value.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub fn finite(self) -> Option<u64> {
        match self {
            Count::Finite(n) => Some(n),
            Count::Infinite => None,
        }
    }
    pub fn is_finite(self) -> bool {
        matches!(self, Count::Finite(_))
    }
}

/// Element of a free module `R^rank`, stored as a flat, sorted term list.
/// Terms are `(position, exponent, coefficient)` sorted descending: lower
/// position first, then the ring's monomial order.
#[derive(Clone, PartialEq, Debug)]
pub struct VecP {
    pub rank: usize,
    pub terms: Vec<(u32, Exp, Rat)>,
}

fn term_cmp(order: MonomialOrder, a: &(u32, Exp, Rat), b: &(u32, Exp, Rat)) -> Ordering {
    // position-over-term: smaller position = larger term
    b.0.cmp(&a.0).then_with(|| order.cmp(&a.1, &b.1))
}

impl VecP {
    pub fn zero(rank: usize) -> Self {
        VecP { rank, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_comps(comps: &[Poly], order: MonomialOrder) -> Self {
        let mut terms = Vec::new();
        for (p, poly) in comps.iter().enumerate() {
            for (e, c) in poly.terms() {
                terms.push((p as u32, e.clone(), c.clone()));
            }
        }
        terms.sort_by(|a, b| term_cmp(order, a, b).reverse());
        VecP { rank: comps.len(), terms }
    }

    pub fn to_comps(&self, ring: &PolyRing) -> Vec<Poly> {
        let mut comps: Vec<Vec<(Exp, Rat)>> = vec![Vec::new(); self.rank];
        for (p, e, c) in &self.terms {
            comps[*p as usize].push((e.clone(), c.clone()));
        }
        comps.into_iter().map(|ts| ring.from_terms(ts)).collect()
    }

    pub fn lead(&self) -> Option<&(u32, Exp, Rat)> {
        self.terms.first()
    }

    /// `self + c * x^shift * other` (no position shift).
    pub fn add_scaled(&self, other: &VecP, c: &Rat, shift: &[u16], order: MonomialOrder) -> VecP {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        let shifted = |t: &(u32, Exp, Rat)| -> (u32, Exp) {
            let mut e = t.1.clone();
            for (k, &s) in shift.iter().enumerate() {
                e[k] += s;
            }
            (t.0, e)
        };
        while i < self.terms.len() && j < other.terms.len() {
            let (op, oe) = shifted(&other.terms[j]);
            let key = (op, oe, Rat::zero());
            match term_cmp(order, &self.terms[i], &key) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let coef = c * &other.terms[j].2;
                    if !coef.is_zero() {
                        out.push((key.0, key.1, coef));
                    }
                    j += 1;
                }
                Ordering::Equal => {
                    let coef = &self.terms[i].2 + c * &other.terms[j].2;
                    if !coef.is_zero() {
                        out.push((key.0, key.1, coef));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        while j < other.terms.len() {
            let coef = c * &other.terms[j].2;
            if !coef.is_zero() {
                let (op, oe) = shifted(&other.terms[j]);
                out.push((op, oe, coef));
            }
            j += 1;
        }
        VecP { rank: self.rank, terms: out }
    }

    pub fn scale(&self, c: &Rat) -> VecP {
        if c.is_zero() {
            return VecP::zero(self.rank);
        }
        VecP { rank: self.rank, terms: self.terms.iter().map(|(p, e, k)| (*p, e.clone(), k * c)).collect() }
    }

    /// Integer-primitive normalization with positive leading coefficient.
    pub fn primitive(&self) -> VecP {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = num::BigInt::one();
        for (_, _, c) in &self.terms {
            den = num::integer::lcm(den, c.denom().clone());
        }
        let mut content = num::BigInt::zero();
        for (_, _, c) in &self.terms {
            content = num::integer::gcd(content, c.numer() * (&den / c.denom()));
        }
        if content.is_zero() {
            return self.clone();
        }
        let mut factor = Rat::new(den, content);
        if (&self.terms[0].2 * &factor).is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn max_degree(&self) -> u64 {
        self.terms.iter().map(|(_, e, _)| e.iter().map(|&x| x as u64).sum()).max().unwrap_or(0)
    }

    fn ecart(&self) -> u64 {
        match self.lead() {
            None => 0,
            Some((_, e, _)) => {
                let dl: u64 = e.iter().map(|&x| x as u64).sum();
                self.max_degree() - dl
            }
        }
    }
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x <= y)
}

fn exp_sub(a: &[u16], b: &[u16]) -> Exp {
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}

fn exp_lcm(a: &[u16], b: &[u16]) -> Exp {
    a.iter().zip(b.iter()).map(|(x, y)| *x.max(y)).collect()
}

/// Full normal form with respect to a list of module elements (global order).
pub fn normal_form(f: &VecP, basis: &[VecP], order: MonomialOrder) -> VecP {
    debug_assert!(order.is_global());
    let mut rem = VecP::zero(f.rank);
    let mut work = f.clone();
    'outer: while let Some((p, e, c)) = work.lead().cloned() {
        for g in basis {
            if let Some((gp, ge, gc)) = g.lead() {
                if *gp == p && divides(ge, &e) {
                    let coef = -(c.clone() / gc.clone());
                    let shift = exp_sub(&e, ge);
                    work = work.add_scaled(g, &coef, &shift, order);
                    continue 'outer;
                }
            }
        }
        // move the irreducible lead to the remainder
        rem.terms.push((p, e, c));
        work.terms.remove(0);
    }
    rem
}

/// Mora weak normal form for local orders; the returned element has a lead
/// term not divisible by any basis lead (up to multiplication by a unit).
pub fn mora_normal_form(f: &VecP, basis: &[VecP], order: MonomialOrder) -> Result<VecP> {
    let mut t_set: Vec<VecP> = basis.to_vec();
    let mut h = f.clone();
    let mut guard = 0usize;
    loop {
        let (p, e, c) = match h.lead().cloned() {
            None => return Ok(h),
            Some(l) => l,
        };
        let mut best: Option<(usize, u64)> = None;
        for (gi, g) in t_set.iter().enumerate() {
            if let Some((gp, ge, _)) = g.lead() {
                if *gp == p && divides(ge, &e) {
                    let ec = g.ecart();
                    if best.map(|(_, b)| ec < b).unwrap_or(true) {
                        best = Some((gi, ec));
                    }
                }
            }
        }
        let (gi, gec) = match best {
            None => return Ok(h),
            Some(b) => b,
        };
        if gec > h.ecart() {
            t_set.push(h.clone());
        }
        let g = t_set[gi].clone();
        let (_, ge, gc) = g.lead().unwrap();
        let coef = -(c / gc.clone());
        let shift = exp_sub(&e, ge);
        h = h.add_scaled(&g, &coef, &shift, order);
        guard += 1;
        if guard > MORA_GUARD {
            return Err(Error::engine("Mora normal form guard exceeded (implementation bug)"));
        }
    }
}

fn nf_dispatch(f: &VecP, basis: &[VecP], order: MonomialOrder) -> Result<VecP> {
    if order.is_global() {
        Ok(normal_form(f, basis, order))
    } else {
        mora_normal_form(f, basis, order)
    }
}

#[derive(PartialEq, Eq)]
struct PairKey {
    deg: u64,
    i: usize,
    j: usize,
}

impl Ord for PairKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; we want the smallest degree first
        other.deg.cmp(&self.deg).then(other.i.cmp(&self.i)).then(other.j.cmp(&self.j))
    }
}

impl PartialOrd for PairKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Buchberger / Mora basis computation, module-aware.
pub fn basis_compute(gens: &[VecP], rank: usize, order: MonomialOrder) -> Result<Vec<VecP>> {
    let mut basis: Vec<VecP> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.primitive()).collect();
    if basis.is_empty() {
        return Ok(basis);
    }
    for b in &basis {
        debug_assert_eq!(b.rank, rank);
    }
    let mut heap: BinaryHeap<PairKey> = BinaryHeap::new();
    let mut processed: Vec<(usize, usize)> = Vec::new();
    let pair_deg = |a: &VecP, b: &VecP| -> Option<u64> {
        let (pa, ea, _) = a.lead()?;
        let (pb, eb, _) = b.lead()?;
        if pa != pb {
            return None;
        }
        let l = exp_lcm(ea, eb);
        Some(l.iter().map(|&x| x as u64).sum())
    };
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            if let Some(d) = pair_deg(&basis[i], &basis[j]) {
                heap.push(PairKey { deg: d, i, j });
            }
        }
    }
    while let Some(PairKey { i, j, .. }) = heap.pop() {
        let (fi, fj) = (&basis[i], &basis[j]);
        let (pi, ei, ci) = fi.lead().unwrap().clone();
        let (_, ej, cj) = fj.lead().unwrap().clone();
        let l = exp_lcm(&ei, &ej);
        // product criterion, only sound for rank-1 global computations
        if rank == 1 && order.is_global() {
            let coprime = ei.iter().zip(ej.iter()).all(|(a, b)| *a == 0 || *b == 0);
            if coprime {
                processed.push((i, j));
                continue;
            }
        }
        // chain criterion: a third element divides the lcm and both pairs done
        let mut skip = false;
        for (k, fk) in basis.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            if let Some((pk, ek, _)) = fk.lead() {
                if *pk == pi && divides(ek, &l) {
                    let a = (i.min(k), i.max(k));
                    let b = (j.min(k), j.max(k));
                    if processed.contains(&a) && processed.contains(&b) {
                        skip = true;
                        break;
                    }
                }
            }
        }
        if skip {
            processed.push((i, j));
            continue;
        }
        // s-polynomial
        let sa = exp_sub(&l, &ei);
        let sb = exp_sub(&l, &ej);
        let zero = VecP::zero(rank);
        let lhs = zero.add_scaled(fi, &(Rat::one() / ci), &sa, order);
        let spoly = lhs.add_scaled(fj, &(-(Rat::one() / cj)), &sb, order);
        let red = nf_dispatch(&spoly, &basis, order)?;
        processed.push((i, j));
        if !red.is_zero() {
            let red = red.primitive();
            let idx = basis.len();
            for (k, fk) in basis.iter().enumerate() {
                if let Some(d) = pair_deg(fk, &red) {
                    heap.push(PairKey { deg: d, i: k, j: idx });
                }
            }
            basis.push(red);
        }
    }
    Ok(interreduce(basis, order))
}

/// Remove redundant elements and (for global orders) fully reduce tails.
fn interreduce(mut basis: Vec<VecP>, order: MonomialOrder) -> Vec<VecP> {
    // drop elements whose lead is divisible by another element's lead
    let mut keep: Vec<bool> = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let (pi, ei, _) = basis[i].lead().unwrap().clone();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (pj, ej, _) = basis[j].lead().unwrap().clone();
            if pi == pj && divides(&ej, &ei) && !(ei == ej && j > i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut kept: Vec<VecP> = basis
        .drain(..)
        .zip(keep)
        .filter_map(|(b, k)| if k { Some(b) } else { None })
        .collect();
    if order.is_global() {
        // reduced basis: every tail reduced against the others
        for i in 0..kept.len() {
            let me = kept[i].clone();
            let others: Vec<VecP> = kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, b)| b.clone()).collect();
            let red = normal_form(&me, &others, order);
            kept[i] = red.primitive();
        }
        kept.retain(|b| !b.is_zero());
    }
    kept.sort_by(|a, b| {
        let la = a.lead().unwrap();
        let lb = b.lead().unwrap();
        term_cmp(order, la, lb)
    });
    kept
}

/// An ideal: generators plus cached bases.
#[derive(Clone, Debug)]
pub struct Ideal {
    ring: PolyRing,
    gens: Vec<Poly>,
    cache_global: Arc<OnceLock<Vec<Poly>>>,
    cache_local: Arc<OnceLock<Vec<Poly>>>,
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.gens == other.gens
    }
}

impl Ideal {
    pub fn new(ring: &PolyRing, gens: Vec<Poly>) -> Self {
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ideal {
            ring: ring.clone(),
            gens,
            cache_global: Arc::new(OnceLock::new()),
            cache_local: Arc::new(OnceLock::new()),
        }
    }

    pub fn parse(ring: &PolyRing, gens: &[&str]) -> Result<Self> {
        let mut v = Vec::new();
        for g in gens {
            v.push(ring.parse(g)?);
        }
        Ok(Ideal::new(ring, v))
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    /// Generators plus the ring's quotient ideal generators.
    pub fn gens_with_quotient(&self) -> Vec<Poly> {
        let mut v = self.gens.clone();
        for q in self.ring.quotient_gens() {
            v.push(q.clone());
        }
        v
    }

    fn vecp_gens(&self, order: MonomialOrder, with_quotient: bool) -> Vec<VecP> {
        let gens = if with_quotient { self.gens_with_quotient() } else { self.gens.clone() };
        gens.iter()
            .map(|g| VecP::from_comps(std::slice::from_ref(&g.reinterpret_for(order)), order))
            .collect()
    }

    /// Reduced Groebner basis for the global order; cached.
    pub fn groebner_basis(&self) -> Result<Vec<Poly>> {
        if let Some(b) = self.cache_global.get() {
            return Ok(b.clone());
        }
        let order = MonomialOrder::GrevLex;
        let vec_gens = self.vecp_gens(order, true);
        let basis = basis_compute(&vec_gens, 1, order)?;
        let gring = self.ring.with_order(order).without_quotient();
        let polys: Vec<Poly> = basis.iter().map(|b| b.to_comps(&gring)[0].monic()).collect();
        let _ = self.cache_global.set(polys.clone());
        Ok(polys)
    }

    /// Standard basis for the local order via Mora normal form; cached.
    pub fn standard_basis_local(&self) -> Result<Vec<Poly>> {
        if let Some(b) = self.cache_local.get() {
            return Ok(b.clone());
        }
        let order = MonomialOrder::LocalGrevLex;
        let vec_gens = self.vecp_gens(order, true);
        let basis = basis_compute(&vec_gens, 1, order)?;
        let lring = self.ring.with_order(order).without_quotient();
        let polys: Vec<Poly> = basis.iter().map(|b| b.to_comps(&lring)[0].clone()).collect();
        let _ = self.cache_local.set(polys.clone());
        Ok(polys)
    }

    /// Ideal membership via normal form against the global basis.
    pub fn contains(&self, p: &Poly) -> Result<bool> {
        let basis = self.groebner_basis()?;
        let order = MonomialOrder::GrevLex;
        let bb: Vec<VecP> = basis
            .iter()
            .map(|g| VecP::from_comps(std::slice::from_ref(&g.reinterpret_for(order)), order))
            .collect();
        let f = VecP::from_comps(std::slice::from_ref(&p.reinterpret_for(order)), order);
        Ok(normal_form(&f, &bb, order).is_zero())
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        for g in &other.gens {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &Ideal) -> Result<bool> {
        Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
    }

    pub fn is_unit_ideal(&self) -> Result<bool> {
        let b = self.groebner_basis()?;
        Ok(b.iter().any(|p| p.is_constant() && !p.is_zero()))
    }

    /// Leading exponents of the local standard basis.
    pub fn lead_exponents_local(&self) -> Result<Vec<Exp>> {
        let sb = self.standard_basis_local()?;
        Ok(sb
            .iter()
            .filter_map(|p| p.reinterpret_for(MonomialOrder::LocalGrevLex).lead().map(|(e, _)| e.clone()))
            .collect())
    }

    /// Vector-space dimension of the local ring at the origin modulo the
    /// ideal (and the ring's quotient ideal); possibly infinite.
    pub fn colength_at_origin(&self) -> Result<Count> {
        let leads = self.lead_exponents_local()?;
        Ok(staircase_count(&leads, self.ring.nvars()))
    }

    /// Krull dimension of the tangent cone at the origin (local lead ideal).
    pub fn local_dimension(&self) -> Result<i64> {
        let leads = self.lead_exponents_local()?;
        Ok(monomial_dimension(&leads, self.ring.nvars()))
    }

    /// Total vector-space dimension of the affine coordinate ring modulo the
    /// ideal, summed over all points (global staircase). Used to count
    /// Morsification critical points, which sit near but not at the origin.
    pub fn affine_colength(&self) -> Result<Count> {
        let basis = self.groebner_basis()?;
        let leads: Vec<Exp> = basis
            .iter()
            .filter_map(|p| p.reinterpret_for(MonomialOrder::GrevLex).lead().map(|(e, _)| e.clone()))
            .collect();
        Ok(staircase_count(&leads, self.ring.nvars()))
    }

    /// Sum with another ideal (same ring).
    pub fn plus(&self, other: &Ideal) -> Ideal {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ideal::new(&self.ring, gens)
    }

    pub fn plus_polys(&self, polys: &[Poly]) -> Ideal {
        let mut gens = self.gens.clone();
        gens.extend(polys.iter().cloned());
        Ideal::new(&self.ring, gens)
    }

    /// Map all generators through a ring map.
    pub fn map_to(&self, target: &PolyRing, images: &[Poly]) -> Result<Ideal> {
        let mut gens = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            gens.push(g.map_to(target, images)?);
        }
        Ok(Ideal::new(target, gens))
    }

    pub fn embed(&self, target: &PolyRing) -> Result<Ideal> {
        let mut gens = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            gens.push(g.embed(target)?);
        }
        Ok(Ideal::new(target, gens))
    }
}

impl Poly {
    pub(crate) fn reinterpret_for(&self, order: MonomialOrder) -> Poly {
        if self.ring_data().order == order {
            return self.clone();
        }
        let data = Arc::new(crate::poly::RingData { vars: self.ring_data().vars.clone(), order });
        self.reinterpret(&data)
    }
}

/// Number of standard monomials under the staircase of a monomial module
/// (single position). `None` means infinitely many.
fn staircase_count_pos(gens: &[Exp], nvars: usize) -> Count {
    if gens.iter().any(|g| g.iter().all(|&e| e == 0)) {
        return Count::Finite(0);
    }
    if nvars == 0 {
        return Count::Finite(1);
    }
    for v in 0..nvars {
        let has_pure = gens.iter().any(|g| g[v] > 0 && g.iter().enumerate().all(|(i, &e)| i == v || e == 0));
        if !has_pure {
            return Count::Infinite;
        }
    }
    fn rec(cur: &mut Exp, start: usize, gens: &[Exp], nvars: usize) -> u64 {
        if gens.iter().any(|g| divides(g, cur)) {
            return 0;
        }
        let mut total = 1u64;
        for v in start..nvars {
            cur[v] += 1;
            total += rec(cur, v, gens, nvars);
            cur[v] -= 1;
        }
        total
    }
    let mut cur: Exp = SmallVec::from_elem(0, nvars);
    Count::Finite(rec(&mut cur, 0, gens, nvars))
}

pub fn staircase_count(gens: &[Exp], nvars: usize) -> Count {
    staircase_count_pos(gens, nvars)
}

/// Staircase count for a module lead set grouped by position.
pub fn staircase_count_module(leads: &[(u32, Exp)], rank: usize, nvars: usize) -> Count {
    let mut per_pos: Vec<Vec<Exp>> = vec![Vec::new(); rank];
    for (p, e) in leads {
        per_pos[*p as usize].push(e.clone());
    }
    let mut total = 0u64;
    for gens in &per_pos {
        match staircase_count_pos(gens, nvars) {
            Count::Infinite => return Count::Infinite,
            Count::Finite(n) => total += n,
        }
    }
    Count::Finite(total)
}

/// Krull dimension of `R/L` for a monomial ideal `L`; `-1` when `L` is the
/// unit ideal. Computed as the largest variable subset meeting no generator
/// support.
pub fn monomial_dimension(gens: &[Exp], nvars: usize) -> i64 {
    if gens.iter().any(|g| g.iter().all(|&e| e == 0)) {
        return -1;
    }
    let supports: Vec<u64> = gens
        .iter()
        .map(|g| {
            let mut m = 0u64;
            for (i, &e) in g.iter().enumerate() {
                if e > 0 {
                    m |= 1 << i;
                }
            }
            m
        })
        .collect();
    fn rec(allowed: u64, supports: &[u64], memo: &mut HashMap<u64, i64>) -> i64 {
        if let Some(&d) = memo.get(&allowed) {
            return d;
        }
        let offending = supports.iter().copied().find(|s| s & !allowed == 0);
        let result = match offending {
            None => allowed.count_ones() as i64,
            Some(s) => {
                let mut best = -1;
                let mut bits = s;
                while bits != 0 {
                    let b = bits & bits.wrapping_neg();
                    bits ^= b;
                    best = best.max(rec(allowed & !b, supports, memo));
                }
                best
            }
        };
        memo.insert(allowed, result);
        result
    }
    let all = if nvars == 64 { u64::MAX } else { (1u64 << nvars) - 1 };
    let mut memo = HashMap::new();
    rec(all, &supports, &mut memo)
}

// ---------------------------------------------------------------------------
// module kernels, quotients, saturation
// ---------------------------------------------------------------------------

/// Presentation of a submodule of a free module by generating columns.
#[derive(Clone, Debug)]
pub struct SubmodulePresentation {
    pub ring: PolyRing,
    pub ambient_rank: usize,
    pub generators: Vec<Vec<Poly>>,
}

impl SubmodulePresentation {
    pub fn as_matrix(&self) -> PolyMatrix {
        PolyMatrix::from_fn(&self.ring, self.ambient_rank, self.generators.len(), |i, j| {
            self.generators[j][i].clone()
        })
    }
}

/// Kernel of the module map given by `m` (columns map to columns), computed
/// by a position-over-term elimination basis of the graph module.
pub fn module_kernel(m: &PolyMatrix) -> Result<SubmodulePresentation> {
    module_kernel_mod(m, &[])
}

/// Kernel of `v -> M v` modulo a quotient ideal: all `v` with `M v` in the
/// column span of `quotient * e_a`. Column vectors of the result have length
/// `m.cols()`.
pub fn module_kernel_mod(m: &PolyMatrix, quotient: &[Poly]) -> Result<SubmodulePresentation> {
    let order = MonomialOrder::GrevLex;
    let ring = m.ring().with_order(order).without_quotient();
    let t = m.rows();
    let s = m.cols();
    let extra = quotient.len() * t;
    let rank = t + s + extra;
    let mut gens: Vec<VecP> = Vec::with_capacity(s + extra);
    // graph columns (M e_j ; e_j ; 0)
    for j in 0..s {
        let mut comps = vec![ring.zero(); rank];
        for i in 0..t {
            comps[i] = m.get(i, j).reinterpret_for(order);
        }
        comps[t + j] = ring.one();
        gens.push(VecP::from_comps(&comps, order));
    }
    // quotient columns (q e_i ; 0 ; e_{i,q})
    for (qi, q) in quotient.iter().enumerate() {
        for i in 0..t {
            let mut comps = vec![ring.zero(); rank];
            comps[i] = q.reinterpret_for(order);
            comps[t + s + qi * t + i] = ring.one();
            gens.push(VecP::from_comps(&comps, order));
        }
    }
    let basis = basis_compute(&gens, rank, order)?;
    let mut out = Vec::new();
    for b in &basis {
        // leads in the second block mean the first block vanished
        if let Some((p, _, _)) = b.lead() {
            if (*p as usize) >= t {
                let comps = b.to_comps(&ring);
                if comps[..t].iter().all(|c| c.is_zero()) {
                    let v: Vec<Poly> = comps[t..t + s].to_vec();
                    if v.iter().any(|c| !c.is_zero()) {
                        out.push(v);
                    }
                }
            }
        }
    }
    Ok(SubmodulePresentation { ring: m.ring().clone(), ambient_rank: s, generators: out })
}

/// Quotient by a single polynomial: `(I intersect <g>) / g`.
pub fn quotient_by_poly(i: &Ideal, g: &Poly) -> Result<Ideal> {
    if g.is_zero() {
        return Ok(Ideal::new(i.ring(), vec![i.ring().one()]));
    }
    let inter = ideal_intersect(i, &Ideal::new(i.ring(), vec![g.clone()]))?;
    let mut gens = Vec::with_capacity(inter.gens().len());
    for h in inter.gens() {
        let q = exact_div(h, g)?;
        if !q.is_zero() {
            gens.push(q);
        }
    }
    Ok(Ideal::new(i.ring(), gens))
}

/// Ideal quotient `I : J`, the intersection of the quotients by the
/// generators of `J`.
pub fn ideal_quotient(i: &Ideal, j: &Ideal) -> Result<Ideal> {
    let ring = i.ring().clone();
    let jg: Vec<Poly> = j.gens().iter().filter(|g| !g.is_zero()).cloned().collect();
    if jg.is_empty() {
        // I : 0 = (1)
        return Ok(Ideal::new(&ring, vec![ring.one()]));
    }
    let base = Ideal::new(&ring, i.gens_with_quotient());
    let mut acc: Option<Ideal> = None;
    for g in &jg {
        let q = quotient_by_poly(&base, g)?;
        acc = Some(match acc {
            None => q,
            Some(a) => {
                let inter = ideal_intersect(&a, &q)?;
                Ideal::new(&ring, inter.groebner_basis()?)
            }
        });
    }
    Ok(acc.unwrap())
}

/// Saturation of `I` by a single polynomial: iterated quotients until
/// stabilization, certified by reduction of the new generators.
pub fn saturate_by_poly(i: &Ideal, g: &Poly) -> Result<Ideal> {
    let mut cur = i.clone();
    loop {
        let next = quotient_by_poly(&cur, g)?;
        if cur.contains_ideal(&next)? {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Saturation `I : J^infinity` via iterated ideal quotients until
/// stabilization. Per-generator saturations are intersected (a monomial-free
/// pigeonhole identity makes the intersection equal to the saturation by the
/// whole ideal); stabilization of each chain is certified by mutual
/// reduction.
pub fn saturate(i: &Ideal, j: &Ideal) -> Result<Ideal> {
    let ring = i.ring().clone();
    let jg: Vec<Poly> = if j.gens().iter().filter(|g| !g.is_zero()).count() > 4 {
        j.groebner_basis()?
    } else {
        j.gens().iter().filter(|g| !g.is_zero()).cloned().collect()
    };
    if jg.is_empty() {
        return Ok(Ideal::new(&ring, vec![ring.one()]));
    }
    // interreduced generators keep the kernel computations small
    let base = Ideal::new(&ring, Ideal::new(&ring, i.gens_with_quotient()).groebner_basis()?);
    let mut acc: Option<Ideal> = None;
    for g in &jg {
        let s = saturate_by_poly(&base, g)?;
        acc = Some(match acc {
            None => s,
            Some(a) => {
                if a.contains_ideal(&s)? && s.contains_ideal(&a)? {
                    a
                } else {
                    let inter = ideal_intersect(&a, &s)?;
                    Ideal::new(&ring, inter.groebner_basis()?)
                }
            }
        });
    }
    Ok(acc.unwrap())
}

/// Intersection of two ideals via a syzygy computation.
pub fn ideal_intersect(i: &Ideal, j: &Ideal) -> Result<Ideal> {
    let ring = i.ring().without_quotient();
    let ig = i.gens().to_vec();
    let jg = j.gens().to_vec();
    if ig.is_empty() || jg.is_empty() {
        return Ok(Ideal::new(i.ring(), vec![]));
    }
    let mut mat = PolyMatrix::zeros(&ring, 1, ig.len() + jg.len());
    for (k, f) in ig.iter().enumerate() {
        mat.set(0, k, f.clone());
    }
    for (k, g) in jg.iter().enumerate() {
        mat.set(0, ig.len() + k, g.neg());
    }
    let ker = module_kernel(&mat)?;
    let mut gens = Vec::new();
    for v in &ker.generators {
        let mut acc = ring.zero();
        for (k, f) in ig.iter().enumerate() {
            acc = acc.add(&v[k].mul(f));
        }
        if !acc.is_zero() {
            gens.push(acc);
        }
    }
    Ok(Ideal::new(i.ring(), gens))
}

/// Exact division `f / g`, erroring when the division leaves a remainder.
pub fn exact_div(f: &Poly, g: &Poly) -> Result<Poly> {
    if g.is_zero() {
        return Err(Error::engine("division by zero polynomial"));
    }
    let order = MonomialOrder::GrevLex;
    let f = f.reinterpret_for(order);
    let g = g.reinterpret_for(order);
    let ring = PolyRing::new(f.ring_data().vars.clone(), order)?;
    let mut rem = f.clone();
    let mut quot = ring.zero();
    let (ge, gc) = g.lead().map(|(e, c)| (e.clone(), c.clone())).unwrap();
    while let Some((e, c)) = rem.lead().map(|(e, c)| (e.clone(), c.clone())) {
        if !divides(&ge, &e) {
            return Err(Error::engine("exact division failed: leading term not divisible"));
        }
        let shift = exp_sub(&e, &ge);
        let coef = c / gc.clone();
        quot = quot.add(&ring.monomial(&shift, coef.clone()));
        rem = rem.add_scaled_mono(&g, &-coef, Some(&shift));
    }
    Ok(quot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonomialOrder::{GrevLex, LocalGrevLex};

    fn ring(vars: &[&str]) -> PolyRing {
        PolyRing::named(vars, GrevLex)
    }

    #[test]
    fn groebner_trivial() {
        let r = ring(&["x", "y"]);
        let i = Ideal::parse(&r, &["x", "y"]).unwrap();
        let b = i.groebner_basis().unwrap();
        assert_eq!(b.len(), 2);
        assert!(i.contains(&r.parse("x^2 + y").unwrap()).unwrap());
        assert!(!i.contains(&r.one()).unwrap());
    }

    #[test]
    fn groebner_principal_monic() {
        let r = ring(&["x", "y"]);
        let i = Ideal::parse(&r, &["3*x^2 - 6*y"]).unwrap();
        let b = i.groebner_basis().unwrap();
        assert_eq!(b, vec![r.parse("x^2 - 2*y").unwrap()]);
    }

    #[test]
    fn groebner_twisted_cubic() {
        let r = PolyRing::named(&["x", "y", "z"], GrevLex);
        let i = Ideal::parse(&r, &["y - x^2", "z - x^3"]).unwrap();
        let b = i.groebner_basis().unwrap();
        // hand Buchberger: the reduced grevlex basis
        for want in ["x^2 - y", "x*y - z", "y^2 - x*z"] {
            let w = r.parse(want).unwrap();
            assert!(b.contains(&w), "missing {} in {:?}", want, b);
        }
        // every input generator reduces to zero
        for g in i.gens() {
            assert!(i.contains(g).unwrap());
        }
        // idempotent
        let i2 = Ideal::new(&r, b.clone());
        assert_eq!(i2.groebner_basis().unwrap(), b);
    }

    #[test]
    fn local_unit_factor() {
        let r = PolyRing::named(&["x"], LocalGrevLex);
        let i = Ideal::parse(&r, &["x + x^2"]).unwrap();
        let sb = i.standard_basis_local().unwrap();
        assert_eq!(sb.len(), 1);
        let lead = sb[0].reinterpret_for(LocalGrevLex);
        let (e, _) = lead.lead().unwrap();
        assert_eq!(e.as_slice(), &[1]);
    }

    #[test]
    fn staircase_examples() {
        // <k x^{k-1}, y, z, w> with k = 5: staircase 1, x, x^2, x^3
        let r = PolyRing::named(&["x", "y", "z", "w"], LocalGrevLex);
        let i = Ideal::parse(&r, &["5*x^4", "y", "z", "w"]).unwrap();
        assert_eq!(i.colength_at_origin().unwrap(), Count::Finite(4));
        // monomial ideal <2x, 3y^2>
        let r2 = PolyRing::named(&["x", "y"], LocalGrevLex);
        let i2 = Ideal::parse(&r2, &["2*x", "3*y^2"]).unwrap();
        assert_eq!(i2.colength_at_origin().unwrap(), Count::Finite(2));
        // <x, y> has colength 1
        let i3 = Ideal::parse(&r2, &["x", "y"]).unwrap();
        assert_eq!(i3.colength_at_origin().unwrap(), Count::Finite(1));
        // <x> in two variables is positive-dimensional
        let i4 = Ideal::parse(&r2, &["x"]).unwrap();
        assert_eq!(i4.colength_at_origin().unwrap(), Count::Infinite);
        assert_eq!(i4.local_dimension().unwrap(), 1);
    }

    #[test]
    fn colength_representation_independence() {
        let r = PolyRing::named(&["x", "y"], GrevLex);
        let i = Ideal::parse(&r, &["x^2 + y^3", "x*y"]).unwrap();
        let b = i.groebner_basis().unwrap();
        let i2 = Ideal::new(&r, b);
        assert_eq!(i.colength_at_origin().unwrap(), i2.colength_at_origin().unwrap());
    }

    #[test]
    fn local_vs_global_lead_differ() {
        // x + x^2: global lead x^2, local lead x
        let r = PolyRing::named(&["x", "y"], GrevLex);
        let i = Ideal::parse(&r, &["x + x^2", "y"]).unwrap();
        assert_eq!(i.colength_at_origin().unwrap(), Count::Finite(1));
    }

    #[test]
    fn kernel_koszul_syzygy() {
        let r = ring(&["x", "y"]);
        let m = PolyMatrix::from_rows(&r, vec![vec![r.var(0), r.var(1)]]).unwrap();
        let ker = module_kernel(&m).unwrap();
        assert!(!ker.generators.is_empty());
        // every generator is killed by the matrix
        for v in &ker.generators {
            let prod = r.var(0).mul(&v[0]).add(&r.var(1).mul(&v[1]));
            assert!(prod.is_zero());
        }
        // (y, -x) is in the kernel module
        // check by reducing against the kernel basis as a module
        let order = GrevLex;
        let gens: Vec<VecP> = ker.generators.iter().map(|v| VecP::from_comps(v, order)).collect();
        let basis = basis_compute(&gens, 2, order).unwrap();
        let target = VecP::from_comps(&[r.var(1), r.var(0).neg()], order);
        assert!(normal_form(&target, &basis, order).is_zero());
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let r = ring(&["x"]);
        let m = PolyMatrix::identity(&r, 3);
        let ker = module_kernel(&m).unwrap();
        assert!(ker.generators.is_empty());
    }

    #[test]
    fn quotient_and_saturation() {
        let r = ring(&["x", "y"]);
        // (<xy> : <x>^inf) = <y>
        let i = Ideal::parse(&r, &["x*y"]).unwrap();
        let j = Ideal::parse(&r, &["x"]).unwrap();
        let s = saturate(&i, &j).unwrap();
        assert!(s.equals(&Ideal::parse(&r, &["y"]).unwrap()).unwrap());
        // (<x^2, xy> : <x,y>^inf) = <x>
        let i2 = Ideal::parse(&r, &["x^2", "x*y"]).unwrap();
        let j2 = Ideal::parse(&r, &["x", "y"]).unwrap();
        let s2 = saturate(&i2, &j2).unwrap();
        assert!(s2.equals(&Ideal::parse(&r, &["x"]).unwrap()).unwrap());
        // saturation contains the ideal and is idempotent
        assert!(s2.contains_ideal(&i2).unwrap());
        let s3 = saturate(&s2, &j2).unwrap();
        assert!(s3.equals(&s2).unwrap());
    }

    #[test]
    fn quotient_simple() {
        let r = ring(&["x", "y"]);
        let i = Ideal::parse(&r, &["x*y"]).unwrap();
        let j = Ideal::parse(&r, &["x"]).unwrap();
        let q = ideal_quotient(&i, &j).unwrap();
        assert!(q.equals(&Ideal::parse(&r, &["y"]).unwrap()).unwrap());
    }

    #[test]
    fn intersect_simple() {
        let r = ring(&["x", "y"]);
        let i = Ideal::parse(&r, &["x"]).unwrap();
        let j = Ideal::parse(&r, &["y"]).unwrap();
        let k = ideal_intersect(&i, &j).unwrap();
        assert!(k.equals(&Ideal::parse(&r, &["x*y"]).unwrap()).unwrap());
    }

    #[test]
    fn exact_division() {
        let r = ring(&["x", "y"]);
        let f = r.parse("x^2*y + x*y^2").unwrap();
        let g = r.parse("x*y").unwrap();
        assert_eq!(exact_div(&f, &g).unwrap(), r.parse("x + y").unwrap());
        assert!(exact_div(&r.parse("x + 1").unwrap(), &g).is_err());
    }

    #[test]
    fn quotient_ring_colength() {
        // O_X = Q[x,y]/<y>: colength of <x^3> in the quotient is 3
        let r = ring(&["x", "y"]);
        let q = r.with_quotient(vec![r.parse("y").unwrap()]).unwrap();
        let i = Ideal::parse(&q, &["x^3"]).unwrap();
        assert_eq!(i.colength_at_origin().unwrap(), Count::Finite(3));
    }

    #[test]
    fn monomial_dimension_cases() {
        use smallvec::smallvec;
        // <xy> in 2 vars: dim 1
        let gens: Vec<Exp> = vec![smallvec![1, 1]];
        assert_eq!(monomial_dimension(&gens, 2), 1);
        // <x, y>: dim 0
        let gens2: Vec<Exp> = vec![smallvec![1, 0], smallvec![0, 1]];
        assert_eq!(monomial_dimension(&gens2, 2), 0);
        // empty: dim n
        assert_eq!(monomial_dimension(&[], 3), 3);
    }
}
