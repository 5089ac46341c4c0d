//! Derived pushforward along the projection `C^n x P^{n-1} -> C^n` of a
//! complex of twisted line-bundle sums, computed through the strand Cech
//! complex of the standard affine cover.
//!
//! The input is a complex of graded free modules over the homogeneous ring
//! `B[S_1..S_n]`; every slot carries a twist `e` and models `O(e)`. The Cech
//! column of one slot contracts exactly onto the familiar cohomology bases
//! (monomials `gamma >= 0` in level 0, strictly negative Laurent monomials in
//! level `n-1`), with an explicit cone homotopy routed per monomial. The
//! perturbation lemma then transfers the total complex onto those bases; the
//! only multi-step contributions are the transgressions from top level to
//! level zero. Truncation bounds the Laurent exponents passed through the
//! routing; the stability certificate reruns the transfer at a higher bound.

use crate::complex::FreeComplex;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{Exp, Poly, PolyRing, Rat};
 
use smallvec::SmallVec;
use std::collections::HashMap;

/// Sparse complex of free modules, the workhorse representation for the big
/// intermediate complexes. `diffs[i]` maps degree `min_deg + i` to the next
/// degree; entries are (row, col, poly).
#[derive(Clone, Debug)]
pub struct SparseComplex {
    pub ring: PolyRing,
    pub min_deg: i64,
    pub ranks: Vec<usize>,
    pub diffs: Vec<HashMap<(u32, u32), Poly>>,
}

impl SparseComplex {
    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn to_free(&self) -> Result<FreeComplex> {
        let mats: Vec<PolyMatrix> = self
            .diffs
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut mat = PolyMatrix::zeros(&self.ring, self.ranks[i + 1], self.ranks[i]);
                for (&(r, c), p) in m {
                    mat.set(r as usize, c as usize, p.clone());
                }
                mat
            })
            .collect();
        FreeComplex::new(&self.ring, self.min_deg, self.ranks.clone(), mats)
    }

    pub fn check_dd(&self) -> Result<()> {
        for i in 0..self.diffs.len().saturating_sub(1) {
            // compose sparse maps
            let mut by_col: HashMap<u32, Vec<(u32, &Poly)>> = HashMap::new();
            for (&(r, c), p) in &self.diffs[i + 1] {
                by_col.entry(c).or_default().push((r, p));
            }
            let mut acc: HashMap<(u32, u32), Poly> = HashMap::new();
            for (&(mid, c), p) in &self.diffs[i] {
                if let Some(rows) = by_col.get(&mid) {
                    for (r, q) in rows {
                        let prod = p.mul(q);
                        if prod.is_zero() {
                            continue;
                        }
                        acc.entry((*r, c))
                            .and_modify(|e| *e = e.add(&prod))
                            .or_insert(prod);
                    }
                }
            }
            for ((r, c), p) in acc {
                if !p.is_zero() {
                    return Err(Error::engine(format!(
                        "sparse complex: d.d != 0 at block {} entry ({}, {})",
                        i, r, c
                    )));
                }
            }
        }
        Ok(())
    }

    /// Unit elimination on the sparse representation; pivots are entries that
    /// are nonzero constants, or local units whose Schur updates all stay
    /// polynomial.
    pub fn prune_units(&mut self) {
        loop {
            let mut pivot: Option<(usize, u32, u32, u64)> = None;
            for (di, d) in self.diffs.iter().enumerate() {
                for (&(r, c), p) in d {
                    if !p.is_local_unit() {
                        continue;
                    }
                    let deg = p.total_degree().unwrap_or(0);
                    let better = match pivot {
                        None => true,
                        Some((_, pr, pc, bd)) => {
                            deg < bd || (deg == bd && (di, r, c) < (di, pr, pc))
                        }
                    };
                    if better && p.is_constant() {
                        pivot = Some((di, r, c, deg));
                    }
                }
            }
            let (di, pi, pj, _) = match pivot {
                None => break,
                Some(p) => p,
            };
            self.eliminate(di, pi, pj);
        }
    }

    fn eliminate(&mut self, di: usize, pi: u32, pj: u32) {
        let u = self.diffs[di].get(&(pi, pj)).cloned().expect("pivot exists");
        let uinv_scale = {
            let c = u.constant_term();
            crate::poly::rat(1, 1) / c
        };
        // gather the pivot row and column
        let mut col_entries: Vec<(u32, Poly)> = Vec::new();
        let mut row_entries: Vec<(u32, Poly)> = Vec::new();
        for (&(r, c), p) in &self.diffs[di] {
            if c == pj && r != pi {
                col_entries.push((r, p.clone()));
            }
            if r == pi && c != pj {
                row_entries.push((c, p.clone()));
            }
        }
        // Schur update (constant pivot: division is a scale)
        for (r, a) in &col_entries {
            for (c, b) in &row_entries {
                let q = a.mul(b).scale(&uinv_scale);
                let key = (*r, *c);
                let cur = self.diffs[di].remove(&key);
                let val = match cur {
                    None => q.neg(),
                    Some(existing) => existing.sub(&q),
                };
                if !val.is_zero() {
                    self.diffs[di].insert(key, val);
                }
            }
        }
        // delete row pi (target degree di+1) and column pj (degree di)
        self.diffs[di].retain(|&(r, c), _| r != pi && c != pj);
        self.remap_after_delete(di, pi, pj);
    }

    fn remap_after_delete(&mut self, di: usize, pi: u32, pj: u32) {
        // adjacent diffs lose a column / row respectively
        if di + 1 < self.diffs.len() {
            let next = std::mem::take(&mut self.diffs[di + 1]);
            self.diffs[di + 1] = next
                .into_iter()
                .filter(|&((_, c), _)| c != pi)
                .map(|((r, c), p)| ((r, if c > pi { c - 1 } else { c }), p))
                .collect();
        }
        if di > 0 {
            let prev = std::mem::take(&mut self.diffs[di - 1]);
            self.diffs[di - 1] = prev
                .into_iter()
                .filter(|&((r, _), _)| r != pj)
                .map(|((r, c), p)| ((if r > pj { r - 1 } else { r }, c), p))
                .collect();
        }
        let cur = std::mem::take(&mut self.diffs[di]);
        self.diffs[di] = cur
            .into_iter()
            .map(|((r, c), p)| ((if r > pi { r - 1 } else { r }, if c > pj { c - 1 } else { c }), p))
            .collect();
        self.ranks[di] -= 1;
        self.ranks[di + 1] -= 1;
    }

    pub fn trimmed(mut self) -> SparseComplex {
        while self.ranks.len() > 1 && self.ranks[0] == 0 {
            self.ranks.remove(0);
            self.diffs.remove(0);
            self.min_deg += 1;
        }
        while self.ranks.len() > 1 && *self.ranks.last().unwrap() == 0 {
            self.ranks.pop();
            self.diffs.pop();
        }
        self
    }
}

/// A complex of graded free `B[S]`-modules; slot `twists[d][i]` is the twist
/// of the i-th summand in degree `d`, modeling `O(twist)` on the projective
/// side. Differential entries must be S-homogeneous of degree
/// `twist_target - twist_source`.
#[derive(Clone, Debug)]
pub struct GradedComplex {
    pub ring: PolyRing,
    pub s_vars: Vec<usize>,
    pub min_deg: i64,
    pub twists: Vec<Vec<i64>>,
    pub diffs: Vec<HashMap<(u32, u32), Poly>>,
}

impl GradedComplex {
    pub fn single(ring: &PolyRing, s_vars: &[usize], deg: i64, twist: i64) -> Self {
        GradedComplex {
            ring: ring.clone(),
            s_vars: s_vars.to_vec(),
            min_deg: deg,
            twists: vec![vec![twist]],
            diffs: vec![],
        }
    }

    pub fn rank_at_idx(&self, i: usize) -> usize {
        self.twists[i].len()
    }

    pub fn total_rank(&self) -> usize {
        self.twists.iter().map(|t| t.len()).sum()
    }

    pub fn max_deg(&self) -> i64 {
        self.min_deg + self.twists.len() as i64 - 1
    }

    /// Verify S-homogeneity of every entry against the slot twists.
    pub fn check_grading(&self) -> Result<()> {
        for (i, d) in self.diffs.iter().enumerate() {
            for (&(r, c), p) in d {
                if p.is_zero() {
                    continue;
                }
                let want = self.twists[i + 1][r as usize] - self.twists[i][c as usize];
                let comps = p.weighted_components(&self.s_vars);
                if comps.len() != 1 || comps[0].0 as i64 != want {
                    return Err(Error::engine(format!(
                        "entry ({}, {}) of graded differential {} is not S-homogeneous of degree {}",
                        r, c, i, want
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn check_dd(&self) -> Result<()> {
        let sc = SparseComplex {
            ring: self.ring.clone(),
            min_deg: self.min_deg,
            ranks: self.twists.iter().map(|t| t.len()).collect(),
            diffs: self.diffs.clone(),
        };
        sc.check_dd()
    }

    /// Tensor product with the Koszul sign rule, twists adding.
    pub fn tensor(&self, other: &GradedComplex) -> GradedComplex {
        let a = self;
        let b = other;
        let min = a.min_deg + b.min_deg;
        let max = a.max_deg() + b.max_deg();
        let mut twists: Vec<Vec<i64>> = Vec::new();
        // block offsets per total degree: (p_idx, q_idx) -> offset
        let mut offsets: Vec<HashMap<(usize, usize), usize>> = Vec::new();
        for m in min..=max {
            let mut t = Vec::new();
            let mut off = HashMap::new();
            for (pi, tp) in a.twists.iter().enumerate() {
                let p = a.min_deg + pi as i64;
                let q = m - p;
                if q < b.min_deg || q > b.max_deg() {
                    continue;
                }
                let qi = (q - b.min_deg) as usize;
                let tq = &b.twists[qi];
                if tp.is_empty() || tq.is_empty() {
                    continue;
                }
                off.insert((pi, qi), t.len());
                for ea in tp {
                    for eb in tq {
                        t.push(ea + eb);
                    }
                }
            }
            twists.push(t);
            offsets.push(off);
        }
        let mut diffs: Vec<HashMap<(u32, u32), Poly>> = vec![HashMap::new(); (max - min) as usize];
        for m in min..max {
            let mi = (m - min) as usize;
            let src_off = &offsets[mi];
            let dst_off = &offsets[mi + 1];
            for (&(pi, qi), &soff) in src_off {
                let rb = b.twists[qi].len();
                // d_A tensor id
                if pi + 1 < a.twists.len() {
                    if let Some(&doff) = dst_off.get(&(pi + 1, qi)) {
                        if let Some(da) = a.diffs.get(pi) {
                            for (&(r, c), p) in da {
                                for j in 0..rb {
                                    let key = (
                                        (doff + r as usize * rb + j) as u32,
                                        (soff + c as usize * rb + j) as u32,
                                    );
                                    diffs[mi]
                                        .entry(key)
                                        .and_modify(|e| *e = e.add(p))
                                        .or_insert_with(|| p.clone());
                                }
                            }
                        }
                    }
                }
                // (-1)^p id tensor d_B
                if qi + 1 < b.twists.len() {
                    if let Some(&doff) = dst_off.get(&(pi, qi + 1)) {
                        if let Some(db) = b.diffs.get(qi) {
                            let p_deg = a.min_deg + pi as i64;
                            let neg = p_deg.rem_euclid(2) == 1;
                            let rb2 = b.twists[qi + 1].len();
                            let ra = a.twists[pi].len();
                            for (&(r, c), p) in db {
                                let e = if neg { p.neg() } else { p.clone() };
                                for i in 0..ra {
                                    let key = (
                                        (doff + i * rb2 + r as usize) as u32,
                                        (soff + i * rb + c as usize) as u32,
                                    );
                                    diffs[mi]
                                        .entry(key)
                                        .and_modify(|x| *x = x.add(&e))
                                        .or_insert_with(|| e.clone());
                                }
                            }
                        }
                    }
                }
            }
        }
        for d in &mut diffs {
            d.retain(|_, p| !p.is_zero());
        }
        GradedComplex {
            ring: a.ring.clone(),
            s_vars: a.s_vars.clone(),
            min_deg: min,
            twists,
            diffs,
        }
    }

    /// Unit elimination; valid pivots are constants (S-degree 0, x-degree 0),
    /// which are exactly the twist-preserving unit entries.
    pub fn prune_units(&mut self) {
        loop {
            let mut pivot: Option<(usize, u32, u32)> = None;
            'scan: for (di, d) in self.diffs.iter().enumerate() {
                let mut keys: Vec<&(u32, u32)> = d.keys().collect();
                keys.sort();
                for key in keys {
                    let p = &d[key];
                    if p.is_constant() && !p.is_zero() {
                        pivot = Some((di, key.0, key.1));
                        break 'scan;
                    }
                }
            }
            let (di, pi, pj) = match pivot {
                None => break,
                Some(p) => p,
            };
            let u = self.diffs[di].get(&(pi, pj)).cloned().unwrap();
            let uinv = crate::poly::rat(1, 1) / u.constant_term();
            let mut col_entries: Vec<(u32, Poly)> = Vec::new();
            let mut row_entries: Vec<(u32, Poly)> = Vec::new();
            for (&(r, c), p) in &self.diffs[di] {
                if c == pj && r != pi {
                    col_entries.push((r, p.clone()));
                }
                if r == pi && c != pj {
                    row_entries.push((c, p.clone()));
                }
            }
            for (r, a) in &col_entries {
                for (c, b) in &row_entries {
                    let q = a.mul(b).scale(&uinv);
                    let key = (*r, *c);
                    let cur = self.diffs[di].remove(&key);
                    let val = match cur {
                        None => q.neg(),
                        Some(e) => e.sub(&q),
                    };
                    if !val.is_zero() {
                        self.diffs[di].insert(key, val);
                    }
                }
            }
            self.diffs[di].retain(|&(r, c), _| r != pi && c != pj);
            // remap indices and twists
            if di + 1 < self.diffs.len() {
                let next = std::mem::take(&mut self.diffs[di + 1]);
                self.diffs[di + 1] = next
                    .into_iter()
                    .filter(|&((_, c), _)| c != pi)
                    .map(|((r, c), p)| ((r, if c > pi { c - 1 } else { c }), p))
                    .collect();
            }
            if di > 0 {
                let prev = std::mem::take(&mut self.diffs[di - 1]);
                self.diffs[di - 1] = prev
                    .into_iter()
                    .filter(|&((r, _), _)| r != pj)
                    .map(|((r, c), p)| ((if r > pj { r - 1 } else { r }, c), p))
                    .collect();
            }
            let cur = std::mem::take(&mut self.diffs[di]);
            self.diffs[di] = cur
                .into_iter()
                .map(|((r, c), p)| ((if r > pi { r - 1 } else { r }, if c > pj { c - 1 } else { c }), p))
                .collect();
            self.twists[di].remove(pj as usize);
            self.twists[di + 1].remove(pi as usize);
        }
    }
}

/// Result of a strand transfer at one truncation bound.
pub struct TransferResult {
    pub complex: SparseComplex,
    /// True when a Laurent monomial hit the truncation bound and was dropped;
    /// the result may then depend on the bound.
    pub truncated_flow: bool,
}

type Gamma = SmallVec<[i32; 8]>;

/// First coordinate with a nonnegative exponent, the cone vertex of the
/// column contraction; `None` when all exponents are negative.
fn cone_vertex(gamma: &Gamma) -> Option<usize> {
    gamma.iter().position(|&g| g >= 0)
}

/// Strand Cech transfer: from a graded complex over `B[S]` to a sparse
/// complex over the base ring `B` whose homology is the derived pushforward.
/// `trunc` bounds the Laurent exponents of intermediate routing monomials.
pub fn strand_transfer(model: &GradedComplex, base: &PolyRing, trunc: i64) -> Result<TransferResult> {
    let n = model.s_vars.len();
    let hring = &model.ring;
    // positions of base variables inside the homogeneous ring
    let base_pos: Vec<usize> = base
        .vars()
        .iter()
        .map(|v| hring.var_index(v).expect("base variable missing in homogeneous ring"))
        .collect();
    let s_pos = &model.s_vars;

    // enumerate harvest slots
    // key: (model degree index, slot index, level0: bool, gamma)
    #[derive(Clone, PartialEq, Eq, Hash, Debug)]
    struct Slot {
        mi: usize,
        si: usize,
        level0: bool,
        gamma: Gamma,
    }
    let mut slots_per_deg: HashMap<i64, Vec<Slot>> = HashMap::new();
    let mut h0_count = 0usize;
    for (mi, tw) in model.twists.iter().enumerate() {
        let m = model.min_deg + mi as i64;
        for (si, &e) in tw.iter().enumerate() {
            if e >= 0 {
                for gamma in compositions_nonneg(e as u64, n) {
                    slots_per_deg.entry(m).or_default().push(Slot { mi, si, level0: true, gamma });
                    h0_count += 1;
                }
            }
            if e <= -(n as i64) {
                for gamma in compositions_negative(e, n) {
                    slots_per_deg
                        .entry(m + n as i64 - 1)
                        .or_default()
                        .push(Slot { mi, si, level0: false, gamma });
                }
            }
        }
    }
    let _ = h0_count;
    if slots_per_deg.is_empty() {
        return Ok(TransferResult {
            complex: SparseComplex {
                ring: base.clone(),
                min_deg: 0,
                ranks: vec![0],
                diffs: vec![],
            },
            truncated_flow: false,
        });
    }
    let min_deg = *slots_per_deg.keys().min().unwrap();
    let max_deg = *slots_per_deg.keys().max().unwrap();
    let len = (max_deg - min_deg + 1) as usize;
    let mut ranks = vec![0usize; len];
    let mut index: HashMap<Slot, (usize, usize)> = HashMap::new();
    let mut ordered: Vec<Vec<Slot>> = vec![Vec::new(); len];
    for d in min_deg..=max_deg {
        let di = (d - min_deg) as usize;
        if let Some(list) = slots_per_deg.get(&d) {
            let mut list = list.clone();
            list.sort_by(|a, b| {
                (a.mi, a.si, a.level0, a.gamma.as_slice()).cmp(&(b.mi, b.si, b.level0, b.gamma.as_slice()))
            });
            for s in list {
                index.insert(s.clone(), (di, ordered[di].len()));
                ordered[di].push(s);
            }
            ranks[di] = ordered[di].len();
        }
    }

    // decompose every model differential entry into monomial actions:
    // (x-part polynomial over base, delta: S-exponent vector)
    let decompose = |p: &Poly| -> Vec<(Poly, Gamma)> {
        let mut buckets: HashMap<Gamma, Vec<(Exp, Rat)>> = HashMap::new();
        for (e, c) in p.terms() {
            let delta: Gamma = s_pos.iter().map(|&i| e[i] as i32).collect();
            let mut xexp: Exp = SmallVec::from_elem(0u16, base.nvars());
            for (bi, &hi) in base_pos.iter().enumerate() {
                xexp[bi] = e[hi];
            }
            buckets.entry(delta).or_default().push((xexp, c.clone()));
        }
        buckets
            .into_iter()
            .map(|(delta, terms)| (base.from_terms(terms), delta))
            .collect()
    };
    // cache decompositions per (mi, entry-key)
    let mut entry_cache: Vec<HashMap<(u32, u32), Vec<(Poly, Gamma)>>> = Vec::with_capacity(model.diffs.len());
    for d in &model.diffs {
        let mut m = HashMap::new();
        for (&k, p) in d {
            m.insert(k, decompose(p));
        }
        entry_cache.push(m);
    }
    // entries grouped by source slot for routing
    let mut by_src: Vec<HashMap<u32, Vec<(u32, usize)>>> = Vec::with_capacity(model.diffs.len());
    for (mi, d) in model.diffs.iter().enumerate() {
        let mut m: HashMap<u32, Vec<(u32, usize)>> = HashMap::new();
        let mut keys: Vec<&(u32, u32)> = d.keys().collect();
        keys.sort();
        for (pos, &&(r, c)) in keys.iter().enumerate() {
            m.entry(c).or_default().push((r, pos));
        }
        // store position by key order; rebuild into (row, index into cache) pairs
        let mut m2: HashMap<u32, Vec<(u32, usize)>> = HashMap::new();
        for (c, v) in m {
            let _ = &v;
            m2.insert(c, v);
        }
        by_src.push(m2);
        let _ = mi;
    }
    // lookup helper from (mi, row, col) to the cached decomposition
    let cached = |mi: usize, r: u32, c: u32| -> Option<&Vec<(Poly, Gamma)>> {
        entry_cache.get(mi).and_then(|m| m.get(&(r, c)))
    };

    let mut truncated_flow = false;
    let mut diffs: Vec<HashMap<(u32, u32), Poly>> = vec![HashMap::new(); len.saturating_sub(1)];

    // direct maps: level0 -> level0 and top -> top
    for d in min_deg..=max_deg {
        let di = (d - min_deg) as usize;
        for (ci, slot) in ordered[di].iter().enumerate() {
            if slot.mi + 1 > model.diffs.len() {
                continue;
            }
            if slot.mi >= model.diffs.len() {
                continue;
            }
            let srcs = match by_src[slot.mi].get(&(slot.si as u32)) {
                None => continue,
                Some(v) => v,
            };
            for &(row, _) in srcs {
                let Some(actions) = cached(slot.mi, row, slot.si as u32) else { continue };
                for (xpart, delta) in actions {
                    let mut g2: Gamma = slot.gamma.clone();
                    for (i, dd) in delta.iter().enumerate() {
                        g2[i] += dd;
                    }
                    if slot.level0 {
                        // multiplication on nonnegative monomials
                        let target = Slot { mi: slot.mi + 1, si: row as usize, level0: true, gamma: g2 };
                        if let Some(&(tdi, ti)) = index.get(&target) {
                            debug_assert_eq!(tdi, di + 1);
                            add_entry(&mut diffs[di], ti as u32, ci as u32, xpart);
                        }
                    } else {
                        // top level: sign (-1)^{n-1}, surviving only when the
                        // shifted monomial stays strictly negative
                        if g2.iter().all(|&x| x < 0) {
                            let target = Slot { mi: slot.mi + 1, si: row as usize, level0: false, gamma: g2 };
                            if let Some(&(tdi, ti)) = index.get(&target) {
                                debug_assert_eq!(tdi, di + 1);
                                let signed = if (n - 1) % 2 == 1 { xpart.neg() } else { xpart.clone() };
                                add_entry(&mut diffs[di], ti as u32, ci as u32, &signed);
                            }
                        }
                    }
                }
            }
        }
    }

    // transgressions: top-level class of slot (mi, si) routed through the
    // cone homotopy n-1 times, harvested on level 0
    let full_mask: u32 = (1u32 << n) - 1;
    for d in min_deg..=max_deg {
        let di = (d - min_deg) as usize;
        for (ci, slot) in ordered[di].iter().enumerate() {
            if slot.level0 {
                continue;
            }
            // state: (mask, gamma, slot index in model, model degree index) -> coefficient
            let mut state: HashMap<(u32, Gamma, usize), Poly> = HashMap::new();
            state.insert((full_mask, slot.gamma.clone(), slot.si), base.one());
            let mut mi_cur = slot.mi;
            // n-1 rounds of (perturbation, homotopy), then one final
            // perturbation and the projection
            for _round in 0..n {
                if mi_cur >= model.diffs.len() || state.is_empty() {
                    state.clear();
                    break;
                }
                let mut next: HashMap<(u32, Gamma, usize), Poly> = HashMap::new();
                for ((mask, gamma, si), coef) in &state {
                    let q = mask.count_ones() as i64 - 1;
                    let dsign_neg = q.rem_euclid(2) == 1;
                    let srcs = match by_src[mi_cur].get(&(*si as u32)) {
                        None => continue,
                        Some(v) => v,
                    };
                    for &(row, _) in srcs {
                        let Some(actions) = cached(mi_cur, row, *si as u32) else { continue };
                        for (xpart, delta) in actions {
                            let mut g2: Gamma = gamma.clone();
                            let mut overflow = false;
                            for (i, dd) in delta.iter().enumerate() {
                                g2[i] += dd;
                                if g2[i].abs() as i64 > trunc {
                                    overflow = true;
                                }
                            }
                            if overflow {
                                truncated_flow = true;
                                continue;
                            }
                            let mut c2 = coef.mul(xpart);
                            if dsign_neg {
                                c2 = c2.neg();
                            }
                            if c2.is_zero() {
                                continue;
                            }
                            next.entry((*mask, g2, row as usize))
                                .and_modify(|e| *e = e.add(&c2))
                                .or_insert(c2);
                        }
                    }
                }
                next.retain(|_, p| !p.is_zero());
                mi_cur += 1;
                if _round == n - 1 {
                    // final perturbation applied; project instead of routing
                    state = next;
                    break;
                }
                // homotopy: remove the cone vertex from the mask
                let mut routed: HashMap<(u32, Gamma, usize), Poly> = HashMap::new();
                for ((mask, gamma, si), coef) in next {
                    if mask.count_ones() <= 1 {
                        continue;
                    }
                    let Some(j) = cone_vertex(&gamma) else { continue };
                    if mask & (1 << j) == 0 {
                        continue;
                    }
                    // sign: position of j within the mask
                    let below = (mask & ((1u32 << j) - 1)).count_ones();
                    let sign_neg = below % 2 == 1;
                    let new_mask = mask & !(1u32 << j);
                    let c = if sign_neg { coef.neg() } else { coef };
                    routed
                        .entry((new_mask, gamma, si))
                        .and_modify(|e| *e = e.add(&c))
                        .or_insert(c);
                }
                routed.retain(|_, p| !p.is_zero());
                state = routed;
            }
            // projection: singleton mask {j} with j the cone vertex of a
            // fully nonnegative monomial
            for ((mask, gamma, si), coef) in state {
                if mask.count_ones() != 1 {
                    continue;
                }
                let j = mask.trailing_zeros() as usize;
                if !gamma.iter().all(|&x| x >= 0) {
                    continue;
                }
                if cone_vertex(&gamma) != Some(j) {
                    continue;
                }
                let target = Slot { mi: mi_cur, si, level0: true, gamma };
                if let Some(&(tdi, ti)) = index.get(&target) {
                    debug_assert_eq!(tdi, di + 1);
                    add_entry(&mut diffs[di], ti as u32, ci as u32, &coef);
                }
            }
        }
    }

    let sc = SparseComplex { ring: base.clone(), min_deg, ranks, diffs };
    Ok(TransferResult { complex: sc, truncated_flow })
}

fn add_entry(map: &mut HashMap<(u32, u32), Poly>, r: u32, c: u32, p: &Poly) {
    if p.is_zero() {
        return;
    }
    match map.get_mut(&(r, c)) {
        Some(e) => {
            *e = e.add(p);
            if e.is_zero() {
                map.remove(&(r, c));
            }
        }
        None => {
            map.insert((r, c), p.clone());
        }
    }
}

/// All nonnegative integer vectors of length `n` summing to `total`.
fn compositions_nonneg(total: u64, n: usize) -> Vec<Gamma> {
    fn rec(total: i64, n: usize, cur: &mut Gamma, out: &mut Vec<Gamma>) {
        if n == 1 {
            cur.push(total as i32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=total {
            cur.push(v as i32);
            rec(total - v, n - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(total as i64, n, &mut SmallVec::new(), &mut out);
    out
}

/// All strictly negative integer vectors of length `n` summing to `e`.
fn compositions_negative(e: i64, n: usize) -> Vec<Gamma> {
    // gamma_i <= -1; substitute gamma_i = -1 - b_i with b_i >= 0
    let slack = -e - n as i64;
    if slack < 0 {
        return Vec::new();
    }
    compositions_nonneg(slack as u64, n)
        .into_iter()
        .map(|b| b.iter().map(|&x| -1 - x).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gb::Count;
    use crate::poly::MonomialOrder::GrevLex;

    fn hring4() -> (PolyRing, Vec<usize>, PolyRing) {
        let h = PolyRing::named(&["x", "y", "S1", "S2"], GrevLex);
        let base = PolyRing::named(&["x", "y"], GrevLex);
        (h, vec![2, 3], base)
    }

    #[test]
    fn compositions() {
        assert_eq!(compositions_nonneg(2, 2).len(), 3);
        assert_eq!(compositions_negative(-2, 2).len(), 1); // (-1, -1)
        assert_eq!(compositions_negative(-1, 2).len(), 0);
        assert_eq!(compositions_negative(-4, 2).len(), 3);
    }

    /// Pushforward of the structure sheaf of P^1 over the base: one slot of
    /// twist 0 transfers to a rank-1 complex concentrated in one degree.
    #[test]
    fn transfer_structure_sheaf_p1() {
        let (h, s_vars, base) = hring4();
        let model = GradedComplex::single(&h, &s_vars, 0, 0);
        let t = strand_transfer(&model, &base, 8).unwrap();
        assert_eq!(t.complex.ranks, vec![1]);
        assert!(!t.truncated_flow);
        // O(-1) has no cohomology at all
        let model2 = GradedComplex::single(&h, &s_vars, 0, -1);
        let t2 = strand_transfer(&model2, &base, 8).unwrap();
        assert_eq!(t2.complex.total_rank(), 0);
        // O(-2) has H^1 of rank 1
        let model3 = GradedComplex::single(&h, &s_vars, 0, -2);
        let t3 = strand_transfer(&model3, &base, 8).unwrap();
        assert_eq!(t3.complex.ranks, vec![1]);
        assert_eq!(t3.complex.min_deg, 1);
        // O(2): rank 3 in degree 0
        let model4 = GradedComplex::single(&h, &s_vars, 0, 2);
        let t4 = strand_transfer(&model4, &base, 8).unwrap();
        assert_eq!(t4.complex.ranks, vec![3]);
    }

    /// The twisted Euler-sequence complex O(-2) -> O(-1)^2 on P^1 (map
    /// = (S1, S2)) has H^0 = H^1 = 0 in the pushforward... its cokernel is
    /// the twisted tangent-ish sheaf; here we check d.d and ranks only.
    #[test]
    fn transfer_euler_like_map() {
        let (h, s_vars, base) = hring4();
        let mut diffs = vec![HashMap::new()];
        diffs[0].insert((0u32, 0u32), h.parse("S1").unwrap());
        diffs[0].insert((1u32, 0u32), h.parse("S2").unwrap());
        let model = GradedComplex {
            ring: h.clone(),
            s_vars: s_vars.clone(),
            min_deg: -1,
            twists: vec![vec![-2], vec![-1, -1]],
            diffs,
        };
        model.check_grading().unwrap();
        model.check_dd().unwrap();
        let t = strand_transfer(&model, &base, 8).unwrap();
        // O(-2) contributes one top-level slot in degree -1 + 1 = 0;
        // O(-1) contributes nothing
        assert_eq!(t.complex.ranks.iter().sum::<usize>(), 1);
        t.complex.check_dd().unwrap();
    }

    /// The sheafified Koszul complex of (S1, S2) on P^1 is exact everywhere
    /// (the coordinates have no common zero), so the transfer of
    /// O(-2) -> O(-1)^2 -> O must be exact: the transgression connecting the
    /// top-level class of O(-2) with the section of O is an isomorphism.
    #[test]
    fn transfer_full_koszul_on_p1() {
        let (h, s_vars, base) = hring4();
        let mut d0 = HashMap::new();
        // wedge basis e12 -> (-S2, S1)
        d0.insert((0u32, 0u32), h.parse("-S2").unwrap());
        d0.insert((1u32, 0u32), h.parse("S1").unwrap());
        let mut d1 = HashMap::new();
        d1.insert((0u32, 0u32), h.parse("S1").unwrap());
        d1.insert((0u32, 1u32), h.parse("S2").unwrap());
        let model = GradedComplex {
            ring: h.clone(),
            s_vars: s_vars.clone(),
            min_deg: -2,
            twists: vec![vec![-2], vec![-1, -1], vec![0]],
            diffs: vec![d0, d1],
        };
        model.check_grading().unwrap();
        model.check_dd().unwrap();
        let t = strand_transfer(&model, &base, 8).unwrap();
        t.complex.check_dd().unwrap();
        // the two harvest slots (top of O(-2) at degree -1, section of O at
        // degree 0) cancel through the transgression
        assert_eq!(t.complex.total_rank(), 2);
        let free = t.complex.to_free().unwrap();
        let lens = free.homology_lengths().unwrap();
        assert!(lens.iter().all(|(_, l)| *l == Count::Finite(0)), "{:?}", lens);
        let mut sc = t.complex;
        sc.prune_units();
        assert_eq!(sc.total_rank(), 0);
    }

    /// A two-term complex O(-4) -> O(-4) on P^3-style cover (n = 4) given by
    /// multiplication with a unit constant: the transferred top-level blocks
    /// must cancel completely after pruning.
    #[test]
    fn transfer_unit_map_cancels() {
        let h = PolyRing::named(&["x", "S1", "S2", "S3", "S4"], GrevLex);
        let base = PolyRing::named(&["x"], GrevLex);
        let s_vars = vec![1, 2, 3, 4];
        let mut d = HashMap::new();
        d.insert((0u32, 0u32), h.one());
        let model = GradedComplex {
            ring: h.clone(),
            s_vars,
            min_deg: -1,
            twists: vec![vec![-4], vec![-4]],
            diffs: vec![d],
        };
        model.check_grading().unwrap();
        let t = strand_transfer(&model, &base, 8).unwrap();
        let mut sc = t.complex;
        sc.check_dd().unwrap();
        sc.prune_units();
        assert_eq!(sc.total_rank(), 0);
    }
}
