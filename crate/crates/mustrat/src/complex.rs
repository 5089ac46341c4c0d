//! Bounded complexes of free modules over a (quotient of a) polynomial ring.
//!
//! Degrees follow the cohomological convention of the source material: the
//! augmentation end sits in degree 0 and the complex stretches into negative
//! degrees. Differentials raise the degree by one and act on column vectors:
//! `diffs[i]` has shape `ranks[i+1] x ranks[i]`.

use crate::error::{Error, Result};
use crate::gb::{basis_compute, module_kernel_mod, staircase_count_module, Count, VecP};
use crate::matrix::PolyMatrix;
use crate::poly::{MonomialOrder, Poly, PolyRing};

#[derive(Clone, Debug)]
pub struct FreeComplex {
    pub ring: PolyRing,
    pub min_deg: i64,
    pub ranks: Vec<usize>,
    pub diffs: Vec<PolyMatrix>,
}

impl FreeComplex {
    /// Construct and verify shapes and `d \circ d = 0`.
    pub fn new(ring: &PolyRing, min_deg: i64, ranks: Vec<usize>, diffs: Vec<PolyMatrix>) -> Result<Self> {
        if ranks.is_empty() {
            return Ok(FreeComplex { ring: ring.clone(), min_deg, ranks: vec![0], diffs: vec![] });
        }
        if diffs.len() + 1 != ranks.len() {
            return Err(Error::validation("complex needs one differential per adjacent degree pair"));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[i + 1] || d.cols() != ranks[i] {
                return Err(Error::validation(format!(
                    "differential {} has shape {}x{}, expected {}x{}",
                    i,
                    d.rows(),
                    d.cols(),
                    ranks[i + 1],
                    ranks[i]
                )));
            }
        }
        let c = FreeComplex { ring: ring.clone(), min_deg, ranks, diffs };
        c.check_dd()?;
        Ok(c)
    }

    pub fn zero(ring: &PolyRing) -> Self {
        FreeComplex { ring: ring.clone(), min_deg: 0, ranks: vec![0], diffs: vec![] }
    }

    /// A single free module placed in one degree.
    pub fn single(ring: &PolyRing, deg: i64, rank: usize) -> Self {
        FreeComplex { ring: ring.clone(), min_deg: deg, ranks: vec![rank], diffs: vec![] }
    }

    pub fn check_dd(&self) -> Result<()> {
        for i in 0..self.diffs.len().saturating_sub(1) {
            let prod = self.diffs[i + 1].mul(&self.diffs[i])?;
            let bad = if self.ring.has_quotient() {
                // over a quotient ring the composite only needs to vanish
                // modulo the quotient ideal
                let q = crate::gb::Ideal::new(&self.ring.without_quotient(), self.ring.quotient_gens().to_vec());
                let mut nonzero = false;
                for (_, _, p) in prod.iter_nonzero() {
                    if !q.contains(&p)? {
                        nonzero = true;
                        break;
                    }
                }
                nonzero
            } else {
                !prod.is_zero()
            };
            if bad {
                return Err(Error::validation(format!(
                    "composite of differentials {} and {} is nonzero",
                    i,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn max_deg(&self) -> i64 {
        self.min_deg + self.ranks.len() as i64 - 1
    }

    pub fn rank_at(&self, deg: i64) -> usize {
        if deg < self.min_deg || deg > self.max_deg() {
            0
        } else {
            self.ranks[(deg - self.min_deg) as usize]
        }
    }

    pub fn diff_from(&self, deg: i64) -> Option<&PolyMatrix> {
        if deg < self.min_deg || deg >= self.max_deg() {
            None
        } else {
            Some(&self.diffs[(deg - self.min_deg) as usize])
        }
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn is_zero_complex(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    /// Drop zero-rank degrees at both ends.
    pub fn trimmed(&self) -> FreeComplex {
        let mut lo = 0usize;
        let mut hi = self.ranks.len();
        while lo < hi && self.ranks[lo] == 0 {
            lo += 1;
        }
        while hi > lo && self.ranks[hi - 1] == 0 {
            hi -= 1;
        }
        if lo >= hi {
            return FreeComplex::zero(&self.ring);
        }
        FreeComplex {
            ring: self.ring.clone(),
            min_deg: self.min_deg + lo as i64,
            ranks: self.ranks[lo..hi].to_vec(),
            diffs: self.diffs[lo..hi - 1].to_vec(),
        }
    }

    /// Entrywise ring map applied to the whole complex.
    pub fn map_to(&self, target: &PolyRing, images: &[Poly]) -> Result<FreeComplex> {
        let diffs: Result<Vec<PolyMatrix>> = self.diffs.iter().map(|d| d.map_entries(target, images)).collect();
        FreeComplex::new(target, self.min_deg, self.ranks.clone(), diffs?)
    }

    /// Total complex of the tensor product with the Koszul sign rule: the
    /// second differential carries the sign `(-1)^p` over a degree-`p` first
    /// factor.
    pub fn tensor(&self, other: &FreeComplex) -> Result<FreeComplex> {
        if !self.ring.same_data(&other.ring) {
            return Err(Error::RingMismatch("tensor of complexes over different rings".into()));
        }
        if self.is_zero_complex() || other.is_zero_complex() {
            return Ok(FreeComplex::zero(&self.ring));
        }
        let a = self.trimmed();
        let b = other.trimmed();
        let min = a.min_deg + b.min_deg;
        let max = a.max_deg() + b.max_deg();
        let len = (max - min + 1) as usize;
        // block layout per total degree: (p, q) with p + q = m, p ascending
        let blocks_at = |m: i64| -> Vec<(i64, i64, usize, usize)> {
            let mut v = Vec::new();
            for p in a.min_deg..=a.max_deg() {
                let q = m - p;
                if q < b.min_deg || q > b.max_deg() {
                    continue;
                }
                let ra = a.rank_at(p);
                let rb = b.rank_at(q);
                if ra == 0 || rb == 0 {
                    continue;
                }
                v.push((p, q, ra, rb));
            }
            v
        };
        let offset_of = |blocks: &[(i64, i64, usize, usize)], p: i64| -> Option<usize> {
            let mut off = 0;
            for &(bp, _, ra, rb) in blocks {
                if bp == p {
                    return Some(off);
                }
                off += ra * rb;
            }
            None
        };
        let mut ranks = Vec::with_capacity(len);
        for m in min..=max {
            ranks.push(blocks_at(m).iter().map(|&(_, _, ra, rb)| ra * rb).sum());
        }
        let mut diffs = Vec::with_capacity(len.saturating_sub(1));
        for m in min..max {
            let src = blocks_at(m);
            let dst = blocks_at(m + 1);
            let rows: usize = dst.iter().map(|&(_, _, ra, rb)| ra * rb).sum();
            let cols: usize = src.iter().map(|&(_, _, ra, rb)| ra * rb).sum();
            let mut mat = PolyMatrix::zeros(&self.ring, rows, cols);
            let mut col_off = 0;
            for &(p, q, ra, rb) in &src {
                // d_A tensor id : (p, q) -> (p+1, q)
                if let Some(da) = a.diff_from(p) {
                    if let Some(row_off) = offset_of(&dst, p + 1) {
                        for (i2, i1, entry) in da.iter_nonzero() {
                            for j in 0..rb {
                                mat.set(row_off + i2 * rb + j, col_off + i1 * rb + j, entry.clone());
                            }
                        }
                    }
                }
                // (-1)^p id tensor d_B : (p, q) -> (p, q+1)
                if let Some(db) = b.diff_from(q) {
                    if let Some(row_off) = offset_of(&dst, p) {
                        let sign_neg = p.rem_euclid(2) == 1;
                        let rb2 = b.rank_at(q + 1);
                        for (j2, j1, entry) in db.iter_nonzero() {
                            let e = if sign_neg { entry.neg() } else { entry.clone() };
                            for i in 0..ra {
                                mat.set(row_off + i * rb2 + j2, col_off + i * rb + j1, e.clone());
                            }
                        }
                    }
                }
                col_off += ra * rb;
            }
            diffs.push(mat);
        }
        FreeComplex::new(&self.ring, min, ranks, diffs)
    }

    /// Gaussian elimination of unit entries. Entries that are nonzero
    /// constants are always usable pivots; units with higher-order terms are
    /// used only when every Schur update stays polynomial. The result is
    /// homotopy equivalent to the input.
    pub fn prune_units(&self) -> FreeComplex {
        let mut ranks = self.ranks.clone();
        let mut diffs: Vec<Vec<Vec<Poly>>> = self
            .diffs
            .iter()
            .map(|d| {
                let mut rows = vec![vec![self.ring.zero(); d.cols()]; d.rows()];
                for (i, j, p) in d.iter_nonzero() {
                    rows[i][j] = p;
                }
                rows
            })
            .collect();
        let mut skipped: Vec<(usize, usize, usize)> = Vec::new();
        loop {
            // pivot selection: smallest entry degree first, ties by position
            let mut pivot: Option<(usize, usize, usize, u64)> = None;
            for (di, d) in diffs.iter().enumerate() {
                for (i, row) in d.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        if e.is_zero() || !e.is_local_unit() {
                            continue;
                        }
                        if skipped.contains(&(di, i, j)) {
                            continue;
                        }
                        let deg = e.total_degree().unwrap_or(0);
                        if pivot.map(|(_, _, _, bd)| deg < bd).unwrap_or(true) {
                            pivot = Some((di, i, j, deg));
                        }
                    }
                }
            }
            let (di, pi, pj, _) = match pivot {
                None => break,
                Some(p) => p,
            };
            let u = diffs[di][pi][pj].clone();
            // every Schur update must stay polynomial
            let mut updates: Vec<(usize, usize, Poly)> = Vec::new();
            let mut ok = true;
            'outer: for a in 0..ranks[di + 1] {
                if a == pi || diffs[di][a][pj].is_zero() {
                    continue;
                }
                for b in 0..ranks[di] {
                    if b == pj || diffs[di][pi][b].is_zero() {
                        continue;
                    }
                    let prod = diffs[di][a][pj].mul(&diffs[di][pi][b]);
                    match crate::gb::exact_div(&prod, &u) {
                        Ok(q) => updates.push((a, b, q)),
                        Err(_) => {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            if !ok {
                skipped.push((di, pi, pj));
                continue;
            }
            for (a, b, q) in updates {
                let cur = diffs[di][a][b].clone();
                diffs[di][a][b] = cur.sub(&q);
            }
            // deleting shifts positions, so forget the skip list
            skipped.clear();
            delete_pivot(&mut diffs, &mut ranks, di, pi, pj);
        }
        self.rebuild(diffs, ranks)
    }

    fn rebuild(&self, diffs: Vec<Vec<Vec<Poly>>>, ranks: Vec<usize>) -> FreeComplex {
        let mats: Vec<PolyMatrix> = diffs
            .iter()
            .enumerate()
            .map(|(i, rows)| PolyMatrix::from_fn(&self.ring, ranks[i + 1], ranks[i], |r, c| rows[r][c].clone()))
            .collect();
        FreeComplex { ring: self.ring.clone(), min_deg: self.min_deg, ranks, diffs: mats }.trimmed()
    }

    /// Lengths of the homology modules at the origin, one entry per degree.
    pub fn homology_lengths(&self) -> Result<Vec<(i64, Count)>> {
        let trimmed = self.trimmed();
        let degs: Vec<i64> = (0..trimmed.ranks.len()).map(|i| trimmed.min_deg + i as i64).collect();
        let results = crate::par::par_map(degs, |deg| trimmed.homology_length_at(deg));
        let mut out = Vec::with_capacity(results.len());
        for (i, r) in results.into_iter().enumerate() {
            out.push((trimmed.min_deg + i as i64, r?));
        }
        Ok(out)
    }

    pub fn homology_length_at(&self, deg: i64) -> Result<Count> {
        let rank = self.rank_at(deg);
        if rank == 0 {
            return Ok(Count::Finite(0));
        }
        let quotient: Vec<Poly> = self.ring.quotient_gens().to_vec();
        let d_out = self.diff_from(deg);
        let d_in = if deg > self.min_deg { self.diff_from(deg - 1) } else { None };
        let base = self.ring.without_quotient();
        let identity_cols = || -> Vec<Vec<Poly>> {
            (0..rank)
                .map(|i| (0..rank).map(|j| if i == j { base.one() } else { base.zero() }).collect())
                .collect()
        };
        let kernel_cols: Vec<Vec<Poly>> = match d_out {
            None => identity_cols(),
            Some(m) if m.is_zero() => identity_cols(),
            Some(m) => module_kernel_mod(m, &quotient)?.generators,
        };
        if kernel_cols.is_empty() {
            return Ok(Count::Finite(0));
        }
        // image generators: columns of the incoming differential plus the
        // quotient multiples of every basis vector
        let mut image_cols: Vec<Vec<Poly>> = Vec::new();
        if let Some(m) = d_in {
            for j in 0..m.cols() {
                let col = m.col(j);
                if col.iter().any(|p| !p.is_zero()) {
                    image_cols.push(col);
                }
            }
        }
        for q in &quotient {
            for a in 0..rank {
                let mut col = vec![base.zero(); rank];
                col[a] = q.clone();
                image_cols.push(col);
            }
        }
        let p = kernel_cols.len();
        // relations of K/I: all u with K u inside the image span
        let mut mat = PolyMatrix::zeros(&base, rank, p + image_cols.len());
        for (j, col) in kernel_cols.iter().enumerate() {
            for (i, e) in col.iter().enumerate() {
                mat.set(i, j, e.clone());
            }
        }
        for (j, col) in image_cols.iter().enumerate() {
            for (i, e) in col.iter().enumerate() {
                mat.set(i, p + j, e.clone());
            }
        }
        let syz = module_kernel_mod(&mat, &[])?;
        let relations: Vec<Vec<Poly>> = syz
            .generators
            .iter()
            .map(|v| v[..p].to_vec())
            .filter(|v| v.iter().any(|c| !c.is_zero()))
            .collect();
        // length of R^p / relations under the local staircase
        let order = MonomialOrder::LocalGrevLex;
        let gens: Vec<VecP> = relations
            .iter()
            .map(|v| {
                let comps: Vec<Poly> = v.iter().map(|c| c.reinterpret_for(order)).collect();
                VecP::from_comps(&comps, order)
            })
            .collect();
        let basis = basis_compute(&gens, p, order)?;
        let leads: Vec<(u32, crate::poly::Exp)> = basis
            .iter()
            .filter_map(|b| b.lead().map(|(pos, e, _)| (*pos, e.clone())))
            .collect();
        Ok(staircase_count_module(&leads, p, self.ring.nvars()))
    }

    /// Alternating sum of homology lengths; a complex concentrated in degree
    /// zero has chi equal to its length.
    pub fn euler_characteristic(&self) -> Result<i64> {
        let lengths = self.homology_lengths()?;
        let mut chi: i64 = 0;
        for (deg, len) in lengths {
            match len {
                Count::Infinite => {
                    return Err(Error::NonIsolated(format!(
                        "infinite homology in degree {} (degeneracy locus is positive-dimensional)",
                        deg
                    )))
                }
                Count::Finite(n) => {
                    if deg.rem_euclid(2) == 0 {
                        chi += n as i64;
                    } else {
                        chi -= n as i64;
                    }
                }
            }
        }
        Ok(chi)
    }

    /// Plain-text serialization used by the CLI `prep` and `subst` commands.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("complex\n");
        s.push_str(&format!("ring {}\n", self.ring.vars().join(" ")));
        s.push_str(&format!("degrees {} {}\n", self.min_deg, self.max_deg()));
        s.push_str(&format!(
            "ranks {}\n",
            self.ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
        ));
        for (i, d) in self.diffs.iter().enumerate() {
            s.push_str(&format!("diff {}\n", self.min_deg + i as i64));
            for r in 0..d.rows() {
                let row: Vec<String> = (0..d.cols()).map(|c| d.get(r, c).to_string()).collect();
                s.push_str(&row.join(" ; "));
                s.push('\n');
            }
        }
        s.push_str("end\n");
        s
    }

    pub fn parse_text(input: &str) -> Result<FreeComplex> {
        let perr = |line: usize, msg: &str| Error::Parse { line: line + 1, col: 1, msg: msg.to_string() };
        let mut lines = input.lines().enumerate();
        let header = lines.next().ok_or_else(|| perr(0, "empty complex text"))?;
        if header.1.trim() != "complex" {
            return Err(perr(header.0, "expected 'complex' header"));
        }
        let ring_line = lines.next().ok_or_else(|| perr(1, "missing ring line"))?;
        let ring_parts: Vec<&str> = ring_line.1.split_whitespace().collect();
        if ring_parts.first() != Some(&"ring") {
            return Err(perr(ring_line.0, "expected 'ring <vars>'"));
        }
        let ring = PolyRing::new(
            ring_parts[1..].iter().map(|s| s.to_string()).collect(),
            MonomialOrder::GrevLex,
        )?;
        let deg_line = lines.next().ok_or_else(|| perr(2, "missing degrees line"))?;
        let dp: Vec<&str> = deg_line.1.split_whitespace().collect();
        if dp.len() != 3 || dp[0] != "degrees" {
            return Err(perr(deg_line.0, "expected 'degrees <min> <max>'"));
        }
        let min_deg: i64 = dp[1].parse().map_err(|_| perr(deg_line.0, "bad degree"))?;
        let ranks_line = lines.next().ok_or_else(|| perr(3, "missing ranks line"))?;
        let rp: Vec<&str> = ranks_line.1.split_whitespace().collect();
        if rp.first() != Some(&"ranks") {
            return Err(perr(ranks_line.0, "expected 'ranks <r0> <r1> ...'"));
        }
        let ranks: Vec<usize> = rp[1..]
            .iter()
            .map(|s| s.parse().map_err(|_| perr(ranks_line.0, "bad rank")))
            .collect::<Result<_>>()?;
        let mut diffs: Vec<PolyMatrix> = Vec::new();
        let mut current: Option<Vec<Vec<Poly>>> = None;
        for (ln, line) in lines {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if t == "end" {
                if let Some(rows) = current.take() {
                    diffs.push(PolyMatrix::from_rows(&ring, rows).map_err(|_| perr(ln, "bad matrix"))?);
                }
                break;
            }
            if let Some(rest) = t.strip_prefix("diff ") {
                if let Some(rows) = current.take() {
                    diffs.push(PolyMatrix::from_rows(&ring, rows).map_err(|_| perr(ln, "bad matrix"))?);
                }
                let _deg: i64 = rest.trim().parse().map_err(|_| perr(ln, "bad diff degree"))?;
                current = Some(Vec::new());
            } else if let Some(rows) = current.as_mut() {
                let mut row = Vec::new();
                for cell in t.split(';') {
                    row.push(ring.parse(cell.trim())?);
                }
                rows.push(row);
            } else {
                return Err(perr(ln, "unexpected line outside a diff block"));
            }
        }
        FreeComplex::new(&ring, min_deg, ranks, diffs)
    }
}

fn delete_pivot(diffs: &mut [Vec<Vec<Poly>>], ranks: &mut [usize], di: usize, pi: usize, pj: usize) {
    // drop target basis vector pi of degree di+1 and source vector pj of
    // degree di; adjacent differentials only lose a row/column
    diffs[di].remove(pi);
    for row in diffs[di].iter_mut() {
        row.remove(pj);
    }
    if di + 1 < diffs.len() {
        for row in diffs[di + 1].iter_mut() {
            row.remove(pi);
        }
    }
    if di > 0 {
        diffs[di - 1].remove(pj);
    }
    ranks[di] -= 1;
    ranks[di + 1] -= 1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kosz::koszul_complex;
    use crate::poly::MonomialOrder::GrevLex;

    fn ring(vars: &[&str]) -> PolyRing {
        PolyRing::named(vars, GrevLex)
    }

    #[test]
    fn dd_zero_rejects_bad_complex() {
        let r = ring(&["x"]);
        let d0 = PolyMatrix::from_rows(&r, vec![vec![r.var(0)]]).unwrap();
        let d1 = PolyMatrix::from_rows(&r, vec![vec![r.var(0)]]).unwrap();
        assert!(FreeComplex::new(&r, -2, vec![1, 1, 1], vec![d0, d1]).is_err());
    }

    #[test]
    fn koszul_homology_regular_sequence() {
        let r = ring(&["x", "y", "z"]);
        let c = koszul_complex(&r, &[r.var(0), r.var(1), r.var(2)]).unwrap();
        let h = c.homology_lengths().unwrap();
        assert_eq!(h, vec![
            (-3, Count::Finite(0)),
            (-2, Count::Finite(0)),
            (-1, Count::Finite(0)),
            (0, Count::Finite(1)),
        ]);
        assert_eq!(c.euler_characteristic().unwrap(), 1);
    }

    #[test]
    fn koszul_milnor_algebra_length() {
        // Kosz(k x^{k-1}, y, z, w) has homology of length k-1 in degree 0
        let r = ring(&["x", "y", "z", "w"]);
        for k in [2u32, 3, 5] {
            let f = r.parse(&format!("{}*x^{}", k, k - 1)).unwrap();
            let c = koszul_complex(&r, &[f, r.var(1), r.var(2), r.var(3)]).unwrap();
            let h = c.homology_lengths().unwrap();
            for (deg, len) in &h {
                if *deg == 0 {
                    assert_eq!(*len, Count::Finite((k - 1) as u64));
                } else {
                    assert_eq!(*len, Count::Finite(0), "degree {} not exact for k={}", deg, k);
                }
            }
            assert_eq!(c.euler_characteristic().unwrap(), (k - 1) as i64);
        }
    }

    #[test]
    fn tensor_of_koszuls_matches_combined() {
        let r = ring(&["x", "y"]);
        let cx = koszul_complex(&r, &[r.var(0)]).unwrap();
        let cy = koszul_complex(&r, &[r.var(1)]).unwrap();
        let t = cx.tensor(&cy).unwrap();
        assert_eq!(t.ranks, vec![1, 2, 1]);
        let h = t.homology_lengths().unwrap();
        assert_eq!(h.last().unwrap().1, Count::Finite(1));
        assert!(h.iter().take(2).all(|(_, l)| *l == Count::Finite(0)));
        // x^2 tensor y^3: length 6 in degree 0
        let c2 = koszul_complex(&r, &[r.parse("x^2").unwrap()]).unwrap();
        let c3 = koszul_complex(&r, &[r.parse("y^3").unwrap()]).unwrap();
        let t2 = c2.tensor(&c3).unwrap();
        let h2 = t2.homology_lengths().unwrap();
        assert_eq!(h2, vec![(-2, Count::Finite(0)), (-1, Count::Finite(0)), (0, Count::Finite(6))]);
    }

    #[test]
    fn tensor_with_zero_is_zero() {
        let r = ring(&["x"]);
        let c = koszul_complex(&r, &[r.var(0)]).unwrap();
        let z = FreeComplex::zero(&r);
        assert!(c.tensor(&z).unwrap().is_zero_complex());
    }

    #[test]
    fn prune_two_term_identity() {
        let r = ring(&["x"]);
        let d = PolyMatrix::from_rows(&r, vec![vec![r.one()]]).unwrap();
        let c = FreeComplex::new(&r, -1, vec![1, 1], vec![d]).unwrap();
        let p = c.prune_units();
        assert!(p.is_zero_complex());
    }

    #[test]
    fn prune_preserves_homology() {
        // R -> R^2 -> R with d0 = (1, x)^T, d1 = (x, -1): exact
        let r = ring(&["x"]);
        let d0 = PolyMatrix::from_rows(&r, vec![vec![r.one()], vec![r.var(0)]]).unwrap();
        let d1 = PolyMatrix::from_rows(&r, vec![vec![r.var(0), r.one().neg()]]).unwrap();
        let c = FreeComplex::new(&r, -2, vec![1, 2, 1], vec![d0, d1]).unwrap();
        let before = c.homology_lengths().unwrap();
        let p = c.prune_units();
        assert!(p.total_rank() < c.total_rank());
        assert!(before.iter().all(|(_, l)| *l == Count::Finite(0)));
        assert!(p.is_zero_complex());
    }

    #[test]
    fn zero_differential_infinite_homology() {
        let r = ring(&["x"]);
        let d = PolyMatrix::zeros(&r, 3, 2);
        let c = FreeComplex::new(&r, 0, vec![2, 3], vec![d]).unwrap();
        let h = c.homology_lengths().unwrap();
        assert_eq!(h, vec![(0, Count::Infinite), (1, Count::Infinite)]);
        assert!(c.euler_characteristic().is_err());
    }

    #[test]
    fn serialization_roundtrip() {
        let r = ring(&["x", "y"]);
        let c = koszul_complex(&r, &[r.var(0), r.parse("x + y^2").unwrap()]).unwrap();
        let text = c.to_text();
        let back = FreeComplex::parse_text(&text).unwrap();
        assert_eq!(back.ranks, c.ranks);
        assert_eq!(back.min_deg, c.min_deg);
        for (a, b) in back.diffs.iter().zip(c.diffs.iter()) {
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    assert_eq!(a.get(i, j).to_string(), b.get(i, j).to_string());
                }
            }
        }
    }
}
