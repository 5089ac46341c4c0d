//! Matrices of polynomials: Jacobians, minor ideals, complex differentials.

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};
use std::collections::BTreeMap;
use std::collections::HashMap;

/// Entry storage switches to a sparse map when fewer than a quarter of the
/// entries are nonzero.
#[derive(Clone, Debug, PartialEq)]
enum Entries {
    Dense(Vec<Poly>),
    Sparse(BTreeMap<(usize, usize), Poly>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    ring: PolyRing,
    rows: usize,
    cols: usize,
    entries: Entries,
}

impl PolyMatrix {
    pub fn zeros(ring: &PolyRing, rows: usize, cols: usize) -> Self {
        PolyMatrix { ring: ring.clone(), rows, cols, entries: Entries::Sparse(BTreeMap::new()) }
    }

    pub fn identity(ring: &PolyRing, n: usize) -> Self {
        let mut m = PolyMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: &PolyRing, rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        for row in &rows {
            if row.len() != c {
                return Err(Error::validation("ragged matrix rows"));
            }
        }
        let mut m = PolyMatrix::zeros(ring, r, c);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, p) in row.into_iter().enumerate() {
                m.set(i, j, p);
            }
        }
        m.normalize_storage();
        Ok(m)
    }

    pub fn from_fn(ring: &PolyRing, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut m = PolyMatrix::zeros(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m.normalize_storage();
        m
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Poly {
        assert!(i < self.rows && j < self.cols);
        match &self.entries {
            Entries::Dense(v) => v[i * self.cols + j].clone(),
            Entries::Sparse(map) => map.get(&(i, j)).cloned().unwrap_or_else(|| self.ring.zero()),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        assert!(i < self.rows && j < self.cols);
        match &mut self.entries {
            Entries::Dense(v) => v[i * self.cols + j] = p,
            Entries::Sparse(map) => {
                if p.is_zero() {
                    map.remove(&(i, j));
                } else {
                    map.insert((i, j), p);
                }
            }
        }
    }

    fn normalize_storage(&mut self) {
        let total = self.rows * self.cols;
        if total == 0 {
            return;
        }
        let nnz = self.nnz();
        let want_dense = nnz * 4 >= total;
        match (&self.entries, want_dense) {
            (Entries::Sparse(map), true) => {
                let mut v = vec![self.ring.zero(); total];
                for (&(i, j), p) in map {
                    v[i * self.cols + j] = p.clone();
                }
                self.entries = Entries::Dense(v);
            }
            (Entries::Dense(v), false) => {
                let mut map = BTreeMap::new();
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        let p = &v[i * self.cols + j];
                        if !p.is_zero() {
                            map.insert((i, j), p.clone());
                        }
                    }
                }
                self.entries = Entries::Sparse(map);
            }
            _ => {}
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.entries {
            Entries::Dense(v) => v.iter().filter(|p| !p.is_zero()).count(),
            Entries::Sparse(map) => map.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn iter_nonzero(&self) -> Vec<(usize, usize, Poly)> {
        let mut out = Vec::with_capacity(self.nnz());
        match &self.entries {
            Entries::Dense(v) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        let p = &v[i * self.cols + j];
                        if !p.is_zero() {
                            out.push((i, j, p.clone()));
                        }
                    }
                }
            }
            Entries::Sparse(map) => {
                for (&(i, j), p) in map {
                    out.push((i, j, p.clone()));
                }
            }
        }
        out
    }

    pub fn row(&self, i: usize) -> Vec<Poly> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(&self.ring, self.cols, self.rows);
        for (i, j, p) in self.iter_nonzero() {
            m.set(j, i, p);
        }
        m.normalize_storage();
        m
    }

    /// Stack `other` below `self`.
    pub fn stack(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.cols {
            return Err(Error::validation("stacked matrices must share the column count"));
        }
        if !self.ring.same_data(&other.ring) {
            return Err(Error::RingMismatch("stacked matrices live in different rings".into()));
        }
        let mut m = PolyMatrix::zeros(&self.ring, self.rows + other.rows, self.cols);
        for (i, j, p) in self.iter_nonzero() {
            m.set(i, j, p);
        }
        for (i, j, p) in other.iter_nonzero() {
            m.set(self.rows + i, j, p);
        }
        m.normalize_storage();
        Ok(m)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::validation("matrix dimension mismatch in product"));
        }
        let mut m = PolyMatrix::zeros(&self.ring, self.rows, other.cols);
        // sparse x sparse accumulation
        let mut acc: HashMap<(usize, usize), Poly> = HashMap::new();
        let right = other.iter_nonzero();
        let mut right_by_row: HashMap<usize, Vec<(usize, Poly)>> = HashMap::new();
        for (k, j, p) in right {
            right_by_row.entry(k).or_default().push((j, p));
        }
        for (i, k, a) in self.iter_nonzero() {
            if let Some(rr) = right_by_row.get(&k) {
                for (j, b) in rr {
                    let prod = a.mul(b);
                    if prod.is_zero() {
                        continue;
                    }
                    acc.entry((i, *j))
                        .and_modify(|q| *q = q.add(&prod))
                        .or_insert(prod);
                }
            }
        }
        for ((i, j), p) in acc {
            if !p.is_zero() {
                m.set(i, j, p);
            }
        }
        m.normalize_storage();
        Ok(m)
    }

    /// Apply a ring map to every entry.
    pub fn map_entries(&self, target: &PolyRing, images: &[Poly]) -> Result<PolyMatrix> {
        let mut m = PolyMatrix::zeros(target, self.rows, self.cols);
        for (i, j, p) in self.iter_nonzero() {
            m.set(i, j, p.map_to(target, images)?);
        }
        m.normalize_storage();
        Ok(m)
    }

    pub fn map(&self, mut f: impl FnMut(&Poly) -> Poly) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(&self.ring, self.rows, self.cols);
        for (i, j, p) in self.iter_nonzero() {
            let q = f(&p);
            if !q.is_zero() {
                m.set(i, j, q);
            }
        }
        m.normalize_storage();
        m
    }

    /// Determinant by cofactor expansion; callers keep sizes small.
    pub fn det(&self) -> Result<Poly> {
        if self.rows != self.cols {
            return Err(Error::validation("determinant of a non-square matrix"));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        let mut memo = HashMap::new();
        Ok(self.det_sub(&idx, &idx, &mut memo))
    }

    fn det_sub(&self, rows: &[usize], cols: &[usize], memo: &mut HashMap<(u64, u64), Poly>) -> Poly {
        debug_assert_eq!(rows.len(), cols.len());
        if rows.is_empty() {
            return self.ring.one();
        }
        if rows.len() == 1 {
            return self.get(rows[0], cols[0]);
        }
        let key = (mask_of(rows), mask_of(cols));
        if let Some(p) = memo.get(&key) {
            return p.clone();
        }
        // expand along the row with the fewest nonzero entries
        let mut best_row = 0;
        let mut best_nz = usize::MAX;
        for (ri, &r) in rows.iter().enumerate() {
            let nz = cols.iter().filter(|&&c| !self.get(r, c).is_zero()).count();
            if nz < best_nz {
                best_nz = nz;
                best_row = ri;
            }
        }
        let r = rows[best_row];
        let sub_rows: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
        let mut acc = self.ring.zero();
        for (ci, &c) in cols.iter().enumerate() {
            let a = self.get(r, c);
            if a.is_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = self.det_sub(&sub_rows, &sub_cols, memo);
            let term = a.mul(&minor);
            if (best_row + ci) % 2 == 0 {
                acc = acc.add(&term);
            } else {
                acc = acc.sub(&term);
            }
        }
        memo.insert(key, acc.clone());
        acc
    }

    /// All `size` x `size` minors, rows and columns in lexicographic subset
    /// order; shared submatrix determinants are memoized across minors.
    pub fn minors(&self, size: usize) -> Result<Vec<Poly>> {
        if size > self.rows || size > self.cols {
            return Err(Error::validation(format!(
                "minor size {} exceeds a {}x{} matrix",
                size, self.rows, self.cols
            )));
        }
        let row_sets = subsets(self.rows, size);
        let col_sets = subsets(self.cols, size);
        let mut memo = HashMap::new();
        let mut out = Vec::with_capacity(row_sets.len() * col_sets.len());
        for rs in &row_sets {
            for cs in &col_sets {
                out.push(self.det_sub(rs, cs, &mut memo));
            }
        }
        Ok(out)
    }
}

fn mask_of(ix: &[usize]) -> u64 {
    let mut m = 0u64;
    for &i in ix {
        m |= 1u64 << i;
    }
    m
}

/// All size-`k` subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Jacobian matrix of a list of polynomials: row `i` is the gradient of
/// `fs[i]` with respect to every ring variable.
pub fn jacobian(ring: &PolyRing, fs: &[Poly]) -> PolyMatrix {
    PolyMatrix::from_fn(ring, fs.len(), ring.nvars(), |i, j| fs[i].derivative(j))
}

/// Row vector of the differential of a single function.
pub fn gradient_row(ring: &PolyRing, f: &Poly) -> PolyMatrix {
    jacobian(ring, std::slice::from_ref(f))
}

/// Ideal generators: all `size` minors of the Jacobian of `fs` stacked over
/// `extra_rows`.
pub fn jacobian_minors(ring: &PolyRing, fs: &[Poly], extra_rows: Option<&PolyMatrix>, size: usize) -> Result<Vec<Poly>> {
    let jac = jacobian(ring, fs);
    let stacked = match extra_rows {
        None => jac,
        Some(extra) => jac.stack(extra)?,
    };
    if size > stacked.rows() || size > stacked.cols() {
        return Err(Error::validation(format!(
            "minor size {} exceeds the {}x{} stacked Jacobian",
            size,
            stacked.rows(),
            stacked.cols()
        )));
    }
    let minors = stacked.minors(size)?;
    Ok(minors.into_iter().filter(|p| !p.is_zero()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonomialOrder;

    #[test]
    fn subsets_lex() {
        assert_eq!(subsets(4, 2), vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3]
        ]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn det_2x2() {
        let r = PolyRing::named(&["x", "y", "z", "w"], MonomialOrder::GrevLex);
        let m = PolyMatrix::from_rows(&r, vec![
            vec![r.var(0), r.var(1)],
            vec![r.var(2), r.var(3)],
        ])
        .unwrap();
        assert_eq!(m.det().unwrap(), r.parse("x*w - y*z").unwrap());
    }

    #[test]
    fn jacobian_minors_diagonal() {
        // fs = (x^2, y^3): the Jacobian is diagonal, the 2-minor is 6 x y^2
        let r = PolyRing::named(&["x", "y"], MonomialOrder::GrevLex);
        let fs = vec![r.parse("x^2").unwrap(), r.parse("y^3").unwrap()];
        let minors = jacobian_minors(&r, &fs, None, 2).unwrap();
        assert_eq!(minors, vec![r.parse("6*x*y^2").unwrap()]);
    }

    #[test]
    fn jacobian_minors_single() {
        let r = PolyRing::named(&["x"], MonomialOrder::GrevLex);
        let minors = jacobian_minors(&r, &[r.var(0)], None, 1).unwrap();
        assert_eq!(minors, vec![r.one()]);
    }

    #[test]
    fn jacobian_minors_with_extra_row() {
        // fs = (xy - zw), extra row = dl for l = x+y+z+w
        let r = PolyRing::named(&["x", "y", "z", "w"], MonomialOrder::GrevLex);
        let f = r.parse("x*y - z*w").unwrap();
        let l = r.parse("x + y + z + w").unwrap();
        let dl = gradient_row(&r, &l);
        let minors = jacobian_minors(&r, &[f], Some(&dl), 2).unwrap();
        // hand expansion of the six 2-minors of [[y, x, -w, -z], [1,1,1,1]]
        let expected: Vec<Poly> = ["y - x", "y + w", "y + z", "x + w", "x + z", "-w + z"]
            .iter()
            .map(|s| r.parse(s).unwrap())
            .collect();
        assert_eq!(minors, expected);
    }

    #[test]
    fn matrix_product_and_stack() {
        let r = PolyRing::named(&["x", "y"], MonomialOrder::GrevLex);
        let a = PolyMatrix::from_rows(&r, vec![vec![r.var(0), r.var(1)]]).unwrap();
        let b = PolyMatrix::from_rows(&r, vec![vec![r.var(1)], vec![r.var(0).neg()]]).unwrap();
        let p = a.mul(&b).unwrap();
        assert!(p.get(0, 0).is_zero());
        let s = a.stack(&a).unwrap();
        assert_eq!(s.rows(), 2);
        assert_eq!(s.get(1, 1), r.var(1));
    }
}
