//! Koszul complexes with the contraction differential.
//!
//! The complex of `Kosz(phi)` for `phi = sum phi_i eps_i` has terms `wedge^p G`
//! in cohomological degrees `-n..0` and differential
//! `e_I -> sum_k (-1)^{k+1} phi_{i_k} e_{I minus i_k}`.

use crate::complex::FreeComplex;
use crate::error::Result;
use crate::matrix::{subsets, PolyMatrix};
use crate::poly::{Poly, PolyRing};
use std::collections::HashMap;

/// All p-subsets of `0..n` in colex order, the fixed basis order of the
/// exterior powers.
pub fn exterior_basis(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut subs = subsets(n, p);
    subs.sort_by(|a, b| {
        // colex: compare largest elements first
        for (x, y) in a.iter().rev().zip(b.iter().rev()) {
            match x.cmp(y) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    subs
}

pub fn basis_positions(basis: &[Vec<usize>]) -> HashMap<Vec<usize>, usize> {
    basis.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()
}

/// Contraction matrix `wedge^p G -> wedge^{p-1} G` against a covector row.
pub fn contraction_matrix(ring: &PolyRing, covector: &[Poly], p: usize) -> PolyMatrix {
    let n = covector.len();
    let src = exterior_basis(n, p);
    let dst = exterior_basis(n, p - 1);
    let dst_pos = basis_positions(&dst);
    let mut m = PolyMatrix::zeros(ring, dst.len(), src.len());
    for (col, subset) in src.iter().enumerate() {
        for (k, &i) in subset.iter().enumerate() {
            let phi = &covector[i];
            if phi.is_zero() {
                continue;
            }
            let rest: Vec<usize> = subset.iter().copied().filter(|&x| x != i).collect();
            let row = dst_pos[&rest];
            let signed = if k % 2 == 0 { phi.clone() } else { phi.neg() };
            let cur = m.get(row, col);
            m.set(row, col, cur.add(&signed));
        }
    }
    m
}

/// The Koszul complex of a sequence of ring elements.
pub fn koszul_complex(ring: &PolyRing, entries: &[Poly]) -> Result<FreeComplex> {
    let n = entries.len();
    if n == 0 {
        return Ok(FreeComplex::single(ring, 0, 1));
    }
    let mut ranks = Vec::with_capacity(n + 1);
    for i in 0..=n {
        // degree -n + i has wedge power n - i
        ranks.push(binomial(n, n - i));
    }
    let mut diffs = Vec::with_capacity(n);
    for i in 0..n {
        let p = n - i;
        diffs.push(contraction_matrix(ring, entries, p));
    }
    FreeComplex::new(ring, -(n as i64), ranks, diffs)
}

/// Induced map `wedge^p (R^m) -> wedge^p (R^n)` of a module morphism given by
/// an `n x m` matrix; entries are the p-minors.
pub fn wedge_power_map(f: &PolyMatrix, p: usize) -> Result<PolyMatrix> {
    let n = f.rows();
    let m = f.cols();
    let src = exterior_basis(m, p);
    let dst = exterior_basis(n, p);
    let mut out = PolyMatrix::zeros(f.ring(), dst.len(), src.len());
    for (col, cs) in src.iter().enumerate() {
        for (row, rs) in dst.iter().enumerate() {
            let sub = PolyMatrix::from_fn(f.ring(), p, p, |i, j| f.get(rs[i], cs[j]));
            let d = sub.det()?;
            if !d.is_zero() {
                out.set(row, col, d);
            }
        }
    }
    Ok(out)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gb::Count;
    use crate::poly::MonomialOrder::GrevLex;

    #[test]
    fn colex_order_fixed() {
        assert_eq!(exterior_basis(4, 2), vec![
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![0, 3],
            vec![1, 3],
            vec![2, 3],
        ]);
    }

    #[test]
    fn koszul_two_variables_matrices() {
        let r = PolyRing::named(&["x", "y"], GrevLex);
        let c = koszul_complex(&r, &[r.var(0), r.var(1)]).unwrap();
        assert_eq!(c.ranks, vec![1, 2, 1]);
        assert_eq!(c.min_deg, -2);
        // d1 = [x y] in degree -1 -> 0
        let d1 = &c.diffs[1];
        assert_eq!(d1.get(0, 0), r.var(0));
        assert_eq!(d1.get(0, 1), r.var(1));
        // d2 : e_{01} -> x e_1 - y e_0
        let d2 = &c.diffs[0];
        assert_eq!(d2.get(0, 0), r.var(1).neg());
        assert_eq!(d2.get(1, 0), r.var(0));
    }

    #[test]
    fn koszul_zero_entries() {
        let r = PolyRing::named(&["x", "y"], GrevLex);
        let c = koszul_complex(&r, &[r.zero(), r.zero()]).unwrap();
        for d in &c.diffs {
            assert!(d.is_zero());
        }
    }

    #[test]
    fn koszul_milnor_example() {
        // entries (k x^{k-1}, y, z, w): H^0 has length k-1
        let r = PolyRing::named(&["x", "y", "z", "w"], GrevLex);
        let k = 4u32;
        let c = koszul_complex(
            &r,
            &[r.parse("4*x^3").unwrap(), r.var(1), r.var(2), r.var(3)],
        )
        .unwrap();
        assert_eq!(c.homology_length_at(0).unwrap(), Count::Finite((k - 1) as u64));
    }

    #[test]
    fn empty_koszul_is_ring() {
        let r = PolyRing::named(&["x"], GrevLex);
        let c = koszul_complex(&r, &[]).unwrap();
        assert_eq!(c.ranks, vec![1]);
        assert_eq!(c.min_deg, 0);
    }
}
