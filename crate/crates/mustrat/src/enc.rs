//! Eagon-Northcott complexes of a matrix, the stacked-matrix reduction, and
//! supporting basis bookkeeping.
//!
//! For a `k x n` matrix `A` (rows as covectors on `G = R^n`) the terms are
//! `R` in degree 0 and `S_{p-1} tensor wedge^{k+p-1} G` in degree `-p` for
//! `p = 1 .. n-k+1`. The degree-one map sends `1 tensor e_I` to the maximal
//! minor `det A_{.,I}`; higher maps contract one symmetric slot at a time.

use crate::complex::FreeComplex;
use crate::error::{Error, Result};
use crate::kosz::exterior_basis;
use crate::matrix::{subsets, PolyMatrix};
use crate::poly::{Poly, PolyRing};
use std::collections::HashMap;

/// Exponent vectors of total degree `d` in `k` slots, lexicographically
/// descending; the fixed basis order of the symmetric powers.
pub fn sym_basis(k: usize, d: usize) -> Vec<Vec<u16>> {
    fn rec(k: usize, d: usize, out: &mut Vec<Vec<u16>>, prefix: &mut Vec<u16>) {
        if k == 1 {
            prefix.push(d as u16);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=d).rev() {
            prefix.push(first as u16);
            rec(k - 1, d - first, out, prefix);
            prefix.pop();
        }
    }
    if k == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(k, d, &mut out, &mut Vec::new());
    out
}

/// The Eagon-Northcott complex of `A`; requires `k <= n`.
pub fn enc_complex(ring: &PolyRing, a: &PolyMatrix) -> Result<FreeComplex> {
    let k = a.rows();
    let n = a.cols();
    if k > n {
        return Err(Error::validation(format!("Eagon-Northcott needs k <= n, got {}x{}", k, n)));
    }
    if k == 0 {
        return Ok(FreeComplex::single(ring, 0, 1));
    }
    let p_max = n - k + 1;
    let rows: Vec<Vec<Poly>> = (0..k).map(|i| a.row(i)).collect();
    // bases per degree -p
    let mut term_basis: Vec<Vec<(Vec<u16>, Vec<usize>)>> = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        if p == 0 {
            term_basis.push(vec![(vec![], vec![])]);
            continue;
        }
        let syms = sym_basis(k, p - 1);
        let wedges = exterior_basis(n, k + p - 1);
        let mut basis = Vec::with_capacity(syms.len() * wedges.len());
        for s in &syms {
            for w in &wedges {
                basis.push((s.clone(), w.clone()));
            }
        }
        term_basis.push(basis);
    }
    let mut ranks: Vec<usize> = Vec::with_capacity(p_max + 1);
    for p in (0..=p_max).rev() {
        ranks.push(term_basis[p].len());
    }
    let mut diffs: Vec<PolyMatrix> = Vec::with_capacity(p_max);
    for p in (1..=p_max).rev() {
        let src = &term_basis[p];
        let dst = &term_basis[p - 1];
        let dst_pos: HashMap<&(Vec<u16>, Vec<usize>), usize> =
            dst.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut m = PolyMatrix::zeros(ring, dst.len(), src.len());
        if p == 1 {
            // 1 tensor e_I -> det A_{{1..k}, I}
            for (col, (_, subset)) in src.iter().enumerate() {
                let sub = PolyMatrix::from_fn(ring, k, k, |i, j| rows[i][subset[j]].clone());
                let d = sub.det()?;
                if !d.is_zero() {
                    m.set(0, col, d);
                }
            }
        } else {
            for (col, (alpha, subset)) in src.iter().enumerate() {
                for i in 0..k {
                    if alpha[i] == 0 {
                        continue;
                    }
                    let mut alpha2 = alpha.clone();
                    alpha2[i] -= 1;
                    // contract the wedge part against row i
                    for (kk, &j) in subset.iter().enumerate() {
                        let phi = &rows[i][j];
                        if phi.is_zero() {
                            continue;
                        }
                        let rest: Vec<usize> = subset.iter().copied().filter(|&x| x != j).collect();
                        let key = (alpha2.clone(), rest);
                        let row = dst_pos[&key];
                        let signed = if kk % 2 == 0 { phi.clone() } else { phi.neg() };
                        let cur = m.get(row, col);
                        m.set(row, col, cur.add(&signed));
                    }
                }
            }
        }
        diffs.push(m);
    }
    FreeComplex::new(ring, -(p_max as i64), ranks, diffs)
}

/// Stack `psi` over `phi`, take the Eagon-Northcott complex and prune; the
/// rows of `phi` must form a frame at the origin (some maximal minor is a
/// local unit). Models the complex of `psi` restricted to the kernel
/// subbundle of `phi`.
pub fn enc_stacked_reduce(ring: &PolyRing, psi: &PolyMatrix, phi: &PolyMatrix) -> Result<FreeComplex> {
    if phi.rows() == 0 {
        return Ok(enc_complex(ring, psi)?.prune_units());
    }
    let t = phi.rows();
    if t > phi.cols() {
        return Err(Error::validation("frame has more rows than columns"));
    }
    let mut has_unit_minor = false;
    for rs in subsets(phi.rows(), t) {
        for cs in subsets(phi.cols(), t) {
            let sub = PolyMatrix::from_fn(ring, t, t, |i, j| phi.get(rs[i], cs[j]));
            if sub.det()?.is_local_unit() {
                has_unit_minor = true;
                break;
            }
        }
    }
    if !has_unit_minor {
        return Err(Error::validation(
            "frame rows are degenerate at the origin (no unit maximal minor)",
        ));
    }
    let stacked = psi.stack(phi)?;
    Ok(enc_complex(ring, &stacked)?.prune_units())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kosz::koszul_complex;
    use crate::matrix::gradient_row;
    use crate::poly::MonomialOrder::GrevLex;

    #[test]
    fn sym_basis_order() {
        assert_eq!(sym_basis(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(sym_basis(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn single_row_is_koszul() {
        // term-by-term and map-by-map comparison
        let r = PolyRing::named(&["x", "y", "z"], GrevLex);
        let entries = vec![r.var(0), r.parse("y^2 + z").unwrap(), r.var(2)];
        let a = PolyMatrix::from_rows(&r, vec![entries.clone()]).unwrap();
        let e = enc_complex(&r, &a).unwrap();
        let k = koszul_complex(&r, &entries).unwrap();
        assert_eq!(e.ranks, k.ranks);
        assert_eq!(e.min_deg, k.min_deg);
        for (de, dk) in e.diffs.iter().zip(k.diffs.iter()) {
            for i in 0..de.rows() {
                for j in 0..de.cols() {
                    assert_eq!(de.get(i, j), dk.get(i, j));
                }
            }
        }
    }

    #[test]
    fn identity_frame_is_exact() {
        let r = PolyRing::named(&["x", "y"], GrevLex);
        let a = PolyMatrix::identity(&r, 2);
        let e = enc_complex(&r, &a).unwrap();
        assert!(e.prune_units().is_zero_complex());
    }

    #[test]
    fn square_matrix_two_term() {
        // A = [[x, y], [z, w]]: R <-det- R
        let r = PolyRing::named(&["x", "y", "z", "w"], GrevLex);
        let a = PolyMatrix::from_rows(&r, vec![
            vec![r.var(0), r.var(1)],
            vec![r.var(2), r.var(3)],
        ])
        .unwrap();
        let e = enc_complex(&r, &a).unwrap();
        assert_eq!(e.ranks, vec![1, 1]);
        let det = e.diffs[0].get(0, 0);
        assert_eq!(det, r.parse("x*w - y*z").unwrap());
    }

    #[test]
    fn enc_2x4_dd_zero_and_ranks() {
        let r = PolyRing::named(&["x", "y", "z", "w"], GrevLex);
        let a = PolyMatrix::from_rows(&r, vec![
            vec![r.var(0), r.var(1), r.var(2), r.var(3)],
            vec![r.var(3), r.var(0).neg(), r.parse("x + y").unwrap(), r.var(1)],
        ])
        .unwrap();
        let e = enc_complex(&r, &a).unwrap();
        // p = 0..3: ranks 1, C(4,2)=6, 2*C(4,3)=8, 3*C(4,4)=3
        assert_eq!(e.ranks, vec![3, 8, 6, 1]);
    }

    #[test]
    fn stacked_reduce_morse_point() {
        // psi = df for f = x^2 + y^2, empty frame: chi = 1
        let r = PolyRing::named(&["x", "y"], GrevLex);
        let f = r.parse("x^2 + y^2").unwrap();
        let psi = gradient_row(&r, &f);
        let phi = PolyMatrix::zeros(&r, 0, 2);
        let e = enc_stacked_reduce(&r, &psi, &phi).unwrap();
        assert_eq!(e.euler_characteristic().unwrap(), 1);
    }

    #[test]
    fn stacked_reduce_smooth_hypersurface_frame() {
        // psi = dl generic linear, phi = dg for g = x: frame everywhere
        let rr = PolyRing::named(&["x", "y"], GrevLex);
        let quotient = vec![rr.var(0)];
        let r = rr.with_quotient(quotient).unwrap();
        let l = rr.parse("2*x + 3*y").unwrap();
        let psi = gradient_row(&r, &l.embed(&r).unwrap());
        let g = rr.var(0).embed(&r).unwrap();
        let phi = gradient_row(&r, &g);
        let e = enc_stacked_reduce(&r, &psi, &phi).unwrap();
        assert_eq!(e.euler_characteristic().unwrap(), 0);
    }

    #[test]
    fn stacked_reduce_cusp_on_line() {
        // psi = d(y - x^3) on the smooth curve g = y: chi = colength <3x^2> = 2
        let rr = PolyRing::named(&["x", "y"], GrevLex);
        let r = rr.with_quotient(vec![rr.var(1)]).unwrap();
        let f = rr.parse("y - x^3").unwrap().embed(&r).unwrap();
        let psi = gradient_row(&r, &f);
        let g = rr.var(1).embed(&r).unwrap();
        let phi = gradient_row(&r, &g);
        let e = enc_stacked_reduce(&r, &psi, &phi).unwrap();
        assert_eq!(e.euler_characteristic().unwrap(), 2);
    }

    #[test]
    fn degenerate_frame_rejected() {
        let r = PolyRing::named(&["x", "y"], GrevLex);
        let psi = gradient_row(&r, &r.parse("x^2").unwrap());
        let phi = gradient_row(&r, &r.parse("x*y").unwrap());
        assert!(enc_stacked_reduce(&r, &psi, &phi).is_err());
    }
}
