//! The topological route made algebraic: relative polar curves and their
//! multiplicities, the thimble-number difference, the complete-intersection
//! sum, and the independent Morsification point count.

use crate::error::{Error, Result};
use crate::gb::{saturate, Count, Ideal};
use crate::matrix::{gradient_row, jacobian};
use crate::poly::{rat, Poly, PolyRing, Rat};
use crate::strat::Stratification;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Records how "sufficiently general" was operationalized for one result.
#[derive(Clone, Debug, Default)]
pub struct GenericityCertificate {
    pub seed: u64,
    pub draws_used: usize,
    pub checks: Vec<(String, bool)>,
}

impl GenericityCertificate {
    pub fn check(&mut self, name: &str, passed: bool) {
        self.checks.push((name.to_string(), passed));
    }
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|(_, p)| *p)
    }
}

#[derive(Clone, Debug)]
pub struct PolarCurve {
    pub stratum: String,
    pub ideal: Ideal,
    pub f_used: Vec<Poly>,
    pub l_used: Vec<Poly>,
    pub certified: bool,
    /// Local dimension after saturation; -1 means the curve is empty near 0.
    pub local_dim: i64,
}

const MAX_DRAWS: usize = 8;

/// Deterministic linear forms with integer coefficients in `[-H, H]`,
/// `H = 10` doubling every two failed attempts. The same seed always yields
/// the same sequence of draws.
pub fn choose_generic_forms(ring: &PolyRing, how_many: usize, seed: u64, attempt: usize) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ring.nvars();
    let mut out = Vec::new();
    for a in 0..=attempt {
        let h: i64 = 10i64 << (a / 2).min(20);
        out.clear();
        for _ in 0..how_many {
            loop {
                let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-h..=h)).collect();
                if coeffs.iter().any(|&c| c != 0) {
                    let mut form = ring.zero();
                    for (i, &c) in coeffs.iter().enumerate() {
                        if c != 0 {
                            form = form.add(&ring.var(i).scale(&rat(c, 1)));
                        }
                    }
                    out.push(form);
                    break;
                }
            }
        }
    }
    out
}

/// The relative polar curve of `(f, l)` on a stratum: the saturated ideal of
/// the locus where `df` and `dl` become dependent on the stratum's tangent
/// spaces. Saturation removes the singular locus of the closure and the
/// smaller strata.
pub fn polar_ideal(strat: &Stratification, alpha: &str, f: &Poly, l: &Poly) -> Result<PolarCurve> {
    let s = strat.stratum(alpha)?;
    if s.dim < 1 {
        return Err(Error::validation(format!("polar curve needs dim >= 1 on stratum '{}'", alpha)));
    }
    let ring = &strat.ring;
    let n = ring.nvars() as i64;
    let size = (n - s.dim + 2) as usize;
    let df = gradient_row(ring, f);
    let dl = gradient_row(ring, l);
    let jac = jacobian(ring, s.closure.gens());
    let stacked = jac.stack(&df)?.stack(&dl)?;
    let minors = stacked.minors(size)?;
    let raw = s.closure.plus_polys(&minors.into_iter().filter(|m| !m.is_zero()).collect::<Vec<_>>());
    let mut cur = raw;
    let sing = strat.singular_locus_ideal(alpha)?;
    if !sing.is_unit_ideal()? {
        cur = saturate(&cur, &sing)?;
    }
    for smaller in strat.smaller_strata(alpha)? {
        cur = saturate(&cur, &smaller.closure)?;
    }
    let local_dim = cur.local_dimension()?;
    let certified = local_dim == 1 || local_dim == -1;
    Ok(PolarCurve {
        stratum: alpha.to_string(),
        ideal: cur,
        f_used: vec![f.clone()],
        l_used: vec![l.clone()],
        certified,
        local_dim,
    })
}

/// Intersection multiplicity of a hypersurface `h = 0` with the curve at the
/// origin: the colength of the curve ideal plus `h`.
pub fn multiplicity_along(curve: &PolarCurve, h: &Poly) -> Result<u64> {
    if !curve.certified {
        return Err(Error::engine(format!(
            "polar curve on '{}' is not certified (local dimension {})",
            curve.stratum, curve.local_dim
        )));
    }
    if curve.local_dim == -1 {
        return Ok(0);
    }
    let cut = curve.ideal.plus_polys(std::slice::from_ref(h));
    match cut.colength_at_origin()? {
        Count::Finite(m) => Ok(m),
        Count::Infinite => Err(Error::engine(format!(
            "infinite multiplicity along '{}' on the polar curve of '{}' (curve decertified)",
            h, curve.stratum
        ))),
    }
}

/// Thimble number of a single function on a stratum: the number of critical
/// points of `l` on the Milnor fiber of `f` minus the number of critical
/// points of `f` on the Milnor fiber of `l`, both read off the polar curve.
fn mu_single(strat: &Stratification, alpha: &str, f: &Poly, l: &Poly, cert: &mut GenericityCertificate) -> Result<Option<i64>> {
    let curve = polar_ideal(strat, alpha, f, l)?;
    cert.check(&format!("polar dim 1 on {}", alpha), curve.certified);
    if !curve.certified {
        return Ok(None);
    }
    let along_f = multiplicity_along(&curve, f);
    let along_l = multiplicity_along(&curve, l);
    match (along_f, along_l) {
        (Ok(mf), Ok(ml)) => {
            cert.check(&format!("finite multiplicities on {}", alpha), true);
            Ok(Some(mf as i64 - ml as i64))
        }
        _ => {
            cert.check(&format!("finite multiplicities on {}", alpha), false);
            Ok(None)
        }
    }
}

/// The stratified Milnor number of `f_list` on one stratum via the polar
/// route. For a single function this is the thimble-number difference; for
/// several components it is the sum over the sliced spaces of the
/// complete-intersection reduction. Returns 0 immediately when the stratum
/// dimension is below the number of components.
pub fn mu_polar(
    strat: &Stratification,
    alpha: &str,
    f_list: &[Poly],
    seed: u64,
) -> Result<(i64, GenericityCertificate)> {
    let k = f_list.len();
    if k == 0 {
        return Err(Error::validation("empty map"));
    }
    let s = strat.stratum(alpha)?;
    let mut cert = GenericityCertificate { seed, ..Default::default() };
    if s.dim < k as i64 {
        cert.check("dim below codomain rank, mu = 0", true);
        return Ok((0, cert));
    }
    let mut last_err: Option<Error> = None;
    for attempt in 0..MAX_DRAWS {
        let forms = choose_generic_forms(&strat.ring, k, seed, attempt);
        let mut trial_cert = GenericityCertificate { seed, draws_used: attempt + 1, ..Default::default() };
        match mu_polar_with_forms(strat, alpha, f_list, &forms, &mut trial_cert) {
            Ok(Some(mu)) => {
                return Ok((mu, trial_cert));
            }
            Ok(None) => {
                last_err = None;
            }
            Err(Error::NonIsolated(m)) => return Err(Error::NonIsolated(m)),
            Err(e) => {
                last_err = Some(e);
            }
        }
    }
    Err(Error::GenericityExhausted {
        attempts: MAX_DRAWS,
        msg: format!(
            "no passing draw for stratum '{}' ({}); the input likely has a non-isolated singularity",
            alpha,
            last_err.map(|e| e.to_string()).unwrap_or_else(|| "certification failed".into())
        ),
    })
}

/// One attempt of the polar computation with fixed linear forms.
pub fn mu_polar_with_forms(
    strat: &Stratification,
    alpha: &str,
    f_list: &[Poly],
    forms: &[Poly],
    cert: &mut GenericityCertificate,
) -> Result<Option<i64>> {
    let k = f_list.len();
    debug_assert!(forms.len() >= k);
    if k == 1 {
        return mu_single(strat, alpha, &f_list[0], &forms[0], cert);
    }
    // sum over j of the single-function mu of f_j on the sliced space
    // X cap {f_1 = ... = f_{j-1} = 0} cap {l_k = ... = l_{j+1} = 0}
    let mut total = 0i64;
    for j in 0..k {
        let mut cuts: Vec<Poly> = f_list[..j].to_vec();
        cuts.extend(forms[j + 1..k].iter().cloned());
        let sliced = strat.slice(&cuts)?;
        let expected_dim = strat.stratum(alpha)?.dim - (k as i64 - 1);
        let sliced_alpha = match sliced.stratum(alpha) {
            Ok(sa) => sa,
            Err(_) => {
                cert.check(&format!("slice j={} keeps stratum {}", j + 1, alpha), false);
                return Ok(None);
            }
        };
        let dim_ok = sliced_alpha.dim == expected_dim;
        cert.check(&format!("slice j={} dim {}", j + 1, expected_dim), dim_ok);
        if !dim_ok {
            return Ok(None);
        }
        if sliced_alpha.dim < 1 {
            // a zero-dimensional sliced stratum contributes nothing
            continue;
        }
        match mu_single(&sliced, alpha, &f_list[j], &forms[j], cert)? {
            Some(mu_j) => {
                cert.check(&format!("summand j={} nonnegative", j + 1), mu_j >= 0);
                total += mu_j;
            }
            None => return Ok(None),
        }
    }
    Ok(Some(total))
}

/// Morsification count: critical points (with scheme multiplicity) of
/// `f + t l` on the stratum near the origin, the origin's own contribution
/// excluded. Counts for `t` and `t/2` must agree; otherwise `t` is halved.
pub fn morsification_count(
    strat: &Stratification,
    alpha: &str,
    f: &Poly,
    l: &Poly,
    t: &Rat,
) -> Result<u64> {
    let mut t_cur = t.clone();
    let mut prev: Option<u64> = None;
    for _ in 0..6 {
        let count = morsification_count_at(strat, alpha, f, l, &t_cur)?;
        if prev == Some(count) {
            return Ok(count);
        }
        prev = Some(count);
        t_cur = &t_cur / rat(2, 1);
    }
    Err(Error::engine(format!(
        "Morsification count did not stabilize under t-halving on '{}' (t too large or degenerate l)",
        alpha
    )))
}

fn morsification_count_at(strat: &Stratification, alpha: &str, f: &Poly, l: &Poly, t: &Rat) -> Result<u64> {
    let s = strat.stratum(alpha)?;
    if s.dim < 1 {
        return Err(Error::validation("Morsification needs dim >= 1"));
    }
    let ring = &strat.ring;
    let n = ring.nvars() as i64;
    let ft = f.add(&l.scale(t));
    let size = (n - s.dim + 1) as usize;
    let dft = gradient_row(ring, &ft);
    let jac = jacobian(ring, s.closure.gens());
    let stacked = jac.stack(&dft)?;
    let minors: Vec<Poly> = stacked.minors(size)?.into_iter().filter(|m| !m.is_zero()).collect();
    let mut crit = s.closure.plus_polys(&minors);
    let sing = strat.singular_locus_ideal(alpha)?;
    if !sing.is_unit_ideal()? {
        crit = saturate(&crit, &sing)?;
    }
    for smaller in strat.smaller_strata(alpha)? {
        crit = saturate(&crit, &smaller.closure)?;
    }
    if strat.has_origin_stratum() {
        let maximal = Ideal::new(ring, (0..ring.nvars()).map(|i| ring.var(i)).collect());
        crit = saturate(&crit, &maximal)?;
    }
    // the critical points sit near but not at the origin, so the count is
    // the total affine colength of the saturated critical scheme
    match crit.affine_colength()? {
        Count::Finite(c) => Ok(c),
        Count::Infinite => Err(Error::NonIsolated(format!(
            "Morsification critical locus on '{}' is positive-dimensional",
            alpha
        ))),
    }
}

/// Morsification engine entry point: drawn generic form, count with the
/// t-halving guard, certificate records the draws.
pub fn mu_morsification(
    strat: &Stratification,
    alpha: &str,
    f_list: &[Poly],
    seed: u64,
    t: &Rat,
) -> Result<(i64, GenericityCertificate)> {
    let k = f_list.len();
    let s = strat.stratum(alpha)?;
    let mut cert = GenericityCertificate { seed, ..Default::default() };
    if s.dim < k as i64 {
        cert.check("dim below codomain rank, mu = 0", true);
        return Ok((0, cert));
    }
    let mut last_err: Option<Error> = None;
    for attempt in 0..MAX_DRAWS {
        let forms = choose_generic_forms(&strat.ring, k, seed, attempt);
        let mut trial = GenericityCertificate { seed, draws_used: attempt + 1, ..Default::default() };
        let result = (|| -> Result<i64> {
            if k == 1 {
                let c = morsification_count(strat, alpha, &f_list[0], &forms[0], t)?;
                trial.check(&format!("t-halving stable on {}", alpha), true);
                return Ok(c as i64);
            }
            let mut total = 0i64;
            for j in 0..k {
                let mut cuts: Vec<Poly> = f_list[..j].to_vec();
                cuts.extend(forms[j + 1..k].iter().cloned());
                let sliced = strat.slice(&cuts)?;
                let sliced_alpha = sliced.stratum(alpha)?;
                if sliced_alpha.dim < 1 {
                    continue;
                }
                let c = morsification_count(&sliced, alpha, &f_list[j], &forms[j], t)?;
                trial.check(&format!("t-halving stable on {} (j={})", alpha, j + 1), true);
                total += c as i64;
            }
            Ok(total)
        })();
        match result {
            Ok(mu) => return Ok((mu, trial)),
            Err(Error::NonIsolated(m)) => return Err(Error::NonIsolated(m)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::GenericityExhausted {
        attempts: MAX_DRAWS,
        msg: format!(
            "Morsification drew no passing form for '{}': {}",
            alpha,
            last_err.map(|e| e.to_string()).unwrap_or_default()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonomialOrder::GrevLex;
    use crate::strat::examples;

    #[test]
    fn generic_forms_deterministic() {
        let r = PolyRing::named(&["x", "y", "z"], GrevLex);
        let a = choose_generic_forms(&r, 2, 42, 0);
        let b = choose_generic_forms(&r, 2, 42, 0);
        assert_eq!(a, b);
        let c = choose_generic_forms(&r, 2, 43, 0);
        assert_ne!(a, c);
        // one variable: a nonzero multiple of x
        let r1 = PolyRing::named(&["x"], GrevLex);
        let f = choose_generic_forms(&r1, 1, 7, 0);
        assert!(!f[0].is_zero());
        assert_eq!(f[0].total_degree(), Some(1));
    }

    #[test]
    fn polar_smooth_plane_morse() {
        // X = C^2 smooth, f = x^2 + y^2, l = x: the polar curve is V(y)
        let s = examples::smooth_ambient(&["x", "y"], GrevLex);
        let f = s.ring.parse("x^2 + y^2").unwrap();
        let l = s.ring.var(0);
        let curve = polar_ideal(&s, "V", &f, &l).unwrap();
        assert!(curve.certified);
        assert!(curve.ideal.equals(&Ideal::parse(&s.ring, &["y"]).unwrap()).unwrap());
        assert_eq!(multiplicity_along(&curve, &l).unwrap(), 1);
        assert_eq!(multiplicity_along(&curve, &f).unwrap(), 2);
        // thimble difference = 1 = the Morse number
        let (mu, cert) = mu_polar(&s, "V", &[f], 1).unwrap();
        assert_eq!(mu, 1);
        assert!(cert.all_passed());
    }

    #[test]
    fn polar_monomial_curve_multiplicities() {
        // Gamma = V(y^2 - x^3) in C^2: along x -> 2, along y -> 3
        let s = examples::smooth_ambient(&["x", "y"], GrevLex);
        let curve = PolarCurve {
            stratum: "V".into(),
            ideal: Ideal::parse(&s.ring, &["y^2 - x^3"]).unwrap(),
            f_used: vec![],
            l_used: vec![],
            certified: true,
            local_dim: 1,
        };
        assert_eq!(multiplicity_along(&curve, &s.ring.var(0)).unwrap(), 2);
        assert_eq!(multiplicity_along(&curve, &s.ring.var(1)).unwrap(), 3);
    }

    #[test]
    fn sym2x2_mu_is_k_minus_one() {
        let s = examples::sym2x2(GrevLex);
        for k in 2u32..=4 {
            let f = s.ring.parse(&format!("y - x^{}", k)).unwrap();
            let (mu, _) = mu_polar(&s, "V1", &[f], 17).unwrap();
            assert_eq!(mu, (k - 1) as i64, "k = {}", k);
        }
    }

    #[test]
    fn sym2x2_polar_curve_hand_values() {
        // with l = x + y the dependency locus is the union of the two axes;
        // hand computation: colength along f is k+1, along l is 2
        let s = examples::sym2x2(GrevLex);
        let k = 3u32;
        let f = s.ring.parse(&format!("y - x^{}", k)).unwrap();
        let l = s.ring.parse("x + y").unwrap();
        let curve = polar_ideal(&s, "V1", &f, &l).unwrap();
        assert!(curve.certified);
        assert_eq!(multiplicity_along(&curve, &f).unwrap(), (k + 1) as u64);
        assert_eq!(multiplicity_along(&curve, &l).unwrap(), 2);
    }

    #[test]
    fn mu_seed_independent() {
        let s = examples::sym2x2(GrevLex);
        let f = s.ring.parse("y - x^3").unwrap();
        let mut values = Vec::new();
        for seed in [1u64, 2, 3] {
            let (mu, _) = mu_polar(&s, "V1", &[f.clone()], seed).unwrap();
            values.push(mu);
        }
        assert!(values.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(values[0], 2);
    }

    #[test]
    fn mu_scale_invariant() {
        let s = examples::sym2x2(GrevLex);
        let f = s.ring.parse("y - x^3").unwrap();
        let gscaled = f.scale(&rat(7, 3));
        let (a, _) = mu_polar(&s, "V1", &[f], 5).unwrap();
        let (b, _) = mu_polar(&s, "V1", &[gscaled], 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn morsification_matches_polar_sym2x2() {
        let s = examples::sym2x2(GrevLex);
        let t = rat(1, 64);
        for k in 2u32..=4 {
            let f = s.ring.parse(&format!("y - x^{}", k)).unwrap();
            // the paper's own Morsification l = x + y
            let l = s.ring.parse("x + y").unwrap();
            let c = morsification_count(&s, "V1", &f, &l, &t).unwrap();
            assert_eq!(c, (k - 1) as u64, "k = {}", k);
        }
    }

    #[test]
    fn morsification_line() {
        // X = C^1, f = x^2, l = x: one critical point
        let s = examples::smooth_ambient(&["x"], GrevLex);
        let f = s.ring.parse("x^2").unwrap();
        let l = s.ring.var(0);
        let c = morsification_count(&s, "V", &f, &l, &rat(1, 64)).unwrap();
        assert_eq!(c, 1);
    }

    #[test]
    fn morsification_generic_linear_zero() {
        // a generic linear function has no stratified Morse points on V1
        let s = examples::sym2x2(GrevLex);
        let f = s.ring.parse("x + 2*y + 3*z").unwrap();
        let l = s.ring.parse("5*x - y + z").unwrap();
        let c = morsification_count(&s, "V1", &f, &l, &rat(1, 64)).unwrap();
        assert_eq!(c, 0);
    }

    #[test]
    fn zero_when_dim_below_k() {
        let s = examples::sym2x2(GrevLex);
        // three components on a surface stratum: dim 2 < 3
        let fs = vec![s.ring.var(0), s.ring.var(1), s.ring.var(2)];
        let (mu, _) = mu_polar(&s, "V1", &fs, 3).unwrap();
        assert_eq!(mu, 0);
    }

    #[test]
    fn full2x2_complete_intersection() {
        // g = (z - w, y - x^k) on the full 2x2 determinant: mu = k - 1
        let s = examples::full2x2(GrevLex);
        for k in 2u32..=3 {
            let g1 = s.ring.parse("z - w").unwrap();
            let g2 = s.ring.parse(&format!("y - x^{}", k)).unwrap();
            let (mu, _) = mu_polar(&s, "V1", &[g1, g2], 11).unwrap();
            assert_eq!(mu, (k - 1) as i64, "k = {}", k);
        }
    }
}
