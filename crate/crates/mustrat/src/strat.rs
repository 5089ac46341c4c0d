//! Stratifications of an affine germ: strata closures as ideals plus
//! dimension and smoothness metadata. Whitney regularity of the input is the
//! caller's contract and is not verified here.

use crate::error::{Error, Result};
use crate::gb::Ideal;
use crate::poly::{Poly, PolyRing};

#[derive(Clone, Debug)]
pub struct Stratum {
    pub name: String,
    pub closure: Ideal,
    pub dim: i64,
    pub is_smooth_closure: bool,
    pub is_hypersurface_closure: bool,
    pub is_origin: bool,
}

#[derive(Clone, Debug)]
pub struct Stratification {
    pub ring: PolyRing,
    pub strata: Vec<Stratum>,
}

impl Stratification {
    pub fn new(ring: &PolyRing, strata: Vec<Stratum>) -> Result<Self> {
        let s = Stratification { ring: ring.clone(), strata };
        s.validate()?;
        Ok(s)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ring.nvars()
    }

    pub fn validate(&self) -> Result<()> {
        if self.strata.is_empty() {
            return Err(Error::validation("empty strata list"));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &self.strata {
            if !seen.insert(s.name.clone()) {
                return Err(Error::validation(format!("duplicate stratum name '{}'", s.name)));
            }
            if s.is_origin {
                if s.dim != 0 {
                    return Err(Error::validation(format!("origin stratum '{}' must have dimension 0", s.name)));
                }
                let maximal = Ideal::new(&self.ring, (0..self.ring.nvars()).map(|i| self.ring.var(i)).collect());
                if !s.closure.equals(&maximal)? {
                    return Err(Error::validation(format!(
                        "origin stratum '{}' must have the maximal ideal as closure",
                        s.name
                    )));
                }
            }
            let dim = s.closure.local_dimension()?;
            if dim != s.dim {
                return Err(Error::validation(format!(
                    "stratum '{}' declares dimension {} but the closure has local dimension {}",
                    s.name, s.dim, dim
                )));
            }
        }
        Ok(())
    }

    pub fn stratum(&self, name: &str) -> Result<&Stratum> {
        self.strata
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::validation(format!("unknown stratum '{}'", name)))
    }

    /// Strata whose closure sits inside the closure of `alpha` with strictly
    /// smaller dimension (the boundary strata relevant for saturation).
    pub fn smaller_strata(&self, alpha: &str) -> Result<Vec<&Stratum>> {
        let a = self.stratum(alpha)?;
        let mut out = Vec::new();
        for s in &self.strata {
            if s.name == a.name || s.dim >= a.dim {
                continue;
            }
            // closure containment: I_alpha inside I_s
            if s.closure.contains_ideal(&a.closure)? {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Ideal of the singular locus of the closure of `alpha` (Jacobian
    /// criterion; the unit ideal for a smooth closure).
    pub fn singular_locus_ideal(&self, alpha: &str) -> Result<Ideal> {
        let a = self.stratum(alpha)?;
        let gens = a.closure.gens();
        let n = self.ring.nvars() as i64;
        let codim = (n - a.dim) as usize;
        if gens.is_empty() || codim == 0 {
            return Ok(Ideal::new(&self.ring, vec![self.ring.one()]));
        }
        if codim > gens.len() {
            // not a set-theoretic complete intersection presentation; the
            // Jacobian criterion still applies with all codim-minors
            return Err(Error::validation(format!(
                "stratum '{}' has codimension {} but only {} closure generators",
                a.name,
                codim,
                gens.len()
            )));
        }
        let minors = crate::matrix::jacobian_minors(&self.ring, gens, None, codim)?;
        Ok(a.closure.plus_polys(&minors))
    }

    /// Slice every closure by extra equations (the complete-intersection
    /// reduction); dimensions are recomputed and strata that become empty
    /// germs are dropped.
    pub fn slice(&self, cuts: &[Poly]) -> Result<Stratification> {
        let mut strata = Vec::new();
        for s in &self.strata {
            let closure = if s.is_origin { s.closure.clone() } else { s.closure.plus_polys(cuts) };
            let dim = closure.local_dimension()?;
            if dim < 0 {
                continue;
            }
            strata.push(Stratum {
                name: s.name.clone(),
                closure,
                dim,
                is_smooth_closure: false,
                is_hypersurface_closure: false,
                is_origin: s.is_origin,
            });
        }
        if strata.is_empty() {
            return Err(Error::validation("slicing produced an empty stratification"));
        }
        Ok(Stratification { ring: self.ring.clone(), strata })
    }

    pub fn has_origin_stratum(&self) -> bool {
        self.strata.iter().any(|s| s.is_origin)
    }
}

/// Stratifications used across the tests and bundled problems: rank
/// stratifications of small determinantal varieties.
pub mod examples {
    use super::*;
    use crate::poly::MonomialOrder;

    /// Symmetric 2x2 matrices of rank <= 1 in C^3 = (x, y, z) with
    /// det = xy - z^2; strata: V1 (rank one) and the origin.
    pub fn sym2x2(order: MonomialOrder) -> Stratification {
        let ring = PolyRing::named(&["x", "y", "z"], order);
        let det = ring.parse("x*y - z^2").unwrap();
        let v1 = Stratum {
            name: "V1".into(),
            closure: Ideal::new(&ring, vec![det]),
            dim: 2,
            is_smooth_closure: false,
            is_hypersurface_closure: true,
            is_origin: false,
        };
        let v0 = Stratum {
            name: "V0".into(),
            closure: Ideal::new(&ring, vec![ring.var(0), ring.var(1), ring.var(2)]),
            dim: 0,
            is_smooth_closure: false,
            is_hypersurface_closure: false,
            is_origin: true,
        };
        Stratification::new(&ring, vec![v1, v0]).unwrap()
    }

    /// Full 2x2 matrices of rank <= 1 in C^4 = (x, y, z, w) with
    /// det = xy - zw (matrix [[x, w], [z, y]]).
    pub fn full2x2(order: MonomialOrder) -> Stratification {
        let ring = PolyRing::named(&["x", "y", "z", "w"], order);
        let det = ring.parse("x*y - z*w").unwrap();
        let v1 = Stratum {
            name: "V1".into(),
            closure: Ideal::new(&ring, vec![det]),
            dim: 3,
            is_smooth_closure: false,
            is_hypersurface_closure: true,
            is_origin: false,
        };
        let v0 = Stratum {
            name: "V0".into(),
            closure: Ideal::new(&ring, (0..4).map(|i| ring.var(i)).collect()),
            dim: 0,
            is_smooth_closure: false,
            is_hypersurface_closure: false,
            is_origin: true,
        };
        Stratification::new(&ring, vec![v1, v0]).unwrap()
    }

    /// 2x3 matrices of rank <= 1 in C^6, matrix [[x, y, z], [u, v, w]].
    pub fn det2x3(order: MonomialOrder) -> Stratification {
        let ring = PolyRing::named(&["x", "y", "z", "u", "v", "w"], order);
        let m01 = ring.parse("x*v - y*u").unwrap();
        let m02 = ring.parse("x*w - z*u").unwrap();
        let m12 = ring.parse("y*w - z*v").unwrap();
        let v1 = Stratum {
            name: "V1".into(),
            closure: Ideal::new(&ring, vec![m01, m02, m12]),
            dim: 4,
            is_smooth_closure: false,
            is_hypersurface_closure: false,
            is_origin: false,
        };
        let v0 = Stratum {
            name: "V0".into(),
            closure: Ideal::new(&ring, (0..6).map(|i| ring.var(i)).collect()),
            dim: 0,
            is_smooth_closure: false,
            is_hypersurface_closure: false,
            is_origin: true,
        };
        Stratification::new(&ring, vec![v1, v0]).unwrap()
    }

    /// The smooth germ (C^n, 0) as a single open stratum plus the origin.
    pub fn smooth_ambient(vars: &[&str], order: MonomialOrder) -> Stratification {
        let ring = PolyRing::named(vars, order);
        let v = Stratum {
            name: "V".into(),
            closure: Ideal::new(&ring, vec![]),
            dim: vars.len() as i64,
            is_smooth_closure: true,
            is_hypersurface_closure: false,
            is_origin: false,
        };
        let v0 = Stratum {
            name: "V0".into(),
            closure: Ideal::new(&ring, (0..vars.len()).map(|i| ring.var(i)).collect()),
            dim: 0,
            is_smooth_closure: false,
            is_hypersurface_closure: false,
            is_origin: true,
        };
        Stratification::new(&ring, vec![v, v0]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonomialOrder::GrevLex;

    #[test]
    fn dimension_check_catches_mismatch() {
        let ring = PolyRing::named(&["x", "y"], GrevLex);
        let s = Stratum {
            name: "V".into(),
            closure: Ideal::new(&ring, vec![ring.var(0)]),
            dim: 2,
            is_smooth_closure: true,
            is_hypersurface_closure: true,
            is_origin: false,
        };
        assert!(Stratification::new(&ring, vec![s]).is_err());
    }

    #[test]
    fn sym2x2_valid_and_smaller_strata() {
        let s = examples::sym2x2(GrevLex);
        assert_eq!(s.ambient_dim(), 3);
        let smaller = s.smaller_strata("V1").unwrap();
        assert_eq!(smaller.len(), 1);
        assert_eq!(smaller[0].name, "V0");
        // the singular locus of the cone is supported at the origin
        let sing = s.singular_locus_ideal("V1").unwrap();
        assert_eq!(sing.colength_at_origin().unwrap(), crate::gb::Count::Finite(1));
    }

    #[test]
    fn origin_must_be_maximal_ideal() {
        let ring = PolyRing::named(&["x", "y"], GrevLex);
        let bad = Stratum {
            name: "V0".into(),
            closure: Ideal::new(&ring, vec![ring.var(0), ring.parse("y^2").unwrap()]),
            dim: 0,
            is_smooth_closure: false,
            is_hypersurface_closure: false,
            is_origin: true,
        };
        assert!(Stratification::new(&ring, vec![bad]).is_err());
    }

    #[test]
    fn slice_keeps_origin() {
        let s = examples::sym2x2(GrevLex);
        let cut = s.ring.parse("x + y").unwrap();
        let sliced = s.slice(&[cut]).unwrap();
        assert!(sliced.strata.iter().any(|st| st.is_origin));
        let v1 = sliced.stratum("V1").unwrap();
        assert_eq!(v1.dim, 1);
    }
}
