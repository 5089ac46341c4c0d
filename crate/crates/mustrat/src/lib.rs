//! Exact computation of stratified Milnor numbers.
//!
//! The library computes the numbers `mu(alpha; f)` attached to a holomorphic
//! map germ with isolated stratified singularity on a stratified affine germ,
//! through three independent engines that cross-check each other:
//!
//! * a polar engine (relative polar curves and their multiplicities),
//! * a Morsification engine (critical point counts of a generic perturbation),
//! * a homological engine (Euler characteristics of Koszul/Eagon-Northcott
//!   complexes, pushed forward along a Nash modification for hypersurface
//!   strata closures).
//!
//! Everything is exact: coefficients are arbitrary-precision rationals and all
//! multiplicities are colengths of explicitly computed ideals.

pub mod cech;
pub mod complex;
pub mod enc;
pub mod error;
pub mod gb;
pub mod kosz;
pub mod legreuel;
pub mod matrix;
pub mod nash;
pub mod par;
pub mod polar;
pub mod poly;




pub mod strat;

pub use error::{Error, Result};
pub use gb::Ideal;
pub use matrix::PolyMatrix;
pub use poly::{MonomialOrder, Poly, PolyRing};
