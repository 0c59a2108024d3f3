//! Star-products on polynomial symbols: the explicit construction, the
//! composition route, and the identities a star-product is tested against.

pub mod coeffs;
mod equivalence;
mod explicit;
mod hochschild;
mod pair;
pub mod residuals;
pub mod solver;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{lift_lie, moment, VectorField};
use crate::quantization::Quantizer;
use crate::scalar::Scalar;
use crate::symbol::{EulerMode, SymbolPoly};

pub use coeffs::{coeff_b, weight_coefficient, CoeffKey, CoeffRow, CoeffSource, CoeffTable};
pub use equivalence::TransformedStar;
pub use explicit::{star_explicit, star_via_pairs, star_with};
pub use hochschild::{hochschild_delta, Cochain};
pub use pair::{Bidiff, PairSymbol};

/// A bilinear product on symbols in a fixed dimension.
pub trait StarProduct: Send + Sync {
    fn dim(&self) -> usize;
    fn star(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly>;
}

/// Star-product from explicit coefficients; [`ExplicitStar::canonical`] uses
/// the closed-form table.
#[derive(Clone)]
pub struct ExplicitStar {
    n: usize,
    source: Arc<dyn CoeffSource + Send>,
}

impl ExplicitStar {
    pub fn canonical(n: usize) -> Self {
        ExplicitStar {
            n,
            source: Arc::new(|k: &CoeffKey| CoeffTable::global().get(k)),
        }
    }

    pub fn with_source(n: usize, source: Arc<dyn CoeffSource + Send>) -> Self {
        ExplicitStar { n, source }
    }
}

impl StarProduct for ExplicitStar {
    fn dim(&self) -> usize {
        self.n
    }

    fn star(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
        if f.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, f.dim()));
        }
        star_with(f, g, self.source.as_ref())
    }
}

/// `Q_λ⁻¹(Q_λ F ∘ Q_λ G)`; a star-product exactly when `λ = 1/2`.
pub struct QuantStar {
    quantizer: Quantizer,
}

impl QuantStar {
    pub fn new(n: usize, lambda: Scalar) -> Self {
        QuantStar {
            quantizer: Quantizer::new(n, lambda),
        }
    }

    pub fn canonical(n: usize) -> Self {
        QuantStar::new(n, Scalar::new(1, 2))
    }

    pub fn quantizer(&self) -> &Quantizer {
        &self.quantizer
    }
}

impl StarProduct for QuantStar {
    fn dim(&self) -> usize {
        self.quantizer.dim()
    }

    fn star(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
        self.quantizer.star(f, g)
    }
}

/// `(F⋆G − G⋆F)/h`.
pub fn star_commutator(
    f: &SymbolPoly,
    g: &SymbolPoly,
    star: &dyn StarProduct,
) -> Result<SymbolPoly> {
    let num = &star.star(f, g)? - &star.star(g, f)?;
    num.divide_nu().ok_or(Error::NotDivisibleByNu)
}

/// `(F⋆G)⋆H − F⋆(G⋆H)`.
pub fn associativity_defect(
    star: &dyn StarProduct,
    f: &SymbolPoly,
    g: &SymbolPoly,
    h: &SymbolPoly,
) -> Result<SymbolPoly> {
    let lhs = star.star(&star.star(f, g)?, h)?;
    let rhs = star.star(f, &star.star(g, h)?)?;
    Ok(&lhs - &rhs)
}

/// `L_X(F⋆G) − L_X F ⋆ G − F ⋆ L_X G`.
pub fn invariance_defect(
    star: &dyn StarProduct,
    x: &VectorField,
    f: &SymbolPoly,
    g: &SymbolPoly,
) -> Result<SymbolPoly> {
    let lhs = lift_lie(x, &star.star(f, g)?)?;
    let a = star.star(&lift_lie(x, f)?, g)?;
    let b = star.star(f, &lift_lie(x, g)?)?;
    Ok(&(&lhs - &a) - &b)
}

/// `J_X⋆F − F⋆J_X − h{J_X, F}`.
pub fn strong_invariance_defect(
    star: &dyn StarProduct,
    x: &VectorField,
    f: &SymbolPoly,
) -> Result<SymbolPoly> {
    let j = moment(x);
    let comm = &star.star(&j, f)? - &star.star(f, &j)?;
    Ok(&comm - &j.poisson(f)?.shift_nu(1))
}

/// `J_X⋆J_Y − J_Y⋆J_X − h J_{[X,Y]}`.
pub fn covariance_defect(
    star: &dyn StarProduct,
    x: &VectorField,
    y: &VectorField,
) -> Result<SymbolPoly> {
    let (jx, jy) = (moment(x), moment(y));
    let comm = &star.star(&jx, &jy)? - &star.star(&jy, &jx)?;
    Ok(&comm - &moment(&x.bracket(y)?).shift_nu(1))
}

/// `conj(F⋆G) − conj(G)⋆conj(F)` with `conj: h ↦ −h`.
pub fn symmetry_defect(
    star: &dyn StarProduct,
    f: &SymbolPoly,
    g: &SymbolPoly,
) -> Result<SymbolPoly> {
    Ok(&star.star(f, g)?.conj() - &star.star(&g.conj(), &f.conj())?)
}

/// `Ê(F⋆G) − ÊF⋆G − F⋆ÊG`.
pub fn homogeneity_defect(
    star: &dyn StarProduct,
    f: &SymbolPoly,
    g: &SymbolPoly,
) -> Result<SymbolPoly> {
    let e = |p: &SymbolPoly| p.euler(EulerMode::EHat);
    let lhs = e(&star.star(f, g)?);
    Ok(&(&lhs - &star.star(&e(f), g)?) - &star.star(f, &e(g))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generators, GeometryKind};
    use crate::random::{SymbolRng, SymbolShape};

    fn p(s: &str, n: usize) -> SymbolPoly {
        SymbolPoly::parse(s, n).unwrap()
    }

    #[test]
    fn commutator_examples() {
        let s = ExplicitStar::canonical(1);
        assert_eq!(star_commutator(&p("xi1", 1), &p("x1", 1), &s).unwrap(), SymbolPoly::one(1));
        let f = p("x1^2*xi1^3 + h*xi1", 1);
        assert!(star_commutator(&f, &f, &s).unwrap().is_zero());
        let fam = generators(GeometryKind::Projective { n: 2 });
        let s = ExplicitStar::canonical(2);
        for x in fam.fields() {
            for y in fam.fields() {
                let (jx, jy) = (moment(x), moment(y));
                assert_eq!(star_commutator(&jx, &jy, &s).unwrap(), jx.poisson(&jy).unwrap());
            }
        }
    }

    #[test]
    fn non_symmetric_product_is_detected() {
        // A product whose skew part has no factor of h.
        struct Skew;
        impl StarProduct for Skew {
            fn dim(&self) -> usize {
                1
            }
            fn star(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
                Ok(&(f * g) + &f.d_xi(0).try_mul(&g.d_x(0))?)
            }
        }
        assert_eq!(
            star_commutator(&p("xi1", 1), &p("x1", 1), &Skew),
            Err(Error::NotDivisibleByNu)
        );
    }

    #[test]
    fn routes_agree_on_samples() {
        let mut rng = SymbolRng::new(2);
        for n in 1..=2 {
            let e = ExplicitStar::canonical(n);
            let q = QuantStar::canonical(n);
            let shape = SymbolShape { n, x_max: 3, xi_max: 3, nu_max: 1, max_terms: 3 };
            for _ in 0..10 {
                let f = rng.symbol(&shape);
                let g = rng.symbol(&shape);
                assert_eq!(e.star(&f, &g).unwrap(), q.star(&f, &g).unwrap());
            }
        }
    }

    #[test]
    fn quant_star_off_half_breaks_symmetry() {
        // In one dimension every λ happens to give a symmetric product.
        let f = p("x1^2*x2*xi1 + x2*xi1*xi2^2", 2);
        let g = p("x1*x2^2*xi1^2*xi2 + x1*xi2", 2);
        let first = |q: &QuantStar, a: &SymbolPoly, b: &SymbolPoly| q.star(a, b).unwrap().nu_coefficient(1);
        let q = QuantStar::new(2, Scalar::new(1, 3));
        assert!(!symmetry_defect(&q, &f, &g).unwrap().is_zero());
        assert!(!(&first(&q, &f, &g) + &first(&q, &g, &f)).is_zero());
        let q = QuantStar::canonical(2);
        assert!(symmetry_defect(&q, &f, &g).unwrap().is_zero());
        assert_eq!(first(&q, &f, &g), f.poisson(&g).unwrap().scale(&Scalar::new(1, 2)));
    }
}
