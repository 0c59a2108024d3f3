//! Equivalence transforms and reparametrizations of a star-product.

use std::sync::Arc;

use super::hochschild::Cochain;
use super::StarProduct;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symbol::SymbolPoly;

/// `F ⋆' G = Φ⁻¹(Φ(F) ⋆_μ Φ(G))` truncated at `h^order`, where
/// `Φ = Id + Σ h^j Φ_j` and `⋆_μ` replaces `h^r` by `μ(h)^r` in the
/// bidifferential expansion of `⋆`.
#[derive(Clone)]
pub struct TransformedStar {
    inner: Arc<dyn StarProduct>,
    phi: Vec<(u32, Cochain)>,
    mu: Vec<Scalar>,
    order: u32,
}

impl TransformedStar {
    /// `mu` lists the coefficients of `h, h², …`; the first must be 1.
    pub fn new(
        inner: Arc<dyn StarProduct>,
        phi: Vec<(u32, Cochain)>,
        mu: Vec<Scalar>,
        order: u32,
    ) -> Result<Self> {
        if let Some((j, _)) = phi.iter().find(|(j, _)| *j == 0) {
            return Err(Error::Config(format!("equivalence term at order {j}")));
        }
        if let Some((_, c)) = phi.iter().find(|(_, c)| c.arity() != 1) {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: c.arity(),
            });
        }
        if !matches!(mu.first(), Some(c) if c.is_one()) {
            return Err(Error::Config("reparametrization must start with h".into()));
        }
        Ok(TransformedStar {
            inner,
            phi,
            mu,
            order,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `Σ_j h^j Φ_j(F)`, the part of `Φ(F)` beyond `F`.
    fn phi_tail(&self, f: &SymbolPoly) -> Result<SymbolPoly> {
        let mut out = SymbolPoly::zero(f.dim());
        for (j, c) in &self.phi {
            if *j > self.order {
                continue;
            }
            out = out.try_add(&c.eval(&[&f.truncate_nu(self.order - j)])?.shift_nu(*j))?;
        }
        Ok(out.truncate_nu(self.order))
    }

    pub fn apply_phi(&self, f: &SymbolPoly) -> Result<SymbolPoly> {
        f.truncate_nu(self.order).try_add(&self.phi_tail(f)?)
    }

    /// `Φ⁻¹` as the fixed point of `X = A − Σ h^j Φ_j(X)`; each pass fixes one more order.
    pub fn apply_phi_inverse(&self, a: &SymbolPoly) -> Result<SymbolPoly> {
        let a = a.truncate_nu(self.order);
        let mut x = a.clone();
        for _ in 0..=self.order {
            let next = a.try_sub(&self.phi_tail(&x)?)?;
            if next == x {
                break;
            }
            x = next;
        }
        Ok(x)
    }

    /// Coefficients of `μ(h)^r` up to `h^order`.
    fn mu_power(&self, r: u32) -> Vec<Scalar> {
        let len = self.order as usize + 1;
        let mut acc = vec![Scalar::zero(); len];
        acc[0] = Scalar::one();
        for _ in 0..r {
            let mut next = vec![Scalar::zero(); len];
            for (i, a) in acc.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, m) in self.mu.iter().enumerate() {
                    let d = i + j + 1;
                    if d < len {
                        next[d] += &(a * m);
                    }
                }
            }
            acc = next;
        }
        acc
    }

    /// `⋆_μ`, applied to the `h`-free components and extended `h`-bilinearly.
    fn star_mu(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
        let n = f.dim();
        let mut out = SymbolPoly::zero(n);
        for p in 0..=f.max_nu().min(self.order) {
            let fp = f.nu_coefficient(p);
            if fp.is_zero() {
                continue;
            }
            for q in 0..=g.max_nu().min(self.order - p) {
                let gq = g.nu_coefficient(q);
                if gq.is_zero() {
                    continue;
                }
                let s = self.inner.star(&fp, &gq)?;
                for r in 0..=s.max_nu() {
                    let br = s.nu_coefficient(r);
                    if br.is_zero() {
                        continue;
                    }
                    for (e, c) in self.mu_power(r).into_iter().enumerate() {
                        let total = e as u32 + p + q;
                        if c.is_zero() || total > self.order {
                            continue;
                        }
                        out = out.try_add(&br.scale(&c).shift_nu(total))?;
                    }
                }
            }
        }
        Ok(out)
    }
}

impl StarProduct for TransformedStar {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn star(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
        let prod = self.star_mu(&self.apply_phi(f)?, &self.apply_phi(g)?)?;
        self.apply_phi_inverse(&prod)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generators, GeometryKind};
    use crate::operators::NamedOp;
    use crate::random::{SymbolRng, SymbolShape};
    use crate::star::{homogeneity_defect, invariance_defect, ExplicitStar};

    fn p(s: &str, n: usize) -> SymbolPoly {
        SymbolPoly::parse(s, n).unwrap()
    }

    fn canonical(n: usize) -> Arc<dyn StarProduct> {
        Arc::new(ExplicitStar::canonical(n))
    }

    #[test]
    fn identity_transform() {
        let t = TransformedStar::new(canonical(1), vec![], vec![Scalar::one()], 12).unwrap();
        let f = p("x1^2*xi1^3 + h*x1", 1);
        let g = p("x1^3*xi1^2 - xi1", 1);
        assert_eq!(t.star(&f, &g).unwrap(), ExplicitStar::canonical(1).star(&f, &g).unwrap());
    }

    #[test]
    fn inverse_undoes_phi() {
        let e = Cochain::from_op(NamedOp::E.into(), None);
        let t = TransformedStar::new(canonical(2), vec![(1, e)], vec![Scalar::one()], 6).unwrap();
        let f = p("x1*xi1*xi2^2 + h*xi2", 2);
        assert_eq!(t.apply_phi_inverse(&t.apply_phi(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn reparametrization_shifts_skew_part() {
        let c = Scalar::new(3, 5);
        let mu = vec![Scalar::one(), Scalar::zero(), c.clone()];
        let t = TransformedStar::new(canonical(1), vec![], mu, 8).unwrap();
        let s = ExplicitStar::canonical(1);
        let f = p("x1^2*xi1^2", 1);
        let g = p("x1*xi1^3", 1);
        let skew = |st: &dyn StarProduct| {
            let a = st.star(&f, &g).unwrap();
            let b = st.star(&g, &f).unwrap();
            (&a - &b).nu_coefficient(3)
        };
        let shift = &skew(&t) - &skew(&s);
        // B_1 has skew part ½{F,G}, so c h³ B_1 contributes c{F,G} to F⋆G − G⋆F.
        assert_eq!(shift, f.poisson(&g).unwrap().scale(&c));
    }

    #[test]
    fn euler_equivalence_keeps_invariance_but_not_homogeneity() {
        let e = Cochain::from_op(NamedOp::E.into(), None);
        let t = TransformedStar::new(canonical(1), vec![(1, e)], vec![Scalar::one()], 6).unwrap();
        let mut rng = SymbolRng::new(9);
        let shape = SymbolShape { n: 1, x_max: 2, xi_max: 2, nu_max: 0, max_terms: 2 };
        let fam = generators(GeometryKind::Projective { n: 1 });
        for _ in 0..4 {
            let f = rng.symbol(&shape);
            let g = rng.symbol(&shape);
            for x in fam.fields() {
                assert!(invariance_defect(&t, x, &f, &g).unwrap().is_zero());
            }
        }
        assert!(!homogeneity_defect(&t, &p("xi1^2", 1), &p("x1^2", 1)).unwrap().is_zero());
    }

    #[test]
    fn rejects_bad_parameters() {
        let e = Cochain::from_op(NamedOp::E.into(), None);
        assert!(TransformedStar::new(canonical(1), vec![(0, e)], vec![Scalar::one()], 3).is_err());
        assert!(TransformedStar::new(canonical(1), vec![], vec![Scalar::from_int(2)], 3).is_err());
    }
}
