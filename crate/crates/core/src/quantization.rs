//! Normal-ordered symbol calculus for differential operators on λ-densities
//! and the projectively equivariant quantization map.
//!
//! A symbol term `a(x) h^p ξ^b` stands for the operator `h^{p+|b|} a(x) ∂^b`,
//! all derivatives to the right.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::geometry::{lift_lie, moment, GeneratorFamily, GeometryKind, VectorField};
use crate::operators::op_d;
use crate::scalar::{factorial, pochhammer, Scalar};
use crate::symbol::{Monomial, SymbolPoly};

/// Total symbol of a differential operator acting on λ-densities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffOpSymbol {
    base: SymbolPoly,
    lambda: Scalar,
}

impl DiffOpSymbol {
    pub fn new(base: SymbolPoly, lambda: Scalar) -> Self {
        DiffOpSymbol { base, lambda }
    }

    pub fn base(&self) -> &SymbolPoly {
        &self.base
    }

    pub fn into_base(self) -> SymbolPoly {
        self.base
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    fn check(&self, other: &DiffOpSymbol) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if self.lambda != other.lambda {
            return Err(Error::WeightMismatch(
                Box::new(self.lambda.clone()),
                Box::new(other.lambda.clone()),
            ));
        }
        Ok(())
    }

    /// Symbol of the composite operator `self ∘ other`:
    /// `Σ_m h^{|m|}/m! ∂_ξ^m A · ∂_x^m B`.
    pub fn compose(&self, other: &DiffOpSymbol) -> Result<DiffOpSymbol> {
        self.check(other)?;
        Ok(DiffOpSymbol::new(
            compose_symbols(&self.base, &other.base),
            self.lambda.clone(),
        ))
    }

    pub fn try_add(&self, other: &DiffOpSymbol) -> Result<DiffOpSymbol> {
        self.check(other)?;
        Ok(DiffOpSymbol::new(&self.base + &other.base, self.lambda.clone()))
    }

    pub fn try_sub(&self, other: &DiffOpSymbol) -> Result<DiffOpSymbol> {
        self.check(other)?;
        Ok(DiffOpSymbol::new(&self.base - &other.base, self.lambda.clone()))
    }

    /// `[A, B] = A∘B − B∘A`.
    pub fn commutator(&self, other: &DiffOpSymbol) -> Result<DiffOpSymbol> {
        self.compose(other)?.try_sub(&other.compose(self)?)
    }

    /// Formal adjoint on half-densities: `a h^p ξ^b ↦ (−h)^p ξ^b ∘ a`.
    pub fn adjoint(&self) -> Result<DiffOpSymbol> {
        if self.lambda != Scalar::new(1, 2) {
            return Err(Error::AdjointWeight(self.lambda.clone()));
        }
        let n = self.dim();
        let mut out = SymbolPoly::zero(n);
        for (m, c) in self.base.terms() {
            let zeros = vec![0; n];
            let xi_part = SymbolPoly::monomial(&zeros, m.xi(), 0);
            let x_part = SymbolPoly::monomial(m.x(), &zeros, m.nu());
            let sign = if m.nu() % 2 == 1 { -c } else { c.clone() };
            out = &out + &compose_symbols(&xi_part, &x_part).scale(&sign);
        }
        Ok(DiffOpSymbol::new(out, self.lambda.clone()))
    }

    /// Applies the operator to a function of `x` (and possibly `h`).
    pub fn apply_to(&self, f: &SymbolPoly) -> Result<SymbolPoly> {
        if f.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), f.dim()));
        }
        if f.terms().any(|(m, _)| m.xi_degree() > 0) {
            return Err(Error::NotBaseFunction(f.to_string()));
        }
        let mut out = SymbolPoly::zero(self.dim());
        for (m, c) in self.base.terms() {
            let d = f.d_x_multi(m.xi());
            if d.is_zero() {
                continue;
            }
            let zeros = vec![0; self.dim()];
            let coef = SymbolPoly::monomial(m.x(), &zeros, m.nu() + m.xi_degree());
            out = &out + &(&coef * &d).scale(c);
        }
        Ok(out)
    }

    /// The operator in `h`, `x` and `dI = ∂/∂xᴵ`, e.g. `h^2*x1*d1^2 + h^2*d1`.
    pub fn operator_string(&self) -> String {
        if self.base.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.base.terms().rev().enumerate() {
            let neg = c.is_negative();
            out.push_str(match (idx, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            });
            let mut parts = Vec::new();
            let mut push = |name: String, e: u32| match e {
                0 => {}
                1 => parts.push(name),
                _ => parts.push(format!("{name}^{e}")),
            };
            push("h".into(), m.nu() + m.xi_degree());
            for (i, &e) in m.x().iter().enumerate() {
                push(format!("x{}", i + 1), e);
            }
            for (i, &e) in m.xi().iter().enumerate() {
                push(format!("d{}", i + 1), e);
            }
            let a = c.abs();
            if parts.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&parts.join("*"));
            } else {
                out.push_str(&format!("{a}*{}", parts.join("*")));
            }
        }
        out
    }
}

impl fmt::Display for DiffOpSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.base, f)
    }
}

/// Binomial `C(b, m)` times the falling factorial `a!/(a−m)!`, per slot.
fn contraction_weight(b: &[u32], a: &[u32], m: &[u32]) -> Option<i64> {
    let mut w: i64 = 1;
    for i in 0..m.len() {
        if m[i] > b[i] || m[i] > a[i] {
            return None;
        }
        let mut fall = 1i64;
        for j in 0..m[i] {
            fall *= (a[i] - j) as i64;
        }
        let mut bin = 1i64;
        for j in 0..m[i] {
            bin = bin * (b[i] - j) as i64 / (j + 1) as i64;
        }
        w *= fall * bin;
    }
    Some(w)
}

fn for_each_below(bound: &[u32], mut f: impl FnMut(&[u32])) {
    let mut cur = vec![0u32; bound.len()];
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == bound.len() {
                return;
            }
            if cur[i] < bound[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Normal-ordered composition on bare symbols.
pub fn compose_symbols(a: &SymbolPoly, b: &SymbolPoly) -> SymbolPoly {
    let n = a.dim();
    assert_eq!(n, b.dim(), "dimension mismatch in composition");
    let mut out = SymbolPoly::zero(n);
    let mut bound = vec![0u32; n];
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let c = ca * cb;
            for i in 0..n {
                bound[i] = ma.xi()[i].min(mb.x()[i]);
            }
            for_each_below(&bound, |m| {
                let w = contraction_weight(ma.xi(), mb.x(), m).expect("within bounds");
                let mut xi = ma.xi().to_vec();
                let mut x = mb.x().to_vec();
                for i in 0..n {
                    xi[i] -= m[i];
                    x[i] -= m[i];
                    x[i] += ma.x()[i];
                    xi[i] += mb.xi()[i];
                }
                let p = ma.nu() + mb.nu() + m.iter().sum::<u32>();
                out.add_term(Monomial::new(&x, &xi, p), c.mul_int(w));
            });
        }
    }
    out
}

/// `C_r(e) = (e + (n+1)λ)_r / (r! (2e + n + r)_r)`.
pub fn q_coeff(r: u32, e: u32, lambda: &Scalar, n: usize) -> Scalar {
    let n = n as i64;
    let a = Scalar::from_int(e as i64) + lambda.mul_int(n + 1);
    let den = factorial(r) * pochhammer(&Scalar::from_int(2 * e as i64 + n + r as i64), r);
    pochhammer(&a, r) / den
}

/// `Q_λ(F) = Σ_r C_r(E) (hD)^r F`, with `C_r` evaluated on each graded part
/// of `D^r F`.
pub fn quantize(f: &SymbolPoly, lambda: &Scalar) -> DiffOpSymbol {
    let n = f.dim();
    let mut out = f.clone();
    let mut dr = f.clone();
    let mut r = 0;
    loop {
        r += 1;
        dr = op_d(&dr);
        if dr.is_zero() {
            break;
        }
        for part in dr.grade() {
            let c = q_coeff(r, part.k, lambda, n);
            out = &out + &part.part.shift_nu(r).scale(&c);
        }
    }
    DiffOpSymbol::new(out, lambda.clone())
}

/// Inverse of [`quantize`] by elimination from the top ξ-degree down.
pub fn dequantize(a: &DiffOpSymbol) -> SymbolPoly {
    let n = a.dim();
    let mut residual = a.base().clone();
    let mut out = SymbolPoly::zero(n);
    while let Some(k) = residual.xi_degree() {
        let top = residual.graded_part(k);
        residual = &residual - &quantize(&top, a.lambda()).into_base();
        out = &out + &top;
    }
    out
}

/// `Q_λ⁻¹(Q_λ(F) ∘ Q_λ(G))`.
pub fn star_quant(f: &SymbolPoly, g: &SymbolPoly, lambda: &Scalar) -> Result<SymbolPoly> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let qf = quantize(f, lambda);
    let qg = quantize(g, lambda);
    Ok(dequantize(&qf.compose(&qg)?))
}

/// `Q_λ` and its inverse with per-monomial caches; both maps are linear and
/// commute with multiplication by `h`, so caching on `h`-free monomials
/// suffices.
pub struct Quantizer {
    n: usize,
    lambda: Scalar,
    q: RwLock<HashMap<Monomial, SymbolPoly>>,
    qinv: RwLock<HashMap<Monomial, SymbolPoly>>,
}

impl Quantizer {
    pub fn new(n: usize, lambda: Scalar) -> Self {
        Quantizer {
            n,
            lambda,
            q: RwLock::default(),
            qinv: RwLock::default(),
        }
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn cached(
        cache: &RwLock<HashMap<Monomial, SymbolPoly>>,
        m: &Monomial,
        compute: impl FnOnce() -> SymbolPoly,
    ) -> SymbolPoly {
        if let Some(v) = cache.read().expect("quantizer cache poisoned").get(m) {
            return v.clone();
        }
        let v = compute();
        cache
            .write()
            .expect("quantizer cache poisoned")
            .entry(m.clone())
            .or_insert(v)
            .clone()
    }

    fn expand(&self, f: &SymbolPoly, mono: impl Fn(&Monomial) -> SymbolPoly) -> SymbolPoly {
        let mut out = SymbolPoly::zero(self.n);
        for (m, c) in f.terms() {
            let img = mono(&m.with_nu(0));
            for (m2, c2) in img.terms() {
                let mut m3 = m2.clone();
                *m3.nu_mut() += m.nu();
                out.add_term(m3, c * c2);
            }
        }
        out
    }

    fn q_monomial(&self, m: &Monomial) -> SymbolPoly {
        Self::cached(&self.q, m, || {
            quantize(&SymbolPoly::from_monomial(m.clone(), Scalar::one()), &self.lambda).into_base()
        })
    }

    fn qinv_monomial(&self, m: &Monomial) -> SymbolPoly {
        Self::cached(&self.qinv, m, || {
            let f = SymbolPoly::from_monomial(m.clone(), Scalar::one());
            let tail = &self.q_monomial(m) - &f;
            &f - &self.dequantize_base(&tail)
        })
    }

    fn dequantize_base(&self, a: &SymbolPoly) -> SymbolPoly {
        self.expand(a, |m| self.qinv_monomial(m))
    }

    pub fn quantize(&self, f: &SymbolPoly) -> DiffOpSymbol {
        assert_eq!(f.dim(), self.n, "dimension mismatch in quantize");
        DiffOpSymbol::new(self.expand(f, |m| self.q_monomial(m)), self.lambda.clone())
    }

    pub fn dequantize(&self, a: &DiffOpSymbol) -> Result<SymbolPoly> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, a.dim()));
        }
        if a.lambda() != &self.lambda {
            return Err(Error::WeightMismatch(Box::new(self.lambda.clone()), Box::new(a.lambda().clone())));
        }
        Ok(self.dequantize_base(a.base()))
    }

    /// `Q_λ⁻¹(Q_λ(F) ∘ Q_λ(G))`.
    pub fn star(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
        if f.dim() != self.n || g.dim() != self.n {
            return Err(Error::DimensionMismatch(f.dim(), g.dim()));
        }
        let prod = self.quantize(f).compose(&self.quantize(g))?;
        self.dequantize(&prod)
    }
}

/// Symbol of `h·L_X^λ`: `J_X + hλ div X`.
pub fn density_lie_symbol(x: &VectorField, lambda: &Scalar) -> DiffOpSymbol {
    let div = x.divergence().shift_nu(1).scale(lambda);
    DiffOpSymbol::new(&moment(x) + &div, lambda.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceFailure {
    pub generator: String,
    pub symbol: SymbolPoly,
    pub defect: SymbolPoly,
}

/// Checks `[h L_X^λ, Q_λ(F)] = h Q_λ(L_X F)` for every member and sample.
pub fn check_equivariance(
    lambda: &Scalar,
    family: &GeneratorFamily,
    samples: &[SymbolPoly],
) -> Result<Vec<EquivarianceFailure>> {
    if !matches!(family.kind, GeometryKind::Projective { .. }) {
        return Err(Error::Config(
            "equivariance is checked for the projective family only".into(),
        ));
    }
    let mut failures = Vec::new();
    for gen in &family.members {
        let l = density_lie_symbol(&gen.field, lambda);
        for f in samples {
            let q = quantize(f, lambda);
            let lhs = l.commutator(&q)?;
            let rhs = quantize(&lift_lie(&gen.field, f)?, lambda).into_base().shift_nu(1);
            let defect = lhs.base() - &rhs;
            if !defect.is_zero() {
                failures.push(EquivarianceFailure {
                    generator: gen.label.clone(),
                    symbol: f.clone(),
                    defect,
                });
            }
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generators;
    use crate::random::{SymbolRng, SymbolShape};
    use crate::symbol::EulerMode;

    fn p(s: &str, n: usize) -> SymbolPoly {
        SymbolPoly::parse(s, n).unwrap()
    }

    fn op(s: &str, n: usize) -> DiffOpSymbol {
        DiffOpSymbol::new(p(s, n), Scalar::new(1, 2))
    }

    fn half() -> Scalar {
        Scalar::new(1, 2)
    }

    #[test]
    fn compose_examples() {
        assert_eq!(op("xi1", 1).compose(&op("x1", 1)).unwrap(), op("x1*xi1 + h", 1));
        assert_eq!(op("x1", 1).compose(&op("xi1", 1)).unwrap(), op("x1*xi1", 1));
        assert_eq!(op("xi1", 1).compose(&op("xi1", 1)).unwrap(), op("xi1^2", 1));
        let a = DiffOpSymbol::new(p("xi1", 1), Scalar::new(1, 3));
        assert!(matches!(a.compose(&op("x1", 1)), Err(Error::WeightMismatch(..))));
        assert!(matches!(op("x1", 1).compose(&op("x1", 2)), Err(Error::DimensionMismatch(1, 2))));
    }

    #[test]
    fn compose_matches_operator_action() {
        let mut rng = SymbolRng::new(3);
        let shape = SymbolShape { n: 2, x_max: 2, xi_max: 2, nu_max: 1, max_terms: 3 };
        for _ in 0..20 {
            let a = DiffOpSymbol::new(rng.symbol(&shape), half());
            let b = DiffOpSymbol::new(rng.symbol(&shape), half());
            let f = rng.base_function(2, 4);
            let lhs = a.compose(&b).unwrap().apply_to(&f).unwrap();
            let rhs = a.apply_to(&b.apply_to(&f).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn q_coeff_values() {
        for n in 1..=4 {
            for e in 0..=10 {
                assert_eq!(q_coeff(1, e, &half(), n), half());
            }
        }
        assert_eq!(q_coeff(0, 3, &Scalar::new(2, 5), 2), Scalar::one());
        // C_1(0) = (n+1)λ/(n+1)
        assert_eq!(q_coeff(1, 0, &Scalar::new(1, 3), 3), Scalar::new(1, 3));
    }

    #[test]
    fn quantize_examples() {
        let lam = Scalar::new(1, 3);
        assert_eq!(quantize(&p("xi1", 1), &lam).base(), &p("xi1", 1));
        for n in 1..=3 {
            let expect = &p("x1*xi1", n) + &SymbolPoly::nu(n).scale(&lam);
            assert_eq!(quantize(&p("x1*xi1", n), &lam).base(), &expect);
        }
        assert_eq!(quantize(&p("x1*xi1^2", 1), &half()).base(), &p("x1*xi1^2 + h*xi1", 1));
    }

    #[test]
    fn dequantize_examples() {
        assert_eq!(dequantize(&op("x1*xi1 + 1/2*h", 2)), p("x1*xi1", 2));
        assert_eq!(dequantize(&op("1", 3)), p("1", 3));
        let mut rng = SymbolRng::new(11);
        let shape = SymbolShape { n: 2, x_max: 3, xi_max: 3, nu_max: 1, max_terms: 4 };
        for lam in [Scalar::new(1, 3), half(), Scalar::one()] {
            for _ in 0..10 {
                let f = rng.symbol(&shape);
                let q = quantize(&f, &lam);
                assert_eq!(dequantize(&q), f);
                assert_eq!(quantize(&dequantize(&q), &lam), q);
            }
        }
    }

    #[test]
    fn star_quant_examples() {
        let s = star_quant(&p("xi1", 1), &p("x1", 1), &half()).unwrap();
        assert_eq!(s, p("x1*xi1 + 1/2*h", 1));
        let t = star_quant(&p("x1", 1), &p("xi1", 1), &half()).unwrap();
        assert_eq!(&s - &t, SymbolPoly::nu(1));
        let f = p("x1^2*xi1*xi2 - 3*h*x2", 2);
        assert_eq!(star_quant(&SymbolPoly::one(2), &f, &Scalar::new(1, 3)).unwrap(), f);
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(op("xi1", 1).adjoint().unwrap(), op("xi1", 1));
        assert!(matches!(
            DiffOpSymbol::new(p("xi1", 1), Scalar::one()).adjoint(),
            Err(Error::AdjointWeight(_))
        ));
        let mut rng = SymbolRng::new(5);
        let shape = SymbolShape { n: 2, x_max: 3, xi_max: 3, nu_max: 2, max_terms: 4 };
        for _ in 0..15 {
            let f = rng.symbol(&shape);
            let a = DiffOpSymbol::new(f.clone(), half());
            assert_eq!(a.adjoint().unwrap().adjoint().unwrap(), a);
            let q = quantize(&f, &half());
            assert_eq!(q.adjoint().unwrap(), quantize(&f.conj(), &half()));
        }
    }

    #[test]
    fn moment_condition_and_equivariance() {
        for n in 1..=3 {
            let fam = generators(GeometryKind::Projective { n });
            for lam in [Scalar::new(1, 3), half(), Scalar::one()] {
                for gen in &fam.members {
                    assert_eq!(
                        quantize(&moment(&gen.field), &lam),
                        density_lie_symbol(&gen.field, &lam)
                    );
                }
            }
        }
        let fam = generators(GeometryKind::Projective { n: 1 });
        let fails = check_equivariance(&Scalar::new(1, 3), &fam, &[p("x1*xi1^2", 1)]).unwrap();
        assert!(fails.is_empty(), "{fails:?}");
        let mut rng = SymbolRng::new(9);
        let fam = generators(GeometryKind::Projective { n: 2 });
        let samples: Vec<_> = (0..4).map(|_| rng.symbol(&SymbolShape::new(2, 3))).collect();
        assert!(check_equivariance(&Scalar::new(2, 7), &fam, &samples).unwrap().is_empty());
    }

    #[test]
    fn homogeneity() {
        let mut rng = SymbolRng::new(13);
        let shape = SymbolShape { n: 2, x_max: 3, xi_max: 3, nu_max: 1, max_terms: 4 };
        for _ in 0..10 {
            let f = rng.symbol(&shape);
            let lam = Scalar::new(1, 4);
            let lhs = quantize(&f, &lam).base().euler(EulerMode::EHat);
            let rhs = quantize(&f.euler(EulerMode::EHat), &lam).into_base();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn cached_quantizer_agrees() {
        let mut rng = SymbolRng::new(17);
        let shape = SymbolShape { n: 2, x_max: 3, xi_max: 3, nu_max: 1, max_terms: 4 };
        let qz = Quantizer::new(2, Scalar::new(1, 3));
        for _ in 0..10 {
            let f = rng.symbol(&shape);
            let g = rng.symbol(&shape);
            assert_eq!(qz.quantize(&f), quantize(&f, qz.lambda()));
            let a = DiffOpSymbol::new(f.clone(), qz.lambda().clone());
            assert_eq!(qz.dequantize(&a).unwrap(), dequantize(&a));
            assert_eq!(qz.star(&f, &g).unwrap(), star_quant(&f, &g, qz.lambda()).unwrap());
        }
    }

    #[test]
    fn operator_form() {
        let q = quantize(&p("x1*xi1^2", 1), &half());
        assert_eq!(q.operator_string(), "h^2*x1*d1^2 + h^2*d1");
        assert_eq!(op("0", 1).operator_string(), "0");
    }
}
