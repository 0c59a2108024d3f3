//! Polynomial multivector fields on T*ℝⁿ and the Schouten bracket.
//!
//! The 2n frame directions are numbered with the fiber directions first:
//! index `i < n` is ∂/∂ξᵢ, index `n + i` is ∂/∂xⁱ. Coefficients are stored
//! only on strictly increasing index tuples.

use std::collections::btree_map::{BTreeMap, Entry};
use std::fmt;

use smallvec::SmallVec;

use super::{GeometryKind, VectorField};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symbol::SymbolPoly;

type Frame = SmallVec<[u8; 4]>;

#[derive(Clone, PartialEq, Eq)]
pub struct Multivector {
    n: usize,
    degree: usize,
    terms: BTreeMap<Frame, SymbolPoly>,
}

/// Sorts `idx` in place, returning the permutation sign, or `None` on a repeat.
fn sort_sign(idx: &mut [u8]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    Some(sign)
}

impl Multivector {
    pub fn zero(n: usize, degree: usize) -> Self {
        Multivector {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &SymbolPoly)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Adds `c · ∂_{i1} ∧ … ∧ ∂_{id}`; indices may come in any order.
    pub fn add_term(&mut self, indices: &[usize], c: &SymbolPoly) {
        assert_eq!(indices.len(), self.degree, "wrong number of frame indices");
        assert!(indices.iter().all(|&i| i < 2 * self.n), "frame index out of range");
        let mut key: Frame = indices.iter().map(|&i| i as u8).collect();
        let Some(sign) = sort_sign(&mut key) else {
            return;
        };
        self.accumulate(key, c.scale(&Scalar::from_int(sign)));
    }

    fn accumulate(&mut self, key: Frame, c: SymbolPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Coefficient on the given direction tuple, antisymmetry applied.
    pub fn coeff(&self, indices: &[usize]) -> SymbolPoly {
        let mut key: Frame = indices.iter().map(|&i| i as u8).collect();
        match sort_sign(&mut key) {
            None => SymbolPoly::zero(self.n),
            Some(s) => self
                .terms
                .get(&key)
                .map(|c| c.scale(&Scalar::from_int(s)))
                .unwrap_or_else(|| SymbolPoly::zero(self.n)),
        }
    }

    pub fn try_add(&self, other: &Multivector) -> Result<Multivector> {
        self.check(other)?;
        if self.degree != other.degree {
            return Err(Error::ArityMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.accumulate(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Multivector {
        let mut out = Multivector::zero(self.n, self.degree);
        for (k, v) in &self.terms {
            out.accumulate(k.clone(), v.scale(c));
        }
        out
    }

    fn check(&self, other: &Multivector) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn wedge(&self, other: &Multivector) -> Result<Multivector> {
        self.check(other)?;
        let mut out = Multivector::zero(self.n, self.degree + other.degree);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut key: Frame = k1.iter().chain(k2.iter()).copied().collect();
                if let Some(s) = sort_sign(&mut key) {
                    out.accumulate(key, (c1 * c2).scale(&Scalar::from_int(s)));
                }
            }
        }
        Ok(out)
    }

    /// Right derivative in the odd variable dual to direction `i`.
    fn d_theta(&self, i: u8) -> Vec<(Frame, SymbolPoly)> {
        self.terms
            .iter()
            .filter_map(|(k, c)| {
                let pos = k.iter().position(|&j| j == i)?;
                let mut rest = k.clone();
                rest.remove(pos);
                let c = if (k.len() - 1 - pos) % 2 == 1 { -c } else { c.clone() };
                Some((rest, c))
            })
            .collect()
    }

    fn d_coord(c: &SymbolPoly, i: u8, n: usize) -> SymbolPoly {
        let i = i as usize;
        if i < n {
            c.d_xi(i)
        } else {
            c.d_x(i - n)
        }
    }

    /// Schouten–Nijenhuis bracket, normalized so that `[X,Q] = L_X Q` for a
    /// vector field and `[P,Q] = (−1)^{pq}[Q,P]`:
    /// `(−1)^{p+1} (Σ P∂_θ·∂_uQ − (−1)^{(p−1)(q−1)} Q∂_θ·∂_uP)` with right θ-derivatives.
    pub fn schouten(&self, other: &Multivector) -> Result<Multivector> {
        self.check(other)?;
        let (p, q) = (self.degree, other.degree);
        if p == 0 || q == 0 {
            return Err(Error::Config("Schouten bracket needs multivectors of degree ≥ 1".into()));
        }
        let degree = p + q - 1;
        let mut out = Multivector::zero(self.n, degree);
        // (−1)^{(p−1)(q−1)}
        let sign = if p % 2 == 1 || q % 2 == 1 {
            1
        } else {
            -1
        };
        let mut half = |a: &Multivector, b: &Multivector, s: i64| {
            for i in 0..(2 * self.n) as u8 {
                let da = a.d_theta(i);
                if da.is_empty() {
                    continue;
                }
                for (kb, cb) in &b.terms {
                    let dcb = Multivector::d_coord(cb, i, self.n);
                    if dcb.is_zero() {
                        continue;
                    }
                    for (ka, ca) in &da {
                        let mut key: Frame = ka.iter().chain(kb.iter()).copied().collect();
                        if let Some(t) = sort_sign(&mut key) {
                            out.accumulate(key, (ca * &dcb).scale(&Scalar::from_int(s * t)));
                        }
                    }
                }
            }
        };
        let lead = if p % 2 == 1 { 1 } else { -1 };
        half(self, other, lead);
        half(other, self, -sign * lead);
        Ok(out)
    }

    /// Lie derivative along the cotangent lift of `X`.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<Multivector> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, x.dim()));
        }
        lift_vector(x).schouten(self)
    }

    /// Evaluates a bivector on the differentials of two functions.
    pub fn apply_bivector(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
        if self.degree != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: self.degree,
            });
        }
        if f.dim() != self.n || g.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, f.dim().max(g.dim())));
        }
        let mut out = SymbolPoly::zero(self.n);
        for (k, c) in &self.terms {
            let (i, j) = (k[0], k[1]);
            let a = &Multivector::d_coord(f, i, self.n) * &Multivector::d_coord(g, j, self.n);
            let b = &Multivector::d_coord(f, j, self.n) * &Multivector::d_coord(g, i, self.n);
            out = &out + &(c * &(&a - &b));
        }
        Ok(out)
    }

    fn frame_name(&self, i: u8) -> String {
        let i = i as usize;
        if i < self.n {
            format!("dxi{}", i + 1)
        } else {
            format!("dx{}", i - self.n + 1)
        }
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            let names: Vec<_> = k.iter().map(|&i| self.frame_name(i)).collect();
            write!(f, "({c})*{}", names.join("^"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector[n={}, deg={}]({self})", self.n, self.degree)
    }
}

/// The cotangent lift of `X` as a vector field on T*ℝⁿ:
/// `Xⁱ ∂/∂xⁱ − ξⱼ ∂ᵢXʲ ∂/∂ξᵢ`.
pub fn lift_vector(x: &VectorField) -> Multivector {
    let n = x.dim();
    let mut out = Multivector::zero(n, 1);
    for (i, c) in x.components().iter().enumerate() {
        out.add_term(&[n + i], c);
    }
    for i in 0..n {
        let mut c = SymbolPoly::zero(n);
        for (j, xj) in x.components().iter().enumerate() {
            c = &c - &(&SymbolPoly::xi(n, j) * &xj.d_x(i));
        }
        out.add_term(&[i], &c);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bivectors {
    /// `Π = Σ ∂/∂ξᵢ ∧ ∂/∂xⁱ`
    pub pi: Multivector,
    /// `Λ = g^{ij}ξᵢξⱼ ∂/∂ξ₁ ∧ ∂/∂ξ₂`, conformal geometry in dimension 2 only.
    pub lambda: Option<Multivector>,
}

pub fn canonical_bivectors(n: usize, kind: GeometryKind) -> Result<Bivectors> {
    if kind.dim() != n {
        return Err(Error::DimensionMismatch(n, kind.dim()));
    }
    let mut pi = Multivector::zero(n, 2);
    for i in 0..n {
        pi.add_term(&[i, n + i], &SymbolPoly::one(n));
    }
    Ok(Bivectors {
        pi,
        lambda: extra_bivector(kind).ok(),
    })
}

pub fn extra_bivector(kind: GeometryKind) -> Result<Multivector> {
    match kind {
        GeometryKind::Conformal { p, q } if p + q == 2 => {
            let g = kind.metric().expect("conformal kind has a metric");
            let mut lambda = Multivector::zero(2, 2);
            lambda.add_term(&[0, 1], &g.xi_square());
            Ok(lambda)
        }
        _ => Err(Error::NoExtraBivector),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generators, lift_lie};

    fn p(s: &str, n: usize) -> SymbolPoly {
        SymbolPoly::parse(s, n).unwrap()
    }

    #[test]
    fn pi_is_poisson_bracket() {
        let b = canonical_bivectors(2, GeometryKind::Projective { n: 2 }).unwrap();
        let f = p("x1^2*xi2 + h*x2*xi1", 2);
        let g = p("xi1*xi2 - x1*x2", 2);
        assert_eq!(b.pi.apply_bivector(&f, &g).unwrap(), f.poisson(&g).unwrap());
        assert!(b.lambda.is_none());
    }

    #[test]
    fn pi_pi_vanishes() {
        for n in 1..=3 {
            let b = canonical_bivectors(n, GeometryKind::Projective { n }).unwrap();
            let s = b.pi.schouten(&b.pi).unwrap();
            assert_eq!(s.degree(), 3);
            assert!(s.is_zero());
        }
    }

    #[test]
    fn lambda_shape() {
        let l = extra_bivector(GeometryKind::Conformal { p: 2, q: 0 }).unwrap();
        assert_eq!(l.coeff(&[0, 1]), p("xi1^2 + xi2^2", 2));
        assert_eq!(l.coeff(&[1, 0]), p("-xi1^2 - xi2^2", 2));
        let l = extra_bivector(GeometryKind::Conformal { p: 1, q: 1 }).unwrap();
        assert_eq!(l.coeff(&[0, 1]), p("xi1^2 - xi2^2", 2));
        assert_eq!(
            extra_bivector(GeometryKind::Conformal { p: 3, q: 0 }),
            Err(Error::NoExtraBivector)
        );
        assert_eq!(
            extra_bivector(GeometryKind::Projective { n: 2 }),
            Err(Error::NoExtraBivector)
        );
    }

    #[test]
    fn pi_lambda_bracket() {
        let kind = GeometryKind::Conformal { p: 2, q: 0 };
        let b = canonical_bivectors(2, kind).unwrap();
        let lam = b.lambda.unwrap();
        assert!(lam.schouten(&lam).unwrap().is_zero());
        let s = b.pi.schouten(&lam).unwrap();
        let mut expected = Multivector::zero(2, 3);
        expected.add_term(&[0, 1, 2], &p("2*xi1", 2));
        expected.add_term(&[0, 1, 3], &p("2*xi2", 2));
        assert_eq!(s, expected);
    }

    #[test]
    fn lift_matches_poisson_action() {
        let g = generators(GeometryKind::Projective { n: 2 });
        let f = p("x1*x2*xi1^2 + xi2 - 3*x2^3", 2);
        for x in g.fields() {
            let mut acc = SymbolPoly::zero(2);
            for (k, c) in lift_vector(x).terms() {
                acc = &acc + &(c * &Multivector::d_coord(&f, k[0], 2));
            }
            assert_eq!(acc, lift_lie(x, &f).unwrap());
        }
    }

    #[test]
    fn schouten_of_vectors_is_lie_bracket() {
        let g = generators(GeometryKind::Projective { n: 2 });
        let fields: Vec<_> = g.fields().collect();
        for x in &fields {
            for y in &fields {
                let lhs = lift_vector(x).schouten(&lift_vector(y)).unwrap();
                assert_eq!(lhs, lift_vector(&x.bracket(y).unwrap()));
            }
        }
    }

    #[test]
    fn lie_derivative_matches_evaluation() {
        // (L_X P)(F,G) = X̃ P(F,G) − P(X̃F, G) − P(F, X̃G)
        let mut w = Multivector::zero(2, 2);
        w.add_term(&[0, 1], &p("xi1^2 + x2*xi2", 2));
        w.add_term(&[1, 2], &p("x1*xi1", 2));
        w.add_term(&[2, 3], &p("x1^2", 2));
        let f = p("x1*x2*xi1 + xi2^2", 2);
        let g = p("x2^2*xi1*xi2 + x1", 2);
        for kind in [GeometryKind::Projective { n: 2 }, GeometryKind::Conformal { p: 1, q: 1 }] {
            for x in generators(kind).fields() {
                let lhs = w.lie_derivative(x).unwrap().apply_bivector(&f, &g).unwrap();
                let l = |h: &SymbolPoly| lift_lie(x, h).unwrap();
                let rhs = &(&l(&w.apply_bivector(&f, &g).unwrap()) - &w.apply_bivector(&l(&f), &g).unwrap())
                    - &w.apply_bivector(&f, &l(&g)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn lambda_invariance() {
        for kind in [GeometryKind::Conformal { p: 2, q: 0 }, GeometryKind::Conformal { p: 1, q: 1 }] {
            let lam = extra_bivector(kind).unwrap();
            for x in generators(kind).fields() {
                assert!(lam.lie_derivative(x).unwrap().is_zero());
            }
        }
        let lam = extra_bivector(GeometryKind::Conformal { p: 2, q: 0 }).unwrap();
        let proj = generators(GeometryKind::Projective { n: 2 });
        assert!(proj.fields().any(|x| !lam.lie_derivative(x).unwrap().is_zero()));
    }

    #[test]
    fn graded_antisymmetry() {
        let pi = canonical_bivectors(2, GeometryKind::Projective { n: 2 }).unwrap().pi;
        let mut v = Multivector::zero(2, 1);
        v.add_term(&[2], &p("x1*xi2", 2));
        v.add_term(&[1], &p("x2^2", 2));
        let mut w = Multivector::zero(2, 2);
        w.add_term(&[0, 3], &p("x1*xi1", 2));
        w.add_term(&[1, 2], &p("xi2^2", 2));
        // [P,Q] = (−1)^{pq} [Q,P]
        for (a, b) in [(&v, &w), (&w, &pi), (&v, &v), (&w, &w)] {
            let s = if a.degree() * b.degree() % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                a.schouten(b).unwrap(),
                b.schouten(a).unwrap().scale(&Scalar::from_int(s))
            );
        }
    }
}
