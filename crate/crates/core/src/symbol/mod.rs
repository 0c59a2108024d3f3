//! Polynomial symbols on T*ℝⁿ with coefficients in ℚ[h], where `h` stands
//! for the deformation parameter iℏ.
//!
//! A [`SymbolPoly`] is a finite sum of monomials `c · x^a · ξ^b · h^p`. The
//! ring operations, the canonical Poisson bracket and the Euler operators all
//! act exactly; nothing in this module touches floating point.

mod parse;

use std::cmp::Ordering;
use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use parse::parse_symbol;

/// Exponent triple `(a, b, p)` stored contiguously as `[a_1..a_n, b_1..b_n, p]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: SmallVec<[u32; 8]>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, 2 * n + 1),
        }
    }

    /// Builds `x^a ξ^b h^p`. Panics if `a` and `b` differ in length.
    pub fn new(a: &[u32], b: &[u32], p: u32) -> Self {
        assert_eq!(a.len(), b.len(), "exponent vectors must have equal length");
        let mut exps = SmallVec::with_capacity(2 * a.len() + 1);
        exps.extend_from_slice(a);
        exps.extend_from_slice(b);
        exps.push(p);
        Monomial { exps }
    }

    pub fn dim(&self) -> usize {
        (self.exps.len() - 1) / 2
    }

    pub fn x(&self) -> &[u32] {
        &self.exps[..self.dim()]
    }

    pub fn xi(&self) -> &[u32] {
        let n = self.dim();
        &self.exps[n..2 * n]
    }

    pub fn nu(&self) -> u32 {
        self.exps[self.exps.len() - 1]
    }

    pub fn x_degree(&self) -> u32 {
        self.x().iter().sum()
    }

    pub fn xi_degree(&self) -> u32 {
        self.xi().iter().sum()
    }

    pub(crate) fn x_mut(&mut self, i: usize) -> &mut u32 {
        &mut self.exps[i]
    }

    pub(crate) fn xi_mut(&mut self, i: usize) -> &mut u32 {
        let n = self.dim();
        &mut self.exps[n + i]
    }

    pub(crate) fn nu_mut(&mut self) -> &mut u32 {
        let last = self.exps.len() - 1;
        &mut self.exps[last]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn with_nu(&self, p: u32) -> Monomial {
        let mut m = self.clone();
        *m.nu_mut() = p;
        m
    }
}

impl Ord for Monomial {
    /// Graded lexicographic on `(|b|, b, a, p)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.xi_degree()
            .cmp(&other.xi_degree())
            .then_with(|| self.xi().cmp(other.xi()))
            .then_with(|| self.x().cmp(other.x()))
            .then_with(|| self.nu().cmp(&other.nu()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{:?}ξ{:?}h^{}", self.x(), self.xi(), self.nu())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = parse::format_monomial(self);
        if s.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&s)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerMode {
    /// `E = ξ_i ∂/∂ξ_i`
    E,
    /// `Ê = E + ℏ ∂/∂ℏ`, counting one per power of `h`.
    EHat,
}

/// Homogeneous component of ξ-degree `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPart {
    pub k: u32,
    pub part: SymbolPoly,
}

/// An element of ℚ[x, ξ, h] in `n` base dimensions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymbolPoly {
    n: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SymbolPoly {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        SymbolPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut p = SymbolPoly::zero(n);
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        SymbolPoly::constant(n, Scalar::one())
    }

    /// The coordinate `x^i`, with `i` zero-based.
    pub fn x(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut m = Monomial::one(n);
        *m.x_mut(i) = 1;
        SymbolPoly::from_monomial(m, Scalar::one())
    }

    /// The fiber coordinate `ξ_i`, with `i` zero-based.
    pub fn xi(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut m = Monomial::one(n);
        *m.xi_mut(i) = 1;
        SymbolPoly::from_monomial(m, Scalar::one())
    }

    /// The deformation parameter `h = iℏ`.
    pub fn nu(n: usize) -> Self {
        let mut m = Monomial::one(n);
        *m.nu_mut() = 1;
        SymbolPoly::from_monomial(m, Scalar::one())
    }

    pub fn monomial(a: &[u32], b: &[u32], p: u32) -> Self {
        SymbolPoly::from_monomial(Monomial::new(a, b, p), Scalar::one())
    }

    pub fn from_monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = SymbolPoly::zero(m.dim());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Scalar)>>(n: usize, terms: I) -> Self {
        let mut p = SymbolPoly::zero(n);
        for (m, c) in terms {
            assert_eq!(m.dim(), n, "monomial dimension mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> btree_map::Iter<'_, Monomial, Scalar> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Accumulates `c · m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.dim(), self.n);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &SymbolPoly) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &SymbolPoly) -> Result<SymbolPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &SymbolPoly) -> Result<SymbolPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &SymbolPoly) -> Result<SymbolPoly> {
        self.check_dim(other)?;
        let mut out = SymbolPoly::zero(self.n);
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> SymbolPoly {
        if c.is_zero() {
            return SymbolPoly::zero(self.n);
        }
        SymbolPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> SymbolPoly {
        let mut acc = SymbolPoly::one(self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Applies `f` to every term; results landing on the same monomial are summed.
    pub fn map_terms<F>(&self, mut f: F) -> SymbolPoly
    where
        F: FnMut(&Monomial, &Scalar) -> Option<(Monomial, Scalar)>,
    {
        let mut out = SymbolPoly::zero(self.n);
        for (m, c) in self.terms() {
            if let Some((m2, c2)) = f(m, c) {
                out.add_term(m2, c2);
            }
        }
        out
    }

    /// `∂/∂x^i`, zero-based `i`.
    pub fn d_x(&self, i: usize) -> SymbolPoly {
        self.map_terms(|m, c| {
            let e = m.x()[i];
            (e > 0).then(|| {
                let mut m2 = m.clone();
                *m2.x_mut(i) -= 1;
                (m2, c.mul_int(e as i64))
            })
        })
    }

    /// `∂/∂ξ_i`, zero-based `i`.
    pub fn d_xi(&self, i: usize) -> SymbolPoly {
        self.map_terms(|m, c| {
            let e = m.xi()[i];
            (e > 0).then(|| {
                let mut m2 = m.clone();
                *m2.xi_mut(i) -= 1;
                (m2, c.mul_int(e as i64))
            })
        })
    }

    /// `∂^m/∂x^m` for a multi-index `m`.
    pub fn d_x_multi(&self, orders: &[u32]) -> SymbolPoly {
        self.map_terms(|m, c| {
            let mut m2 = m.clone();
            let mut f: i64 = 1;
            for (i, &o) in orders.iter().enumerate() {
                let e = m.x()[i];
                if e < o {
                    return None;
                }
                f *= falling(e, o);
                *m2.x_mut(i) -= o;
            }
            Some((m2, c.mul_int(f)))
        })
    }

    /// `∂^m/∂ξ^m` for a multi-index `m`.
    pub fn d_xi_multi(&self, orders: &[u32]) -> SymbolPoly {
        self.map_terms(|m, c| {
            let mut m2 = m.clone();
            let mut f: i64 = 1;
            for (i, &o) in orders.iter().enumerate() {
                let e = m.xi()[i];
                if e < o {
                    return None;
                }
                f *= falling(e, o);
                *m2.xi_mut(i) -= o;
            }
            Some((m2, c.mul_int(f)))
        })
    }

    /// Multiplies by `h^k`.
    pub fn shift_nu(&self, k: u32) -> SymbolPoly {
        if k == 0 {
            return self.clone();
        }
        self.map_terms(|m, c| {
            let mut m2 = m.clone();
            *m2.nu_mut() += k;
            Some((m2, c.clone()))
        })
    }

    /// Exact division by `h`; `None` if some term has no factor of `h`.
    pub fn divide_nu(&self) -> Option<SymbolPoly> {
        if self.terms.keys().any(|m| m.nu() == 0) {
            return None;
        }
        Some(self.map_terms(|m, c| {
            let mut m2 = m.clone();
            *m2.nu_mut() -= 1;
            Some((m2, c.clone()))
        }))
    }

    /// Coefficient of `h^p`, as an `h`-free symbol.
    pub fn nu_coefficient(&self, p: u32) -> SymbolPoly {
        self.map_terms(|m, c| (m.nu() == p).then(|| (m.with_nu(0), c.clone())))
    }

    /// Drops every term with `h`-power above `max`.
    pub fn truncate_nu(&self, max: u32) -> SymbolPoly {
        self.map_terms(|m, c| (m.nu() <= max).then(|| (m.clone(), c.clone())))
    }

    /// Complex conjugation on real symbols: `h ↦ −h`.
    pub fn conj(&self) -> SymbolPoly {
        self.map_terms(|m, c| {
            let v = if m.nu() % 2 == 1 { -c } else { c.clone() };
            Some((m.clone(), v))
        })
    }

    pub fn max_nu(&self) -> u32 {
        self.terms.keys().map(Monomial::nu).max().unwrap_or(0)
    }

    /// Largest total ξ-degree, `None` for the zero symbol.
    pub fn xi_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::xi_degree).max()
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::x_degree).max()
    }

    /// True when the symbol is a polynomial in `x` alone (no ξ, no h).
    pub fn is_base_function(&self) -> bool {
        self.terms
            .keys()
            .all(|m| m.xi_degree() == 0 && m.nu() == 0)
    }

    /// Canonical Poisson bracket `Σ_i ∂_ξi F ∂_xi G − ∂_xi F ∂_ξi G`.
    pub fn poisson(&self, other: &SymbolPoly) -> Result<SymbolPoly> {
        self.check_dim(other)?;
        let mut out = SymbolPoly::zero(self.n);
        for i in 0..self.n {
            let a = self.d_xi(i);
            let b = other.d_x(i);
            if !a.is_zero() && !b.is_zero() {
                out = &out + &(&a * &b);
            }
            let c = self.d_x(i);
            let d = other.d_xi(i);
            if !c.is_zero() && !d.is_zero() {
                out = &out - &(&c * &d);
            }
        }
        Ok(out)
    }

    pub fn euler(&self, mode: EulerMode) -> SymbolPoly {
        self.map_terms(|m, c| {
            let w = match mode {
                EulerMode::E => m.xi_degree(),
                EulerMode::EHat => m.xi_degree() + m.nu(),
            };
            Some((m.clone(), c.mul_int(w as i64)))
        })
    }

    /// Splits into ξ-homogeneous parts, ascending in degree; empty for zero.
    pub fn grade(&self) -> Vec<GradedPart> {
        let mut parts: BTreeMap<u32, SymbolPoly> = BTreeMap::new();
        for (m, c) in self.terms() {
            parts
                .entry(m.xi_degree())
                .or_insert_with(|| SymbolPoly::zero(self.n))
                .terms
                .insert(m.clone(), c.clone());
        }
        parts
            .into_iter()
            .map(|(k, part)| GradedPart { k, part })
            .collect()
    }

    /// The ξ-degree `k` component.
    pub fn graded_part(&self, k: u32) -> SymbolPoly {
        self.map_terms(|m, c| (m.xi_degree() == k).then(|| (m.clone(), c.clone())))
    }

    pub fn parse(text: &str, n: usize) -> Result<SymbolPoly> {
        parse_symbol(text, n)
    }
}

fn falling(e: u32, o: u32) -> i64 {
    (0..o).map(|j| (e - j) as i64).product()
}

impl fmt::Display for SymbolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::format_symbol(self))
    }
}

impl fmt::Debug for SymbolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolPoly[n={}]({})", self.n, self)
    }
}

// Operator sugar. These panic on a dimension mismatch; the `try_*` methods
// report it instead.
impl Add for &SymbolPoly {
    type Output = SymbolPoly;
    fn add(self, rhs: &SymbolPoly) -> SymbolPoly {
        self.try_add(rhs).expect("dimension mismatch in symbol addition")
    }
}

impl Sub for &SymbolPoly {
    type Output = SymbolPoly;
    fn sub(self, rhs: &SymbolPoly) -> SymbolPoly {
        self.try_sub(rhs).expect("dimension mismatch in symbol subtraction")
    }
}

impl Mul for &SymbolPoly {
    type Output = SymbolPoly;
    fn mul(self, rhs: &SymbolPoly) -> SymbolPoly {
        self.try_mul(rhs).expect("dimension mismatch in symbol product")
    }
}

impl Add for SymbolPoly {
    type Output = SymbolPoly;
    fn add(self, rhs: SymbolPoly) -> SymbolPoly {
        &self + &rhs
    }
}

impl Sub for SymbolPoly {
    type Output = SymbolPoly;
    fn sub(self, rhs: SymbolPoly) -> SymbolPoly {
        &self - &rhs
    }
}

impl Mul for SymbolPoly {
    type Output = SymbolPoly;
    fn mul(self, rhs: SymbolPoly) -> SymbolPoly {
        &self * &rhs
    }
}

impl Neg for &SymbolPoly {
    type Output = SymbolPoly;
    fn neg(self) -> SymbolPoly {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Neg for SymbolPoly {
    type Output = SymbolPoly;
    fn neg(self) -> SymbolPoly {
        -&self
    }
}
