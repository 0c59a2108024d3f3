//! Symbols on the doubled space `(x, ξ, y, η)`, representing `F(x,ξ)·G(y,η)`.

use std::collections::btree_map::{BTreeMap, Entry};
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symbol::{Monomial, SymbolPoly};

/// Exponents laid out as `[a (x), b (ξ), a' (y), b' (η), p]`.
type PairKey = SmallVec<[u32; 16]>;

#[derive(Clone, PartialEq, Eq)]
pub struct PairSymbol {
    n: usize,
    terms: BTreeMap<PairKey, Scalar>,
}

/// The four contractions of the Ansatz, each summed over `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bidiff {
    /// `∂²/∂ξᵢ∂yⁱ`
    XiY,
    /// `∂²/∂xⁱ∂ηᵢ`
    EtaX,
    /// `∂²/∂xⁱ∂ξᵢ`, i.e. `D` on the first factor.
    XiX,
    /// `∂²/∂yⁱ∂ηᵢ`, i.e. `D` on the second factor.
    EtaY,
}

#[derive(Clone, Copy)]
enum Slot {
    X = 0,
    Xi = 1,
    Y = 2,
    Eta = 3,
}

impl Bidiff {
    fn slots(self) -> (Slot, Slot) {
        match self {
            Bidiff::XiY => (Slot::Xi, Slot::Y),
            Bidiff::EtaX => (Slot::X, Slot::Eta),
            Bidiff::XiX => (Slot::X, Slot::Xi),
            Bidiff::EtaY => (Slot::Y, Slot::Eta),
        }
    }
}

impl PairSymbol {
    pub fn zero(n: usize) -> Self {
        PairSymbol {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// `F(x, ξ) ⊗ G(y, η)`.
    pub fn tensor(f: &SymbolPoly, g: &SymbolPoly) -> Result<PairSymbol> {
        if f.dim() != g.dim() {
            return Err(Error::DimensionMismatch(f.dim(), g.dim()));
        }
        let mut out = PairSymbol::zero(f.dim());
        for (m1, c1) in f.terms() {
            for (m2, c2) in g.terms() {
                let mut key = PairKey::new();
                key.extend_from_slice(m1.x());
                key.extend_from_slice(m1.xi());
                key.extend_from_slice(m2.x());
                key.extend_from_slice(m2.xi());
                key.push(m1.nu() + m2.nu());
                out.add_term(key, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: PairKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> PairSymbol {
        let mut out = PairSymbol::zero(self.n);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &PairSymbol) -> PairSymbol {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    /// Applies one contraction operator.
    pub fn bidiff(&self, tag: Bidiff) -> PairSymbol {
        let n = self.n;
        let (s1, s2) = tag.slots();
        let mut out = PairSymbol::zero(n);
        for (key, c) in &self.terms {
            for i in 0..n {
                let i1 = s1 as usize * n + i;
                let i2 = s2 as usize * n + i;
                let (e1, e2) = (key[i1], key[i2]);
                if e1 == 0 || e2 == 0 {
                    continue;
                }
                let mut k2 = key.clone();
                k2[i1] -= 1;
                k2[i2] -= 1;
                out.add_term(k2, c.mul_int(e1 as i64 * e2 as i64));
            }
        }
        out
    }

    pub fn bidiff_pow(&self, tag: Bidiff, times: u32) -> PairSymbol {
        (0..times).fold(self.clone(), |acc, _| acc.bidiff(tag))
    }

    /// Restriction to the diagonal `y = x`, `η = ξ`.
    pub fn restrict(&self) -> SymbolPoly {
        let n = self.n;
        let mut out = SymbolPoly::zero(n);
        for (key, c) in &self.terms {
            let a: Vec<u32> = (0..n).map(|i| key[i] + key[2 * n + i]).collect();
            let b: Vec<u32> = (0..n).map(|i| key[n + i] + key[3 * n + i]).collect();
            out.add_term(Monomial::new(&a, &b, key[4 * n]), c.clone());
        }
        out
    }
}

impl fmt::Debug for PairSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> SymbolPoly {
        SymbolPoly::parse(s, n).unwrap()
    }

    #[test]
    fn contraction_examples() {
        let t = PairSymbol::tensor(&p("xi1", 1), &p("x1", 1)).unwrap();
        assert_eq!(t.bidiff(Bidiff::XiY).restrict(), SymbolPoly::one(1));
        assert!(t.bidiff(Bidiff::EtaX).is_zero());
        let g = p("x1^2*xi1 + 3*h*x1*xi1^2", 1);
        let t = PairSymbol::tensor(&p("xi1", 1), &g).unwrap();
        assert!(t.bidiff(Bidiff::XiX).is_zero());
    }

    #[test]
    fn divergence_slots() {
        use crate::operators::op_d;
        let f = p("x1*x2*xi1*xi2 + x2^2*xi2^3", 2);
        let g = p("x1^3*xi1 - h*x2*xi2^2", 2);
        let t = PairSymbol::tensor(&f, &g).unwrap();
        assert_eq!(t.bidiff(Bidiff::XiX).restrict(), &op_d(&f) * &g);
        assert_eq!(t.bidiff(Bidiff::EtaY).restrict(), &f * &op_d(&g));
        assert_eq!(t.restrict(), &f * &g);
    }

    #[test]
    fn first_order_is_poisson() {
        let f = p("x1^2*xi2 + x2*xi1^2", 2);
        let g = p("x1*x2*xi1 + xi2^2*x1", 2);
        let t = PairSymbol::tensor(&f, &g).unwrap();
        let lhs = &t.bidiff(Bidiff::XiY).restrict() - &t.bidiff(Bidiff::EtaX).restrict();
        assert_eq!(lhs, f.poisson(&g).unwrap());
    }
}
