//! Seeded generation of random symbols for property runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;
use crate::symbol::{Monomial, SymbolPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolShape {
    pub n: usize,
    /// Total x-degree bound per monomial.
    pub x_max: u32,
    /// Total ξ-degree bound per monomial.
    pub xi_max: u32,
    pub nu_max: u32,
    pub max_terms: usize,
}

impl SymbolShape {
    pub fn new(n: usize, max_deg: u32) -> Self {
        SymbolShape {
            n,
            x_max: max_deg,
            xi_max: max_deg,
            nu_max: 0,
            max_terms: 3,
        }
    }
}

/// Deterministic source of symbols; equal seeds give equal sequences.
pub struct SymbolRng {
    rng: ChaCha8Rng,
}

impl SymbolRng {
    pub fn new(seed: u64) -> Self {
        SymbolRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn bounded_exponents(&mut self, n: usize, max: u32) -> Vec<u32> {
        let total = self.rng.gen_range(0..=max);
        let mut e = vec![0u32; n];
        for _ in 0..total {
            e[self.rng.gen_range(0..n)] += 1;
        }
        e
    }

    pub fn scalar(&mut self) -> Scalar {
        let num = self.rng.gen_range(-5i64..=5);
        let den = self.rng.gen_range(1i64..=3);
        Scalar::new(num, den)
    }

    pub fn monomial(&mut self, shape: &SymbolShape) -> Monomial {
        let a = self.bounded_exponents(shape.n, shape.x_max);
        let b = self.bounded_exponents(shape.n, shape.xi_max);
        let p = self.rng.gen_range(0..=shape.nu_max);
        Monomial::new(&a, &b, p)
    }

    /// A symbol with between one and `max_terms` terms; may be zero after
    /// cancellation only if the coefficients happen to cancel.
    pub fn symbol(&mut self, shape: &SymbolShape) -> SymbolPoly {
        let count = self.rng.gen_range(1..=shape.max_terms.max(1));
        let mut out = SymbolPoly::zero(shape.n);
        for _ in 0..count {
            let m = self.monomial(shape);
            let mut c = self.scalar();
            if c.is_zero() {
                c = Scalar::one();
            }
            out.add_term(m, c);
        }
        out
    }

    /// A polynomial in x alone, e.g. for vector field components.
    pub fn base_function(&mut self, n: usize, x_max: u32) -> SymbolPoly {
        self.symbol(&SymbolShape {
            n,
            x_max,
            xi_max: 0,
            nu_max: 0,
            max_terms: 3,
        })
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }
}
