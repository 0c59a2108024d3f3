//! The star-product from its explicit coefficients:
//! `F ⋆ G = Σ_r h^r Σ B^{k,ℓ}_{α,β,γ,δ} D_{ξy}^α D_{ηx}^β D_{ξx}^γ D_{ηy}^δ (F⊗G)|_{y=x,η=ξ}`
//! on each pair of graded parts `F ∈ S_k`, `G ∈ S_ℓ`.

use num_bigint::BigInt;

use super::coeffs::{quadruples, CoeffKey, CoeffSource, CoeffTable};
use super::pair::{Bidiff, PairSymbol};
use crate::error::{Error, Result};
use crate::operators::op_d;
use crate::scalar::Scalar;
use crate::symbol::{Monomial, SymbolPoly};

/// Calls `f` on every `m ≤ bounds` (componentwise) with `|m| = total`.
fn compositions(total: u32, bounds: &[u32], f: &mut impl FnMut(&[u32])) {
    fn rec(i: usize, left: u32, bounds: &[u32], cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if i + 1 == bounds.len() {
            if left <= bounds[i] {
                cur[i] = left;
                f(cur);
                cur[i] = 0;
            }
            return;
        }
        for e in 0..=left.min(bounds[i]) {
            cur[i] = e;
            rec(i + 1, left - e, bounds, cur, f);
        }
        cur[i] = 0;
    }
    let mut cur = vec![0; bounds.len()];
    rec(0, total, bounds, &mut cur, f);
}

fn falling(e: u32, m: u32) -> i128 {
    (0..m).map(|j| (e - j) as i128).product()
}

fn factorial_i128(m: u32) -> i128 {
    (1..=m as i128).product()
}

/// `D_{ξy}^α D_{ηx}^β (A ⊗ B)` restricted to the diagonal, computed term by term.
fn contract(a: &SymbolPoly, b: &SymbolPoly, alpha: u32, beta: u32) -> SymbolPoly {
    let n = a.dim();
    let mut out = SymbolPoly::zero(n);
    let (fa, fb) = (factorial_i128(alpha), factorial_i128(beta));
    let mut bound_m = vec![0u32; n];
    let mut bound_m2 = vec![0u32; n];
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let c = ca * cb;
            for i in 0..n {
                bound_m[i] = ma.xi()[i].min(mb.x()[i]);
                bound_m2[i] = ma.x()[i].min(mb.xi()[i]);
            }
            compositions(alpha, &bound_m, &mut |m| {
                let mut w1 = fa;
                for i in 0..n {
                    w1 = w1 / factorial_i128(m[i]) * falling(ma.xi()[i], m[i]) * falling(mb.x()[i], m[i]);
                }
                compositions(beta, &bound_m2, &mut |m2| {
                    let mut w = w1 * fb;
                    for i in 0..n {
                        w = w / factorial_i128(m2[i])
                            * falling(ma.x()[i], m2[i])
                            * falling(mb.xi()[i], m2[i]);
                    }
                    let x: Vec<u32> = (0..n).map(|i| ma.x()[i] - m2[i] + mb.x()[i] - m[i]).collect();
                    let xi: Vec<u32> = (0..n).map(|i| ma.xi()[i] - m[i] + mb.xi()[i] - m2[i]).collect();
                    let weight = Scalar::from_big(BigInt::from(w), BigInt::from(1));
                    out.add_term(Monomial::new(&x, &xi, ma.nu() + mb.nu()), &c * &weight);
                });
            });
        }
    }
    out
}

/// The homogeneous block `F_k ⋆ G_ℓ`.
fn star_block(
    fk: &SymbolPoly,
    gl: &SymbolPoly,
    k: u32,
    l: u32,
    source: &dyn CoeffSource,
) -> SymbolPoly {
    let n = fk.dim();
    let mut df = vec![fk.clone()];
    for g in 1..=k as usize {
        df.push(op_d(&df[g - 1]));
    }
    let mut dg = vec![gl.clone()];
    for d in 1..=l as usize {
        dg.push(op_d(&dg[d - 1]));
    }
    let mut out = SymbolPoly::zero(n);
    for r in 0..=k + l {
        let mut layer = SymbolPoly::zero(n);
        for idx in quadruples(r) {
            let key = CoeffKey::new(n as u32, k, l, idx);
            if !key.in_range() {
                continue;
            }
            let c = source.coeff(&key);
            if c.is_zero() {
                continue;
            }
            let [alpha, beta, gamma, delta] = idx;
            let (a, b) = (&df[gamma as usize], &dg[delta as usize]);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            layer = &layer + &contract(a, b, alpha, beta).scale(&c);
        }
        out = &out + &layer.shift_nu(r);
    }
    out
}

/// `F ⋆ G` with coefficients from `source`, extended bilinearly over graded parts.
pub fn star_with(f: &SymbolPoly, g: &SymbolPoly, source: &dyn CoeffSource) -> Result<SymbolPoly> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let mut out = SymbolPoly::zero(f.dim());
    let gparts = g.grade();
    for fp in f.grade() {
        for gp in &gparts {
            out = &out + &star_block(&fp.part, &gp.part, fp.k, gp.k, source);
        }
    }
    Ok(out)
}

/// The canonical star-product from the closed-form coefficient table.
pub fn star_explicit(f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
    star_with(f, g, CoeffTable::global())
}

/// Same product through [`PairSymbol`] contractions; slower, used as a cross-check.
pub fn star_via_pairs(
    f: &SymbolPoly,
    g: &SymbolPoly,
    source: &dyn CoeffSource,
) -> Result<SymbolPoly> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let n = f.dim();
    let mut out = SymbolPoly::zero(n);
    for fp in f.grade() {
        for gp in g.grade() {
            let t = PairSymbol::tensor(&fp.part, &gp.part)?;
            for r in 0..=fp.k + gp.k {
                for idx in quadruples(r) {
                    let c = source.coeff(&CoeffKey::new(n as u32, fp.k, gp.k, idx));
                    if c.is_zero() {
                        continue;
                    }
                    let [alpha, beta, gamma, delta] = idx;
                    let p = t
                        .bidiff_pow(Bidiff::XiY, alpha)
                        .bidiff_pow(Bidiff::EtaX, beta)
                        .bidiff_pow(Bidiff::XiX, gamma)
                        .bidiff_pow(Bidiff::EtaY, delta);
                    out = &out + &p.restrict().scale(&c).shift_nu(r);
                }
            }
        }
    }
    Ok(out)
}
