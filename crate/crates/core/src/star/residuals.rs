//! Defining equations of the coefficient table, evaluated as residuals.
//!
//! Both the invariance recursions and the associativity condition are
//! linear (resp. quadratic) identities among the `B^{k,ℓ}_{α,β,γ,δ}`; a
//! residual is zero exactly when the identity holds.

use std::collections::BTreeMap;

use super::coeffs::{quadruples, CoeffKey, CoeffSource};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InversionEq {
    First,
    Second,
}

fn b(src: &dyn CoeffSource, n: u32, k: u32, l: u32, idx: [i64; 4]) -> Scalar {
    if idx.iter().any(|&v| v < 0) {
        return Scalar::zero();
    }
    let idx = idx.map(|v| v as u32);
    src.coeff(&CoeffKey::new(n, k, l, idx))
}

/// Whether the equation at `idx` only involves coefficients inside the
/// effective range.
pub fn admissible(which: InversionEq, k: u32, l: u32, idx: [u32; 4]) -> bool {
    let [a, b, g, d] = idx;
    match which {
        InversionEq::First => a + g < k && b + d <= l,
        InversionEq::Second => a + g <= k && b + d < l,
    }
}

/// Admissible index tuples whose equation constrains the order-`r` coefficients.
pub fn admissible_indices(which: InversionEq, k: u32, l: u32, r: u32) -> Vec<[u32; 4]> {
    if r == 0 {
        return Vec::new();
    }
    quadruples(r - 1)
        .filter(|&idx| admissible(which, k, l, idx))
        .collect()
}

/// Left side minus right side of the chosen invariance recursion.
pub fn residual_inversion(
    which: InversionEq,
    n: u32,
    k: u32,
    l: u32,
    idx: [u32; 4],
    src: &dyn CoeffSource,
) -> Scalar {
    let [a, be, g, d] = idx.map(|v| v as i64);
    let (ni, ki, li) = (n as i64, k as i64, l as i64);
    let bb = |i: [i64; 4]| b(src, n, k, l, i);
    match which {
        InversionEq::First => {
            bb([a + 1, be, g, d]).mul_int((a + 1) * (a + d - li))
                + bb([a, be + 1, g, d]).mul_int((be + 1) * (be + d - li))
                - bb([a, be, g + 1, d]).mul_int((g + 1) * (ni + 2 * ki - g - 1))
                - bb([a + 1, be + 1, g, d - 1]).mul_int((a + 1) * (be + 1))
        }
        InversionEq::Second => {
            bb([a, be + 1, g, d]).mul_int((be + 1) * (be + g - ki))
                + bb([a + 1, be, g, d]).mul_int((a + 1) * (a + g - ki))
                - bb([a, be, g, d + 1]).mul_int((d + 1) * (ni + 2 * li - d - 1))
                - bb([a + 1, be + 1, g - 1, d]).mul_int((a + 1) * (be + 1))
        }
    }
}

/// Monomial in the nine contraction generators `D_{uv}`, indexed `3u + v`
/// with `u ∈ {ξ, η, ζ}` (the fiber slot) and `v ∈ {x, y, z}` (the base slot).
pub type GenMonomial = [u32; 9];

type GenPoly = BTreeMap<GenMonomial, Scalar>;

const XI: usize = 0;
const ETA: usize = 1;
const ZETA: usize = 2;
const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

fn gen_add(acc: &mut GenPoly, m: GenMonomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(m).or_insert_with(Scalar::zero);
    *e += &c;
    if e.is_zero() {
        acc.remove(&m);
    }
}

fn gen_mul(p: &GenPoly, q: &GenPoly) -> GenPoly {
    let mut out = GenPoly::new();
    for (m1, c1) in p {
        for (m2, c2) in q {
            let mut m = [0; 9];
            for i in 0..9 {
                m[i] = m1[i] + m2[i];
            }
            gen_add(&mut out, m, c1 * c2);
        }
    }
    out
}

fn gen_one() -> GenPoly {
    let mut p = GenPoly::new();
    p.insert([0; 9], Scalar::one());
    p
}

/// Sum of the listed generators.
fn gen_sum(gens: &[(usize, usize)]) -> GenPoly {
    let mut p = GenPoly::new();
    for &(u, v) in gens {
        let mut m = [0; 9];
        m[3 * u + v] = 1;
        gen_add(&mut p, m, Scalar::one());
    }
    p
}

fn refs(a: &[GenPoly; 4]) -> [&GenPoly; 4] {
    [&a[0], &a[1], &a[2], &a[3]]
}

fn gen_pow(p: &GenPoly, e: u32) -> GenPoly {
    (0..e).fold(gen_one(), |acc, _| gen_mul(&acc, p))
}

/// `Σ_{α+β+γ+δ=r} B^{k,ℓ}_{αβγδ} P_α^α P_β^β P_γ^γ P_δ^δ` for the four given
/// generator sums.
fn layer(src: &dyn CoeffSource, n: u32, k: u32, l: u32, r: u32, ops: [&GenPoly; 4]) -> GenPoly {
    let mut out = GenPoly::new();
    for idx in quadruples(r) {
        let c = src.coeff(&CoeffKey::new(n, k, l, idx));
        if c.is_zero() {
            continue;
        }
        let mut t = gen_one();
        for (op, &e) in ops.iter().zip(idx.iter()) {
            t = gen_mul(&t, &gen_pow(op, e));
        }
        for (m, v) in t {
            gen_add(&mut out, m, v * &c);
        }
    }
    out
}

/// Order-`r` associativity residual for `F ∈ S_k`, `G ∈ S_ℓ`, `H ∈ S_m`:
/// `Σ_j B_{r−j}^{k,ℓ+m−j}(F, B_j^{ℓ,m}(G,H)) − B_{r−j}^{k+ℓ−j,m}(B_j^{k,ℓ}(F,G), H)`
/// written in the contraction generators of the tripled space.
///
/// Only monomials with at most `k` ξ-, `ℓ` η- and `m` ζ-derivatives are kept;
/// the others annihilate `S_k ⊗ S_ℓ ⊗ S_m` and carry no condition.
pub fn residual_assoc(
    n: u32,
    k: u32,
    l: u32,
    m: u32,
    r: u32,
    src: &dyn CoeffSource,
) -> BTreeMap<GenMonomial, Scalar> {
    // F ⋆ (G ⋆ H): inner acts on (η, y) ⊗ (ζ, z); the outer pairs (ξ, x) with
    // the product, whose base and fiber variables are y, z and η, ζ.
    let in_r = [
        gen_sum(&[(ETA, Z)]),
        gen_sum(&[(ZETA, Y)]),
        gen_sum(&[(ETA, Y)]),
        gen_sum(&[(ZETA, Z)]),
    ];
    let out_r = [
        gen_sum(&[(XI, Y), (XI, Z)]),
        gen_sum(&[(ETA, X), (ZETA, X)]),
        gen_sum(&[(XI, X)]),
        gen_sum(&[(ETA, Y), (ETA, Z), (ZETA, Y), (ZETA, Z)]),
    ];
    // (F ⋆ G) ⋆ H
    let in_l = [
        gen_sum(&[(XI, Y)]),
        gen_sum(&[(ETA, X)]),
        gen_sum(&[(XI, X)]),
        gen_sum(&[(ETA, Y)]),
    ];
    let out_l = [
        gen_sum(&[(XI, Z), (ETA, Z)]),
        gen_sum(&[(ZETA, X), (ZETA, Y)]),
        gen_sum(&[(XI, X), (XI, Y), (ETA, X), (ETA, Y)]),
        gen_sum(&[(ZETA, Z)]),
    ];
    let mut res = GenPoly::new();
    for j in 0..=r {
        if l + m >= j {
            let inner = layer(src, n, l, m, j, refs(&in_r));
            if !inner.is_empty() {
                let outer = layer(src, n, k, l + m - j, r - j, refs(&out_r));
                for (mono, c) in gen_mul(&outer, &inner) {
                    gen_add(&mut res, mono, c);
                }
            }
        }
        if k + l >= j {
            let inner = layer(src, n, k, l, j, refs(&in_l));
            if !inner.is_empty() {
                let outer = layer(src, n, k + l - j, m, r - j, refs(&out_l));
                for (mono, c) in gen_mul(&outer, &inner) {
                    gen_add(&mut res, mono, -c);
                }
            }
        }
    }
    res.retain(|mono, _| {
        let row = |u: usize| mono[3 * u] + mono[3 * u + 1] + mono[3 * u + 2];
        row(XI) <= k && row(ETA) <= l && row(ZETA) <= m
    });
    res
}
