//! Coefficients recovered from the invariance equations alone.
//!
//! At each order the equations are homogeneous in the order-`r` unknowns;
//! fixing the `B_{α,β,0,0}` by the weight recursion leaves a linear system
//! for the rest, solved exactly by Gaussian elimination.

use std::collections::BTreeMap;

use super::coeffs::{quadruples, CoeffKey};
use super::residuals::{admissible_indices, residual_inversion, InversionEq};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `C_{α,β}(K)` by recursion on `α`, starting from `C_{0,0} = 1` and the
/// reflection `C_{0,β} = (−1)^β C_{β,0}`.
pub fn seed_weight(n: u32, big_k: u32, alpha: u32, beta: u32) -> Scalar {
    if alpha == 0 {
        if beta == 0 {
            return Scalar::one();
        }
        let v = seed_weight(n, big_k, beta, 0);
        return if beta % 2 == 1 { -v } else { v };
    }
    if big_k == 0 {
        return Scalar::zero();
    }
    let (a, b, nn, kk) = (alpha as i64, beta as i64, n as i64, big_k as i64);
    let num = Scalar::new(-(nn + 2 * kk - 2 * b - 1), 2);
    let den = a * (a + b - nn - 2 * kk);
    num * seed_weight(n, big_k - 1, alpha - 1, beta) / Scalar::from_int(den)
}

/// Row-reduces `rows` (each `[coeffs.., rhs]`) and returns the unique solution.
pub fn solve_linear(mut rows: Vec<Vec<Scalar>>, unknowns: usize) -> Result<Vec<Scalar>> {
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(unknowns);
    for col in 0..unknowns {
        let Some(p) = (pivot_row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            return Err(Error::LinearSystem(format!("unknown {col} is undetermined")));
        };
        rows.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip().expect("pivot is nonzero");
        for v in rows[pivot_row].iter_mut() {
            *v = &*v * &inv;
        }
        let pr = rows[pivot_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == pivot_row || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pr) {
                *v -= &(pv * &f);
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|r| !r[unknowns].is_zero()) {
        return Err(Error::LinearSystem("inconsistent equations".into()));
    }
    Ok(pivots.into_iter().map(|i| rows[i][unknowns].clone()).collect())
}

/// All in-range `B^{k,ℓ}_{α,β,γ,δ}` of order at most `r_max`, solved from the
/// invariance equations with the weight seeds.
pub fn solve_coefficients(n: u32, k: u32, l: u32, r_max: u32) -> Result<BTreeMap<[u32; 4], Scalar>> {
    let mut out = BTreeMap::new();
    for r in 0..=r_max {
        let in_range: Vec<[u32; 4]> = quadruples(r)
            .filter(|&idx| CoeffKey::new(n, k, l, idx).in_range())
            .collect();
        let mut known = BTreeMap::new();
        let mut unknown = Vec::new();
        for idx in in_range {
            if idx[2] == 0 && idx[3] == 0 {
                known.insert(idx, seed_weight(n, k + l, idx[0], idx[1]));
            } else {
                unknown.push(idx);
            }
        }
        let col: BTreeMap<[u32; 4], usize> = unknown.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut rows = Vec::new();
        for which in [InversionEq::First, InversionEq::Second] {
            for idx in admissible_indices(which, k, l, r) {
                // Residuals are linear, so probing with unit tables reads off a row.
                let mut row = vec![Scalar::zero(); unknown.len() + 1];
                let seeds = |key: &CoeffKey| known.get(&key.indices()).cloned().unwrap_or_else(Scalar::zero);
                row[unknown.len()] = -residual_inversion(which, n, k, l, idx, &seeds);
                for (&q, &c) in &col {
                    let unit = |key: &CoeffKey| {
                        if key.indices() == q {
                            Scalar::one()
                        } else {
                            Scalar::zero()
                        }
                    };
                    row[c] = residual_inversion(which, n, k, l, idx, &unit);
                }
                rows.push(row);
            }
        }
        let values = if unknown.is_empty() {
            let seeds = |key: &CoeffKey| known.get(&key.indices()).cloned().unwrap_or_else(Scalar::zero);
            let bad = [InversionEq::First, InversionEq::Second].into_iter().any(|w| {
                admissible_indices(w, k, l, r)
                    .into_iter()
                    .any(|idx| !residual_inversion(w, n, k, l, idx, &seeds).is_zero())
            });
            if bad {
                return Err(Error::LinearSystem(format!("seeds violate order {r}")));
            }
            Vec::new()
        } else {
            solve_linear(rows, unknown.len())?
        };
        out.extend(known);
        out.extend(unknown.into_iter().zip(values));
    }
    Ok(out)
}
