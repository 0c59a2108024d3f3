//! Closed-form coefficients `B^{k,ℓ}_{α,β,γ,δ}` of the canonical star-product.
//!
//! The value is built in three stages: `B_{α,β,0,0}` from the weight
//! function, then `γ`, then `δ`. Outside `α+γ ≤ k`, `β+δ ≤ ℓ` the paired
//! operator kills `S_k ⊗ S_ℓ` and the coefficient is reported as zero.

use std::collections::HashMap;
use std::io::{self, Write};
use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use crate::scalar::{binomial, factorial, pochhammer, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CoeffKey {
    pub n: u32,
    pub k: u32,
    pub l: u32,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
}

impl CoeffKey {
    pub fn new(n: u32, k: u32, l: u32, idx: [u32; 4]) -> Self {
        CoeffKey {
            n,
            k,
            l,
            alpha: idx[0],
            beta: idx[1],
            gamma: idx[2],
            delta: idx[3],
        }
    }

    pub fn indices(&self) -> [u32; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn order(&self) -> u32 {
        self.alpha + self.beta + self.gamma + self.delta
    }

    /// Whether the paired operator acts nontrivially on `S_k ⊗ S_ℓ`.
    pub fn in_range(&self) -> bool {
        self.alpha + self.gamma <= self.k && self.beta + self.delta <= self.l
    }
}

/// Anything that can supply star-product coefficients.
pub trait CoeffSource: Sync {
    fn coeff(&self, key: &CoeffKey) -> Scalar;
}

impl<F> CoeffSource for F
where
    F: Fn(&CoeffKey) -> Scalar + Sync,
{
    fn coeff(&self, key: &CoeffKey) -> Scalar {
        self(key)
    }
}

fn s(v: i64) -> Scalar {
    Scalar::from_int(v)
}

/// The weight function `C_{α,β}(K)`: the first-stage value with `K = k + ℓ`.
///
/// With `N = (n−1)/2 + K` and `r = α + β`:
/// `(−1)^β/r! · C(N−β, α) C(N−α, β) / C(n+2K−r, r)`.
pub fn weight_coefficient(n: u32, big_k: u32, alpha: u32, beta: u32) -> Scalar {
    let r = alpha + beta;
    let nn = Scalar::new(n as i64 - 1, 2) + s(big_k as i64);
    let num = binomial(&(&nn - &s(beta as i64)), alpha) * binomial(&(&nn - &s(alpha as i64)), beta);
    let den = binomial(&s(n as i64 + 2 * big_k as i64 - r as i64), r) * factorial(r);
    let v = num / den;
    if beta % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `B_{α,β,γ,0}` without the annihilation cut-off.
pub fn stage_gamma(n: u32, k: u32, l: u32, alpha: u32, beta: u32, gamma: u32) -> Scalar {
    let (a, b, g) = (alpha as i64, beta as i64, gamma as i64);
    let mut sum = Scalar::zero();
    for r in 0..=gamma {
        let t = gamma - r;
        let pre = binomial(&s(g), r)
            * pochhammer(&s(a + 1), r)
            * pochhammer(&s(b + 1), t)
            * pochhammer(&s(a - l as i64), r)
            * pochhammer(&s(b - l as i64), t);
        if pre.is_zero() {
            continue;
        }
        sum += &(pre * weight_coefficient(n, k + l, alpha + r, beta + t));
    }
    let den = factorial(gamma) * pochhammer(&s(n as i64 + 2 * k as i64 - g), gamma);
    sum / den
}

/// Closed form of `B^{k,ℓ}_{α,β,γ,δ}`, zero outside the effective range.
pub fn closed_form(key: &CoeffKey) -> Scalar {
    if !key.in_range() {
        return Scalar::zero();
    }
    let CoeffKey {
        n,
        k,
        l,
        alpha,
        beta,
        gamma,
        delta,
    } = *key;
    let (a, b, g, d) = (alpha as i64, beta as i64, gamma as i64, delta as i64);
    let mut sum = Scalar::zero();
    for r in 0..=delta {
        for s_ in 0..=(delta - r) {
            let t = delta - r - s_;
            if s_ > gamma {
                continue;
            }
            let tri = factorial(delta) / (factorial(r) * factorial(s_) * factorial(t));
            let mut pre = tri
                * pochhammer(&s(a + 1), r + s_)
                * pochhammer(&s(b + 1), s_ + t)
                * pochhammer(&s(a + g - k as i64), r)
                * pochhammer(&s(b + g - k as i64), t);
            if pre.is_zero() {
                continue;
            }
            if s_ % 2 == 1 {
                pre = -pre;
            }
            sum += &(pre * stage_gamma(n, k, l, alpha + r + s_, beta + s_ + t, gamma - s_));
        }
    }
    let den = factorial(delta) * pochhammer(&s(n as i64 + 2 * l as i64 - d), delta);
    sum / den
}

/// Memoized closed-form coefficients, safe to share between threads.
#[derive(Default)]
pub struct CoeffTable {
    memo: RwLock<HashMap<CoeffKey, Scalar>>,
}

impl CoeffTable {
    pub fn new() -> Self {
        CoeffTable::default()
    }

    /// The process-wide table used by [`coeff_b`].
    pub fn global() -> &'static CoeffTable {
        static TABLE: OnceLock<CoeffTable> = OnceLock::new();
        TABLE.get_or_init(CoeffTable::new)
    }

    pub fn get(&self, key: &CoeffKey) -> Scalar {
        if let Some(v) = self.memo.read().expect("coefficient memo poisoned").get(key) {
            return v.clone();
        }
        let v = closed_form(key);
        self.memo
            .write()
            .expect("coefficient memo poisoned")
            .entry(*key)
            .or_insert(v)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.memo.read().expect("coefficient memo poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl CoeffSource for CoeffTable {
    fn coeff(&self, key: &CoeffKey) -> Scalar {
        self.get(key)
    }
}

pub fn coeff_b(n: u32, k: u32, l: u32, alpha: u32, beta: u32, gamma: u32, delta: u32) -> Scalar {
    CoeffTable::global().get(&CoeffKey::new(n, k, l, [alpha, beta, gamma, delta]))
}

/// All `(α,β,γ,δ)` with `α+β+γ+δ = r`, lexicographic.
pub fn quadruples(r: u32) -> impl Iterator<Item = [u32; 4]> {
    (0..=r).flat_map(move |a| {
        (0..=r - a).flat_map(move |b| (0..=r - a - b).map(move |g| [a, b, g, r - a - b - g]))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoeffRow {
    #[serde(flatten)]
    pub key: CoeffKey,
    pub value: Scalar,
}

/// Every coefficient with `α+β+γ+δ ≤ r_max`, lexicographic in the key.
pub fn coefficient_rows(n: u32, k: u32, l: u32, r_max: u32, table: &CoeffTable) -> Vec<CoeffRow> {
    let mut keys: Vec<CoeffKey> = (0..=r_max)
        .flat_map(|r| quadruples(r).map(move |idx| CoeffKey::new(n, k, l, idx)))
        .collect();
    keys.sort();
    keys.into_iter()
        .map(|key| CoeffRow {
            value: table.get(&key),
            key,
        })
        .collect()
}

pub const CSV_HEADER: &str = "n,k,l,alpha,beta,gamma,delta,value";

pub fn write_csv<W: Write>(rows: &[CoeffRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let k = &row.key;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            k.n, k.k, k.l, k.alpha, k.beta, k.gamma, k.delta, row.value
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        for n in 1..=4 {
            for k in 0..=5 {
                for l in 0..=5 {
                    assert_eq!(coeff_b(n, k, l, 0, 0, 0, 0), Scalar::one());
                    if k >= 1 {
                        assert_eq!(coeff_b(n, k, l, 1, 0, 0, 0), Scalar::new(1, 2));
                    }
                    if l >= 1 {
                        assert_eq!(coeff_b(n, k, l, 0, 1, 0, 0), Scalar::new(-1, 2));
                    }
                }
            }
        }
    }

    #[test]
    fn pure_divergence_terms_vanish() {
        for n in 1..=3 {
            for k in 1..=3 {
                for l in 0..=3 {
                    assert!(coeff_b(n, k, l, 0, 0, 1, 0).is_zero());
                }
            }
        }
    }

    #[test]
    fn annihilation_convention() {
        assert!(coeff_b(1, 1, 1, 2, 0, 0, 0).is_zero());
        assert!(coeff_b(2, 0, 3, 1, 0, 0, 0).is_zero());
        assert!(coeff_b(2, 3, 1, 0, 1, 0, 1).is_zero());
        assert_eq!(weight_coefficient(1, 2, 2, 0), Scalar::new(1, 6));
    }

    #[test]
    fn weight_recursion() {
        // (r−j)(r−n−2K) C_{r−j,j}(K) + ½(n+2K−2j−1) C_{r−j−1,j}(K−1) = 0
        for n in 1..=4u32 {
            for big_k in 1..=6u32 {
                for r in 1..=big_k {
                    for j in 0..r {
                        let a = (r - j) as i64 * (r as i64 - n as i64 - 2 * big_k as i64);
                        let b = Scalar::new(n as i64 + 2 * big_k as i64 - 2 * j as i64 - 1, 2);
                        let lhs = weight_coefficient(n, big_k, r - j, j).mul_int(a)
                            + b * weight_coefficient(n, big_k - 1, r - j - 1, j);
                        assert!(lhs.is_zero(), "n={n} K={big_k} r={r} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn memo_is_consistent() {
        let t = CoeffTable::new();
        let key = CoeffKey::new(2, 2, 3, [1, 1, 1, 1]);
        let a = t.get(&key);
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(&key), a);
        assert_eq!(a, closed_form(&key));
    }

    #[test]
    fn quadruple_count() {
        // C(r+3, 3)
        assert_eq!(quadruples(0).count(), 1);
        assert_eq!(quadruples(3).count(), 20);
        let v: Vec<_> = quadruples(1).collect();
        assert_eq!(v, vec![[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]);
    }

    #[test]
    fn csv_rows() {
        let rows = coefficient_rows(3, 2, 1, 1, &CoeffTable::new());
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 5);
        assert_eq!(lines[1], "3,2,1,0,0,0,0,1");
        assert!(lines.contains(&"3,2,1,1,0,0,0,1/2"));
        assert!(lines.contains(&"3,2,1,0,1,0,0,-1/2"));
    }
}
