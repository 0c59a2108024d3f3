//! Named linear operators on symbols and extensional operator identities.
//!
//! Operators are compared on a finite monomial basis (see [`Bounds`]); every
//! identity checked here is degree-local, so agreement on the basis is exact
//! on the spanned subspace.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{lift_lie, GeneratorFamily, Metric, VectorField};
use crate::scalar::Scalar;
use crate::symbol::{EulerMode, Monomial, SymbolPoly};

#[derive(Clone, PartialEq, Eq)]
pub enum NamedOp {
    Identity,
    /// `ξᵢ ∂/∂ξᵢ`
    E,
    /// `∂²/∂xⁱ∂ξᵢ`
    D,
    /// Multiplication by `ξⁱξᵢ`.
    R,
    /// `∂²/∂ξᵢ∂ξⁱ`
    T,
    /// `ξⁱ ∂/∂xⁱ`
    G,
    /// `∂²/∂xⁱ∂xᵢ`
    Delta,
    R0,
    G0,
    Delta0,
    /// `∂/∂ξᵢ`, zero-based.
    DXi(usize),
    /// `∂/∂xⁱ`, zero-based.
    DX(usize),
    Mult(SymbolPoly),
    Lift(VectorField),
}

impl NamedOp {
    pub fn needs_metric(&self) -> bool {
        matches!(
            self,
            NamedOp::R
                | NamedOp::T
                | NamedOp::G
                | NamedOp::Delta
                | NamedOp::R0
                | NamedOp::G0
                | NamedOp::Delta0
        )
    }

    fn name(&self) -> &'static str {
        match self {
            NamedOp::Identity => "Id",
            NamedOp::E => "E",
            NamedOp::D => "D",
            NamedOp::R => "R",
            NamedOp::T => "T",
            NamedOp::G => "G",
            NamedOp::Delta => "Delta",
            NamedOp::R0 => "R0",
            NamedOp::G0 => "G0",
            NamedOp::Delta0 => "Delta0",
            NamedOp::DXi(_) => "dxi",
            NamedOp::DX(_) => "dx",
            NamedOp::Mult(_) => "mult",
            NamedOp::Lift(_) => "lift",
        }
    }

    pub fn apply(&self, f: &SymbolPoly, metric: Option<&Metric>) -> Result<SymbolPoly> {
        let n = f.dim();
        let g = || {
            let m = metric.ok_or(Error::MissingMetric(self.name()))?;
            if m.dim() != n {
                return Err(Error::DimensionMismatch(n, m.dim()));
            }
            Ok(m)
        };
        let check_index = |i: usize| {
            if i >= n {
                Err(Error::Config(format!(
                    "operator index {} out of range 1..{n}",
                    i + 1
                )))
            } else {
                Ok(())
            }
        };
        Ok(match self {
            NamedOp::Identity => f.clone(),
            NamedOp::E => f.euler(EulerMode::E),
            NamedOp::D => op_d(f),
            NamedOp::R => &g()?.xi_square() * f,
            NamedOp::T => op_t(f, g()?),
            NamedOp::G => {
                let m = g()?;
                sum_over(n, |i| {
                    (&SymbolPoly::xi(n, i) * &f.d_x(i)).scale(&Scalar::from_int(m.sign(i)))
                })
            }
            NamedOp::Delta => {
                let m = g()?;
                sum_over(n, |i| f.d_x(i).d_x(i).scale(&Scalar::from_int(m.sign(i))))
            }
            NamedOp::R0 => NamedOp::R.apply(&op_t(f, g()?), metric)?,
            NamedOp::G0 => NamedOp::G.apply(&op_t(f, g()?), metric)?,
            NamedOp::Delta0 => NamedOp::Delta.apply(&op_t(f, g()?), metric)?,
            NamedOp::DXi(i) => {
                check_index(*i)?;
                f.d_xi(*i)
            }
            NamedOp::DX(i) => {
                check_index(*i)?;
                f.d_x(*i)
            }
            NamedOp::Mult(a) => a.try_mul(f)?,
            NamedOp::Lift(x) => lift_lie(x, f)?,
        })
    }
}

fn sum_over(n: usize, mut term: impl FnMut(usize) -> SymbolPoly) -> SymbolPoly {
    (0..n).fold(SymbolPoly::zero(n), |acc, i| &acc + &term(i))
}

/// `D = Σ ∂²/∂xⁱ∂ξᵢ`.
pub fn op_d(f: &SymbolPoly) -> SymbolPoly {
    sum_over(f.dim(), |i| f.d_xi(i).d_x(i))
}

fn op_t(f: &SymbolPoly, g: &Metric) -> SymbolPoly {
    sum_over(f.dim(), |i| {
        f.d_xi(i).d_xi(i).scale(&Scalar::from_int(g.sign(i)))
    })
}

impl fmt::Display for NamedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedOp::DXi(i) => write!(f, "dxi{}", i + 1),
            NamedOp::DX(i) => write!(f, "dx{}", i + 1),
            NamedOp::Mult(a) => write!(f, "mult({a})"),
            NamedOp::Lift(x) => write!(f, "lift({x})"),
            other => f.write_str(other.name()),
        }
    }
}

impl fmt::Debug for NamedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Operator expressions. `Compose([A, B])` is `A∘B`: `B` acts first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OpExpr {
    Named(NamedOp),
    Compose(Vec<OpExpr>),
    LinComb(Vec<(Scalar, OpExpr)>),
}

impl From<NamedOp> for OpExpr {
    fn from(op: NamedOp) -> Self {
        OpExpr::Named(op)
    }
}

impl OpExpr {
    pub fn then(self, first: impl Into<OpExpr>) -> OpExpr {
        OpExpr::Compose(vec![self, first.into()])
    }

    pub fn scaled(self, c: Scalar) -> OpExpr {
        OpExpr::LinComb(vec![(c, self)])
    }

    pub fn plus(self, other: impl Into<OpExpr>) -> OpExpr {
        OpExpr::LinComb(vec![(Scalar::one(), self), (Scalar::one(), other.into())])
    }

    /// `[A, B] = A∘B − B∘A`.
    pub fn commutator(a: impl Into<OpExpr>, b: impl Into<OpExpr>) -> OpExpr {
        let (a, b) = (a.into(), b.into());
        OpExpr::LinComb(vec![
            (Scalar::one(), OpExpr::Compose(vec![a.clone(), b.clone()])),
            (Scalar::from_int(-1), OpExpr::Compose(vec![b, a])),
        ])
    }

    pub fn apply(&self, f: &SymbolPoly, metric: Option<&Metric>) -> Result<SymbolPoly> {
        match self {
            OpExpr::Named(op) => op.apply(f, metric),
            OpExpr::Compose(ops) => {
                let mut acc = f.clone();
                for op in ops.iter().rev() {
                    acc = op.apply(&acc, metric)?;
                }
                Ok(acc)
            }
            OpExpr::LinComb(terms) => {
                let mut acc = SymbolPoly::zero(f.dim());
                for (c, op) in terms {
                    acc = acc.try_add(&op.apply(f, metric)?.scale(c))?;
                }
                Ok(acc)
            }
        }
    }
}

/// Total-degree bounds of a monomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub x_max: u32,
    pub xi_max: u32,
    pub nu_max: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            x_max: 3,
            xi_max: 4,
            nu_max: 0,
        }
    }
}

/// All exponent vectors of length `n` with total degree `≤ max`.
pub fn exponents_up_to(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max, &mut cur, &mut out);
    out
}

/// Monomial basis within `bounds`, sorted.
pub fn basis(n: usize, bounds: Bounds) -> Vec<Monomial> {
    let xs = exponents_up_to(n, bounds.x_max);
    let xis = exponents_up_to(n, bounds.xi_max);
    let mut out = Vec::with_capacity(xs.len() * xis.len() * (bounds.nu_max as usize + 1));
    for a in &xs {
        for b in &xis {
            for p in 0..=bounds.nu_max {
                out.push(Monomial::new(a, b, p));
            }
        }
    }
    out.sort();
    out
}

/// An operator tabulated on a monomial basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTable {
    pub n: usize,
    pub bounds: Bounds,
    pub entries: BTreeMap<Monomial, SymbolPoly>,
}

impl OpTable {
    pub fn build(
        op: &OpExpr,
        n: usize,
        bounds: Bounds,
        metric: Option<&Metric>,
    ) -> Result<OpTable> {
        let entries = basis(n, bounds)
            .into_par_iter()
            .map(|m| {
                let img = op.apply(&SymbolPoly::from_monomial(m.clone(), Scalar::one()), metric)?;
                Ok((m, img))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .collect();
        Ok(OpTable { n, bounds, entries })
    }

    /// First basis monomial on which the two tables differ.
    pub fn first_difference(&self, other: &OpTable) -> Option<Monomial> {
        self.entries
            .iter()
            .find(|(m, v)| other.entries.get(*m) != Some(*v))
            .map(|(m, _)| m.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(SymbolPoly::is_zero)
    }
}

pub fn commutator_table(
    a: impl Into<OpExpr>,
    b: impl Into<OpExpr>,
    n: usize,
    bounds: Bounds,
    metric: Option<&Metric>,
) -> Result<OpTable> {
    OpTable::build(&OpExpr::commutator(a, b), n, bounds, metric)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutantWitness {
    pub generator: String,
    pub monomial: Monomial,
    pub image: SymbolPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutantReport {
    pub commutes: bool,
    pub witness: Option<CommutantWitness>,
}

/// Checks `[lift(X), candidate] = 0` on the basis for every member of `family`.
pub fn commutant_check(
    family: &GeneratorFamily,
    candidate: &OpExpr,
    bounds: Bounds,
) -> Result<CommutantReport> {
    let n = family.dim();
    let metric = family.metric.as_ref();
    let basis = basis(n, bounds);
    for gen in &family.members {
        let comm = OpExpr::commutator(NamedOp::Lift(gen.field.clone()), candidate.clone());
        let hit = basis
            .par_iter()
            .map(|m| {
                let img = comm.apply(&SymbolPoly::from_monomial(m.clone(), Scalar::one()), metric)?;
                Ok((!img.is_zero()).then(|| (m.clone(), img)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        if let Some((monomial, image)) = hit {
            return Ok(CommutantReport {
                commutes: false,
                witness: Some(CommutantWitness {
                    generator: gen.label.clone(),
                    monomial,
                    image,
                }),
            });
        }
    }
    Ok(CommutantReport {
        commutes: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generators, GeneratorClass, GeometryKind};

    fn p(s: &str, n: usize) -> SymbolPoly {
        SymbolPoly::parse(s, n).unwrap()
    }

    fn named(op: NamedOp) -> OpExpr {
        op.into()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(NamedOp::D.apply(&p("x1*xi1^2", 1), None).unwrap(), p("2*xi1", 1));
        let g = Metric::euclidean(2);
        let f = p("xi1*xi2", 2);
        assert!(NamedOp::R0.apply(&f, Some(&g)).unwrap().is_zero());
        assert!(NamedOp::T.apply(&f, Some(&g)).unwrap().is_zero());
        let h = p("x1^2*xi1^3 + x2*xi1*xi2", 2);
        assert_eq!(
            NamedOp::E.apply(&h.graded_part(3), None).unwrap(),
            h.graded_part(3).scale(&Scalar::from_int(3))
        );
    }

    #[test]
    fn missing_metric() {
        let f = p("xi1^2", 1);
        assert_eq!(NamedOp::R.apply(&f, None), Err(Error::MissingMetric("R")));
        assert_eq!(NamedOp::Delta0.apply(&f, None), Err(Error::MissingMetric("Delta0")));
        let e = named(NamedOp::E).then(NamedOp::T);
        assert!(e.apply(&f, None).is_err());
        assert!(NamedOp::DX(3).apply(&f, None).is_err());
    }

    #[test]
    fn degree_shifts() {
        let g = Metric::new(1, 1);
        let f = p("x1*x2*xi1*xi2^2", 2);
        assert_eq!(NamedOp::D.apply(&f, None).unwrap().xi_degree(), Some(2));
        assert_eq!(NamedOp::D.apply(&f, None).unwrap().x_degree(), Some(1));
        assert_eq!(NamedOp::T.apply(&f, Some(&g)).unwrap().xi_degree(), Some(1));
        assert_eq!(NamedOp::R.apply(&f, Some(&g)).unwrap().xi_degree(), Some(5));
    }

    #[test]
    fn e_d_relation() {
        for n in 1..=3 {
            let lhs = commutator_table(NamedOp::E, NamedOp::D, n, Bounds::default(), None).unwrap();
            let rhs = OpTable::build(&named(NamedOp::D).scaled(Scalar::from_int(-1)), n, Bounds::default(), None).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sl2_relations() {
        for (p_, q) in [(1, 0), (2, 0), (1, 1), (2, 1)] {
            let n = p_ + q;
            let g = Metric::new(p_, q);
            let b = Bounds::default();
            let t = |e: &OpExpr| OpTable::build(e, n, b, Some(&g)).unwrap();
            assert_eq!(
                commutator_table(NamedOp::E, NamedOp::R, n, b, Some(&g)).unwrap(),
                t(&named(NamedOp::R).scaled(Scalar::from_int(2)))
            );
            assert_eq!(
                commutator_table(NamedOp::E, NamedOp::T, n, b, Some(&g)).unwrap(),
                t(&named(NamedOp::T).scaled(Scalar::from_int(-2)))
            );
            let rhs = OpExpr::LinComb(vec![
                (Scalar::from_int(-4), named(NamedOp::E)),
                (Scalar::from_int(-2 * n as i64), named(NamedOp::Identity)),
            ]);
            assert_eq!(commutator_table(NamedOp::R, NamedOp::T, n, b, Some(&g)).unwrap(), t(&rhs));
        }
    }

    #[test]
    fn r0_is_e_e_minus_1_on_the_line() {
        let g = Metric::euclidean(1);
        let b = Bounds::default();
        let e_e1 = named(NamedOp::E).then(OpExpr::LinComb(vec![
            (Scalar::one(), named(NamedOp::E)),
            (Scalar::from_int(-1), named(NamedOp::Identity)),
        ]));
        assert_eq!(
            OpTable::build(&named(NamedOp::R0), 1, b, Some(&g)).unwrap(),
            OpTable::build(&e_e1, 1, b, Some(&g)).unwrap()
        );
    }

    #[test]
    fn inversion_d_relation() {
        for n in 1..=3 {
            let fam = generators(GeometryKind::Projective { n });
            let b = Bounds {
                x_max: 3,
                xi_max: 3,
                nu_max: 0,
            };
            for (i, gen) in fam.of_class(GeneratorClass::Inversion).enumerate() {
                let lhs = commutator_table(NamedOp::Lift(gen.field.clone()), NamedOp::D, n, b, None).unwrap();
                let rhs = OpExpr::LinComb(vec![
                    (Scalar::from_int(2), named(NamedOp::E)),
                    (Scalar::from_int(n as i64 + 1), named(NamedOp::Identity)),
                ])
                .then(NamedOp::DXi(i));
                assert_eq!(lhs, OpTable::build(&rhs, n, b, None).unwrap());
            }
        }
    }

    #[test]
    fn commutant_examples() {
        let b = Bounds { x_max: 3, xi_max: 3, nu_max: 0 };
        let proj = generators(GeometryKind::Projective { n: 2 });
        assert!(commutant_check(&proj, &named(NamedOp::E), b).unwrap().commutes);
        let r = commutant_check(&proj, &named(NamedOp::D), b).unwrap();
        assert!(!r.commutes);
        let conf = generators(GeometryKind::Conformal { p: 2, q: 0 });
        assert!(commutant_check(&conf, &named(NamedOp::R0), b).unwrap().commutes);
        let w = commutant_check(&conf, &named(NamedOp::D), b).unwrap();
        assert!(!w.commutes);
        let w = w.witness.unwrap();
        assert!(!w.image.is_zero());
    }

    #[test]
    fn basis_size() {
        // C(3+2,2) x-monomials times C(4+2,2) ξ-monomials
        assert_eq!(basis(2, Bounds::default()).len(), 10 * 15);
        assert_eq!(exponents_up_to(3, 2).len(), 10);
    }
}
