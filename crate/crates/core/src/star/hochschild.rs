//! Hochschild cochains of the pointwise product and their coboundary.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::operators::OpExpr;
use crate::symbol::SymbolPoly;

type Unary = dyn Fn(&SymbolPoly) -> Result<SymbolPoly> + Send + Sync;
type Binary = dyn Fn(&SymbolPoly, &SymbolPoly) -> Result<SymbolPoly> + Send + Sync;
type Ternary = dyn Fn(&SymbolPoly, &SymbolPoly, &SymbolPoly) -> Result<SymbolPoly> + Send + Sync;

/// A multilinear map on symbols, given extensionally.
#[derive(Clone)]
pub enum Cochain {
    Unary(Arc<Unary>),
    Binary(Arc<Binary>),
    Ternary(Arc<Ternary>),
}

impl Cochain {
    pub fn unary(f: impl Fn(&SymbolPoly) -> Result<SymbolPoly> + Send + Sync + 'static) -> Self {
        Cochain::Unary(Arc::new(f))
    }

    pub fn binary(
        f: impl Fn(&SymbolPoly, &SymbolPoly) -> Result<SymbolPoly> + Send + Sync + 'static,
    ) -> Self {
        Cochain::Binary(Arc::new(f))
    }

    /// The operator `op` as a 1-cochain.
    pub fn from_op(op: OpExpr, metric: Option<Metric>) -> Self {
        Cochain::unary(move |f| op.apply(f, metric.as_ref()))
    }

    pub fn arity(&self) -> usize {
        match self {
            Cochain::Unary(_) => 1,
            Cochain::Binary(_) => 2,
            Cochain::Ternary(_) => 3,
        }
    }

    pub fn eval(&self, args: &[&SymbolPoly]) -> Result<SymbolPoly> {
        if args.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: args.len(),
            });
        }
        match self {
            Cochain::Unary(f) => f(args[0]),
            Cochain::Binary(f) => f(args[0], args[1]),
            Cochain::Ternary(f) => f(args[0], args[1], args[2]),
        }
    }
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain(arity {})", self.arity())
    }
}

/// `δA(F,G) = F·A(G) − A(FG) + A(F)·G` and
/// `δB(F,G,H) = F·B(G,H) − B(FG,H) + B(F,GH) − B(F,G)·H`.
pub fn hochschild_delta(c: &Cochain) -> Result<Cochain> {
    match c {
        Cochain::Unary(a) => {
            let a = Arc::clone(a);
            Ok(Cochain::binary(move |f, g| {
                let t1 = f.try_mul(&a(g)?)?;
                let t2 = a(&f.try_mul(g)?)?;
                let t3 = a(f)?.try_mul(g)?;
                t1.try_sub(&t2)?.try_add(&t3)
            }))
        }
        Cochain::Binary(b) => {
            let b = Arc::clone(b);
            Ok(Cochain::Ternary(Arc::new(move |f, g, h| {
                let t1 = f.try_mul(&b(g, h)?)?;
                let t2 = b(&f.try_mul(g)?, h)?;
                let t3 = b(f, &g.try_mul(h)?)?;
                let t4 = b(f, g)?.try_mul(h)?;
                t1.try_sub(&t2)?.try_add(&t3)?.try_sub(&t4)
            })))
        }
        Cochain::Ternary(_) => Err(Error::UnsupportedArity(3)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::VectorField;
    use crate::operators::NamedOp;
    use crate::random::{SymbolRng, SymbolShape};

    fn p(s: &str, n: usize) -> SymbolPoly {
        SymbolPoly::parse(s, n).unwrap()
    }

    #[test]
    fn examples() {
        let de = hochschild_delta(&Cochain::from_op(NamedOp::E.into(), None)).unwrap();
        assert!(de.eval(&[&p("x1", 1), &p("xi1", 1)]).unwrap().is_zero());
        let dd = hochschild_delta(&Cochain::from_op(NamedOp::D.into(), None)).unwrap();
        assert!(dd.eval(&[&p("x1", 1), &p("x1", 1)]).unwrap().is_zero());
        // A second-order operator is not a derivation.
        let dt = hochschild_delta(&Cochain::from_op(OpExpr::from(NamedOp::DXi(0)).then(NamedOp::DXi(0)), None)).unwrap();
        assert_eq!(dt.eval(&[&p("xi1", 1), &p("xi1", 1)]).unwrap(), SymbolPoly::constant(1, (-2).into()));
    }

    #[test]
    fn delta_squared_vanishes() {
        let mut rng = SymbolRng::new(5);
        let shape = SymbolShape::new(2, 2);
        let x = VectorField::parse(&["x1*x2", "x2^2"]).unwrap();
        let ops: Vec<OpExpr> = vec![
            NamedOp::E.into(),
            NamedOp::D.into(),
            NamedOp::Lift(x).into(),
            OpExpr::from(NamedOp::DXi(1)).then(NamedOp::DX(0)),
            OpExpr::from(NamedOp::Mult(p("x1*xi2", 2))).then(NamedOp::D),
        ];
        for op in ops {
            let dd = hochschild_delta(&hochschild_delta(&Cochain::from_op(op, None)).unwrap()).unwrap();
            for _ in 0..3 {
                let (f, g, h) = (rng.symbol(&shape), rng.symbol(&shape), rng.symbol(&shape));
                assert!(dd.eval(&[&f, &g, &h]).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn arity_errors() {
        let c = Cochain::from_op(NamedOp::E.into(), None);
        assert_eq!(
            c.eval(&[&p("x1", 1), &p("x1", 1)]),
            Err(Error::ArityMismatch { expected: 1, found: 2 })
        );
        let t = hochschild_delta(&hochschild_delta(&c).unwrap()).unwrap();
        assert_eq!(hochschild_delta(&t).unwrap_err(), Error::UnsupportedArity(3));
    }
}
