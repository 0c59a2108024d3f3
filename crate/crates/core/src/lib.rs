//! Exact symbol calculus for projectively equivariant quantization and the
//! canonical projectively invariant star-product on T*ℝⁿ.

pub mod error;
pub mod geometry;
pub mod operators;
pub mod quantization;
pub mod random;
pub mod scalar;
pub mod star;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{binomial, factorial, pochhammer, Scalar};
pub use geometry::{
    canonical_bivectors, extra_bivector, generators, lift_lie, moment, GeometryKind, Metric,
    Multivector, VectorField,
};
pub use operators::{Bounds, NamedOp, OpExpr};
pub use quantization::{dequantize, quantize, star_quant, DiffOpSymbol, Quantizer};
pub use star::{
    coeff_b, hochschild_delta, star_explicit, Cochain, CoeffKey, CoeffTable, ExplicitStar,
    QuantStar, StarProduct, TransformedStar,
};
pub use symbol::{parse_symbol, EulerMode, GradedPart, Monomial, SymbolPoly};
pub use verify::{run_suite, Report, Suite, VerifyConfig};
