//! Polynomial vector fields on ℝⁿ, their cotangent lifts and the projective
//! and conformal generator families.

mod multivector;

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symbol::SymbolPoly;

pub use multivector::{canonical_bivectors, extra_bivector, lift_vector, Bivectors, Multivector};

/// `X = Xⁱ ∂/∂xⁱ` with polynomial components.
#[derive(Clone, PartialEq, Eq)]
pub struct VectorField {
    components: Vec<SymbolPoly>,
}

impl VectorField {
    /// Fails if a component depends on ξ or h, or the dimensions disagree.
    pub fn new(components: Vec<SymbolPoly>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::Config("vector field needs at least one component".into()));
        }
        for c in &components {
            if c.dim() != n {
                return Err(Error::DimensionMismatch(n, c.dim()));
            }
            if !c.is_base_function() {
                return Err(Error::NotBaseFunction(c.to_string()));
            }
        }
        Ok(VectorField { components })
    }

    pub fn parse(components: &[&str]) -> Result<Self> {
        let n = components.len();
        let cs = components
            .iter()
            .map(|s| SymbolPoly::parse(s, n))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(cs)
    }

    pub fn zero(n: usize) -> Self {
        VectorField {
            components: vec![SymbolPoly::zero(n); n],
        }
    }

    /// `c · ∂/∂xⁱ`.
    pub fn coordinate(n: usize, i: usize, c: SymbolPoly) -> Self {
        let mut v = VectorField::zero(n);
        v.components[i] = c;
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SymbolPoly] {
        &self.components
    }

    /// `Xⁱ ∂f/∂xⁱ`, for any symbol `f` (ξ is left untouched).
    pub fn derive(&self, f: &SymbolPoly) -> SymbolPoly {
        let mut out = SymbolPoly::zero(self.dim());
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.d_x(i);
            if !d.is_zero() {
                out = &out + &(c * &d);
            }
        }
        out
    }

    pub fn divergence(&self) -> SymbolPoly {
        let mut out = SymbolPoly::zero(self.dim());
        for (i, c) in self.components.iter().enumerate() {
            out = &out + &c.d_x(i);
        }
        out
    }

    /// Lie bracket `[X, Y]ⁱ = X(Yⁱ) − Y(Xⁱ)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| &self.derive(y) - &other.derive(x))
            .collect();
        Ok(VectorField { components })
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(VectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> VectorField {
        VectorField {
            components: self.components.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SymbolPoly::is_zero)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})*d/dx{}", i + 1)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField({self})")
    }
}

/// Moment map `J_X = ξᵢXⁱ`.
pub fn moment(x: &VectorField) -> SymbolPoly {
    let n = x.dim();
    let mut out = SymbolPoly::zero(n);
    for (i, c) in x.components.iter().enumerate() {
        out = &out + &(c * &SymbolPoly::xi(n, i));
    }
    out
}

/// Lie derivative along the cotangent lift of `X`, i.e. `{J_X, F}`.
pub fn lift_lie(x: &VectorField, f: &SymbolPoly) -> Result<SymbolPoly> {
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch(x.dim(), f.dim()));
    }
    moment(x).poisson(f)
}

/// `L_X^λ f = Xⁱ∂ᵢf + λ div(X) f` on λ-densities written in the flat chart.
pub fn density_lie(x: &VectorField, lambda: &Scalar, f: &SymbolPoly) -> Result<SymbolPoly> {
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch(x.dim(), f.dim()));
    }
    if f.terms().any(|(m, _)| m.xi_degree() > 0) {
        return Err(Error::NotBaseFunction(f.to_string()));
    }
    Ok(&x.derive(f) + &(&x.divergence() * f).scale(lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    Projective { n: usize },
    Conformal { p: usize, q: usize },
}

impl GeometryKind {
    pub fn dim(&self) -> usize {
        match *self {
            GeometryKind::Projective { n } => n,
            GeometryKind::Conformal { p, q } => p + q,
        }
    }

    pub fn metric(&self) -> Option<Metric> {
        match *self {
            GeometryKind::Projective { .. } => None,
            GeometryKind::Conformal { p, q } => Some(Metric::new(p, q)),
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryKind::Projective { .. } => f.write_str("projective"),
            GeometryKind::Conformal { p, q } => write!(f, "conformal:{p},{q}"),
        }
    }
}

/// Constant diagonal metric `diag(+1^p, −1^q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Metric {
    signs: Vec<i64>,
}

impl Metric {
    pub fn new(p: usize, q: usize) -> Self {
        let mut signs = vec![1; p];
        signs.extend(vec![-1; q]);
        Metric { signs }
    }

    pub fn euclidean(n: usize) -> Self {
        Metric::new(n, 0)
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    /// `g_ii = g^ii`.
    pub fn sign(&self, i: usize) -> i64 {
        self.signs[i]
    }

    /// `g^{ij} ξᵢ ξⱼ`.
    pub fn xi_square(&self) -> SymbolPoly {
        let n = self.dim();
        let mut out = SymbolPoly::zero(n);
        for i in 0..n {
            let xi = SymbolPoly::xi(n, i);
            out = &out + &(&xi * &xi).scale(&Scalar::from_int(self.signs[i]));
        }
        out
    }

    /// `g_{ij} xⁱ xʲ`.
    pub fn x_square(&self) -> SymbolPoly {
        let n = self.dim();
        let mut out = SymbolPoly::zero(n);
        for i in 0..n {
            let x = SymbolPoly::x(n, i);
            out = &out + &(&x * &x).scale(&Scalar::from_int(self.signs[i]));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorClass {
    Translation,
    Linear,
    Rotation,
    Homothety,
    Inversion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub class: GeneratorClass,
    pub field: VectorField,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorFamily {
    pub kind: GeometryKind,
    pub members: Vec<Generator>,
    pub metric: Option<Metric>,
}

impl GeneratorFamily {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn fields(&self) -> impl Iterator<Item = &VectorField> {
        self.members.iter().map(|g| &g.field)
    }

    pub fn of_class(&self, class: GeneratorClass) -> impl Iterator<Item = &Generator> {
        self.members.iter().filter(move |g| g.class == class)
    }
}

/// The generator family in the order translations, linear maps or rotations,
/// homothety (conformal only), inversions.
pub fn generators(kind: GeometryKind) -> GeneratorFamily {
    let n = kind.dim();
    assert!(n >= 1, "dimension must be positive");
    let x = |i: usize| SymbolPoly::x(n, i);
    let one = SymbolPoly::one(n);
    let mut members = Vec::new();
    let mut push = |label: String, class, field| {
        members.push(Generator {
            label,
            class,
            field,
        })
    };

    for i in 0..n {
        push(
            format!("d/dx{}", i + 1),
            GeneratorClass::Translation,
            VectorField::coordinate(n, i, one.clone()),
        );
    }
    let metric = kind.metric();
    match &metric {
        None => {
            for i in 0..n {
                for j in 0..n {
                    push(
                        format!("x{}*d/dx{}", i + 1, j + 1),
                        GeneratorClass::Linear,
                        VectorField::coordinate(n, j, x(i)),
                    );
                }
            }
            for i in 0..n {
                let comps = (0..n).map(|j| &x(i) * &x(j)).collect();
                push(
                    format!("x{0}*x^j*d/dxj [{0}]", i + 1),
                    GeneratorClass::Inversion,
                    VectorField { components: comps },
                );
            }
        }
        Some(g) => {
            let lower = |i: usize| x(i).scale(&Scalar::from_int(g.sign(i)));
            for i in 0..n {
                for j in i + 1..n {
                    let a = VectorField::coordinate(n, j, lower(i));
                    let b = VectorField::coordinate(n, i, lower(j));
                    push(
                        format!("x_{0}*d/dx{1} - x_{1}*d/dx{0}", i + 1, j + 1),
                        GeneratorClass::Rotation,
                        a.add(&b.scale(&Scalar::from_int(-1))).expect("same dimension"),
                    );
                }
            }
            push(
                "x^i*d/dxi".into(),
                GeneratorClass::Homothety,
                VectorField {
                    components: (0..n).map(x).collect(),
                },
            );
            let r2 = g.x_square();
            for i in 0..n {
                let comps = (0..n)
                    .map(|j| {
                        let t = (&lower(i) * &x(j)).scale(&Scalar::from_int(-2));
                        if i == j {
                            &r2 + &t
                        } else {
                            t
                        }
                    })
                    .collect();
                push(
                    format!("x_j*x^j*d/dx{0} - 2*x_{0}*x^j*d/dxj", i + 1),
                    GeneratorClass::Inversion,
                    VectorField { components: comps },
                );
            }
        }
    }
    GeneratorFamily {
        kind,
        members,
        metric,
    }
}
