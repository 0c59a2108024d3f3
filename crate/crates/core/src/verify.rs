//! Named property checks grouped into suites, with a JSON report.
//!
//! Random inputs are drawn from a seeded generator before any check runs,
//! so a report depends only on the configuration and the seed.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{
    canonical_bivectors, generators, moment, GeneratorClass, GeneratorFamily, GeometryKind, Metric, Multivector,
};
use crate::operators::{basis, commutant_check, commutator_table, Bounds, NamedOp, OpExpr, OpTable};
use crate::quantization::{density_lie_symbol, q_coeff, quantize, Quantizer};
use crate::random::{SymbolRng, SymbolShape};
use crate::scalar::Scalar;
use crate::star::residuals::{admissible_indices, residual_assoc, residual_inversion, InversionEq};
use crate::star::solver::solve_coefficients;
use crate::star::{
    associativity_defect, covariance_defect, hochschild_delta, homogeneity_defect,
    invariance_defect, star_commutator, strong_invariance_defect, symmetry_defect, Cochain,
    CoeffKey, CoeffTable, ExplicitStar, QuantStar, StarProduct, TransformedStar,
};
use crate::symbol::{EulerMode, SymbolPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Algebra,
    Operators,
    Quantization,
    Star,
    Hochschild,
    Bivectors,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Algebra,
        Suite::Operators,
        Suite::Quantization,
        Suite::Star,
        Suite::Hochschild,
        Suite::Bivectors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Operators => "operators",
            Suite::Quantization => "quantization",
            Suite::Star => "star",
            Suite::Hochschild => "hochschild",
            Suite::Bivectors => "bivectors",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub n: usize,
    pub geometry: GeometryKind,
    pub lambda: Scalar,
    /// Bound on the total x- and ξ-degrees of sampled and enumerated symbols.
    pub max_deg: u32,
    pub seed: u64,
    /// Random cases per sampled check.
    pub samples: usize,
}

impl VerifyConfig {
    pub fn new(n: usize) -> Self {
        VerifyConfig {
            n,
            geometry: GeometryKind::Projective { n },
            lambda: Scalar::new(1, 2),
            max_deg: 3,
            seed: 0,
            samples: 100,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if self.geometry.dim() != self.n {
            return Err(Error::Config(format!(
                "geometry {} has dimension {}, but n = {}",
                self.geometry,
                self.geometry.dim(),
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// What the check asserts, in words.
    #[serde(rename = "paper_anchor")]
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub n: usize,
    pub geometry: String,
    pub lambda: Scalar,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `Ok(None)` is a pass, `Ok(Some(w))` a failure with witness `w`.
type Outcome = Result<Option<Value>>;
type CheckFn = Box<dyn Fn() -> Outcome + Send + Sync>;

struct Check {
    name: &'static str,
    anchor: &'static str,
    run: CheckFn,
}

fn check(name: &'static str, anchor: &'static str, run: impl Fn() -> Outcome + Send + Sync + 'static) -> Check {
    Check {
        name,
        anchor,
        run: Box::new(run),
    }
}

fn sym(p: &SymbolPoly) -> Value {
    Value::String(p.to_string())
}

fn witness_if(cond: bool, w: impl FnOnce() -> Value) -> Outcome {
    Ok((!cond).then(w))
}

fn first_failure<T: Sync>(cases: &[T], f: impl Fn(&T) -> Outcome + Sync) -> Outcome {
    let found = cases
        .par_iter()
        .map(&f)
        .find_first(|o| !matches!(o, Ok(None)));
    found.unwrap_or(Ok(None))
}

fn samples(rng: &mut SymbolRng, shape: &SymbolShape, count: usize, arity: usize) -> Vec<Vec<SymbolPoly>> {
    (0..count)
        .map(|_| (0..arity).map(|_| rng.symbol(shape)).collect())
        .collect()
}

/// Runs one suite (or every suite) and assembles a report sorted by check name.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Report> {
    cfg.validate()?;
    let suites: Vec<Suite> = if suite == Suite::All {
        Suite::ALL.to_vec()
    } else {
        vec![suite]
    };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(build(s, cfg));
    }
    let mut results: Vec<CheckResult> = checks
        .par_iter()
        .map(|c| {
            let (status, witness) = match (c.run)() {
                Ok(None) => (Status::Pass, None),
                Ok(Some(w)) => (Status::Fail, Some(w)),
                Err(e) => (Status::Fail, Some(json!({ "error": e.to_string() }))),
            };
            CheckResult {
                name: c.name.to_string(),
                anchor: c.anchor.to_string(),
                status,
                witness,
            }
        })
        .collect();
    results.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report {
        schema: 1,
        suite: suite.to_string(),
        n: cfg.n,
        geometry: cfg.geometry.to_string(),
        lambda: cfg.lambda.clone(),
        seed: cfg.seed,
        checks: results,
    })
}

fn build(suite: Suite, cfg: &VerifyConfig) -> Vec<Check> {
    let mut rng = SymbolRng::new(cfg.seed ^ suite_salt(suite));
    match suite {
        Suite::Algebra => algebra(cfg, &mut rng),
        Suite::Operators => operators(cfg),
        Suite::Quantization => quantization(cfg, &mut rng),
        Suite::Star => star(cfg, &mut rng),
        Suite::Hochschild => hochschild(cfg, &mut rng),
        Suite::Bivectors => bivectors(cfg),
        Suite::All => Vec::new(),
    }
}

fn suite_salt(suite: Suite) -> u64 {
    Suite::ALL.iter().position(|&s| s == suite).unwrap_or(0) as u64 * 0x9e37_79b9
}

fn algebra(cfg: &VerifyConfig, rng: &mut SymbolRng) -> Vec<Check> {
    let mut shape = SymbolShape::new(cfg.n, cfg.max_deg);
    shape.nu_max = 1;
    let triples = Arc::new(samples(rng, &shape, cfg.samples, 3));
    let mut out = Vec::new();

    let t = Arc::clone(&triples);
    out.push(check("ring-laws", "pointwise product is commutative, associative and distributive", move || {
        first_failure(&t, |c| {
            let (f, g, h) = (&c[0], &c[1], &c[2]);
            let ok = f * g == g * f
                && &(f * g) * h == f * &(g * h)
                && f * &(g + h) == &(f * g) + &(f * h);
            witness_if(ok, || json!({ "F": sym(f), "G": sym(g), "H": sym(h) }))
        })
    }));

    let t = Arc::clone(&triples);
    out.push(check("poisson-antisymmetry", "{F,G} = -{G,F}", move || {
        first_failure(&t, |c| {
            let (f, g) = (&c[0], &c[1]);
            let s = &f.poisson(g)? + &g.poisson(f)?;
            witness_if(s.is_zero(), || json!({ "F": sym(f), "G": sym(g), "sum": sym(&s) }))
        })
    }));

    let t = Arc::clone(&triples);
    out.push(check("poisson-jacobi", "Jacobi identity for the canonical bracket", move || {
        first_failure(&t, |c| {
            let (f, g, h) = (&c[0], &c[1], &c[2]);
            let j = &(&f.poisson(&g.poisson(h)?)? + &g.poisson(&h.poisson(f)?)?) + &h.poisson(&f.poisson(g)?)?;
            witness_if(j.is_zero(), || json!({ "F": sym(f), "G": sym(g), "H": sym(h), "sum": sym(&j) }))
        })
    }));

    let t = Arc::clone(&triples);
    out.push(check("poisson-leibniz", "{F,GH} = {F,G}H + G{F,H}", move || {
        first_failure(&t, |c| {
            let (f, g, h) = (&c[0], &c[1], &c[2]);
            let d = &f.poisson(&(g * h))? - &(&(&f.poisson(g)? * h) + &(g * &f.poisson(h)?));
            witness_if(d.is_zero(), || json!({ "F": sym(f), "G": sym(g), "H": sym(h), "defect": sym(&d) }))
        })
    }));

    let t = Arc::clone(&triples);
    out.push(check("euler-derivation", "E and E + h d/dh are derivations of the pointwise product", move || {
        first_failure(&t, |c| {
            let (f, g) = (&c[0], &c[1]);
            for mode in [EulerMode::E, EulerMode::EHat] {
                let d = &(f * g).euler(mode) - &(&(&f.euler(mode) * g) + &(f * &g.euler(mode)));
                if !d.is_zero() {
                    return Ok(Some(json!({ "F": sym(f), "G": sym(g), "mode": format!("{mode:?}") })));
                }
            }
            Ok(None)
        })
    }));

    let t = Arc::clone(&triples);
    let n = cfg.n;
    out.push(check("parse-roundtrip", "printing then parsing a symbol is the identity", move || {
        first_failure(&t, |c| {
            let f = &c[0];
            let back = SymbolPoly::parse(&f.to_string(), n)?;
            witness_if(&back == f, || json!({ "F": sym(f), "parsed": sym(&back) }))
        })
    }));
    out
}

fn table_eq(lhs: &OpTable, rhs: &OpTable) -> Outcome {
    Ok(lhs.first_difference(rhs).map(|m| {
        json!({
            "monomial": sym(&SymbolPoly::from_monomial(m.clone(), Scalar::one())),
            "lhs": sym(&lhs.entries[&m]),
            "rhs": sym(&rhs.entries[&m]),
        })
    }))
}

fn named(op: NamedOp) -> OpExpr {
    op.into()
}

fn lin(terms: Vec<(i64, OpExpr)>) -> OpExpr {
    OpExpr::LinComb(terms.into_iter().map(|(c, e)| (Scalar::from_int(c), e)).collect())
}

fn commutant(family: GeneratorFamily, op: OpExpr, b: Bounds) -> Outcome {
    let r = commutant_check(&family, &op, b)?;
    Ok(r.witness.map(|w| {
        json!({
            "generator": w.generator,
            "monomial": sym(&SymbolPoly::from_monomial(w.monomial, Scalar::one())),
            "image": sym(&w.image),
        })
    }))
}

fn operators(cfg: &VerifyConfig) -> Vec<Check> {
    let n = cfg.n;
    let b = Bounds::default();
    let metric = cfg.geometry.metric().unwrap_or_else(|| Metric::euclidean(n));
    let mut out = Vec::new();

    out.push(check("[E,D] = -D", "the divergence lowers the xi-degree by one", move || {
        let lhs = commutator_table(NamedOp::E, NamedOp::D, n, b, None)?;
        table_eq(&lhs, &OpTable::build(&named(NamedOp::D).scaled(Scalar::from_int(-1)), n, b, None)?)
    }));

    let g = metric.clone();
    out.push(check("sl2", "[E,R] = 2R, [E,T] = -2T, [R,T] = -4E - 2n", move || {
        let t = |e: &OpExpr| OpTable::build(e, n, b, Some(&g));
        let cases = [
            (NamedOp::E, NamedOp::R, lin(vec![(2, named(NamedOp::R))])),
            (NamedOp::E, NamedOp::T, lin(vec![(-2, named(NamedOp::T))])),
            (
                NamedOp::R,
                NamedOp::T,
                lin(vec![(-4, named(NamedOp::E)), (-2 * n as i64, named(NamedOp::Identity))]),
            ),
        ];
        for (x, y, rhs) in cases {
            let w = table_eq(&commutator_table(x, y, n, b, Some(&g))?, &t(&rhs)?)?;
            if w.is_some() {
                return Ok(w);
            }
        }
        Ok(None)
    }));

    out.push(check(
        "[lift(X_i),D] = (2E+n+1)d/dxi_i",
        "commutator of the divergence with the projective inversions",
        move || {
            let fam = generators(GeometryKind::Projective { n });
            let b = Bounds { x_max: 3, xi_max: 3, nu_max: 0 };
            for (i, gen) in fam.of_class(GeneratorClass::Inversion).enumerate() {
                let lhs = commutator_table(NamedOp::Lift(gen.field.clone()), NamedOp::D, n, b, None)?;
                let rhs = lin(vec![(2, named(NamedOp::E)), (n as i64 + 1, named(NamedOp::Identity))])
                    .then(NamedOp::DXi(i));
                if let Some(w) = table_eq(&lhs, &OpTable::build(&rhs, n, b, None)?)? {
                    return Ok(Some(json!({ "generator": gen.label, "difference": w })));
                }
            }
            Ok(None)
        },
    ));

    if n == 1 {
        out.push(check("R0 = E(E-1)", "on the line R∘T reduces to a polynomial in E", move || {
            let g = Metric::euclidean(1);
            let rhs = named(NamedOp::E).then(lin(vec![(1, named(NamedOp::E)), (-1, named(NamedOp::Identity))]));
            table_eq(
                &OpTable::build(&named(NamedOp::R0), 1, b, Some(&g))?,
                &OpTable::build(&rhs, 1, b, Some(&g))?,
            )
        }));
    }

    let kind = cfg.geometry;
    match kind {
        GeometryKind::Projective { .. } => {
            out.push(check("commutant: E", "E commutes with every projective lift", move || {
                commutant(generators(kind), named(NamedOp::E), b)
            }));
        }
        GeometryKind::Conformal { .. } => {
            out.push(check("commutant: E, R0", "E and R0 commute with every conformal lift", move || {
                let w = commutant(generators(kind), named(NamedOp::E), b)?;
                if w.is_some() {
                    return Ok(w);
                }
                commutant(generators(kind), named(NamedOp::R0), b)
            }));
            out.push(check("non-commutant: D", "some conformal lift fails to commute with D", move || {
                let r = commutant_check(&generators(kind), &named(NamedOp::D), b)?;
                Ok((r.commutes).then(|| json!({ "commutes": true })))
            }));
        }
    }
    out
}

fn quantization(cfg: &VerifyConfig, rng: &mut SymbolRng) -> Vec<Check> {
    let n = cfg.n;
    let lambda = cfg.lambda.clone();
    let mut shape = SymbolShape::new(n, cfg.max_deg);
    shape.nu_max = 1;
    let cases = Arc::new(samples(rng, &shape, cfg.samples, 3));
    let quant = Arc::new(Quantizer::new(n, lambda.clone()));
    let mut out = Vec::new();

    out.push(check("C1 = 1/2", "at weight 1/2 the first-order coefficient is 1/2 on every degree", move || {
        let half = Scalar::new(1, 2);
        for e in 0..=10 {
            let c = q_coeff(1, e, &half, n);
            if c != half {
                return Ok(Some(json!({ "degree": e, "value": c })));
            }
        }
        Ok(None)
    }));

    let lam = lambda.clone();
    out.push(check("moment-quantization", "Q(J_X) = h L_X on densities for every projective generator", move || {
        let fam = generators(GeometryKind::Projective { n });
        let mut lambdas = vec![Scalar::new(1, 3), Scalar::new(1, 2), Scalar::one()];
        if !lambdas.contains(&lam) {
            lambdas.push(lam.clone());
        }
        for l in &lambdas {
            for gen in &fam.members {
                let q = quantize(&moment(&gen.field), l);
                let expected = density_lie_symbol(&gen.field, l);
                if q != expected {
                    return Ok(Some(json!({
                        "generator": gen.label, "lambda": l, "quantized": sym(q.base()), "expected": sym(expected.base()),
                    })));
                }
            }
        }
        Ok(None)
    }));

    let (c, q) = (Arc::clone(&cases), Arc::clone(&quant));
    out.push(check("round-trip", "dequantize inverts quantize", move || {
        first_failure(&c, |t| {
            let back = q.dequantize(&q.quantize(&t[0]))?;
            witness_if(back == t[0], || json!({ "F": sym(&t[0]), "back": sym(&back) }))
        })
    }));

    let (c, lam) = (Arc::clone(&cases), lambda.clone());
    out.push(check("equivariance", "[h L_X, Q(F)] = h Q(L_X F) for every projective generator", move || {
        let fam = generators(GeometryKind::Projective { n });
        let subset: Vec<SymbolPoly> = c.iter().take(20).map(|t| t[0].clone()).collect();
        let fails = crate::quantization::check_equivariance(&lam, &fam, &subset)?;
        Ok(fails.into_iter().next().map(|f| {
            json!({ "generator": f.generator, "F": sym(&f.symbol), "defect": sym(&f.defect) })
        }))
    }));

    let (c, q) = (Arc::clone(&cases), Arc::clone(&quant));
    out.push(check("associativity", "the composition product is associative", move || {
        let st = QuantStarRef(&q);
        first_failure(&c[..c.len().min(30)], |t| {
            let d = associativity_defect(&st, &t[0], &t[1], &t[2])?;
            witness_if(d.is_zero(), || json!({ "F": sym(&t[0]), "G": sym(&t[1]), "H": sym(&t[2]) }))
        })
    }));

    if lambda == Scalar::new(1, 2) {
        let (c, q) = (Arc::clone(&cases), Arc::clone(&quant));
        out.push(check("adjoint", "the formal adjoint of Q(F) is Q(conj F) at weight 1/2", move || {
            first_failure(&c, |t| {
                let lhs = q.quantize(&t[0]).adjoint()?;
                let rhs = q.quantize(&t[0].conj());
                witness_if(lhs == rhs, || json!({ "F": sym(&t[0]), "adjoint": sym(lhs.base()) }))
            })
        }));
    }
    out
}

/// Borrowed view of a [`Quantizer`] as a product.
struct QuantStarRef<'a>(&'a Quantizer);

impl StarProduct for QuantStarRef<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn star(&self, f: &SymbolPoly, g: &SymbolPoly) -> Result<SymbolPoly> {
        self.0.star(f, g)
    }
}

/// Every pair of monomials with x- and ξ-degree at most `max_deg` where the
/// explicit and composition products disagree; `None` if there is none.
pub fn route_equivalence(n: usize, max_deg: u32) -> Outcome {
    let monos: Vec<SymbolPoly> = basis(n, Bounds { x_max: max_deg, xi_max: max_deg, nu_max: 0 })
        .into_iter()
        .map(|m| SymbolPoly::from_monomial(m, Scalar::one()))
        .collect();
    let explicit = ExplicitStar::canonical(n);
    let quant = QuantStar::canonical(n);
    // Compare after quantizing: Q(F⋆G) = Q(F)∘Q(G) is equivalent and avoids
    // a dequantization per pair.
    let q = quant.quantizer();
    let qs: Vec<_> = monos.par_iter().map(|f| q.quantize(f)).collect();
    let pairs: Vec<(usize, usize)> = (0..monos.len())
        .flat_map(|i| (0..monos.len()).map(move |j| (i, j)))
        .collect();
    first_failure(&pairs, |&(i, j)| {
        let e = explicit.star(&monos[i], &monos[j])?;
        let lhs = q.quantize(&e);
        let rhs = qs[i].compose(&qs[j])?;
        if lhs == rhs {
            return Ok(None);
        }
        let via = q.dequantize(&rhs)?;
        Ok(Some(json!({ "F": sym(&monos[i]), "G": sym(&monos[j]), "explicit": sym(&e), "composition": sym(&via) })))
    })
}

fn coefficient_checks(n: usize) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(check("normalization", "B_0000 = 1 and B_1000 = -B_0100 = 1/2, closed form and solver", move || {
        let t = CoeffTable::global();
        for k in 0..=5u32 {
            for l in 0..=5u32 {
                let sol = solve_coefficients(n as u32, k, l, 1)?;
                let mut want = vec![([0, 0, 0, 0], Scalar::one())];
                if k >= 1 {
                    want.push(([1, 0, 0, 0], Scalar::new(1, 2)));
                }
                if l >= 1 {
                    want.push(([0, 1, 0, 0], Scalar::new(-1, 2)));
                }
                for (idx, v) in want {
                    let c = t.get(&CoeffKey::new(n as u32, k, l, idx));
                    let s = sol.get(&idx).cloned().unwrap_or_else(Scalar::zero);
                    if c != v || s != v {
                        return Ok(Some(json!({ "k": k, "l": l, "index": idx, "closed": c, "solver": s })));
                    }
                }
            }
        }
        Ok(None)
    }));
    out.push(check("solver-oracle", "closed form equals the solution of the invariance system", move || {
        let t = CoeffTable::global();
        for k in 0..=3u32 {
            for l in 0..=3u32 {
                for (idx, v) in solve_coefficients(n as u32, k, l, k + l)? {
                    let c = t.get(&CoeffKey::new(n as u32, k, l, idx));
                    if c != v {
                        return Ok(Some(json!({ "k": k, "l": l, "index": idx, "closed": c, "solver": v })));
                    }
                }
            }
        }
        Ok(None)
    }));
    out.push(check("inversion-residuals", "both invariance recursions vanish on the closed form", move || {
        let t = CoeffTable::global();
        for k in 0..=3 {
            for l in 0..=3 {
                for r in 1..=4 {
                    for which in [InversionEq::First, InversionEq::Second] {
                        for idx in admissible_indices(which, k, l, r) {
                            let v = residual_inversion(which, n as u32, k, l, idx, t);
                            if !v.is_zero() {
                                return Ok(Some(json!({
                                    "equation": format!("{which:?}"), "k": k, "l": l, "index": idx, "residual": v,
                                })));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }));
    out.push(check("associativity-residuals", "coefficient-level associativity on the tripled space", move || {
        let t = CoeffTable::global();
        for k in 0..=2 {
            for l in 0..=2 {
                for m in 0..=2 {
                    for r in 0..=3 {
                        let res = residual_assoc(n as u32, k, l, m, r, t);
                        if let Some((mono, v)) = res.into_iter().next() {
                            return Ok(Some(json!({ "k": k, "l": l, "m": m, "r": r, "monomial": mono, "value": v })));
                        }
                    }
                }
            }
        }
        Ok(None)
    }));
    out.push(check("coefficient-symmetry", "B^{k,l}_{abcd} = (-1)^r B^{l,k}_{badc}", move || {
        let t = CoeffTable::global();
        for k in 0..=4u32 {
            for l in 0..=4u32 {
                for r in 0..=k + l {
                    for [a, b, g, d] in crate::star::coeffs::quadruples(r) {
                        let lhs = t.get(&CoeffKey::new(n as u32, k, l, [a, b, g, d]));
                        let rhs = t.get(&CoeffKey::new(n as u32, l, k, [b, a, d, g]));
                        let rhs = if r % 2 == 1 { -rhs } else { rhs };
                        if lhs != rhs {
                            return Ok(Some(json!({ "k": k, "l": l, "index": [a, b, g, d] })));
                        }
                    }
                }
            }
        }
        Ok(None)
    }));
    out
}

fn star(cfg: &VerifyConfig, rng: &mut SymbolRng) -> Vec<Check> {
    let n = cfg.n;
    let max_deg = cfg.max_deg;
    let shape = SymbolShape::new(n, max_deg);
    let cases = Arc::new(samples(rng, &shape, cfg.samples, 3));
    let star: Arc<ExplicitStar> = Arc::new(ExplicitStar::canonical(n));
    let fam = Arc::new(generators(GeometryKind::Projective { n }));
    let mut out = coefficient_checks(n);

    out.push(check("route-equivalence", "explicit coefficients reproduce the composition product at weight 1/2", move || {
        route_equivalence(n, max_deg)
    }));

    let (c, s) = (Arc::clone(&cases), Arc::clone(&star));
    out.push(check("associativity", "(F*G)*H = F*(G*H)", move || {
        first_failure(&c, |t| {
            let d = associativity_defect(s.as_ref(), &t[0], &t[1], &t[2])?;
            witness_if(d.is_zero(), || json!({ "F": sym(&t[0]), "G": sym(&t[1]), "H": sym(&t[2]), "defect": sym(&d) }))
        })
    }));

    // Each case pairs a random generator with random symbols.
    let gen_ix: Arc<Vec<usize>> = Arc::new((0..cfg.samples).map(|_| rng.below(fam.len())).collect());
    let gen_iy: Arc<Vec<usize>> = Arc::new((0..cfg.samples).map(|_| rng.below(fam.len())).collect());
    let indexed = Arc::new((0..cfg.samples).collect::<Vec<_>>());

    let (c, s, f, gi, ix) = (Arc::clone(&cases), Arc::clone(&star), Arc::clone(&fam), Arc::clone(&gen_ix), Arc::clone(&indexed));
    out.push(check("invariance", "lifted vector fields are derivations of the product", move || {
        first_failure(&ix, |&i| {
            let gen = &f.members[gi[i]];
            let d = invariance_defect(s.as_ref(), &gen.field, &c[i][0], &c[i][1])?;
            witness_if(d.is_zero(), || json!({ "generator": gen.label, "F": sym(&c[i][0]), "G": sym(&c[i][1]), "defect": sym(&d) }))
        })
    }));

    let (c, s, f, gi, ix) = (Arc::clone(&cases), Arc::clone(&star), Arc::clone(&fam), Arc::clone(&gen_ix), Arc::clone(&indexed));
    out.push(check("strong-invariance", "J_X*F - F*J_X = h{J_X,F}", move || {
        first_failure(&ix, |&i| {
            let gen = &f.members[gi[i]];
            let d = strong_invariance_defect(s.as_ref(), &gen.field, &c[i][0])?;
            witness_if(d.is_zero(), || json!({ "generator": gen.label, "F": sym(&c[i][0]), "defect": sym(&d) }))
        })
    }));

    let (s, f, gi, gj, ix) = (Arc::clone(&star), Arc::clone(&fam), Arc::clone(&gen_ix), Arc::clone(&gen_iy), Arc::clone(&indexed));
    out.push(check("covariance", "J_X*J_Y - J_Y*J_X = h J_[X,Y]", move || {
        first_failure(&ix, |&i| {
            let (x, y) = (&f.members[gi[i]], &f.members[gj[i]]);
            let d = covariance_defect(s.as_ref(), &x.field, &y.field)?;
            witness_if(d.is_zero(), || json!({ "X": x.label, "Y": y.label, "defect": sym(&d) }))
        })
    }));

    let (s, f) = (Arc::clone(&star), Arc::clone(&fam));
    out.push(check("star-commutator", "(J_X*J_Y - J_Y*J_X)/h = {J_X,J_Y}", move || {
        for x in f.fields() {
            for y in f.fields() {
                let (jx, jy) = (moment(x), moment(y));
                let c = star_commutator(&jx, &jy, s.as_ref())?;
                let p = jx.poisson(&jy)?;
                if c != p {
                    return Ok(Some(json!({ "JX": sym(&jx), "JY": sym(&jy), "commutator": sym(&c) })));
                }
            }
        }
        Ok(None)
    }));

    let (c, s) = (Arc::clone(&cases), Arc::clone(&star));
    out.push(check("symmetry", "conj(F*G) = conj(G)*conj(F)", move || {
        first_failure(&c, |t| {
            let d = symmetry_defect(s.as_ref(), &t[0], &t[1])?;
            witness_if(d.is_zero(), || json!({ "F": sym(&t[0]), "G": sym(&t[1]), "defect": sym(&d) }))
        })
    }));

    let (c, s) = (Arc::clone(&cases), Arc::clone(&star));
    out.push(check("homogeneity", "E + h d/dh is a derivation of the product", move || {
        first_failure(&c, |t| {
            let d = homogeneity_defect(s.as_ref(), &t[0], &t[1])?;
            witness_if(d.is_zero(), || json!({ "F": sym(&t[0]), "G": sym(&t[1]), "defect": sym(&d) }))
        })
    }));
    out
}

/// A random operator expression of low order, built from named operators.
pub fn random_operator(rng: &mut SymbolRng, n: usize) -> OpExpr {
    let fam = generators(GeometryKind::Projective { n });
    let atom = |rng: &mut SymbolRng| -> OpExpr {
        match rng.below(6) {
            0 => NamedOp::E.into(),
            1 => NamedOp::D.into(),
            2 => NamedOp::DXi(rng.below(n)).into(),
            3 => NamedOp::DX(rng.below(n)).into(),
            4 => NamedOp::Mult(rng.symbol(&SymbolShape::new(n, 1))).into(),
            _ => NamedOp::Lift(fam.members[rng.below(fam.len())].field.clone()).into(),
        }
    };
    let a = atom(rng);
    let b = atom(rng);
    let c = atom(rng);
    let (s1, s2) = (rng.scalar(), rng.scalar());
    OpExpr::LinComb(vec![(s1, a.then(b)), (s2, c)])
}

fn hochschild(cfg: &VerifyConfig, rng: &mut SymbolRng) -> Vec<Check> {
    let n = cfg.n;
    let count = cfg.samples.max(1);
    let ops: Vec<OpExpr> = (0..count).map(|_| random_operator(rng, n)).collect();
    let mut shape = SymbolShape::new(n, cfg.max_deg.min(2));
    shape.nu_max = 1;
    let cases = Arc::new(
        ops.into_iter()
            .map(|op| (op, rng.symbol(&shape), rng.symbol(&shape), rng.symbol(&shape)))
            .collect::<Vec<_>>(),
    );
    let mut out = Vec::new();

    out.push(check("delta-squared", "the coboundary squares to zero on 1-cochains", move || {
        first_failure(&cases, |(op, f, g, h)| {
            let dd = hochschild_delta(&hochschild_delta(&Cochain::from_op(op.clone(), None))?)?;
            let v = dd.eval(&[f, g, h])?;
            witness_if(v.is_zero(), || json!({ "operator": format!("{op:?}"), "F": sym(f), "G": sym(g), "H": sym(h) }))
        })
    }));

    let mut sshape = SymbolShape::new(n, cfg.max_deg);
    sshape.nu_max = 1;
    let pairs = Arc::new(samples(rng, &sshape, 20, 2));
    out.push(check("derivations-are-cocycles", "E and the lifts are 1-cocycles; d/dxi d/dxi is not", move || {
        let fam = generators(GeometryKind::Projective { n });
        let mut derivations: Vec<OpExpr> = vec![NamedOp::E.into()];
        derivations.extend(fam.fields().map(|x| NamedOp::Lift(x.clone()).into()));
        for op in derivations {
            let d = hochschild_delta(&Cochain::from_op(op.clone(), None))?;
            for pr in pairs.iter() {
                let v = d.eval(&[&pr[0], &pr[1]])?;
                if !v.is_zero() {
                    return Ok(Some(json!({ "operator": format!("{op:?}"), "F": sym(&pr[0]), "G": sym(&pr[1]) })));
                }
            }
        }
        let t = OpExpr::from(NamedOp::DXi(0)).then(NamedOp::DXi(0));
        let d = hochschild_delta(&Cochain::from_op(t, None))?;
        let xi = SymbolPoly::xi(n, 0);
        let v = d.eval(&[&xi, &xi])?;
        witness_if(!v.is_zero(), || json!({ "operator": "dxi1^2", "value": sym(&v) }))
    }));

    out.push(check("equivalence-euler", "conjugating by Id + hE keeps invariance and breaks homogeneity", move || {
        euler_equivalence_demo(n)
    }));
    out
}

/// `Φ = Id + hE` applied to the canonical product: every projective
/// invariance check passes, the homogeneity check fails.
pub fn euler_equivalence_demo(n: usize) -> Outcome {
    let inner: Arc<dyn StarProduct> = Arc::new(ExplicitStar::canonical(n));
    let phi = vec![(1, Cochain::from_op(NamedOp::E.into(), None))];
    let t = TransformedStar::new(inner, phi, vec![Scalar::one()], 6)?;
    let fam = generators(GeometryKind::Projective { n });
    let mut rng = SymbolRng::new(n as u64);
    let shape = SymbolShape { n, x_max: 2, xi_max: 2, nu_max: 0, max_terms: 2 };
    for _ in 0..4 {
        let (f, g) = (rng.symbol(&shape), rng.symbol(&shape));
        for gen in &fam.members {
            let d = invariance_defect(&t, &gen.field, &f, &g)?;
            if !d.is_zero() {
                return Ok(Some(json!({ "invariance": "fail", "generator": gen.label, "F": sym(&f), "G": sym(&g) })));
            }
        }
    }
    let f = SymbolPoly::xi(n, 0).pow(2);
    let g = SymbolPoly::x(n, 0).pow(2);
    let d = homogeneity_defect(&t, &f, &g)?;
    witness_if(!d.is_zero(), || json!({ "homogeneity": "unexpectedly holds" }))
}

/// `[Π,Λ]` as computed by hand: `2 g^{ii} ξᵢ` on `∂_ξ1 ∧ ∂_ξ2 ∧ ∂_{xⁱ}`.
pub fn expected_pi_lambda(metric: &Metric) -> Multivector {
    let mut m = Multivector::zero(2, 3);
    for i in 0..2 {
        let c = SymbolPoly::xi(2, i).scale(&Scalar::from_int(2 * metric.sign(i)));
        m.add_term(&[0, 1, 2 + i], &c);
    }
    m
}

fn bivectors(cfg: &VerifyConfig) -> Vec<Check> {
    let n = cfg.n;
    let kind = cfg.geometry;
    let mut out = Vec::new();
    out.push(check("pi-poisson", "[Π,Π] = 0 and Π(dF,dG) = {F,G}", move || {
        let b = canonical_bivectors(n, kind)?;
        let s = b.pi.schouten(&b.pi)?;
        if !s.is_zero() {
            return Ok(Some(json!({ "bracket": s.to_string() })));
        }
        let f = SymbolPoly::x(n, 0).pow(2).try_mul(&SymbolPoly::xi(n, n - 1))?;
        let g = SymbolPoly::xi(n, 0).pow(3).try_mul(&SymbolPoly::x(n, n - 1))?;
        let lhs = b.pi.apply_bivector(&f, &g)?;
        witness_if(lhs == f.poisson(&g)?, || json!({ "F": sym(&f), "G": sym(&g), "value": sym(&lhs) }))
    }));
    out.push(check("pi-invariant", "Π is invariant under the lifts of both families", move || {
        let b = canonical_bivectors(n, kind)?;
        let mut kinds = vec![GeometryKind::Projective { n }];
        kinds.extend((0..=n).map(|p| GeometryKind::Conformal { p, q: n - p }));
        for k in kinds {
            for gen in generators(k).members {
                let l = b.pi.lie_derivative(&gen.field)?;
                if !l.is_zero() {
                    return Ok(Some(json!({ "geometry": k.to_string(), "generator": gen.label, "derivative": l.to_string() })));
                }
            }
        }
        Ok(None)
    }));
    if let (GeometryKind::Conformal { .. }, 2) = (kind, n) {
        out.push(check("lambda-invariant", "Λ is invariant under the conformal lifts", move || {
            let lam = canonical_bivectors(2, kind)?.lambda.ok_or(Error::NoExtraBivector)?;
            for gen in generators(kind).members {
                let l = lam.lie_derivative(&gen.field)?;
                if !l.is_zero() {
                    return Ok(Some(json!({ "generator": gen.label, "derivative": l.to_string() })));
                }
            }
            Ok(None)
        }));
        out.push(check("schouten-nonzero", "[Π,Λ] is the nonzero 3-vector 2 g(ξ) ∂ξ1∧∂ξ2∧∂x", move || {
            let b = canonical_bivectors(2, kind)?;
            let lam = b.lambda.ok_or(Error::NoExtraBivector)?;
            let s = b.pi.schouten(&lam)?;
            let metric = kind.metric().expect("conformal geometry has a metric");
            let expected = expected_pi_lambda(&metric);
            witness_if(!s.is_zero() && s == expected, || {
                json!({ "bracket": s.to_string(), "expected": expected.to_string() })
            })
        }));
    }
    out
}

/// `Λ` fails to be invariant under some projective inversion.
pub fn lambda_breaks_projective() -> Result<bool> {
    let lam = canonical_bivectors(2, GeometryKind::Conformal { p: 2, q: 0 })?
        .lambda
        .ok_or(Error::NoExtraBivector)?;
    let fam = generators(GeometryKind::Projective { n: 2 });
    for gen in fam.of_class(GeneratorClass::Inversion) {
        if !lam.lie_derivative(&gen.field)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}
