use proptest::prelude::*;
use starq_core::operators::OpExpr;
use starq_core::random::{SymbolRng, SymbolShape};
use starq_core::star::{homogeneity_defect, invariance_defect, strong_invariance_defect, symmetry_defect};
use starq_core::verify::random_operator;
use starq_core::{
    coeff_b, dequantize, generators, hochschild_delta, lift_lie, quantize, star_explicit, Cochain,
    EulerMode, ExplicitStar, GeometryKind, Monomial, NamedOp, QuantStar, Scalar, StarProduct, SymbolPoly,
    VectorField,
};

/// Symbols with at most `terms` terms, each exponent bounded per variable.
fn symbol(n: usize, x_max: u32, xi_max: u32, nu_max: u32, terms: usize) -> impl Strategy<Value = SymbolPoly> {
    let term = (
        prop::collection::vec(0..=x_max, n),
        prop::collection::vec(0..=xi_max, n),
        0..=nu_max,
        -6i64..=6,
        1i64..=4,
    );
    prop::collection::vec(term, 1..=terms).prop_map(move |ts| {
        SymbolPoly::from_terms(n, ts.into_iter().map(|(a, b, p, num, den)| (Monomial::new(&a, &b, p), Scalar::new(num, den))))
    })
}

fn triple(x_max: u32, xi_max: u32, nu_max: u32, terms: usize) -> impl Strategy<Value = (SymbolPoly, SymbolPoly, SymbolPoly)> {
    (1usize..=3).prop_flat_map(move |n| {
        (
            symbol(n, x_max, xi_max, nu_max, terms),
            symbol(n, x_max, xi_max, nu_max, terms),
            symbol(n, x_max, xi_max, nu_max, terms),
        )
    })
}

fn base_function(n: usize) -> impl Strategy<Value = SymbolPoly> {
    symbol(n, 2, 0, 0, 2)
}

fn rational() -> impl Strategy<Value = Scalar> {
    (-7i64..=7, 1i64..=5).prop_map(|(a, b)| Scalar::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws((f, g, h) in triple(2, 2, 1, 3)) {
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f + &(-&f), SymbolPoly::zero(f.dim()));
    }

    #[test]
    fn poisson_laws((f, g, h) in triple(2, 2, 1, 3)) {
        let pb = |a: &SymbolPoly, b: &SymbolPoly| a.poisson(b).unwrap();
        prop_assert_eq!(pb(&f, &g), -pb(&g, &f));
        let jacobi = &(&pb(&f, &pb(&g, &h)) + &pb(&g, &pb(&h, &f))) + &pb(&h, &pb(&f, &g));
        prop_assert!(jacobi.is_zero());
        prop_assert_eq!(pb(&f, &(&g * &h)), &(&pb(&f, &g) * &h) + &(&g * &pb(&f, &h)));
    }

    #[test]
    fn euler_is_a_derivation((f, g, _h) in triple(2, 3, 1, 3)) {
        let e = |p: &SymbolPoly| p.euler(EulerMode::E);
        prop_assert_eq!(e(&(&f * &g)), &(&e(&f) * &g) + &(&f * &e(&g)));
        let pb = |a: &SymbolPoly, b: &SymbolPoly| a.poisson(b).unwrap();
        let rhs = &(&pb(&e(&f), &g) + &pb(&f, &e(&g))) - &pb(&f, &g);
        prop_assert_eq!(e(&pb(&f, &g)), rhs);
    }

    #[test]
    fn display_parses_back((f, _g, _h) in triple(3, 3, 2, 4)) {
        let text = f.to_string();
        prop_assert_eq!(SymbolPoly::parse(&text, f.dim()).unwrap(), f);
    }

    #[test]
    fn scalar_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn lifts_are_derivations((f, g, _h) in triple(2, 2, 1, 2), pick in 0usize..64) {
        let n = f.dim();
        let fam = generators(GeometryKind::Projective { n });
        let x = &fam.members[pick % fam.len()].field;
        let l = |p: &SymbolPoly| lift_lie(x, p).unwrap();
        prop_assert_eq!(l(&(&f * &g)), &(&l(&f) * &g) + &(&f * &l(&g)));
        let pb = |a: &SymbolPoly, b: &SymbolPoly| a.poisson(b).unwrap();
        prop_assert_eq!(l(&pb(&f, &g)), &pb(&l(&f), &g) + &pb(&f, &l(&g)));
        for part in f.grade() {
            let moved = l(&f.graded_part(part.k));
            prop_assert!(moved.is_zero() || moved.xi_degree() == Some(part.k));
        }
    }

    #[test]
    fn euler_commutes_with_polynomial_lifts(
        (comps, f) in (1usize..=2).prop_flat_map(|n| (prop::collection::vec(base_function(n), n), symbol(n, 2, 3, 0, 3)))
    ) {
        let x = VectorField::new(comps).unwrap();
        let comm = OpExpr::commutator(NamedOp::Lift(x), NamedOp::E);
        prop_assert!(comm.apply(&f, None).unwrap().is_zero());
    }

    #[test]
    fn quantization_commutes_with_euler((f, _g, _h) in triple(2, 3, 1, 3), lambda in rational()) {
        let e = |p: &SymbolPoly| p.euler(EulerMode::EHat);
        prop_assert_eq!(e(quantize(&f, &lambda).base()), quantize(&e(&f), &lambda).into_base());
        prop_assert_eq!(dequantize(&quantize(&f, &lambda)), f);
    }

    #[test]
    fn coefficient_symmetry(n in 1u32..=4, k in 0u32..=5, l in 0u32..=5, idx in prop::array::uniform4(0u32..=3)) {
        let r = idx.iter().sum::<u32>();
        let [a, b, c, d] = idx;
        let lhs = coeff_b(n, k, l, a, b, c, d);
        let rhs = coeff_b(n, l, k, b, a, d, c);
        prop_assert_eq!(lhs, if r % 2 == 0 { rhs } else { -rhs });
    }

    #[test]
    fn star_has_the_expected_shape((f, g, _h) in triple(3, 3, 0, 2)) {
        let s = star_explicit(&f, &g).unwrap();
        prop_assert_eq!(s.nu_coefficient(0), &f * &g);
        prop_assert_eq!(s.nu_coefficient(1), f.poisson(&g).unwrap().scale(&Scalar::new(1, 2)));
        let one = SymbolPoly::one(f.dim());
        prop_assert_eq!(star_explicit(&one, &f).unwrap(), f.clone());
        prop_assert_eq!(star_explicit(&f, &one).unwrap(), f);
    }

    #[test]
    fn star_symmetry_and_homogeneity((f, g, _h) in triple(3, 3, 1, 2)) {
        let star = ExplicitStar::canonical(f.dim());
        prop_assert!(symmetry_defect(&star, &f, &g).unwrap().is_zero());
        prop_assert!(homogeneity_defect(&star, &f, &g).unwrap().is_zero());
    }

    #[test]
    fn star_invariance((f, g, _h) in triple(2, 3, 0, 2), pick in 0usize..64) {
        let n = f.dim();
        let star = ExplicitStar::canonical(n);
        let fam = generators(GeometryKind::Projective { n });
        let x = &fam.members[pick % fam.len()].field;
        prop_assert!(invariance_defect(&star, x, &f, &g).unwrap().is_zero());
        prop_assert!(strong_invariance_defect(&star, x, &f).unwrap().is_zero());
    }

    #[test]
    fn delta_squared_vanishes(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = SymbolRng::new(seed);
        let op = random_operator(&mut rng, n);
        let dd = hochschild_delta(&hochschild_delta(&Cochain::from_op(op, None)).unwrap()).unwrap();
        let mut shape = SymbolShape::new(n, 2);
        shape.nu_max = 1;
        let (f, g, h) = (rng.symbol(&shape), rng.symbol(&shape), rng.symbol(&shape));
        prop_assert!(dd.eval(&[&f, &g, &h]).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routes_agree((f, g, _h) in triple(2, 2, 1, 2)) {
        let quant = QuantStar::canonical(f.dim());
        prop_assert_eq!(star_explicit(&f, &g).unwrap(), quant.star(&f, &g).unwrap());
    }

    #[test]
    fn star_is_associative((f, g, h) in triple(2, 2, 0, 2)) {
        let star = ExplicitStar::canonical(f.dim());
        let lhs = star.star(&star.star(&f, &g).unwrap(), &h).unwrap();
        let rhs = star.star(&f, &star.star(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quantized_product_is_associative_for_any_weight((f, g, h) in triple(1, 2, 0, 2), lambda in rational()) {
        let star = QuantStar::new(f.dim(), lambda);
        let lhs = star.star(&star.star(&f, &g).unwrap(), &h).unwrap();
        let rhs = star.star(&f, &star.star(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
