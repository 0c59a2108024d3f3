use criterion::{black_box, criterion_group, criterion_main, Criterion};
use starq_core::star::coeffs::coefficient_rows;
use starq_core::{quantize, star_explicit, CoeffTable, QuantStar, Scalar, StarProduct, SymbolPoly};

fn p(s: &str, n: usize) -> SymbolPoly {
    SymbolPoly::parse(s, n).unwrap()
}

fn coefficients(c: &mut Criterion) {
    c.bench_function("coeff table n=2 k=l=4", |b| {
        b.iter(|| {
            let table = CoeffTable::new();
            black_box(coefficient_rows(2, 4, 4, 8, &table))
        })
    });
}

fn products(c: &mut Criterion) {
    let f = p("x1^2*x2*xi1^2*xi2 - 3*x2^3*xi2^3 + x1*xi1", 2);
    let g = p("x1*x2^2*xi1^3 + 1/2*x1^3*xi1*xi2^2 - xi2", 2);
    // Warm the shared caches so steady-state cost is measured.
    star_explicit(&f, &g).unwrap();
    let quant = QuantStar::canonical(2);
    quant.star(&f, &g).unwrap();
    c.bench_function("star_explicit n=2", |b| b.iter(|| star_explicit(black_box(&f), black_box(&g)).unwrap()));
    c.bench_function("star_quant n=2 cached", |b| b.iter(|| quant.star(black_box(&f), black_box(&g)).unwrap()));
    let half = Scalar::new(1, 2);
    c.bench_function("quantize n=2", |b| b.iter(|| quantize(black_box(&f), &half)));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = coefficients, products
}
criterion_main!(benches);
