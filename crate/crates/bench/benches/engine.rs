use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hitq_core::gf2::sparse_rank;
use hitq_core::solver::{positive_dimension, quotient_dimension, Compute, PositivePart};
use hitq_core::steenrod::sq_monomial;
use hitq_core::{Monomial, WeightVector};

fn steenrod(c: &mut Criterion) {
    let m = Monomial::new(&[15, 7, 3, 1, 1]).unwrap();
    c.bench_function("sq^8 on a five-variable monomial", |b| b.iter(|| sq_monomial(black_box(8), &m)));
}

fn elimination(c: &mut Criterion) {
    let mut g = c.benchmark_group("elimination");
    g.sample_size(10);
    g.bench_function("positive part (5, 19)", |b| b.iter(|| PositivePart::compute(5, black_box(19)).unwrap()));
    g.bench_function("rank route (5, 24)", |b| b.iter(|| positive_dimension(5, black_box(24)).unwrap()));
    let omega: WeightVector = "4,2,2,1".parse().unwrap();
    g.bench_function("truncated part (5, 24) above (4,2,2,1)", |b| {
        b.iter(|| PositivePart::compute_above(5, 24, black_box(&omega)).unwrap())
    });
    g.bench_function("sparse rank 2000x2000", |b| {
        let rows: Vec<Vec<u32>> =
            (0..2000u32).map(|i| (0..6).map(|j| (i.wrapping_mul(2654435761).rotate_left(j * 5)) % 2000).collect()).collect();
        b.iter(|| sparse_rank(2000, black_box(rows.clone())))
    });
    g.finish();
}

fn quotient(c: &mut Criterion) {
    let mut g = c.benchmark_group("quotient_dimension");
    g.sample_size(10);
    for (k, n) in [(4, 10), (4, 24), (5, 24)] {
        g.bench_function(format!("({k}, {n})"), |b| b.iter(|| quotient_dimension(k, black_box(n), &mut Compute).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, steenrod, elimination, quotient);
criterion_main!(benches);
