use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use writhe_core::deform::DeformOptions;
use writhe_core::{
    correct_writhe, enclosed_area, make_torus_knot, min_self_distance, tangent_indicatrix,
    writhe_polygonal, writhe_quadrature,
};

fn writhe_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("writhe");
    group.sample_size(10);
    for n in [512, 1024, 2048] {
        let curve = make_torus_knot(2, 3, 2.0, 1.0, n).unwrap();
        group.bench_with_input(BenchmarkId::new("quadrature", n), &curve, |b, c| {
            b.iter(|| writhe_quadrature(black_box(c), 2).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("polygonal", n), &curve, |b, c| {
            b.iter(|| writhe_polygonal(black_box(c)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("min_distance", n), &curve, |b, c| {
            b.iter(|| min_self_distance(black_box(c), 2))
        });
    }
    group.finish();
}

fn indicatrix_area(c: &mut Criterion) {
    let curve = make_torus_knot(2, 3, 2.0, 1.0, 4096).unwrap();
    let ind = tangent_indicatrix(&curve).unwrap();
    c.bench_function("enclosed_area/4096", |b| b.iter(|| enclosed_area(black_box(&ind)).unwrap()));
}

fn correction(c: &mut Criterion) {
    let mut group = c.benchmark_group("correct_writhe");
    group.sample_size(10);
    let curve = make_torus_knot(2, 3, 2.0, 1.0, 1024).unwrap();
    let options = DeformOptions::default();
    group.bench_function("trefoil/1024", |b| {
        b.iter(|| correct_writhe(black_box(&curve), 0.0, &options).unwrap())
    });
    group.finish();
}

criterion_group!(benches, writhe_kernels, indicatrix_area, correction);
criterion_main!(benches);
