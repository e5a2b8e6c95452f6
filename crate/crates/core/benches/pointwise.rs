//! Per-point work of the deformed suite, run through `gkred::par` and
//! through a plain sequential loop. Build with `--no-default-features` to
//! see the fallback path of `par` as well.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gkred::algebra::Scalar;
use gkred::gk::checks::{deformed_setup, hamiltonian_residuals, linear_field, random_matrix};
use gkred::gk::{deformed_frames, sphere_samples, Deformation};
use gkred::pipeline::point_rng;
use gkred::reduction::Setup;
use num_complex::Complex64;

fn per_point(st: &Setup, k: usize, z: &[Complex64]) -> f64 {
    let loc = st.at(z).unwrap();
    let mut r = point_rng(1, 2, k);
    let f: Vec<_> = (0..4).map(|_| linear_field(&loc, &random_matrix(&mut r, 3))).collect();
    let c = loc.reduced_curvature_closed(&f[0], &f[1], &f[2], &f[3]).unwrap();
    let h = hamiltonian_residuals(&loc, &gkred::algebra::sphere_moment(3)).unwrap();
    c.norm() + h[0] + h[1]
}

fn bench(c: &mut Criterion) {
    let d = Deformation::solution_ii(Scalar::from_ratio(1, 10));
    let df = deformed_frames(&d, false).unwrap();
    let st = deformed_setup(&df);
    let mut g = c.benchmark_group("deformed_points");
    g.sample_size(10);
    for count in [8usize, 32] {
        let pts = sphere_samples(3, count, 11, |_| 1.0);
        g.bench_with_input(BenchmarkId::new("sequential", count), &pts, |b, pts| {
            b.iter(|| pts.iter().enumerate().map(|(k, z)| per_point(&st, k, z)).sum::<f64>())
        });
        let label = if gkred::par::is_parallel() { "rayon" } else { "par_fallback" };
        g.bench_with_input(BenchmarkId::new(label, count), &pts, |b, pts| {
            b.iter(|| gkred::par::map_range(pts.len(), |k| per_point(&st, k, &pts[k])).into_iter().sum::<f64>())
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
