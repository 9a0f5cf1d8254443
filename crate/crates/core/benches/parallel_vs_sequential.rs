use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use mil_core::diffops::DiffOps;
use mil_core::grid::{CField, Grid};
use mil_core::par::RunMode;
use mil_core::pipeline::{compute_invariants, PipelineOptions};
use mil_core::surface::builtin_spec;
use mil_core::verify::all_suites;

fn modes() -> [RunMode; 2] {
    [RunMode::Sequential, RunMode::Parallel]
}

fn bench_derivative(c: &mut Criterion) {
    let g = Grid::new(0.0, 1.0, 0.0, 1.0, 192, 192, false, false).unwrap();
    let mut data = Vec::with_capacity(g.len());
    for iv in 0..g.nv {
        for iu in 0..g.nu {
            let (u, v) = (g.u(iu), g.v(iv));
            data.push(Complex64::new((3.0 * u).sin() * v.cosh(), u * v));
        }
    }
    let f = CField::from_vec(&g, data);

    let mut group = c.benchmark_group("d_z_192x192");
    for mode in modes() {
        let ops = DiffOps::new(&g, mode).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(mode.label()), &f, |b, f| {
            b.iter(|| ops.d_z(f))
        });
    }
    group.finish();
}

// Whole-pipeline cost, lift through invariants, on the two builtin
// textures that differ most: spectral torus vs bounded FD catenoid.
fn bench_pipeline(c: &mut Criterion) {
    for name in ["clifford", "catenoid"] {
        let spec = builtin_spec(name).unwrap();
        let mut group = c.benchmark_group(format!("invariants_{name}"));
        for mode in modes() {
            let opts = PipelineOptions { mode, ..Default::default() };
            group.bench_with_input(BenchmarkId::from_parameter(mode.label()), &spec, |b, s| {
                b.iter(|| compute_invariants(s, &opts).unwrap())
            });
        }
        group.finish();
    }
}

fn bench_suites(c: &mut Criterion) {
    let spec = builtin_spec("clifford").unwrap();
    let mut group = c.benchmark_group("all_suites_clifford");
    for mode in modes() {
        let opts = PipelineOptions { mode, ..Default::default() };
        let inv = compute_invariants(&spec, &opts).unwrap();
        let ops = DiffOps::new(&spec.grid, mode).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(mode.label()), &inv, |b, inv| {
            b.iter(|| all_suites(inv, &ops, None))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_derivative, bench_pipeline, bench_suites);
criterion_main!(benches);
