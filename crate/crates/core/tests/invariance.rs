//! The scalar invariants must not move when the ambient geometry does.
//! Each case reruns the full pipeline on the transformed lift; nothing
//! is shared with the baseline run except the surface chart.

use mil_core::minkowski::random_lorentz;
use mil_core::par::RunMode;
use mil_core::pipeline::{
    compute_invariants, compute_invariants_transformed, lift_field, PipelineOptions,
};
use mil_core::surface::builtin_spec;
use mil_core::verify::invariance_deviation;

fn isometry_sweep(name: &str, tol: f64) {
    let spec = builtin_spec(name).unwrap();
    let opts = PipelineOptions::default();
    let base = compute_invariants(&spec, &opts).unwrap();
    let dim = spec.target.lorentz_dim();
    for seed in 0..20u64 {
        let t = random_lorentz(dim, seed);
        assert!(t.is_orthochronous(), "seed {seed} produced a time-reversing map");
        let moved = compute_invariants_transformed(&spec, &t, &opts).unwrap();
        let dev = invariance_deviation(&base, &moved);
        assert!(
            dev.curvature < tol,
            "{name} seed {seed}: curvature moved by {:.3e}",
            dev.curvature
        );
        assert!(dev.p < tol, "{name} seed {seed}: P moved by {:.3e}", dev.p);
    }
}

#[test]
fn clifford_invariants_survive_random_isometries() {
    isometry_sweep("clifford", 1e-6);
}

#[test]
fn catenoid_invariants_survive_random_isometries() {
    isometry_sweep("catenoid", 1e-6);
}

// The sweep above would pass vacuously if the transform were dropped on
// the floor somewhere; make sure the raw lift really moves.
#[test]
fn transforms_change_the_raw_lift() {
    let spec = builtin_spec("catenoid").unwrap();
    let t = random_lorentz(spec.target.lorentz_dim(), 7);
    let plain = lift_field(&spec, None, RunMode::Sequential).unwrap();
    let moved = lift_field(&spec, Some(&t), RunMode::Sequential).unwrap();
    let shift = plain
        .data
        .iter()
        .zip(&moved.data)
        .map(|(a, b)| a.sub(b).norm_e())
        .fold(0.0f64, f64::max);
    assert!(shift > 0.1, "lift barely moved: {shift:.3e}");
}
