//! Benchmarks for the hot paths: basis evaluation, least-squares fitting,
//! time-law planning and the full pipeline.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use fixtcp_core::parts::default_test_part;
use fixtcp_core::profile::{plan_profile, MotionLimits};
use fixtcp_core::spline::fit_polygon;
use fixtcp_core::trajectory::{run_pipeline, PlannerConfig};

fn bench_basis(c: &mut Criterion) {
    let part = default_test_part(400);
    let (fit, _, _) = fit_polygon(&part, 0.0, 1.0, 5, 60).unwrap();
    c.bench_function("curve_evaluate", |b| {
        let mut u = 0.0;
        b.iter(|| {
            u = (u + 0.001) % 1.0;
            black_box(fit.curve.evaluate(u).unwrap())
        })
    });
    c.bench_function("knot_basis_functions", |b| {
        let kv = fit.curve.knot_vector();
        let mut u = 0.0;
        b.iter(|| {
            u = (u + 0.001) % 1.0;
            black_box(kv.basis_functions(u).unwrap())
        })
    });
}

fn bench_fit(c: &mut Criterion) {
    let part = default_test_part(1000);
    c.bench_function("fit_polygon_1000pts_80ctrl", |b| {
        b.iter(|| black_box(fit_polygon(&part, 0.0, 1.0, 5, 80).unwrap()))
    });
}

fn bench_profile(c: &mut Criterion) {
    let limits = MotionLimits { v_max: 0.05, a_max: 0.5, j_max: 5.0 };
    c.bench_function("plan_profile", |b| {
        b.iter(|| black_box(plan_profile(0.4, limits).unwrap()))
    });
    let p = plan_profile(0.4, limits).unwrap();
    c.bench_function("profile_eval", |b| {
        let mut t = 0.0;
        b.iter(|| {
            t = (t + 0.001) % p.duration();
            black_box(p.eval(t).unwrap())
        })
    });
}

fn bench_pipeline(c: &mut Criterion) {
    let part = default_test_part(300);
    let mut config = PlannerConfig::example();
    config.num_samples = 300;
    config.num_ctrl = 40;
    config.output_rate = 100.0;
    c.bench_function("run_pipeline_300pts", |b| {
        b.iter_batched(
            || (part.clone(), config.clone()),
            |(p, cfg)| black_box(run_pipeline(&p, &cfg).unwrap()),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_basis, bench_fit, bench_profile, bench_pipeline);
criterion_main!(benches);
