use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use periagroup::action::{compute_obs, trusted_elements};
use periagroup::verify::check_mediangle;
use periagroup::{fixtures, par, CayleyBall, Hyperplanes, Periagroup};

fn modes() -> [(&'static str, bool); 2] {
    [("parallel", false), ("sequential", true)]
}

fn ball_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("ball_build_f4_trust4");
    g.sample_size(10);
    for (name, seq) in modes() {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| CayleyBall::with_trust_radius(Periagroup::new(fixtures::f4()), 4).unwrap())
        });
    }
    par::set_sequential(false);
    g.finish();
}

fn hyperplanes(c: &mut Criterion) {
    let ball = CayleyBall::with_trust_radius(Periagroup::new(fixtures::f4()), 4).unwrap();
    let mut g = c.benchmark_group("hyperplanes_f4_trust4");
    g.sample_size(10);
    for (name, seq) in modes() {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| Hyperplanes::compute(black_box(&ball))));
    }
    par::set_sequential(false);
    g.finish();
}

fn mediangle(c: &mut Criterion) {
    let ball = CayleyBall::with_trust_radius(Periagroup::new(fixtures::f5()), 5).unwrap();
    let mut g = c.benchmark_group("check_mediangle_f5_trust5");
    g.sample_size(10);
    for (name, seq) in modes() {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| check_mediangle(black_box(&ball))));
    }
    par::set_sequential(false);
    g.finish();
}

fn obstruction(c: &mut Criterion) {
    let ball = CayleyBall::with_trust_radius(Periagroup::new(fixtures::f4()), 4).unwrap();
    let hyps = Hyperplanes::compute(&ball);
    let elements = trusted_elements(&ball);
    let mut g = c.benchmark_group("compute_obs_f4_trust4");
    g.sample_size(10);
    for (name, seq) in modes() {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| compute_obs(&ball, &hyps, black_box(&elements)).unwrap())
        });
    }
    par::set_sequential(false);
    g.finish();
}

criterion_group!(kernels, ball_build, hyperplanes, mediangle, obstruction);
criterion_main!(kernels);
