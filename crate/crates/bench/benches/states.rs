use criterion::{black_box, criterion_group, criterion_main, Criterion};

use freestates::algebra::AlgebraElement;
use freestates::boundary::{boundary_state, Cocycle};
use freestates::gram::{ball_gram, psd_check};
use freestates::word::{enumerate_ball, enumerate_sphere};
use freestates::{ReducedWord, SphereConstraint, StateSpec};

fn spheres(c: &mut Criterion) {
    c.bench_function("sphere n=2 k=10", |b| {
        b.iter(|| enumerate_sphere(2, black_box(10), SphereConstraint::All).unwrap().len())
    });
    c.bench_function("ball n=3 k=6", |b| b.iter(|| enumerate_ball(3, black_box(6)).unwrap().len()));
}

fn gram(c: &mut Criterion) {
    let spec = StateSpec::psi(2, 0.6, -0.1).unwrap();
    c.bench_function("ball-3 Gram + Jacobi n=2", |b| {
        b.iter(|| psd_check(&ball_gram(&spec, 3).unwrap(), 1e-9).unwrap().min_eigenvalue)
    });
    let twisted = StateSpec::phi_twisted(2, 0.6, 1.0).unwrap();
    c.bench_function("ball-2 Gram + Jacobi twisted", |b| {
        b.iter(|| psd_check(&ball_gram(&twisted, 2).unwrap(), 1e-9).unwrap().min_eigenvalue)
    });
}

fn boundary(c: &mut Criterion) {
    let cocycle = Cocycle::new(2, 1.3).unwrap();
    let s = ReducedWord::parse(2, "1 -2 -2 1 2").unwrap();
    c.bench_function("boundary integral |s|=5", |b| b.iter(|| boundary_state(&cocycle, black_box(&s)).unwrap()));
}

fn convolution(c: &mut Criterion) {
    let x = AlgebraElement::generator_sum(3);
    let x4 = x.convolve(&x).unwrap().convolve(&x).unwrap().convolve(&x).unwrap();
    let xs = x4.adjoint();
    c.bench_function("convolve X^4 (X^4)* n=3", |b| b.iter(|| black_box(&x4).convolve(&xs).unwrap().support_len()));
}

criterion_group!(benches, spheres, gram, boundary, convolution);
criterion_main!(benches);
