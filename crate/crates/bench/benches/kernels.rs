use criterion::{criterion_group, criterion_main, Criterion};
use spikefield::harness::{simulate_multivariate, ExperimentConfig, ExperimentKind};
use spikefield::linalg::{hermitian_eigen, CMatrix};
use spikefield::seed::rng_from_seed;
use spikefield::{
    bessel_i, build_coupling_matrix, normalize, simulate_poisson, spectrum, von_mises_sample, Complex64,
    IntensityModel, PhaseSpec,
};
use std::hint::black_box;

fn special_functions(c: &mut Criterion) {
    c.bench_function("bessel_i0..2 on 100 points", |b| {
        b.iter(|| {
            let mut s = 0.0;
            for i in 0..100 {
                let x = 0.25 * i as f64;
                for k in 0..3 {
                    s += bessel_i(k, black_box(x)).unwrap();
                }
            }
            s
        })
    });
    let mut rng = rng_from_seed(1);
    c.bench_function("von_mises_sample kappa=2 x1000", |b| {
        b.iter(|| (0..1000).map(|_| von_mises_sample(0.0, 2.0, &mut rng).unwrap()).sum::<f64>())
    });
}

fn thinning(c: &mut Criterion) {
    let phase = PhaseSpec::linear(1.0, 5.0).unwrap();
    let model = IntensityModel::von_mises(20.0, 0.5, 0.0, phase).unwrap();
    let mut rng = rng_from_seed(2);
    c.bench_function("thinning von Mises, 100 trials of 5 s", |b| {
        b.iter(|| simulate_poisson(&model, 5.0, 100, &mut rng).unwrap())
    });
}

fn eigen(c: &mut Criterion) {
    let mut rng = rng_from_seed(3);
    use rand::Rng;
    let a = CMatrix::from_fn(100, 90, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let s = a.gram_rows(90.0);
    c.bench_function("jacobi eigen 100x100", |b| b.iter(|| hermitian_eigen(black_box(&s)).unwrap()));
}

fn coupling_spectrum(c: &mut Criterion) {
    let cfg = ExperimentConfig::preset(ExperimentKind::MultivarNull);
    let models = cfg.multivariate_models().unwrap();
    let (signals, spikes) = simulate_multivariate(&cfg, &models, &mut rng_from_seed(4)).unwrap();
    let mut group = c.benchmark_group("multivariate");
    group.sample_size(10);
    group.bench_function("build + normalize + spectrum, 100 x 90", |b| {
        b.iter(|| spectrum(&normalize(&build_coupling_matrix(&signals, &spikes).unwrap()).unwrap()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, special_functions, thinning, eigen, coupling_spectrum);
criterion_main!(benches);
