use std::hint::black_box;

use catodyne_bench::{coherent, plus_cat, signals, BETAS};
use catodyne_core::exactclicks::{amp_cat_lo, joint_distribution};
use catodyne_core::oracle::amplitude_bruteforce;
use catodyne_core::{CatParity, Complex64, SignalState};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn joint(c: &mut Criterion) {
    let mut group = c.benchmark_group("joint_distribution");
    group.sample_size(20);
    for beta in BETAS {
        for (label, signal) in signals() {
            let lo = plus_cat(beta);
            group.bench_with_input(BenchmarkId::new(label, beta), &signal, |b, s| {
                b.iter(|| joint_distribution(&lo, s, None, 1.0).unwrap())
            });
        }
    }
    group.finish();
}

fn smearing(c: &mut Criterion) {
    let ideal = joint_distribution(&coherent(5.0), &SignalState::coherent(1.6, 0.0), None, 1.0).unwrap();
    c.bench_function("smear_eta_0.7_beta_5", |b| {
        b.iter(|| ideal.smear(black_box(0.7)).unwrap())
    });
}

fn closed_form_vs_oracle(c: &mut Criterion) {
    let beta = Complex64::new(2.0, 0.0);
    let signal = SignalState::fock(2);
    let lo_vec = plus_cat(2.0).to_fock(60).unwrap();
    let sig_vec = signal.to_fock(60).unwrap();
    let mut group = c.benchmark_group("amplitude_n20_m15");
    group.bench_function("closed_form", |b| {
        b.iter(|| amp_cat_lo(black_box(20), black_box(15), beta, CatParity::Plus, &signal).unwrap())
    });
    group.bench_function("oracle", |b| {
        b.iter(|| amplitude_bruteforce(black_box(20), black_box(15), &sig_vec, &lo_vec).unwrap())
    });
    group.finish();
}

criterion_group!(benches, joint, smearing, closed_form_vs_oracle);
criterion_main!(benches);
