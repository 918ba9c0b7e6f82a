//! Benchmarks for the hot paths of the engine: site construction,
//! spectrum assembly (dynamic-programming and exhaustive routes), dense
//! diagonalization, the scalar/spin partition recursion at large
//! coupling, and statistical post-processing of a large table.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use fichain::dynamical::{partition_functions, DynamicalSpec};
use fichain::ed::{build_hamiltonian, chain_eigenvalues};
use fichain::geometry::{build_geometry, LatticeSpec};
use fichain::motif::{spectrum, spectrum_bruteforce, Epsilon};
use fichain::stats::{regime_diagnostics, unfold_and_spacings};
use fichain::{BigInt, Rational};

fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn bench_sites(c: &mut Criterion) {
    c.bench_function("sites_n50", |b| {
        let spec = LatticeSpec::new(50, rat(150)).expect("valid lattice");
        b.iter(|| build_geometry(black_box(&spec)).expect("sites"));
    });
}

fn bench_spectrum(c: &mut Criterion) {
    c.bench_function("spectrum_dp_n20", |b| {
        let beta = rat(49);
        b.iter(|| spectrum(black_box(20), 2, Epsilon::Antiferro, &beta).expect("table"));
    });
    c.bench_function("spectrum_bruteforce_n10", |b| {
        let beta = rat(21);
        b.iter(|| {
            spectrum_bruteforce(black_box(10), 2, Epsilon::Antiferro, &beta).expect("table")
        });
    });
}

fn bench_diagonalization(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense");
    group.sample_size(10);
    group.bench_function("eigenvalues_dim256", |b| {
        let spec = LatticeSpec::new(8, rat(17)).expect("valid lattice");
        let geom = build_geometry(&spec).expect("sites");
        let h = build_hamiltonian(&geom, 2, Epsilon::Antiferro).expect("matrix");
        b.iter_batched(
            || h.clone(),
            |m| chain_eigenvalues(m).expect("spectrum"),
            BatchSize::LargeInput,
        );
    });
    group.finish();
}

fn bench_partition(c: &mut Criterion) {
    c.bench_function("partition_recursion_a200", |b| {
        let spec = DynamicalSpec::new(4, 2, Epsilon::Antiferro, rat(200), rat(10))
            .expect("valid model");
        b.iter(|| partition_functions(black_box(&spec), 1.0).expect("sums"));
    });
}

fn bench_statistics(c: &mut Criterion) {
    let table = spectrum(20, 2, Epsilon::Antiferro, &rat(49)).expect("table");
    c.bench_function("unfold_n20", |b| {
        b.iter(|| unfold_and_spacings(black_box(&table)).expect("spacings"));
    });
    c.bench_function("diagnostics_n20", |b| {
        b.iter(|| regime_diagnostics(black_box(&table)).expect("diagnostics"));
    });
}

criterion_group!(
    benches,
    bench_sites,
    bench_spectrum,
    bench_diagonalization,
    bench_partition,
    bench_statistics
);
criterion_main!(benches);
