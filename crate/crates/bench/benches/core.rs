use std::hint::black_box;

use anyonic_bench::{grouped_density, left_comb_basis, model, tau_state};
use anyonic_core::correlations::is_uncorrelated;
use anyonic_core::teleport::{
    builtin_scenario_for, receiver_reachability_check, run_protocol, Direction, MessageQubit,
};
use anyonic_core::{change_shape, partial_trace, spectrum, Bipartition, SectorBasis, Side, TreeShape};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bases(c: &mut Criterion) {
    let mut g = c.benchmark_group("basis");
    for n in [4, 6, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let m = model();
            b.iter(|| SectorBasis::new(m.clone(), TreeShape::left_comb(black_box(n))).unwrap())
        });
    }
    g.finish();
}

fn recoupling(c: &mut Criterion) {
    let mut g = c.benchmark_group("change_shape");
    for n in [4, 6] {
        let psi = tau_state(n, 7);
        let target = TreeShape::right_comb(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| change_shape(&psi, &target).unwrap()));
    }
    g.finish();
}

fn marginals(c: &mut Criterion) {
    let mut g = c.benchmark_group("partial_trace");
    for (na, nb) in [(2, 2), (3, 3)] {
        let (bip, rho) = grouped_density(na, nb, 11);
        g.bench_function(format!("{na}+{nb}"), |b| b.iter(|| partial_trace(&rho, &bip, Side::B).unwrap()));
    }
    let (bip, rho) = grouped_density(3, 3, 11);
    let reduced = partial_trace(&rho, &bip, Side::B).unwrap();
    g.bench_function("spectrum 3", |b| b.iter(|| spectrum(&reduced)));
    g.finish();
}

fn correlations(c: &mut Criterion) {
    let basis = left_comb_basis(2);
    let bip = Bipartition::new(&basis).unwrap();
    let rho = tau_state(2, 3).density();
    c.bench_function("uncorrelated test 1+1", |b| b.iter(|| is_uncorrelated(&rho, &bip, 1e-8).unwrap()));
}

fn teleport(c: &mut Criterion) {
    let m = model();
    let ab = builtin_scenario_for(&m, "main-text", Direction::AliceToBob).unwrap();
    let ba = builtin_scenario_for(&m, "main-text", Direction::BobToAlice).unwrap();
    let msg = MessageQubit::grid()[3];
    c.bench_function("teleport main-text ab", |b| b.iter(|| run_protocol(&ab, &msg).unwrap()));
    c.bench_function("reachability main-text ba 20 PVMs", |b| {
        b.iter(|| receiver_reachability_check(&ba, std::slice::from_ref(&msg), 20, 5).unwrap())
    });
}

criterion_group!(benches, bases, recoupling, marginals, correlations, teleport);
criterion_main!(benches);
