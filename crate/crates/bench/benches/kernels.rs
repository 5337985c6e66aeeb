use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qrms_bench::{confusion, noisy_config, noisy_probs, three_qubit_hamiltonian};
use qrms_core::estimators::Method;
use qrms_core::fixtures::Fixture;
use qrms_core::harness::{run_table, TableConfig};
use qrms_core::linalg::hermitian_expm;
use qrms_core::metrics::qrms_disturbance_exact;
use qrms_core::mitigation::{rem_apply, Mitigation, MitigationPlan, PreparedProtocol};
use qrms_core::Pauli;

fn linalg(c: &mut Criterion) {
    let h = three_qubit_hamiltonian();
    c.bench_function("expm 8x8", |b| {
        b.iter(|| hermitian_expm(black_box(&h), 0.3).unwrap())
    });
    let f = Fixture::new(Pauli::Z);
    let x = f.b.matrix();
    c.bench_function("exact disturbance", |b| {
        b.iter(|| qrms_disturbance_exact(&f.model, &x, &f.state).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    for method in Method::ALL {
        let cfg = noisy_config(method, Pauli::Z, 100_000);
        c.bench_function(&format!("{method} distributions"), |b| {
            b.iter(|| cfg.distributions().unwrap())
        });
        let dists = cfg.distributions().unwrap();
        c.bench_function(&format!("{method} sampled run"), |b| {
            b.iter(|| cfg.run_with(black_box(&dists)).unwrap())
        });
    }
}

fn mitigation(c: &mut Criterion) {
    let cm = confusion();
    let p = noisy_probs();
    c.bench_function("rem 2 wires", |b| {
        b.iter(|| rem_apply(&cm, black_box(&p)).unwrap())
    });
    let prepared = PreparedProtocol::new(
        &noisy_config(Method::Dec, Pauli::Y, 100_000),
        &MitigationPlan::new(Mitigation::RemZne),
    )
    .unwrap();
    c.bench_function("DEC rem+zne run", |b| {
        b.iter(|| prepared.run(black_box(7)).unwrap())
    });
}

fn table(c: &mut Criterion) {
    let mut g = c.benchmark_group("table");
    g.sample_size(10);
    let cfg = TableConfig::default();
    g.bench_function("noiseless 9 cells x 10", |b| {
        b.iter(|| run_table(&cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, linalg, simulation, mitigation, table);
criterion_main!(benches);
