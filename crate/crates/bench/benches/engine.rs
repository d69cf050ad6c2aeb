use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C64;

use ecsim::dsl::{execute_circuit, parse_circuit};
use ecsim::protocols::{run_ecp1_stages, run_ecp2_stages, Ecp1Params, Ecp2Params};
use ecsim::sweep::{sweep_ecp1_csv, SweepProtocol, SweepSpec};
use ecsim::{BranchTerm, CoherentSuperposition, ModeLabel};

/// A 32-term, 7-mode state reproducing the largest Gram contraction the
/// pipelines perform.
fn dense_state() -> CoherentSuperposition {
    let modes: Vec<ModeLabel> = (0..7).map(|i| ModeLabel::new(format!("m{i}"))).collect();
    let terms = (0..32)
        .map(|k| {
            let amps = (0..7)
                .map(|m| {
                    let sign = if (k >> (m % 5)) & 1 == 0 { 1.0 } else { -1.0 };
                    C64::new(sign * 1.3, 0.1 * m as f64)
                })
                .collect();
            BranchTerm::new(C64::new(0.1 + 0.01 * k as f64, 0.0), amps).unwrap()
        })
        .collect();
    CoherentSuperposition::new(modes, terms).unwrap()
}

fn bench_inner_product(c: &mut Criterion) {
    let state = dense_state();
    c.bench_function("inner_product_32x32x7", |b| {
        b.iter(|| black_box(&state).norm_squared())
    });
}

fn bench_pipelines(c: &mut Criterion) {
    let p = Ecp1Params::new(2.0, 0.6, 0.8).unwrap();
    c.bench_function("run_ecp1", |b| b.iter(|| run_ecp1_stages(black_box(&p)).unwrap()));

    let q = Ecp2Params::new(2.0, 0.5, 0.5, 0.5, 0.5).unwrap();
    c.bench_function("run_ecp2", |b| b.iter(|| run_ecp2_stages(black_box(&q)).unwrap()));
}

fn bench_dsl(c: &mut Criterion) {
    let source = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../circuits/ecp2.circ"
    ))
    .expect("bundled circuit");
    c.bench_function("parse_and_execute_ecp2_circ", |b| {
        b.iter(|| {
            let program = parse_circuit(black_box(&source), "ecp2.circ").unwrap();
            execute_circuit(&program).unwrap()
        })
    });
}

fn bench_sweep(c: &mut Criterion) {
    let spec = SweepSpec::new(SweepProtocol::Ecp1, vec![2.0], 51, 0.0).unwrap();
    c.bench_function("sweep_ecp1_51_points", |b| {
        b.iter(|| sweep_ecp1_csv(black_box(&spec)).unwrap())
    });
}

criterion_group!(benches, bench_inner_product, bench_pipelines, bench_dsl, bench_sweep);
criterion_main!(benches);
