use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qsprep::harness::{random_oracle, run_dense};
use qsprep::oracle::{apply_uf, OracleDirection, QueryLedger};
use qsprep::report::{Iterations, Method, RunPlan};
use qsprep::simcore::{ExecPolicy, QftDirection, Register, RegisterLayout, StateVector};
use qsprep::structsim::reduced_run_with;

const POLICIES: [(&str, ExecPolicy); 2] = [("sequential", ExecPolicy::Sequential), ("parallel", ExecPolicy::Parallel)];

fn spread_state(layout: RegisterLayout, policy: ExecPolicy) -> StateVector {
    let mut s = StateVector::zero(layout).with_policy(policy);
    s.hadamard_register(Register::Index).unwrap();
    s.hadamard_register(Register::Ancilla).unwrap();
    s
}

fn gates(c: &mut Criterion) {
    let mut group = c.benchmark_group("hadamard_index");
    for n in [12usize, 16, 18] {
        let layout = RegisterLayout::new(n, 0, 1, 0).unwrap();
        for (name, policy) in POLICIES {
            let mut s = spread_state(layout, policy);
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| s.hadamard_register(Register::Index).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_uf");
    for n in [10usize, 14] {
        let table = random_oracle(n, 4, 7).unwrap();
        let layout = RegisterLayout::new(n, 4, 1, 0).unwrap();
        for (name, policy) in POLICIES {
            let mut s = spread_state(layout, policy);
            let mut ledger = QueryLedger::new();
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| apply_uf(&mut s, &table, OracleDirection::Forward, Register::Value, &mut ledger).unwrap())
            });
        }
    }
    group.finish();
}

fn qft(c: &mut Criterion) {
    let mut group = c.benchmark_group("qft_phase");
    let layout = RegisterLayout::new(10, 0, 1, 8).unwrap();
    for (name, policy) in POLICIES {
        let mut s = spread_state(layout, policy);
        s.hadamard_register(Register::Phase).unwrap();
        group.bench_function(name, |b| b.iter(|| s.qft_register(Register::Phase, QftDirection::Forward).unwrap()));
    }
    group.finish();
}

fn runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("runs");
    group.sample_size(10);
    let dense_table = random_oracle(8, 3, 11).unwrap();
    let dense_plan = RunPlan {
        iterations: Iterations::Fixed(4),
        ..RunPlan::new(Method::FastRz)
    };
    let reduced_table = random_oracle(16, 5, 11).unwrap();
    let reduced_plan = RunPlan {
        iterations: Iterations::Fixed(20),
        ..RunPlan::new(Method::FastRz)
    };
    for (name, policy) in POLICIES {
        group.bench_function(BenchmarkId::new("dense_fast_rz_n8", name), |b| {
            b.iter(|| black_box(run_dense(&dense_table, &dense_plan, policy).unwrap()))
        });
        group.bench_function(BenchmarkId::new("structured_fast_rz_n16", name), |b| {
            b.iter(|| black_box(reduced_run_with(&reduced_table, &reduced_plan, policy).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, gates, oracle, qft, runs);
criterion_main!(benches);
