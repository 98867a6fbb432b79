use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperwalk::generate::{preferential_hypergraph, PreferentialParams};
use hyperwalk::{
    hitting_times_for_targets, sample_paths, simulate_hitting_time, Affinities, Execution, Hypergraph, Scenario, SolveOptions,
    TransitionKernel, WalkConfig,
};

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn graph(incidences: usize) -> Hypergraph {
    preferential_hypergraph(incidences * 2 / 7, 3, &PreferentialParams::default()).unwrap()
}

fn kernel(h: &Hypergraph, scenario: Scenario) -> TransitionKernel {
    TransitionKernel::from_affinities(Arc::new(Affinities::compute(h)), scenario, Execution::Parallel).unwrap()
}

fn kernel_construction(c: &mut Criterion) {
    let h = graph(300_000);
    let mut g = c.benchmark_group("kernel_construction");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                let aff = Arc::new(Affinities::compute_with(&h, exec));
                black_box(TransitionKernel::from_affinities(aff, Scenario::Frustrated, exec).unwrap())
            })
        });
    }
    g.finish();
}

fn matvec(c: &mut Criterion) {
    let k = kernel(&graph(1_000_000), Scenario::Simple);
    let m = k.matrix();
    let x: Vec<f64> = (0..m.dim()).map(|i| (i % 7) as f64).collect();
    let mut y = vec![0.0; m.dim()];
    let mut g = c.benchmark_group("matvec");
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| m.matvec_into(black_box(&x), &mut y, exec).unwrap())
        });
    }
    g.finish();
}

fn target_batch(c: &mut Criterion) {
    let h = graph(30_000);
    let k = kernel(&h, Scenario::Simple);
    let targets: Vec<usize> = (0..h.node_count()).step_by(h.node_count() / 32).collect();
    let opts = SolveOptions::default();
    let mut g = c.benchmark_group("target_batch");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| black_box(hitting_times_for_targets(&k, &targets, &opts, exec)))
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let k = kernel(&hyperwalk::fixtures::five_node_example(), Scenario::Frustrated);
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    for exec in MODES {
        let cfg = WalkConfig { exec, ..WalkConfig::new(Scenario::Frustrated, 100_000, 1) };
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &cfg, |b, cfg| {
            b.iter(|| black_box(simulate_hitting_time(&k, 0, 3, cfg).unwrap()))
        });
    }
    g.finish();
}

fn path_corpus(c: &mut Criterion) {
    let k = kernel(&graph(30_000), Scenario::Frustrated);
    let mut g = c.benchmark_group("path_corpus");
    g.sample_size(10);
    for exec in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| black_box(sample_paths(&k, 80, 5, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, kernel_construction, matvec, target_batch, monte_carlo, path_corpus);
criterion_main!(benches);
