use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use prm_core::crcomp::optimal_cr_with;
use prm_core::harness::{generate_synthetic, run_experiment_with, ExperimentConfig};
use prm_core::oracle::{brute_force_phi_with, GridSpec};
use prm_core::{Execution, ProblemInstance};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn optimal_ratio(c: &mut Criterion) {
    let inst = ProblemInstance::new(20, 1500.0, 510.05, 442.91, 1020.10).unwrap();
    let mut g = c.benchmark_group("optimal_cr_t20");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| optimal_cr_with(&inst, exec).unwrap())
        });
    }
    g.finish();
}

fn grid_inventory(c: &mut Criterion) {
    let inst = ProblemInstance::new(4, 2.0, 1.0, 1.0, 5.0).unwrap();
    let grid = GridSpec::for_instance(&inst).with_demand_step(0.25);
    let mut g = c.benchmark_group("brute_force_phi_t4");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| brute_force_phi_with(&inst, 2.0, &grid, exec).unwrap())
        });
    }
    g.finish();
}

fn experiment(c: &mut Criterion) {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
horizon = 12
delta_max = 300
d_lb = 100
d_ub = 300
capacity_rates = [0.1, 0.2]
policies = ["offline", "pcr", "THR_half", "Eql_Dis", "RHC_half"]
window_start = "18:00"
"#,
    )
    .unwrap();
    let episodes = generate_synthetic(&cfg, 32, 1);
    let mut g = c.benchmark_group("experiment_t12");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_experiment_with(&cfg, &episodes, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, optimal_ratio, grid_inventory, experiment);
criterion_main!(benches);
