use proptest::prelude::*;

use chrono::{NaiveDate, NaiveTime};
use prm_core::harness::{
    generate_synthetic, read_traces, run_experiment_with, write_traces, ExperimentConfig, PolicyId,
};
use prm_core::Execution;

fn config(horizon: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(&format!(
        r#"
horizon = {horizon}
delta_max = 120
d_lb = 100
d_ub = 300
capacity_rates = [0.05, 0.2]
policies = ["offline", "pcr", "adaptive_pcr", "THR_half", "THR_avg", "Eql_Dis", "Eql_Per", "RHC_lb", "RHC_ub", "RHC_half"]
epsilon = 1e-5
seed = {seed}
window_start = "18:00"
rhc_window = 3
"#
    ))
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn report_rows_are_consistent(horizon in 2..8usize, seed in 0..i64::MAX as u64, n in 1..5usize) {
        let cfg = config(horizon, seed);
        let eps = generate_synthetic(&cfg, n, seed);
        let report = run_experiment_with(&cfg, &eps, Execution::Parallel).unwrap();
        prop_assert_eq!(report.rows.len(), 2 * cfg.policies.len() * n);
        for r in &report.rows {
            prop_assert!((0.0..=1.0).contains(&r.reduction_rate));
            prop_assert!(r.reduction <= r.offline_reduction + 1e-7, "{} {}", r.policy, r.episode);
            if let Some(x) = r.ratio {
                prop_assert!(x >= 1.0 - 1e-9);
            }
        }
        for a in &report.aggregates {
            let rows: Vec<_> = report
                .rows
                .iter()
                .filter(|r| r.capacity_rate == a.capacity_rate && r.policy == a.policy)
                .collect();
            let mean = rows.iter().map(|r| r.reduction_rate).sum::<f64>() / rows.len() as f64;
            prop_assert!((mean - a.mean_reduction_rate).abs() <= 1e-12);
            prop_assert_eq!(rows.len(), a.episodes);
        }
        let seq = run_experiment_with(&cfg, &eps, Execution::Sequential).unwrap();
        prop_assert_eq!(seq, report);
    }

    #[test]
    fn traces_round_trip(horizon in 1..10usize, seed in 0..i64::MAX as u64, n in 1..4usize) {
        let cfg = config(horizon, seed);
        let eps = generate_synthetic(&cfg, n, seed);
        prop_assert_eq!(&eps, &generate_synthetic(&cfg, n, seed));
        let mut buf = Vec::new();
        let start = NaiveTime::from_hms_opt(18, 0, 0).unwrap();
        write_traces(&mut buf, &eps, NaiveDate::from_ymd_opt(2024, 3, 30).unwrap(), start).unwrap();
        let set = read_traces(buf.as_slice(), &cfg.instance_with(1.0).unwrap(), cfg.slot_minutes, start).unwrap();
        prop_assert_eq!(set.clipped, 0);
        prop_assert_eq!(set.episodes.len(), n);
        for (a, b) in set.episodes.iter().zip(&eps) {
            prop_assert_eq!(&a.demands, &b.demands);
        }
    }
}

#[test]
fn policy_names_round_trip() {
    for name in ["offline", "pcr", "adaptive_pcr", "THR_half", "RHC_half"] {
        let p: PolicyId = name.parse().unwrap();
        assert_eq!(p.to_string(), name);
    }
}
