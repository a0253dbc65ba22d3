use super::config::{ExperimentConfig, PolicyId};
use super::report::{aggregate, reduction_ratio, RateSettings, Report, ReportRow};
use super::traces::Episode;
use crate::crcomp::optimal_cr_with;
use crate::error::Result;
use crate::exec::Execution;
use crate::model::ProblemInstance;
use crate::offline::{solve_offline, OfflineSolution};
use crate::online::{run_adaptive_with, run_baseline, run_pcr, BaselinePolicy};

struct RateContext {
    settings: RateSettings,
    instance: ProblemInstance,
    offline: Vec<OfflineSolution>,
}

pub fn run_experiment(config: &ExperimentConfig, episodes: &[Episode]) -> Result<Report> {
    run_experiment_with(config, episodes, Execution::default())
}

/// Evaluates every configured policy on every episode at every capacity
/// rate. The optimal ratio is solved once per rate; `(policy, episode)`
/// pairs then run independently and rows are merged in a fixed order.
pub fn run_experiment_with(config: &ExperimentConfig, episodes: &[Episode], exec: Execution) -> Result<Report> {
    config.validate()?;
    let probe = config.instance_with(1.0)?;
    for ep in episodes {
        probe
            .check_profile(&ep.demands)
            .map_err(|e| e.context(format!("episode {}", ep.id)))?;
    }
    let mut report = Report {
        horizon: config.horizon,
        epsilon: config.epsilon,
        settings: Vec::new(),
        rows: Vec::new(),
        aggregates: Vec::new(),
    };
    if episodes.is_empty() {
        return Ok(report);
    }
    let mean_energy = episodes.iter().map(|e| e.demands.total()).sum::<f64>() / episodes.len() as f64;

    let mut contexts = Vec::with_capacity(config.capacity_rates.len());
    for &rate in &config.capacity_rates {
        let instance = config.instance_with(rate * mean_energy)?;
        let pi_star = optimal_cr_with(&instance, exec)
            .map_err(|e| e.context(format!("capacity rate {rate}")))?
            .pi_star;
        let offline = episodes
            .iter()
            .map(|ep| solve_offline(&instance, &ep.demands))
            .collect::<Result<Vec<_>>>()?;
        let thr_avg_threshold = offline.iter().map(|s| s.peak_after).sum::<f64>() / offline.len() as f64;
        contexts.push(RateContext {
            settings: RateSettings {
                capacity_rate: rate,
                capacity: instance.capacity,
                pi_star,
                thr_avg_threshold,
                eql_per_rate: instance.capacity / mean_energy,
            },
            instance,
            offline,
        });
    }

    let mut tasks = Vec::new();
    for r in 0..contexts.len() {
        for &policy in &config.policies {
            for e in 0..episodes.len() {
                tasks.push((r, policy, e));
            }
        }
    }
    let results = exec.map(&tasks, |&(r, policy, e)| {
        evaluate(config, &contexts[r], policy, &episodes[e], e)
            .map_err(|err| err.context(format!("policy {policy}, episode {}", episodes[e].id)))
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        a.capacity_rate
            .total_cmp(&b.capacity_rate)
            .then(a.policy.cmp(&b.policy))
            .then_with(|| a.episode.cmp(&b.episode))
    });
    report.aggregates = aggregate(&rows);
    report.rows = rows;
    report.settings = contexts.into_iter().map(|c| c.settings).collect();
    Ok(report)
}

fn evaluate(
    config: &ExperimentConfig,
    ctx: &RateContext,
    policy: PolicyId,
    episode: &Episode,
    index: usize,
) -> Result<ReportRow> {
    let inst = &ctx.instance;
    let d = &episode.demands;
    let offline = &ctx.offline[index];
    let mut capacity_clamps = 0;
    let schedule = match policy {
        PolicyId::Offline => offline.schedule.clone(),
        PolicyId::Pcr => run_pcr(inst, ctx.settings.pi_star, d)?,
        PolicyId::AdaptivePcr => {
            let run = run_adaptive_with(inst, d, config.epsilon, ctx.settings.pi_star)?;
            capacity_clamps = run.capacity_clamps;
            run.schedule
        }
        PolicyId::Baseline(kind) => {
            let p = BaselinePolicy::new(kind)
                .with_window(config.rhc_window)
                .with_threshold(ctx.settings.thr_avg_threshold)
                .with_rate(ctx.settings.eql_per_rate);
            run_baseline(&p, inst, d)?
        }
    };
    let original_peak = d.peak();
    let online_peak = schedule.peak_after(d);
    let reduction = original_peak - online_peak;
    let (ratio, degenerate) = reduction_ratio(offline.reduction, reduction);
    Ok(ReportRow {
        capacity_rate: ctx.settings.capacity_rate,
        capacity: inst.capacity,
        policy,
        episode: episode.id.clone(),
        original_peak,
        online_peak,
        reduction,
        reduction_rate: if original_peak > 0.0 { reduction / original_peak } else { 0.0 },
        offline_reduction: offline.reduction,
        ratio,
        degenerate,
        capacity_clamps,
    })
}
