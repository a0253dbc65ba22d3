//! Offline optimal discharge, reference profiles and schedule evaluation.
//!
//! The offline optimum has a threshold structure: with the water level `v`
//! solving `sum_t [d_t - v]^+ = c`, every slot is shaved down to
//! `max(v, max_t d_t - delta_max, 0)`. The water level is found exactly by
//! scanning the breakpoints of the piecewise-linear exceedance function over
//! the sorted demands.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{max_of, pos, DemandProfile, DischargeSchedule, ProblemInstance, TOL};

/// Offline optimum for a single demand profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineSolution {
    /// Water level `v`; negative when total demand is below capacity.
    pub water_level: f64,
    /// Optimal peak after discharging, `v(d)`.
    pub peak_after: f64,
    /// Optimal peak reduction, `sigma(d)`.
    pub reduction: f64,
    /// True when the inventory constraint (not the rate limit or demand) binds.
    pub capacity_limited: bool,
    pub schedule: DischargeSchedule,
}

/// Peak level and water level without materialising a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Levels {
    pub water_level: f64,
    pub threshold: f64,
    pub peak: f64,
}

impl Levels {
    pub fn peak_after(&self) -> f64 {
        self.threshold.min(self.peak)
    }

    pub fn reduction(&self) -> f64 {
        self.peak - self.peak_after()
    }
}

/// Solves `sum_t [d_t - v]^+ = capacity` for `v`. `scratch` is reused to
/// avoid reallocating in hot loops.
pub(crate) fn water_level(demands: &[f64], capacity: f64, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(demands);
    scratch.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    for k in 0..scratch.len() {
        prefix += scratch[k];
        let level = (prefix - capacity) / (k + 1) as f64;
        match scratch.get(k + 1) {
            Some(&next) if level < next => continue,
            _ => return level,
        }
    }
    // Only reachable for an empty profile.
    -capacity
}

pub(crate) fn levels(demands: &[f64], capacity: f64, delta_max: f64, scratch: &mut Vec<f64>) -> Levels {
    let peak = max_of(demands);
    let water_level = water_level(demands, capacity, scratch);
    let threshold = pos(pos(peak - delta_max - water_level) + water_level);
    Levels {
        water_level,
        threshold,
        peak,
    }
}

/// Optimal peak reduction `sigma(d)` for a raw demand slice.
pub(crate) fn reduction_of(demands: &[f64], capacity: f64, delta_max: f64, scratch: &mut Vec<f64>) -> f64 {
    levels(demands, capacity, delta_max, scratch).reduction()
}

/// Offline optimal discharge for a known demand profile.
pub fn solve_offline(inst: &ProblemInstance, d: &DemandProfile) -> Result<OfflineSolution> {
    inst.check_len(d.len())?;
    Ok(solve_offline_slice(d.values(), inst.capacity, inst.delta_max))
}

pub(crate) fn solve_offline_slice(demands: &[f64], capacity: f64, delta_max: f64) -> OfflineSolution {
    let mut scratch = Vec::with_capacity(demands.len());
    let lv = levels(demands, capacity, delta_max, &mut scratch);
    let schedule = DischargeSchedule::from_values(
        demands.iter().map(|&d| pos(d - lv.threshold)).collect(),
    );
    OfflineSolution {
        water_level: lv.water_level,
        peak_after: lv.peak_after(),
        reduction: lv.reduction(),
        capacity_limited: lv.water_level >= 0.0 && lv.threshold == lv.water_level,
        schedule,
    }
}

/// Observed demands for slots `1..=t` followed by the lower bound: the most
/// optimistic continuation of the stream seen so far.
pub fn reference_profile(observed: &[f64], t: usize, inst: &ProblemInstance) -> Result<DemandProfile> {
    if t == 0 || t > inst.horizon || observed.len() != t {
        return Err(crate::error::Error::LengthMismatch {
            expected: t.clamp(1, inst.horizon),
            actual: observed.len(),
        });
    }
    let mut values = Vec::with_capacity(inst.horizon);
    values.extend_from_slice(observed);
    values.resize(inst.horizon, inst.d_lb);
    Ok(DemandProfile::new(values))
}

/// A single constraint breach found by [`evaluate_schedule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Inventory { used: f64, capacity: f64 },
    Negative { slot: usize, value: f64 },
    RateLimit { slot: usize, value: f64, limit: f64 },
    ExceedsDemand { slot: usize, value: f64, demand: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEvaluation {
    pub feasible: bool,
    pub reduction: f64,
    pub violations: Vec<Violation>,
}

/// Checks a schedule against the inventory and per-slot constraints and
/// reports the peak reduction it achieves.
pub fn evaluate_schedule(
    inst: &ProblemInstance,
    d: &DemandProfile,
    s: &DischargeSchedule,
) -> Result<ScheduleEvaluation> {
    inst.check_len(d.len())?;
    inst.check_len(s.len())?;
    let mut violations = Vec::new();
    let used: f64 = s.values().iter().sum();
    if used > inst.capacity + TOL {
        violations.push(Violation::Inventory {
            used,
            capacity: inst.capacity,
        });
    }
    for (slot, (&delta, &demand)) in s.values().iter().zip(d.iter()).enumerate() {
        if delta < -TOL {
            violations.push(Violation::Negative { slot, value: delta });
        }
        if delta > inst.delta_max + TOL {
            violations.push(Violation::RateLimit {
                slot,
                value: delta,
                limit: inst.delta_max,
            });
        }
        if delta > demand + TOL {
            violations.push(Violation::ExceedsDemand {
                slot,
                value: delta,
                demand,
            });
        }
    }
    Ok(ScheduleEvaluation {
        feasible: violations.is_empty(),
        reduction: d.peak() - s.peak_after(d),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(t: usize, c: f64, dmax: f64) -> ProblemInstance {
        ProblemInstance::new(t, c, dmax, 0.0, 1e6).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn water_filling_example() {
        let sol = solve_offline(&inst(3, 5.0, 10.0), &vec![10.0, 6.0, 8.0].into()).unwrap();
        assert!(close(sol.water_level, 6.5));
        assert!(close(sol.reduction, 3.5));
        let expected = [3.5, 0.0, 1.5];
        for (a, b) in sol.schedule.values().iter().zip(expected) {
            assert!(close(*a, b));
        }
        assert!(sol.capacity_limited);
    }

    #[test]
    fn rate_limit_binds() {
        let sol = solve_offline(&inst(2, 5.0, 3.0), &vec![10.0, 2.0].into()).unwrap();
        assert!(close(sol.peak_after, 7.0));
        assert!(close(sol.reduction, 3.0));
        assert_eq!(sol.schedule.values(), &[3.0, 0.0]);
        assert!(!sol.capacity_limited);
    }

    #[test]
    fn symmetric_profile_discharges_uniformly() {
        let sol = solve_offline(&inst(3, 3.0, 10.0), &vec![5.0, 5.0, 5.0].into()).unwrap();
        assert_eq!(sol.schedule.values(), &[1.0, 1.0, 1.0]);
        assert!(close(sol.reduction, 1.0));
    }

    #[test]
    fn capacity_exceeds_total_demand() {
        let sol = solve_offline(&inst(2, 10.0, 5.0), &vec![2.0, 3.0].into()).unwrap();
        assert!(sol.water_level < 0.0);
        assert_eq!(sol.schedule.values(), &[2.0, 3.0]);
        assert_eq!(sol.peak_after, 0.0);
        assert!(close(sol.reduction, 3.0));
    }

    #[test]
    fn exceedance_equals_capacity_when_capacity_limited() {
        let d = vec![7.0, 3.0, 9.0, 9.0, 1.0];
        let sol = solve_offline(&inst(5, 4.0, 100.0), &d.clone().into()).unwrap();
        let exceed: f64 = d.iter().map(|x| pos(x - sol.water_level)).sum();
        assert!(close(exceed, 4.0));
        assert!(close(sol.schedule.used_capacity(), 4.0));
    }

    #[test]
    fn reference_profile_pads_with_lower_bound() {
        let i = ProblemInstance::new(4, 1.0, 1.0, 1.0, 10.0).unwrap();
        let p = reference_profile(&[7.0, 9.0], 2, &i).unwrap();
        assert_eq!(p.values(), &[7.0, 9.0, 1.0, 1.0]);
        let p = reference_profile(&[1.0], 1, &i.with_horizon(3)).unwrap();
        assert_eq!(p.values(), &[1.0, 1.0, 1.0]);
        let full = [2.0, 3.0, 4.0, 5.0];
        assert_eq!(reference_profile(&full, 4, &i).unwrap().values(), &full);
        assert!(reference_profile(&[1.0, 2.0], 3, &i).is_err());
        assert!(reference_profile(&[], 0, &i).is_err());
    }

    #[test]
    fn evaluate_detects_violations() {
        let i = inst(3, 5.0, 10.0);
        let d: DemandProfile = vec![10.0, 6.0, 8.0].into();
        let ok = evaluate_schedule(&i, &d, &DischargeSchedule::from_values(vec![3.5, 0.0, 1.5])).unwrap();
        assert!(ok.feasible);
        assert!(close(ok.reduction, 3.5));

        let zero = evaluate_schedule(&i, &d, &DischargeSchedule::from_values(vec![0.0; 3])).unwrap();
        assert!(zero.feasible);
        assert_eq!(zero.reduction, 0.0);

        let over = evaluate_schedule(&i, &d, &DischargeSchedule::from_values(vec![3.0, 1.0, 2.0])).unwrap();
        assert!(!over.feasible);
        assert!(matches!(over.violations[0], Violation::Inventory { .. }));

        let bad = evaluate_schedule(
            &inst(2, 100.0, 3.0),
            &vec![2.0, 9.0].into(),
            &DischargeSchedule::from_values(vec![2.5, -1.0]),
        )
        .unwrap();
        assert_eq!(bad.violations.len(), 2);
    }
}
