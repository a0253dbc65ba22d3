//! Brute-force references for small instances.
//!
//! Nothing here shares code with the closed-form offline solver or the
//! competitive-ratio programs: the offline problem is solved as a plain
//! linear program, and the inventory function `Phi(pi)` is maximised by
//! simulating the pursuit policy on every profile of a demand grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lp::{solve_lp, LinearProgram, LpError, Relation};
use crate::model::{DemandProfile, DischargeSchedule, ProblemInstance, TOL};
use crate::offline::OfflineSolution;
use crate::online::pcr_discharges_unchecked;

/// Exhaustive-search resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Spacing of demand levels, kWh. `d_ub` is always a level.
    pub demand_step: f64,
    /// Width of the final bracket on `pi`.
    pub ratio_step: f64,
    /// Largest horizon searched.
    pub max_horizon: usize,
}

impl GridSpec {
    pub const HORIZON_LIMIT: usize = 5;

    /// Eight demand intervals, `pi` resolved to `1e-4`, horizons up to four.
    pub fn for_instance(inst: &ProblemInstance) -> Self {
        GridSpec {
            demand_step: (inst.d_ub - inst.d_lb) / 8.0,
            ratio_step: 1e-4,
            max_horizon: 4,
        }
    }

    pub fn with_demand_step(mut self, step: f64) -> Self {
        self.demand_step = step;
        self
    }

    pub fn with_ratio_step(mut self, step: f64) -> Self {
        self.ratio_step = step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ratio_step > 0.0 && self.ratio_step.is_finite()) {
            return Err(Error::InvalidConfig(format!("ratio step {} must be positive", self.ratio_step)));
        }
        if !(self.demand_step >= 0.0 && self.demand_step.is_finite()) {
            return Err(Error::InvalidConfig(format!("demand step {} must be non-negative", self.demand_step)));
        }
        if self.max_horizon == 0 || self.max_horizon > Self::HORIZON_LIMIT {
            return Err(Error::InvalidConfig(format!(
                "grid horizon {} outside 1..={}",
                self.max_horizon,
                Self::HORIZON_LIMIT
            )));
        }
        Ok(())
    }

    /// Demand levels `d_lb, d_lb + step, ..., d_ub`. A zero step (degenerate
    /// bounds) yields the single level `d_lb`.
    pub fn levels(&self, inst: &ProblemInstance) -> Vec<f64> {
        let span = inst.d_ub - inst.d_lb;
        if span <= 0.0 || self.demand_step == 0.0 {
            return vec![inst.d_lb];
        }
        let n = (span / self.demand_step - 1e-9).ceil().max(1.0) as usize;
        let mut out: Vec<f64> = (0..n).map(|k| inst.d_lb + k as f64 * self.demand_step).collect();
        out.push(inst.d_ub);
        out
    }

    fn check(&self, inst: &ProblemInstance) -> Result<()> {
        self.validate()?;
        if inst.horizon > self.max_horizon {
            return Err(Error::InvalidConfig(format!(
                "horizon {} exceeds grid limit {}",
                inst.horizon, self.max_horizon
            )));
        }
        if inst.d_ub > inst.d_lb && self.demand_step == 0.0 {
            return Err(Error::InvalidConfig("demand step must be positive".into()));
        }
        Ok(())
    }
}

/// Solves the peak-reduction problem as a linear program:
/// `min z` s.t. `d_t - delta_t <= z`, `sum delta <= c`,
/// `0 <= delta_t <= min(delta_max, d_t)`.
///
/// `water_level` is set to the optimal peak, since the program has no notion
/// of an unconstrained water level.
pub fn brute_force_offline(inst: &ProblemInstance, d: &DemandProfile) -> Result<OfflineSolution> {
    let inst = inst.validate()?;
    inst.check_len(d.len())?;
    let t_len = inst.horizon;
    let z = t_len;
    let mut lp = LinearProgram::new(t_len + 1);
    lp.objective[z] = -1.0;
    lp.bounds[z] = (0.0, f64::INFINITY);
    for (t, &x) in d.iter().enumerate() {
        lp.bounds[t] = (0.0, inst.delta_max.min(x));
        lp.add_sparse(&[(t, -1.0), (z, -1.0)], Relation::Le, -x);
    }
    let all: Vec<(usize, f64)> = (0..t_len).map(|t| (t, 1.0)).collect();
    lp.add_sparse(&all, Relation::Le, inst.capacity);
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Err(LpError::NumericalFailure(format!("offline program reported {:?}", sol.status)).into());
    }
    let peak_after = sol.point[z];
    let values = sol.point[..t_len].to_vec();
    let used: f64 = values.iter().sum();
    Ok(OfflineSolution {
        water_level: peak_after,
        peak_after,
        reduction: d.peak() - peak_after,
        capacity_limited: used >= inst.capacity - 1e-7,
        schedule: DischargeSchedule::from_values(values),
    })
}

/// Decodes the `index`-th profile of the grid in mixed radix.
fn grid_profile(levels: &[f64], horizon: usize, mut index: usize, out: &mut Vec<f64>) {
    out.clear();
    for _ in 0..horizon {
        out.push(levels[index % levels.len()]);
        index /= levels.len();
    }
}

/// `Phi(pi)` over the grid and a profile attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiEstimate {
    pub value: f64,
    pub profile: DemandProfile,
}

/// Largest total discharge of the pursuit policy at `pi` over all grid
/// profiles, with the inventory check disabled.
pub fn brute_force_phi(inst: &ProblemInstance, pi: f64, grid: &GridSpec) -> Result<f64> {
    brute_force_phi_with(inst, pi, grid, Execution::default()).map(|e| e.value)
}

/// As [`brute_force_phi`], returning the maximising profile (first in grid
/// order on ties).
pub fn brute_force_phi_with(
    inst: &ProblemInstance,
    pi: f64,
    grid: &GridSpec,
    exec: Execution,
) -> Result<PhiEstimate> {
    let inst = inst.validate()?;
    grid.check(&inst)?;
    if !(pi > 0.0) {
        return Err(Error::InvalidRatio(pi));
    }
    let levels = grid.levels(&inst);
    let total = levels.len().pow(inst.horizon as u32);
    const CHUNK: usize = 4096;
    let chunks = total.div_ceil(CHUNK);
    let best = exec.try_map_range(chunks, |c| -> Result<(f64, usize)> {
        let mut profile = Vec::with_capacity(inst.horizon);
        let mut best = (f64::NEG_INFINITY, 0);
        for index in c * CHUNK..((c + 1) * CHUNK).min(total) {
            grid_profile(&levels, inst.horizon, index, &mut profile);
            let used: f64 = pcr_discharges_unchecked(&inst, pi, &profile)?.iter().sum();
            if used > best.0 {
                best = (used, index);
            }
        }
        Ok(best)
    })?;
    let (value, index) = best
        .into_iter()
        .fold((f64::NEG_INFINITY, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    let mut profile = Vec::new();
    grid_profile(&levels, inst.horizon, index, &mut profile);
    Ok(PhiEstimate {
        value,
        profile: DemandProfile::new(profile),
    })
}

/// Smallest `pi` (to within `ratio_step`, rounded up) whose grid inventory
/// `Phi(pi)` fits the capacity, found by bisection.
pub fn brute_force_optimal_cr(inst: &ProblemInstance, grid: &GridSpec) -> Result<f64> {
    brute_force_optimal_cr_with(inst, grid, Execution::default())
}

pub fn brute_force_optimal_cr_with(inst: &ProblemInstance, grid: &GridSpec, exec: Execution) -> Result<f64> {
    let inst = inst.validate()?;
    grid.check(&inst)?;
    let fits = |pi: f64| -> Result<bool> {
        Ok(brute_force_phi_with(&inst, pi, grid, exec)?.value <= inst.capacity + TOL)
    };
    if fits(1.0)? {
        return Ok(1.0);
    }
    let mut hi = 2.0;
    while !fits(hi)? {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(LpError::NumericalFailure("grid inventory never fits the capacity".into()).into());
        }
    }
    let mut lo = hi / 2.0;
    while hi - lo > grid.ratio_step {
        let mid = 0.5 * (lo + hi);
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One offline instance solved by the linear program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineFixture {
    pub instance: ProblemInstance,
    pub demands: DemandProfile,
    pub peak_after: f64,
    pub reduction: f64,
    pub schedule: Vec<f64>,
}

/// `sigma(d^t)` for every `t` of one stream, by the linear program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFixture {
    pub instance: ProblemInstance,
    pub demands: DemandProfile,
    pub reductions: Vec<f64>,
}

/// Grid maximum of `sigma(d^1) / c` over `d_1`: the single-slot index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstSlotFixture {
    pub instance: ProblemInstance,
    pub demand_step: f64,
    pub value: f64,
    pub argmax: f64,
}

/// Grid estimate of the optimal ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalCrFixture {
    pub instance: ProblemInstance,
    pub grid: GridSpec,
    pub pi_hat: f64,
    pub phi_at_pi_hat: f64,
    pub worst_profile: DemandProfile,
}

/// Every value the test suite treats as externally derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedFixtures {
    pub offline: Vec<OfflineFixture>,
    pub reference: ReferenceFixture,
    pub receding_first_plan: OfflineFixture,
    pub first_slot: FirstSlotFixture,
    pub optimal_cr: OptimalCrFixture,
}

fn offline_fixture(inst: ProblemInstance, demands: Vec<f64>) -> Result<OfflineFixture> {
    let demands = DemandProfile::new(demands);
    let s = brute_force_offline(&inst, &demands)?;
    Ok(OfflineFixture {
        instance: inst,
        demands,
        peak_after: s.peak_after,
        reduction: s.reduction,
        schedule: s.schedule.values().to_vec(),
    })
}

/// Recomputes the fixture set; `inst` and `grid` select the optimal-ratio
/// estimate, the remaining entries are fixed small cases.
pub fn derived_fixtures(inst: &ProblemInstance, grid: &GridSpec, exec: Execution) -> Result<DerivedFixtures> {
    let offline = vec![
        offline_fixture(ProblemInstance::new(3, 5.0, 10.0, 0.0, 10.0)?, vec![10.0, 6.0, 8.0])?,
        offline_fixture(ProblemInstance::new(2, 5.0, 3.0, 0.0, 10.0)?, vec![10.0, 2.0])?,
        offline_fixture(ProblemInstance::new(3, 3.0, 10.0, 0.0, 10.0)?, vec![5.0, 5.0, 5.0])?,
        offline_fixture(ProblemInstance::new(2, 10.0, 5.0, 0.0, 10.0)?, vec![2.0, 3.0])?,
    ];

    let ref_inst = ProblemInstance::new(2, 4.0, 10.0, 1.0, 10.0)?;
    let stream = [10.0, 8.0];
    let mut reductions = Vec::new();
    for t in 1..=stream.len() {
        let mut d = stream[..t].to_vec();
        d.resize(ref_inst.horizon, ref_inst.d_lb);
        reductions.push(brute_force_offline(&ref_inst, &DemandProfile::new(d))?.reduction);
    }
    let reference = ReferenceFixture {
        instance: ref_inst,
        demands: DemandProfile::new(stream.to_vec()),
        reductions,
    };
    // Receding horizon with a one-slot window plans on (d_1, d_lb).
    let receding_first_plan = offline_fixture(ref_inst, vec![10.0, 1.0])?;

    let fs_inst = ProblemInstance::new(2, 1.0, 2.0, 1.0, 10.0)?;
    let fs_grid = GridSpec::for_instance(&fs_inst).with_demand_step(0.01);
    let mut first_slot = FirstSlotFixture {
        instance: fs_inst,
        demand_step: fs_grid.demand_step,
        value: f64::NEG_INFINITY,
        argmax: fs_inst.d_lb,
    };
    for x in fs_grid.levels(&fs_inst) {
        let d = DemandProfile::new(vec![x, fs_inst.d_lb]);
        let v = brute_force_offline(&fs_inst, &d)?.reduction / fs_inst.capacity;
        if v > first_slot.value + 1e-12 {
            first_slot.value = v;
            first_slot.argmax = x;
        }
    }

    let pi_hat = brute_force_optimal_cr_with(inst, grid, exec)?;
    let phi = brute_force_phi_with(inst, pi_hat, grid, exec)?;
    Ok(DerivedFixtures {
        offline,
        reference,
        receding_first_plan,
        first_slot,
        optimal_cr: OptimalCrFixture {
            instance: *inst,
            grid: *grid,
            pi_hat,
            phi_at_pi_hat: phi.value,
            worst_profile: phi.profile,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offline_by_linear_programming() {
        let inst = ProblemInstance::new(3, 5.0, 10.0, 0.0, 10.0).unwrap();
        let s = brute_force_offline(&inst, &vec![10.0, 6.0, 8.0].into()).unwrap();
        assert!((s.reduction - 3.5).abs() < 1e-9);
        let inst = ProblemInstance::new(3, 3.0, 10.0, 0.0, 10.0).unwrap();
        let s = brute_force_offline(&inst, &vec![5.0, 5.0, 5.0].into()).unwrap();
        assert!((s.reduction - 1.0).abs() < 1e-9);
        let inst = ProblemInstance::new(2, 20.0, 10.0, 0.0, 10.0).unwrap();
        let s = brute_force_offline(&inst, &vec![4.0, 7.0].into()).unwrap();
        assert!((s.reduction - 7.0).abs() < 1e-9);
    }

    #[test]
    fn grid_levels_include_both_bounds() {
        let inst = ProblemInstance::new(2, 1.0, 1.0, 1.0, 5.0).unwrap();
        let g = GridSpec::for_instance(&inst).with_demand_step(1.5);
        assert_eq!(g.levels(&inst), vec![1.0, 2.5, 4.0, 5.0]);
        assert_eq!(GridSpec::for_instance(&inst).levels(&inst).len(), 9);
    }

    #[test]
    fn grid_spec_limits() {
        let inst = ProblemInstance::new(6, 1.0, 1.0, 1.0, 5.0).unwrap();
        let mut g = GridSpec::for_instance(&inst);
        assert!(brute_force_phi(&inst, 2.0, &g).is_err());
        g.max_horizon = 6;
        assert!(g.validate().is_err());
        g.max_horizon = 4;
        g.ratio_step = 0.0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn single_slot_inventory() {
        let inst = ProblemInstance::new(1, 4.0, 3.0, 0.0, 10.0).unwrap();
        let g = GridSpec::for_instance(&inst);
        assert!((brute_force_phi(&inst, 1.0, &g).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(brute_force_optimal_cr(&inst, &g).unwrap(), 1.0);
    }

    #[test]
    fn huge_ratio_spends_nothing() {
        let inst = ProblemInstance::new(3, 1.0, 1.0, 1.0, 5.0).unwrap();
        let g = GridSpec::for_instance(&inst);
        assert!(brute_force_phi(&inst, 1e9, &g).unwrap() < 1e-8);
    }

    #[test]
    fn inventory_is_nonincreasing_in_ratio() {
        let inst = ProblemInstance::new(3, 1.0, 1.0, 1.0, 5.0).unwrap();
        let g = GridSpec::for_instance(&inst);
        let mut last = f64::INFINITY;
        for k in 0..30 {
            let phi = brute_force_phi(&inst, 1.0 + 0.1 * k as f64, &g).unwrap();
            assert!(phi <= last + 1e-12);
            last = phi;
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let inst = ProblemInstance::new(3, 1.0, 1.0, 1.0, 5.0).unwrap();
        let g = GridSpec::for_instance(&inst).with_demand_step(0.25);
        let a = brute_force_phi_with(&inst, 2.0, &g, Execution::Parallel).unwrap();
        let b = brute_force_phi_with(&inst, 2.0, &g, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
