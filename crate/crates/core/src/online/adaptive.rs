//! Adaptive ratio pursuit.
//!
//! At slot `t` the policy looks for the smallest ratio `pi` in
//! `[pi_lb_t, pi_{t-1}]` whose worst-case remaining discharge still fits the
//! storage. The worst case over continuations is
//!
//! ```text
//!   q(pi) = [d_t - max_{k<=t} d_k + sigma(d^t)/pi]^+ + max_{k=t..T} LP_k(pi)
//! ```
//!
//! where `LP_k` maximises the pursuit discharges of slots `t+1..k` over future
//! demands. `q` is found by bisection on `pi`.
//!
//! Every `LP_k` is the same program over the full future with the objective
//! restricted to the first `k - t` blocks: a block carries no objective
//! weight, and its constraints can always be met, so dropping it from the
//! objective is the same as dropping it from the program. One simplex per
//! slot is therefore warm-started for every `(k, pi)` pair. In `mu = 1/pi`
//! each `LP_k` is a maximum of affine functions, hence convex and
//! nondecreasing; solved points give lower bounds for all `k` at once and
//! chords between solved values give upper bounds, so most bisection steps
//! are settled without touching the solver.

use super::OnlineState;
use crate::crcomp::optimal_cr;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpError, Relation, Simplex};
use crate::model::{DemandProfile, DischargeSchedule, ProblemInstance, TOL};

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Variable positions of a threshold program with `blocks` future slots:
/// demands, running maxima and offline peaks of each block, then one
/// discharge vector of length `T` per block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdaCrLayout {
    /// Number of observed slots `t`.
    pub observed: usize,
    pub horizon: usize,
    pub blocks: usize,
}

impl AdaCrLayout {
    pub fn num_vars(&self) -> usize {
        3 * self.blocks + self.blocks * self.horizon
    }

    /// 0-based slot of block `p`.
    pub fn slot(&self, p: usize) -> usize {
        self.observed + p
    }

    pub fn demand(&self, p: usize) -> usize {
        p
    }

    pub fn running_max(&self, p: usize) -> usize {
        self.blocks + p
    }

    pub fn peak(&self, p: usize) -> usize {
        2 * self.blocks + p
    }

    pub fn discharge(&self, p: usize, j: usize) -> usize {
        3 * self.blocks + p * self.horizon + j
    }
}

/// A threshold program and the slot-`t` term that is added to its optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaCrThreshold {
    pub layout: AdaCrLayout,
    pub program: LinearProgram,
    /// `[d_t - max_{k<=t} d_k + sigma(d^t)/pi]^+`.
    pub constant: f64,
}

impl AdaCrThreshold {
    /// Constant term plus the program optimum (zero for an empty set).
    pub fn value(&self) -> Result<f64> {
        if self.layout.blocks == 0 {
            return Ok(self.constant);
        }
        let sol = solve_lp(&self.program)?;
        if !sol.is_optimal() {
            return Err(LpError::NumericalFailure(format!(
                "threshold program reported {:?}",
                sol.status
            ))
            .into());
        }
        Ok(self.constant + sol.value)
    }
}

/// Constraints of the threshold program over `blocks` future slots, with a
/// zero objective.
///
/// Demands of observed slots enter as constants. Offline peaks are bounded
/// below by zero like the offline solver's, and when `c > T * delta_max` the
/// inventory rows become `<=` since equality is then unattainable.
fn threshold_program(state: &OnlineState, blocks: usize) -> (AdaCrLayout, LinearProgram) {
    let inst = state.instance();
    let horizon = inst.horizon;
    let observed = state.observed();
    let t = observed.len();
    let layout = AdaCrLayout {
        observed: t,
        horizon,
        blocks,
    };
    let mut lp = LinearProgram::new(layout.num_vars());
    let inventory = if inst.capacity > horizon as f64 * inst.delta_max {
        Relation::Le
    } else {
        Relation::Eq
    };
    let running_max = state.running_max();
    for p in 0..blocks {
        let slot = layout.slot(p);
        let v = layout.peak(p);
        let m = layout.running_max(p);
        lp.bounds[layout.demand(p)] = (inst.d_lb, inst.d_ub);
        lp.bounds[m] = (running_max, inst.d_ub);
        lp.bounds[v] = (0.0, inst.d_ub);
        for j in 0..horizon {
            lp.bounds[layout.discharge(p, j)] = (0.0, inst.delta_max);
        }

        let all: Vec<(usize, f64)> = (0..horizon).map(|j| (layout.discharge(p, j), 1.0)).collect();
        lp.add_sparse(&all, inventory, inst.capacity);
        for (j, &demand) in observed.iter().enumerate() {
            lp.add_sparse(&[(layout.discharge(p, j), -1.0), (v, -1.0)], Relation::Le, -demand);
        }
        for j in t..=slot {
            lp.add_sparse(
                &[(layout.demand(j - t), 1.0), (layout.discharge(p, j), -1.0), (v, -1.0)],
                Relation::Le,
                0.0,
            );
        }
        for j in slot + 1..horizon {
            lp.add_sparse(&[(layout.discharge(p, j), -1.0), (v, -1.0)], Relation::Le, -inst.d_lb);
        }
        for q in 0..=p {
            lp.add_sparse(&[(layout.demand(q), 1.0), (m, -1.0)], Relation::Le, 0.0);
        }
    }
    (layout, lp)
}

/// Objective `sum_{p < used} d_p - m_p + (m_p - v_p) * mu`.
fn threshold_objective(layout: &AdaCrLayout, used: usize, mu: f64, out: &mut Vec<f64>) {
    out.clear();
    out.resize(layout.num_vars(), 0.0);
    for p in 0..used {
        out[layout.demand(p)] = 1.0;
        out[layout.running_max(p)] = mu - 1.0;
        out[layout.peak(p)] = -mu;
    }
}

/// Builds the threshold program for `I = {t+1, ..., k}` (1-based) at ratio
/// `pi`; `k = t` gives the empty set.
pub fn build_adacr_threshold(state: &OnlineState, pi: f64, k: usize) -> Result<AdaCrThreshold> {
    let t = state.t();
    if t == 0 {
        return Err(Error::InvalidIndexSet("no slot observed yet".into()));
    }
    if !(pi >= 1.0) {
        return Err(Error::InvalidRatio(pi));
    }
    let horizon = state.instance().horizon;
    if k < t || k > horizon {
        return Err(Error::InvalidIndexSet(format!("k = {k} outside {t}..={horizon}")));
    }
    let (layout, mut program) = threshold_program(state, k - t);
    let mut objective = Vec::new();
    threshold_objective(&layout, layout.blocks, 1.0 / pi, &mut objective);
    program.objective = objective;
    Ok(AdaCrThreshold {
        layout,
        program,
        constant: state.pursuit_discharge(pi),
    })
}

/// `max_{k=t..T}` of the threshold values at `pi`, each program solved from
/// scratch: the quantity `q(pi)` the bisection compares with the remaining
/// capacity.
pub fn worst_case_inventory(state: &OnlineState, pi: f64) -> Result<f64> {
    let horizon = state.instance().horizon;
    let mut best = f64::NEG_INFINITY;
    for k in state.t()..=horizon {
        best = best.max(build_adacr_threshold(state, pi, k)?.value()?);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveCrResult {
    pub pi_t: f64,
    pub pi_lb_t: f64,
    /// Bisection steps after the initial lower-bound check.
    pub iterations: usize,
    /// Linear programs actually solved.
    pub lp_solves: usize,
}

/// Lower and upper envelopes of `LP_k(mu)` for every `k`.
struct InventoryModel {
    layout: AdaCrLayout,
    program: LinearProgram,
    simplex: Option<Simplex>,
    /// Per solved point: prefix sums over blocks of `d_p - m_p` and `m_p - v_p`.
    lines: Vec<(Vec<f64>, Vec<f64>)>,
    /// Per number of blocks: exact `(mu, value)` pairs sorted by `mu`.
    exact: Vec<Vec<(f64, f64)>>,
    objective: Vec<f64>,
    solves: usize,
}

impl InventoryModel {
    fn new(state: &OnlineState) -> Self {
        let blocks = state.instance().horizon - state.t();
        let (layout, program) = threshold_program(state, blocks);
        InventoryModel {
            layout,
            program,
            simplex: None,
            lines: Vec::new(),
            exact: vec![Vec::new(); blocks + 1],
            objective: Vec::new(),
            solves: 0,
        }
    }

    fn solve(&mut self, used: usize, mu: f64) -> Result<()> {
        threshold_objective(&self.layout, used, mu, &mut self.objective);
        self.solves += 1;
        let warm = match self.simplex.as_mut() {
            Some(s) => s.reoptimize(&self.objective).ok().filter(|sol| sol.is_optimal()),
            None => None,
        };
        let sol = match warm {
            Some(sol) => sol,
            None => {
                // Cold start, also the recovery path after a failed warm start.
                self.program.objective.clone_from(&self.objective);
                let mut simplex = Simplex::new(&self.program)?;
                let sol = simplex.solve()?;
                if !sol.is_optimal() {
                    return Err(LpError::NumericalFailure(format!(
                        "threshold program reported {:?}",
                        sol.status
                    ))
                    .into());
                }
                self.simplex = Some(simplex);
                sol
            }
        };

        let blocks = self.layout.blocks;
        let mut a = Vec::with_capacity(blocks + 1);
        let mut b = Vec::with_capacity(blocks + 1);
        let (mut sa, mut sb) = (0.0, 0.0);
        a.push(0.0);
        b.push(0.0);
        for p in 0..blocks {
            let x = &sol.point;
            let (d, m, v) = (
                x[self.layout.demand(p)],
                x[self.layout.running_max(p)],
                x[self.layout.peak(p)],
            );
            sa += d - m;
            sb += m - v;
            a.push(sa);
            b.push(sb);
        }
        let value = a[used] + mu * b[used];
        let list = &mut self.exact[used];
        let at = list.partition_point(|&(m, _)| m < mu);
        list.insert(at, (mu, value));
        self.lines.push((a, b));
        Ok(())
    }

    fn lower(&self, used: usize, mu: f64) -> f64 {
        self.lines
            .iter()
            .map(|(a, b)| a[used] + mu * b[used])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn upper(&self, used: usize, mu: f64) -> f64 {
        let list = &self.exact[used];
        let at = list.partition_point(|&(m, _)| m < mu);
        let Some(&(m2, v2)) = list.get(at) else {
            return f64::INFINITY;
        };
        if m2 == mu || at == 0 {
            return v2;
        }
        let (m1, v1) = list[at - 1];
        v1 + (v2 - v1) * (mu - m1) / (m2 - m1)
    }

    /// Whether `max_k LP_k(mu)` exceeds `budget`.
    fn exceeds(&mut self, mu: f64, budget: f64) -> Result<bool> {
        if budget < 0.0 {
            return Ok(true);
        }
        loop {
            let mut pick: Option<(usize, f64)> = None;
            for used in 1..=self.layout.blocks {
                let lo = self.lower(used, mu);
                if lo > budget {
                    return Ok(true);
                }
                if self.upper(used, mu) > budget && pick.is_none_or(|(_, best)| lo > best) {
                    pick = Some((used, lo));
                }
            }
            match pick {
                None => return Ok(false),
                Some((used, _)) => self.solve(used, mu)?,
            }
        }
    }
}

/// Computes `pi_t` for the latest observed slot of `state`, whose current
/// ratio is taken as `pi_{t-1}`.
pub fn adaptive_cr(state: &OnlineState, epsilon: f64) -> Result<AdaptiveCrResult> {
    if !state.awaiting_action() {
        return Err(Error::InvalidIndexSet("adaptive ratio needs a freshly observed slot".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("bisection tolerance must be positive, got {epsilon}")));
    }
    let previous = state.current_ratio();
    let sigma = state.reference_reduction();
    let raw_lb = if sigma <= TOL {
        1.0
    } else {
        let denominator = state.running_max() - state.running_online_peak();
        if denominator <= 1e-12 {
            return Err(Error::DegenerateRatio {
                slot: state.t() - 1,
                denominator,
            });
        }
        sigma / denominator
    };
    let pi_lb_t = raw_lb.clamp(1.0, previous);

    let remaining = state.remaining_capacity();
    let mut model = InventoryModel::new(state);
    let mut exceeds = |pi: f64| -> Result<bool> {
        let budget = remaining - state.pursuit_discharge(pi) + TOL;
        model.exceeds(1.0 / pi, budget)
    };

    let mut iterations = 0;
    let pi_t = if !exceeds(pi_lb_t)? {
        pi_lb_t
    } else {
        let (mut lo, mut hi) = (pi_lb_t, previous);
        while hi - lo >= epsilon {
            let mid = 0.5 * (lo + hi);
            iterations += 1;
            if exceeds(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    Ok(AdaptiveCrResult {
        pi_t,
        pi_lb_t,
        iterations,
        lp_solves: model.solves,
    })
}

/// Outcome of one adaptive episode.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRun {
    pub schedule: DischargeSchedule,
    /// `pi_0 = pi*` followed by `pi_1, ..., pi_T`.
    pub pi_series: Vec<f64>,
    pub lb_series: Vec<f64>,
    /// Slots whose discharge was cut to the remaining capacity.
    pub capacity_clamps: usize,
    pub lp_solves: usize,
}

impl AdaptiveRun {
    pub fn pi_star(&self) -> f64 {
        self.pi_series[0]
    }
}

/// Runs the adaptive policy, computing `pi*` first.
pub fn run_adaptive(inst: &ProblemInstance, d: &DemandProfile, epsilon: f64) -> Result<AdaptiveRun> {
    let pi_star = optimal_cr(inst)?.pi_star;
    run_adaptive_with(inst, d, epsilon, pi_star)
}

/// Runs the adaptive policy starting from a precomputed `pi*`.
///
/// Discharges are capped at the remaining capacity; a cap that removes more
/// than the tolerance is counted in `capacity_clamps`.
pub fn run_adaptive_with(
    inst: &ProblemInstance,
    d: &DemandProfile,
    epsilon: f64,
    pi_star: f64,
) -> Result<AdaptiveRun> {
    inst.check_len(d.len())?;
    let mut state = OnlineState::new(*inst, pi_star)?;
    let mut pi_series = Vec::with_capacity(inst.horizon + 1);
    let mut lb_series = Vec::with_capacity(inst.horizon);
    pi_series.push(pi_star);
    let mut capacity_clamps = 0;
    let mut lp_solves = 0;
    for (slot, &demand) in d.iter().enumerate() {
        state.observe(demand)?;
        let r = adaptive_cr(&state, epsilon).map_err(|e| e.context(format!("slot {}", slot + 1)))?;
        state.set_current_ratio(r.pi_t);
        pi_series.push(r.pi_t);
        lb_series.push(r.pi_lb_t);
        lp_solves += r.lp_solves;
        let wanted = state.pursuit_discharge(r.pi_t);
        let remaining = state.remaining_capacity().max(0.0);
        if wanted > remaining + TOL {
            capacity_clamps += 1;
        }
        state.commit(wanted.min(remaining), true)?;
    }
    Ok(AdaptiveRun {
        schedule: state.into_schedule(),
        pi_series,
        lb_series,
        capacity_clamps,
        lp_solves,
    })
}
