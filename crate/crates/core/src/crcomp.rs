//! The optimal competitive ratio as a maximum of linear-fractional programs.
//!
//! For an index set `I` the program maximises, over demand profiles,
//!
//! ```text
//!   sum_{i in I} sigma(d^i) / (c + sum_{i in I} (max_{k<=i} d_k - d_i))
//! ```
//!
//! where `d^i` is the reference profile after slot `i`. The offline optimum on
//! each `d^i` is encoded with a peak variable `u_i` and per-slot discharges
//! `delta_ij`, and the running maxima with auxiliaries `m_i`. Only prefix sets
//! `[t]` are needed, so the optimal ratio costs `T` programs, which are
//! independent and may be solved concurrently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lp::{solve_linear_fractional, AffineForm, FractionalProgram, LinearProgram, Relation};
use crate::model::{DemandProfile, ProblemInstance};
use crate::offline::reduction_of;

/// Tolerance used to break ties between prefixes.
const TIE_TOL: f64 = 1e-9;

/// A program instance: the problem and a nonempty set of 1-based slots.
#[derive(Debug, Clone, PartialEq)]
pub struct CrCompSpec {
    pub instance: ProblemInstance,
    index_set: Vec<usize>,
}

impl CrCompSpec {
    /// The prefix set `{1, ..., t}`.
    pub fn prefix(instance: ProblemInstance, t: usize) -> Result<Self> {
        Self::subset(instance, (1..=t).collect())
    }

    /// An arbitrary nonempty subset of `{1, ..., T}`.
    pub fn subset(instance: ProblemInstance, mut index_set: Vec<usize>) -> Result<Self> {
        let instance = instance.validate()?;
        index_set.sort_unstable();
        index_set.dedup();
        if index_set.is_empty() {
            return Err(Error::InvalidIndexSet("index set must be nonempty".into()));
        }
        if index_set[0] == 0 || *index_set.last().unwrap() > instance.horizon {
            return Err(Error::InvalidIndexSet(format!(
                "indices must lie in 1..={}",
                instance.horizon
            )));
        }
        Ok(CrCompSpec {
            instance,
            index_set,
        })
    }

    pub fn index_set(&self) -> &[usize] {
        &self.index_set
    }

    pub fn layout(&self) -> CrCompLayout {
        CrCompLayout {
            horizon: self.instance.horizon,
            blocks: self.index_set.len(),
        }
    }
}

/// Variable positions in a built program: demands first, then `(m_i, u_i)`
/// pairs, then one `delta_i.` block of length `T` per index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrCompLayout {
    pub horizon: usize,
    pub blocks: usize,
}

impl CrCompLayout {
    pub fn num_vars(&self) -> usize {
        self.horizon + 2 * self.blocks + self.blocks * self.horizon
    }

    /// Demand of 0-based slot `j`.
    pub fn demand(&self, j: usize) -> usize {
        j
    }

    /// Running-max auxiliary of the `p`-th index.
    pub fn running_max(&self, p: usize) -> usize {
        self.horizon + 2 * p
    }

    /// Offline peak of the `p`-th reference profile.
    pub fn peak(&self, p: usize) -> usize {
        self.horizon + 2 * p + 1
    }

    /// Discharge at 0-based slot `j` for the `p`-th reference profile.
    pub fn discharge(&self, p: usize, j: usize) -> usize {
        self.horizon + 2 * self.blocks + p * self.horizon + j
    }
}

/// Assembles the linear-fractional program for `spec`.
///
/// Besides the program's five constraint families, peak and running-max
/// variables carry bounds `u_i in [0, d_ub]`, `m_i in [d_lb, d_ub]`; these
/// never cut off the optimum and keep the denominator bounded away from
/// infinity.
pub fn build_cr_comp(spec: &CrCompSpec) -> FractionalProgram {
    let inst = &spec.instance;
    let t_len = inst.horizon;
    let layout = spec.layout();
    let n = layout.num_vars();
    let mut lp = LinearProgram::new(n);

    for j in 0..t_len {
        lp.bounds[layout.demand(j)] = (inst.d_lb, inst.d_ub);
    }
    let mut numerator = vec![0.0; n];
    let mut denominator = vec![0.0; n];
    for (p, &slot) in spec.index_set.iter().enumerate() {
        let i = slot - 1;
        let m = layout.running_max(p);
        let u = layout.peak(p);
        lp.bounds[m] = (inst.d_lb, inst.d_ub);
        lp.bounds[u] = (0.0, inst.d_ub);
        for j in 0..t_len {
            lp.bounds[layout.discharge(p, j)] = (0.0, inst.delta_max);
        }

        numerator[m] += 1.0;
        numerator[u] -= 1.0;
        denominator[m] += 1.0;
        denominator[layout.demand(i)] -= 1.0;

        // Inventory of the offline schedule on d^i.
        let inventory: Vec<(usize, f64)> = (0..t_len).map(|j| (layout.discharge(p, j), 1.0)).collect();
        lp.add_sparse(&inventory, Relation::Le, inst.capacity);
        // Observed slots: d_j - delta_ij <= u_i.
        for j in 0..=i {
            lp.add_sparse(
                &[(layout.demand(j), 1.0), (layout.discharge(p, j), -1.0), (u, -1.0)],
                Relation::Le,
                0.0,
            );
        }
        // Padded slots at the lower bound: d_lb - delta_ij <= u_i.
        for j in i + 1..t_len {
            lp.add_sparse(
                &[(layout.discharge(p, j), -1.0), (u, -1.0)],
                Relation::Le,
                -inst.d_lb,
            );
        }
        // Running maximum: d_k <= m_i for k <= i.
        for k in 0..=i {
            lp.add_sparse(&[(layout.demand(k), 1.0), (m, -1.0)], Relation::Le, 0.0);
        }
    }

    FractionalProgram {
        numerator: AffineForm::new(numerator, 0.0),
        denominator: AffineForm::new(denominator, inst.capacity),
        constraints: lp.constraints,
        bounds: lp.bounds,
    }
}

/// Optimal value and maximising demand profile of one program.
#[derive(Debug, Clone, PartialEq)]
pub struct CrCompSolution {
    pub value: f64,
    pub witness: DemandProfile,
}

pub fn solve_cr_comp(spec: &CrCompSpec) -> Result<CrCompSolution> {
    let program = build_cr_comp(spec);
    let sol = solve_linear_fractional(&program)?;
    let witness = DemandProfile::new(sol.point[..spec.instance.horizon].to_vec());
    Ok(CrCompSolution {
        value: sol.value,
        witness,
    })
}

/// Optimal objective value of the program for `spec`.
pub fn cr_comp_value(spec: &CrCompSpec) -> Result<f64> {
    solve_cr_comp(spec).map(|s| s.value)
}

/// The ratio the program maximises, evaluated at a concrete profile through
/// the offline solver: `sum_i sigma(d^i) / (c + sum_i (max_{k<=i} d_k - d_i))`.
pub fn index_set_ratio(inst: &ProblemInstance, d: &DemandProfile, index_set: &[usize]) -> Result<f64> {
    inst.check_len(d.len())?;
    let mut scratch = Vec::with_capacity(inst.horizon);
    let mut reference = vec![inst.d_lb; inst.horizon];
    let mut numerator = 0.0;
    let mut denominator = inst.capacity;
    for &slot in index_set {
        if slot == 0 || slot > inst.horizon {
            return Err(Error::InvalidIndexSet(format!("slot {slot} out of range")));
        }
        reference[..slot].copy_from_slice(&d.values()[..slot]);
        reference[slot..].fill(inst.d_lb);
        numerator += reduction_of(&reference, inst.capacity, inst.delta_max, &mut scratch);
        let running_max = crate::model::max_of(&d.values()[..slot]);
        denominator += running_max - d[slot - 1];
    }
    Ok(numerator / denominator)
}

/// The optimal competitive ratio with the maximising prefix and a
/// worst-case demand profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalCr {
    pub pi_star: f64,
    /// 1-based `t` of the maximising prefix `[t]`.
    pub argmax_prefix: usize,
    pub witness_profile: DemandProfile,
    /// Program value for every prefix `[1], [2], ..., [T]`.
    pub prefix_values: Vec<f64>,
}

pub fn optimal_cr(inst: &ProblemInstance) -> Result<OptimalCr> {
    optimal_cr_with(inst, Execution::default())
}

/// Solves the `T` prefix programs (concurrently under
/// [`Execution::Parallel`]) and max-reduces them; ties go to the smallest `t`.
pub fn optimal_cr_with(inst: &ProblemInstance, exec: Execution) -> Result<OptimalCr> {
    let inst = inst.validate()?;
    let solutions = exec.try_map_range(inst.horizon, |k| {
        CrCompSpec::prefix(inst, k + 1)
            .and_then(|spec| solve_cr_comp(&spec))
            .map_err(|e| e.context(format!("prefix program [{}]", k + 1)))
    })?;
    let mut best = 0;
    for (k, s) in solutions.iter().enumerate() {
        if s.value > solutions[best].value + TIE_TOL {
            best = k;
        }
    }
    let prefix_values = solutions.iter().map(|s| s.value).collect();
    let pi_star = solutions[best].value.max(1.0);
    let witness_profile = solutions.into_iter().nth(best).unwrap().witness;
    Ok(OptimalCr {
        pi_star,
        argmax_prefix: best + 1,
        witness_profile,
        prefix_values,
    })
}
