//! Bounded-variable primal simplex on a dense tableau.
//!
//! Every internal column lives in `[0, upper]`; non-basic columns sit at
//! either bound. Pricing uses the largest reduced cost and falls back to
//! Bland's smallest-index rule after a run of degenerate pivots, which rules
//! out cycling. A solved instance keeps its final basis so the objective can
//! be swapped and re-optimised from a primal feasible start.

use super::{LinearProgram, LpError, LpSolution, LpStatus, Relation, FEAS_TOL, PIVOT_TOL};

const OPT_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;
const ZERO_CLEAN: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lower + y`
    Shift { col: usize, lower: f64 },
    /// `x = upper - y`
    Flip { col: usize, upper: f64 },
    /// `x = y_pos - y_neg`
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    Optimal,
    Terminal,
}

#[derive(Debug, Clone)]
pub struct Simplex {
    program: LinearProgram,
    rows: usize,
    cols: usize,
    tab: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    /// Row of each basic column, `usize::MAX` when non-basic.
    row_of: Vec<usize>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    blocked: Vec<bool>,
    artificial_start: usize,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    var_map: Vec<VarMap>,
    phase: Phase,
    trivially_infeasible: bool,
    iterations: usize,
    scratch: Vec<usize>,
}

/// Rows are negated when that makes the right-hand side non-negative, or
/// when a zero-rhs `>=` row can then start with its slack basic.
fn flip_row(relation: Relation, rhs: f64) -> bool {
    rhs < 0.0 || (rhs == 0.0 && relation == Relation::Ge)
}

enum Step {
    Optimal,
    Unbounded,
}

impl Simplex {
    pub fn new(p: &LinearProgram) -> Result<Self, LpError> {
        p.validate()?;
        let n = p.num_vars();

        let mut var_map = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n + p.constraints.len());
        let mut trivially_infeasible = false;
        for &(lo, hi) in &p.bounds {
            if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                trivially_infeasible = true;
            }
            if lo.is_finite() {
                var_map.push(VarMap::Shift {
                    col: upper.len(),
                    lower: lo,
                });
                upper.push((hi - lo).max(0.0));
            } else if hi.is_finite() {
                var_map.push(VarMap::Flip {
                    col: upper.len(),
                    upper: hi,
                });
                upper.push(f64::INFINITY);
            } else {
                let pos = upper.len();
                var_map.push(VarMap::Split { pos, neg: pos + 1 });
                upper.push(f64::INFINITY);
                upper.push(f64::INFINITY);
            }
        }
        let structural = upper.len();
        let rows = p.constraints.len();

        // Transformed right-hand sides decide row orientation and which rows
        // need an artificial.
        let mut rhs = Vec::with_capacity(rows);
        for c in &p.constraints {
            let mut b = c.rhs;
            for (a, m) in c.coeffs.iter().zip(&var_map) {
                if *a == 0.0 {
                    continue;
                }
                match *m {
                    VarMap::Shift { lower, .. } => b -= a * lower,
                    VarMap::Flip { upper, .. } => b -= a * upper,
                    VarMap::Split { .. } => {}
                }
            }
            rhs.push(b);
        }
        let slack_count = p
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let mut needs_artificial = Vec::with_capacity(rows);
        for (c, &b) in p.constraints.iter().zip(&rhs) {
            let slack_sign = match c.relation {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => 0.0,
            };
            let flip = flip_row(c.relation, b);
            let effective = if flip { -slack_sign } else { slack_sign };
            needs_artificial.push(effective <= 0.0);
        }
        let artificial_count = needs_artificial.iter().filter(|&&x| x).count();
        let artificial_start = structural + slack_count;
        let cols = artificial_start + artificial_count;
        upper.resize(artificial_start, f64::INFINITY);
        upper.resize(cols, f64::INFINITY);

        let mut tab = vec![0.0; rows * cols];
        let mut beta = vec![0.0; rows];
        let mut basis = vec![0; rows];
        let blocked = vec![false; cols];
        let mut next_slack = structural;
        let mut next_art = artificial_start;
        for (i, c) in p.constraints.iter().enumerate() {
            let sign = if flip_row(c.relation, rhs[i]) { -1.0 } else { 1.0 };
            let row = &mut tab[i * cols..(i + 1) * cols];
            for (a, m) in c.coeffs.iter().zip(&var_map) {
                if *a == 0.0 {
                    continue;
                }
                match *m {
                    VarMap::Shift { col, .. } => row[col] += sign * a,
                    VarMap::Flip { col, .. } => row[col] -= sign * a,
                    VarMap::Split { pos, neg } => {
                        row[pos] += sign * a;
                        row[neg] -= sign * a;
                    }
                }
            }
            let mut basic = None;
            match c.relation {
                Relation::Le | Relation::Ge => {
                    let s = if c.relation == Relation::Le { 1.0 } else { -1.0 } * sign;
                    row[next_slack] = s;
                    if s > 0.0 {
                        basic = Some(next_slack);
                    }
                    next_slack += 1;
                }
                Relation::Eq => {}
            }
            if needs_artificial[i] {
                row[next_art] = 1.0;
                basic = Some(next_art);
                next_art += 1;
            }
            basis[i] = basic.expect("every row has a unit basic column");
            beta[i] = sign * rhs[i];
        }

        let mut row_of = vec![usize::MAX; cols];
        for (i, &b) in basis.iter().enumerate() {
            row_of[b] = i;
        }

        Ok(Simplex {
            program: p.clone(),
            rows,
            cols,
            tab,
            beta,
            basis,
            row_of,
            upper,
            at_upper: vec![false; cols],
            blocked,
            artificial_start,
            cost: vec![0.0; cols],
            reduced: vec![0.0; cols],
            var_map,
            phase: Phase::Fresh,
            trivially_infeasible,
            iterations: 0,
            scratch: Vec::with_capacity(cols),
        })
    }

    pub fn program(&self) -> &LinearProgram {
        &self.program
    }

    /// Total pivots and bound flips performed so far.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn solve(&mut self) -> Result<LpSolution, LpError> {
        match self.phase {
            Phase::Optimal => return self.extract(),
            Phase::Terminal => {
                return Err(LpError::NumericalFailure(
                    "solver already terminated without an optimum".into(),
                ))
            }
            Phase::Fresh => {}
        }
        if self.trivially_infeasible {
            self.phase = Phase::Terminal;
            return Ok(LpSolution::infeasible());
        }
        if self.artificial_start < self.cols {
            for j in 0..self.cols {
                self.cost[j] = if j >= self.artificial_start { -1.0 } else { 0.0 };
            }
            self.price_all();
            if let Step::Unbounded = self.iterate()? {
                return Err(LpError::NumericalFailure("phase one reported unbounded".into()));
            }
            let infeasibility: f64 = (0..self.rows)
                .filter(|&i| self.basis[i] >= self.artificial_start)
                .map(|i| self.beta[i])
                .sum();
            let scale = 1.0f64.max(self.beta.iter().fold(0.0f64, |m, b| m.max(b.abs())));
            if infeasibility > FEAS_TOL * scale {
                self.phase = Phase::Terminal;
                return Ok(LpSolution::infeasible());
            }
            self.evict_artificials();
        }
        let objective = self.program.objective.clone();
        self.optimize_with(&objective)
    }

    /// Replaces the objective and re-optimises from the current basis.
    pub fn reoptimize(&mut self, objective: &[f64]) -> Result<LpSolution, LpError> {
        if objective.len() != self.program.num_vars() {
            return Err(LpError::Dimension(format!(
                "objective has {} entries, expected {}",
                objective.len(),
                self.program.num_vars()
            )));
        }
        match self.phase {
            Phase::Fresh => {
                self.program.objective = objective.to_vec();
                self.solve()
            }
            Phase::Optimal => self.optimize_with(objective),
            Phase::Terminal => {
                // Feasibility does not depend on the objective.
                self.program.objective = objective.to_vec();
                Ok(LpSolution::infeasible())
            }
        }
    }

    fn optimize_with(&mut self, objective: &[f64]) -> Result<LpSolution, LpError> {
        self.program.objective = objective.to_vec();
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        for (m, &c) in self.var_map.iter().zip(objective) {
            match *m {
                VarMap::Shift { col, .. } => self.cost[col] = c,
                VarMap::Flip { col, .. } => self.cost[col] = -c,
                VarMap::Split { pos, neg } => {
                    self.cost[pos] = c;
                    self.cost[neg] = -c;
                }
            }
        }
        self.price_all();
        match self.iterate()? {
            Step::Unbounded => {
                // The basis is still primal feasible; keep it for another objective.
                self.phase = Phase::Optimal;
                Ok(LpSolution::unbounded())
            }
            Step::Optimal => {
                self.phase = Phase::Optimal;
                self.extract()
            }
        }
    }

    fn price_all(&mut self) {
        let cols = self.cols;
        self.reduced.copy_from_slice(&self.cost);
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.tab[i * cols..(i + 1) * cols];
            for (r, a) in self.reduced.iter_mut().zip(row) {
                *r -= cb * a;
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        let mut best = None;
        let mut best_score = 0.0;
        for j in 0..self.cols {
            if self.row_of[j] != usize::MAX || self.blocked[j] {
                continue;
            }
            let z = self.reduced[j];
            let improving = if self.at_upper[j] { z < -OPT_TOL } else { z > OPT_TOL };
            if !improving || self.upper[j] == 0.0 {
                continue;
            }
            if bland {
                return Some(j);
            }
            if z.abs() > best_score {
                best_score = z.abs();
                best = Some(j);
            }
        }
        best
    }

    fn iterate(&mut self) -> Result<Step, LpError> {
        let cap = 50 * (self.rows + self.cols) + 1000;
        let mut streak = 0usize;
        let mut steps = 0usize;
        let cols = self.cols;
        loop {
            steps += 1;
            self.iterations += 1;
            if steps > cap {
                return Err(LpError::NumericalFailure(format!(
                    "iteration limit exceeded ({} rows, {} columns)",
                    self.rows, self.cols
                )));
            }
            let bland = streak >= DEGENERATE_STREAK;
            let Some(j) = self.choose_entering(bland) else {
                return Ok(Step::Optimal);
            };
            let dir = if self.at_upper[j] { -1.0 } else { 1.0 };

            let mut theta = f64::INFINITY;
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_alpha = 0.0;
            for i in 0..self.rows {
                let alpha = self.tab[i * cols + j];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let delta = -dir * alpha;
                let b = self.basis[i];
                let (limit, to_upper) = if delta < 0.0 {
                    (self.beta[i].max(0.0) / -delta, false)
                } else if self.upper[b].is_finite() {
                    ((self.upper[b] - self.beta[i]).max(0.0) / delta, true)
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((r, _)) => {
                        if limit < theta - 1e-12 {
                            true
                        } else if limit <= theta + 1e-12 {
                            if bland {
                                b < self.basis[r]
                            } else {
                                alpha.abs() > leave_alpha
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = limit;
                    leave = Some((i, to_upper));
                    leave_alpha = alpha.abs();
                }
            }

            let own = self.upper[j];
            if own <= theta {
                if own.is_infinite() {
                    return Ok(Step::Unbounded);
                }
                // Bound flip: entering column jumps to its other bound.
                for i in 0..self.rows {
                    let alpha = self.tab[i * cols + j];
                    if alpha != 0.0 {
                        self.beta[i] -= dir * alpha * own;
                    }
                }
                self.at_upper[j] = !self.at_upper[j];
                streak = 0;
                continue;
            }
            let (r, to_upper) = leave.expect("finite ratio implies a leaving row");
            if theta <= 1e-12 {
                streak += 1;
            } else {
                streak = 0;
            }
            for i in 0..self.rows {
                let alpha = self.tab[i * cols + j];
                if alpha != 0.0 {
                    self.beta[i] -= dir * alpha * theta;
                }
            }
            let entering_value = if dir > 0.0 { theta } else { own - theta };
            let leaving = self.basis[r];
            self.at_upper[leaving] = to_upper;
            self.pivot(r, j);
            self.beta[r] = entering_value;
        }
    }

    /// Makes column `j` basic in row `r` without moving any values.
    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let piv = self.tab[r * cols + j];
        self.scratch.clear();
        {
            let row = &mut self.tab[r * cols..(r + 1) * cols];
            for (k, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v /= piv;
                    if v.abs() < ZERO_CLEAN {
                        *v = 0.0;
                    } else {
                        self.scratch.push(k);
                    }
                }
            }
            row[j] = 1.0;
        }
        let (before, rest) = self.tab.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        let nz = &self.scratch;
        let eliminate = |row: &mut [f64]| {
            let f = row[j];
            if f == 0.0 {
                return;
            }
            for &k in nz {
                let v = row[k] - f * pivot_row[k];
                row[k] = if v.abs() < ZERO_CLEAN { 0.0 } else { v };
            }
            row[j] = 0.0;
        };
        for row in before.chunks_exact_mut(cols) {
            eliminate(row);
        }
        for row in after.chunks_exact_mut(cols) {
            eliminate(row);
        }
        eliminate(&mut self.reduced);

        let leaving = self.basis[r];
        self.row_of[leaving] = usize::MAX;
        self.basis[r] = j;
        self.row_of[j] = r;
    }

    /// Drives zero-level artificials out of the basis and blocks every
    /// artificial column from re-entering.
    fn evict_artificials(&mut self) {
        let cols = self.cols;
        for r in 0..self.rows {
            if self.basis[r] < self.artificial_start {
                continue;
            }
            let candidate = (0..self.artificial_start)
                .filter(|&k| self.row_of[k] == usize::MAX)
                .max_by(|&a, &b| {
                    self.tab[r * cols + a]
                        .abs()
                        .total_cmp(&self.tab[r * cols + b].abs())
                })
                .filter(|&k| self.tab[r * cols + k].abs() > 1e-9);
            if let Some(k) = candidate {
                let value = if self.at_upper[k] { self.upper[k] } else { 0.0 };
                let leaving = self.basis[r];
                self.at_upper[leaving] = false;
                self.pivot(r, k);
                self.beta[r] = value;
            } else {
                // Redundant row: the artificial stays basic, pinned at zero.
                self.beta[r] = 0.0;
            }
        }
        for j in self.artificial_start..cols {
            self.blocked[j] = true;
            self.upper[j] = 0.0;
        }
    }

    fn column_values(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.cols];
        for j in 0..self.cols {
            if self.row_of[j] == usize::MAX && self.at_upper[j] {
                y[j] = self.upper[j];
            }
        }
        for (i, &b) in self.basis.iter().enumerate() {
            y[b] = self.beta[i];
        }
        y
    }

    fn extract(&self) -> Result<LpSolution, LpError> {
        let y = self.column_values();
        let point: Vec<f64> = self
            .var_map
            .iter()
            .zip(&self.program.bounds)
            .map(|(m, &(lo, hi))| {
                let x = match *m {
                    VarMap::Shift { col, lower } => lower + y[col],
                    VarMap::Flip { col, upper } => upper - y[col],
                    VarMap::Split { pos, neg } => y[pos] - y[neg],
                };
                x.clamp(lo, hi)
            })
            .collect();
        let violation = self.program.max_violation(&point);
        if violation > FEAS_TOL {
            return Err(LpError::NumericalFailure(format!(
                "optimal point violates constraints by {violation:.3e}"
            )));
        }
        Ok(LpSolution {
            status: LpStatus::Optimal,
            value: self.program.objective_value(&point),
            point,
        })
    }
}
