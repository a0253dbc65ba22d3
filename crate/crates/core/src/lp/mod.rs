//! Dense linear and linear-fractional programming.
//!
//! Programs are always maximisations. Linear programs are solved by a
//! bounded-variable primal simplex on a dense tableau; linear-fractional
//! programs are reduced to a single linear program by the Charnes-Cooper
//! substitution `y = x / den(x)`, `s = 1 / den(x)`.

mod fractional;
mod simplex;

use thiserror::Error;

pub use fractional::{solve_linear_fractional, AffineForm, FractionalProgram};
pub use simplex::Simplex;

/// Primal feasibility tolerance, relative to the magnitude of a row.
pub const FEAS_TOL: f64 = 1e-8;
/// Entries below this magnitude are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("program dimension mismatch: {0}")]
    Dimension(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("program is infeasible")]
    Infeasible,
    #[error("program is unbounded")]
    Unbounded,
    #[error("denominator non-positive at recovered point ({0})")]
    DenominatorNonPositive(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective . x  s.t.  constraints, lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Per-variable `(lower, upper)`; infinities allowed.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A program over `n` non-negative variables with a zero objective.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            constraints: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    /// Adds a constraint given as sparse `(index, coefficient)` terms.
    pub fn add_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            coeffs[j] += a;
        }
        self.add(coeffs, relation, rhs);
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::Dimension(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Dimension(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() {
                return Err(LpError::Dimension(format!("constraint {i} has non-finite rhs")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest scaled violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let mut lhs = 0.0;
            let mut scale = 1.0f64.max(c.rhs.abs());
            for (a, v) in c.coeffs.iter().zip(x) {
                let term = a * v;
                lhs += term;
                scale = scale.max(term.abs());
            }
            let excess = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(excess / scale);
        }
        for (&(lo, hi), &v) in self.bounds.iter().zip(x) {
            let scale = 1.0f64.max(v.abs());
            worst = worst.max((lo - v) / scale).max((v - hi) / scale);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value at `point`; NaN unless optimal.
    pub value: f64,
    pub point: Vec<f64>,
}

impl LpSolution {
    pub(crate) fn infeasible() -> Self {
        LpSolution {
            status: LpStatus::Infeasible,
            value: f64::NAN,
            point: Vec::new(),
        }
    }

    pub(crate) fn unbounded() -> Self {
        LpSolution {
            status: LpStatus::Unbounded,
            value: f64::INFINITY,
            point: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves a linear program to a certified optimum or reports infeasibility
/// or unboundedness.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution, LpError> {
    Simplex::new(p)?.solve()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
