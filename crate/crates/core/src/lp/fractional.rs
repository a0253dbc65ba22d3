use super::{dot, Constraint, LinearProgram, LpError, LpSolution, LpStatus, Relation, Simplex};

/// `coeffs . x + constant`
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl AffineForm {
    pub fn new(coeffs: Vec<f64>, constant: f64) -> Self {
        AffineForm { coeffs, constant }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.coeffs, x) + self.constant
    }

    pub fn scaled(&self, k: f64) -> Self {
        AffineForm {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
            constant: self.constant * k,
        }
    }
}

/// `maximize numerator(x) / denominator(x)` over a polyhedron on which the
/// denominator is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalProgram {
    pub numerator: AffineForm,
    pub denominator: AffineForm,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

impl FractionalProgram {
    pub fn num_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn ratio(&self, x: &[f64]) -> f64 {
        self.numerator.eval(x) / self.denominator.eval(x)
    }

    /// The feasible set as a linear program with a zero objective.
    pub fn feasible_region(&self) -> LinearProgram {
        LinearProgram {
            objective: vec![0.0; self.num_vars()],
            constraints: self.constraints.clone(),
            bounds: self.bounds.clone(),
        }
    }

    /// Charnes-Cooper linear program over `(y, s)` with `s` the last variable.
    pub fn charnes_cooper(&self) -> LinearProgram {
        let n = self.num_vars();
        let mut lp = LinearProgram::new(n + 1);
        lp.objective[..n].copy_from_slice(&self.numerator.coeffs);
        lp.objective[n] = self.numerator.constant;
        lp.bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); n];
        lp.bounds.push((0.0, f64::INFINITY));

        for c in &self.constraints {
            let mut coeffs = c.coeffs.clone();
            coeffs.push(-c.rhs);
            lp.add(coeffs, c.relation, 0.0);
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            // Zero bounds stay simple variable bounds; others scale with `s`.
            if lo == 0.0 {
                lp.bounds[j].0 = 0.0;
            } else if lo.is_finite() {
                lp.add_sparse(&[(j, 1.0), (n, -lo)], Relation::Ge, 0.0);
            }
            if hi == 0.0 {
                lp.bounds[j].1 = 0.0;
            } else if hi.is_finite() {
                lp.add_sparse(&[(j, 1.0), (n, -hi)], Relation::Le, 0.0);
            }
        }
        let mut den = self.denominator.coeffs.clone();
        den.push(self.denominator.constant);
        lp.add(den, Relation::Eq, 1.0);
        lp
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.numerator.coeffs.len() != n || self.denominator.coeffs.len() != n {
            return Err(LpError::Dimension(format!(
                "affine forms must have {n} coefficients"
            )));
        }
        self.feasible_region().validate()
    }
}

/// Maximises a ratio of affine forms via the Charnes-Cooper substitution and
/// recovers the maximiser in the original variables.
pub fn solve_linear_fractional(p: &FractionalProgram) -> Result<LpSolution, LpError> {
    p.validate()?;
    let n = p.num_vars();
    let cc = p.charnes_cooper();
    let sol = Simplex::new(&cc)?.solve()?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(LpError::Infeasible),
        LpStatus::Unbounded => return Err(LpError::Unbounded),
    }
    let s = sol.point[n];
    if s <= 1e-300 {
        return Err(LpError::DenominatorNonPositive(0.0));
    }
    let point: Vec<f64> = sol.point[..n]
        .iter()
        .zip(&p.bounds)
        .map(|(y, &(lo, hi))| (y / s).clamp(lo, hi))
        .collect();
    let den = p.denominator.eval(&point);
    if den <= 1e-12 {
        return Err(LpError::DenominatorNonPositive(den));
    }
    let violation = p.feasible_region().max_violation(&point);
    if violation > 1e3 * super::FEAS_TOL {
        return Err(LpError::NumericalFailure(format!(
            "recovered point violates constraints by {violation:.3e}"
        )));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: p.numerator.eval(&point) / den,
        point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn program(num: AffineForm, den: AffineForm, bounds: Vec<(f64, f64)>) -> FractionalProgram {
        FractionalProgram {
            numerator: num,
            denominator: den,
            constraints: Vec::new(),
            bounds,
        }
    }

    #[test]
    fn monotone_single_variable() {
        let p = program(
            AffineForm::new(vec![1.0], 1.0),
            AffineForm::new(vec![1.0], 2.0),
            vec![(0.0, 1.0)],
        );
        let s = solve_linear_fractional(&p).unwrap();
        assert!((s.value - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.point[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn corner_enumeration_two_variables() {
        let p = program(
            AffineForm::new(vec![2.0, 1.0], 0.0),
            AffineForm::new(vec![1.0, 1.0], 1.0),
            vec![(0.0, 1.0); 2],
        );
        let s = solve_linear_fractional(&p).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.point[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn shifted_bounds_and_rows() {
        // max (x - y) / (x + y) on 1 <= x <= 3, 2 <= y <= 5, x + y >= 4
        let mut p = program(
            AffineForm::new(vec![1.0, -1.0], 0.0),
            AffineForm::new(vec![1.0, 1.0], 0.0),
            vec![(1.0, 3.0), (2.0, 5.0)],
        );
        p.constraints.push(Constraint {
            coeffs: vec![1.0, 1.0],
            relation: Relation::Ge,
            rhs: 4.0,
        });
        let s = solve_linear_fractional(&p).unwrap();
        assert!((s.value - 0.2).abs() < 1e-12, "{}", s.value);
    }

    #[test]
    fn infeasible_region() {
        let mut p = program(
            AffineForm::new(vec![1.0], 0.0),
            AffineForm::new(vec![0.0], 1.0),
            vec![(0.0, 1.0)],
        );
        p.constraints.push(Constraint {
            coeffs: vec![1.0],
            relation: Relation::Ge,
            rhs: 2.0,
        });
        assert_eq!(solve_linear_fractional(&p), Err(LpError::Infeasible));
    }
}
