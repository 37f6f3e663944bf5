//! Dense linear programs in inequality form `A x ≤ b` and their duals.
//!
//! [`solve_lp`] returns an optimal primal vertex together with one
//! nonnegative multiplier per `≤` row. Internally the equality-form dual
//! (one row per primal variable) is handed to a Bland's-rule simplex, and
//! the primal point is read back from its simplex multipliers. Minimax
//! programs have few variables and many rows, so this keeps every pivot
//! `O(v · r)`.

mod simplex;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use simplex::Outcome;

/// Absolute primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;

/// Allowed gap between primal and dual objective values at an optimum.
pub fn duality_gap_tol(objective: f64) -> f64 {
    1e-8 * objective.abs().max(1.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("simplex failed to converge after {iterations} iterations")]
    NumericFailure { iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Free,
    NonNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `optimize objective·x  s.t.  constraints · x ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: DMatrix<f64>,
    pub rhs: Vec<f64>,
    pub kinds: Vec<VarKind>,
}

impl LinearProgram {
    pub fn minimize(
        objective: Vec<f64>,
        constraints: DMatrix<f64>,
        rhs: Vec<f64>,
        kinds: Vec<VarKind>,
    ) -> Result<Self, LpError> {
        let lp = Self {
            sense: Sense::Minimize,
            objective,
            constraints,
            rhs,
            kinds,
        };
        lp.validate()?;
        Ok(lp)
    }

    pub fn maximize(
        objective: Vec<f64>,
        constraints: DMatrix<f64>,
        rhs: Vec<f64>,
        kinds: Vec<VarKind>,
    ) -> Result<Self, LpError> {
        let lp = Self {
            sense: Sense::Maximize,
            ..Self::minimize(objective, constraints, rhs, kinds)?
        };
        Ok(lp)
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.nrows()
    }

    pub fn num_vars(&self) -> usize {
        self.constraints.ncols()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let (r, v) = self.constraints.shape();
        if r == 0 || v == 0 {
            return Err(LpError::DimensionMismatch(format!(
                "constraint matrix is {r}x{v}, need at least one row and column"
            )));
        }
        if self.objective.len() != v {
            return Err(LpError::DimensionMismatch(format!(
                "objective has {} entries for {v} variables",
                self.objective.len()
            )));
        }
        if self.kinds.len() != v {
            return Err(LpError::DimensionMismatch(format!(
                "{} variable kinds for {v} variables",
                self.kinds.len()
            )));
        }
        if self.rhs.len() != r {
            return Err(LpError::DimensionMismatch(format!(
                "rhs has {} entries for {r} rows",
                self.rhs.len()
            )));
        }
        if !self.objective.iter().all(|v| v.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        if !self.rhs.iter().all(|v| v.is_finite()) {
            return Err(LpError::NonFinite("rhs"));
        }
        if !self.constraints.iter().all(|v| v.is_finite()) {
            return Err(LpError::NonFinite("constraint matrix"));
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// `rhs[i] − row_i · x`; nonnegative when row `i` is satisfied.
    pub fn slack(&self, row: usize, x: &[f64]) -> f64 {
        let lhs: f64 = self
            .constraints
            .row(row)
            .iter()
            .zip(x)
            .map(|(a, x)| a * x)
            .sum();
        self.rhs[row] - lhs
    }

    /// Value of the dual functional at `dual`, in this program's sense.
    pub fn dual_objective_at(&self, dual: &[f64]) -> f64 {
        let b_dot: f64 = self.rhs.iter().zip(dual).map(|(b, y)| b * y).sum();
        match self.sense {
            Sense::Minimize => -b_dot,
            Sense::Maximize => b_dot,
        }
    }

    /// Objective in minimization convention.
    fn min_objective(&self) -> Vec<f64> {
        match self.sense {
            Sense::Minimize => self.objective.clone(),
            Sense::Maximize => self.objective.iter().map(|c| -c).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal vertex; empty unless optimal.
    pub primal: Vec<f64>,
    pub objective_value: f64,
    /// One nonnegative multiplier per `≤` row; empty unless optimal.
    pub dual: Vec<f64>,
    pub dual_objective: f64,
    /// Rows with slack at most [`FEAS_TOL`].
    pub active_rows: Vec<usize>,
    pub iterations: usize,
    /// Certifying explanation when not optimal.
    pub reason: Option<String>,
}

impl LpSolution {
    fn not_optimal(status: LpStatus, iterations: usize, reason: String) -> Self {
        let value = match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        };
        Self {
            status,
            primal: Vec::new(),
            objective_value: value,
            dual: Vec::new(),
            dual_objective: value,
            active_rows: Vec::new(),
            iterations,
            reason: Some(reason),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn duality_gap(&self) -> f64 {
        (self.objective_value - self.dual_objective).abs()
    }
}

fn max_iterations(rows: usize, vars: usize) -> usize {
    50 * (rows + vars)
}

/// Equality-form dual `min b·λ  s.t.  −Aᵀλ (=|≤) c',  λ ≥ 0` as a matrix
/// with surplus columns appended for nonnegative primal variables.
fn dual_equality_form(lp: &LinearProgram) -> (DMatrix<f64>, Vec<f64>) {
    let (r, v) = lp.constraints.shape();
    let surplus: Vec<usize> = (0..v)
        .filter(|&j| lp.kinds[j] == VarKind::NonNegative)
        .collect();
    let mut a = DMatrix::zeros(v, r + surplus.len());
    for j in 0..v {
        for i in 0..r {
            a[(j, i)] = -lp.constraints[(i, j)];
        }
    }
    for (k, &j) in surplus.iter().enumerate() {
        a[(j, r + k)] = 1.0;
    }
    let mut cost = lp.rhs.clone();
    cost.resize(r + surplus.len(), 0.0);
    (a, cost)
}

/// Decides between infeasible and unbounded once the dual has no feasible
/// point, by searching for a Farkas vector `λ ≥ 0, Σλ = 1` with
/// `Aᵀλ = 0` on free columns, `Aᵀλ ≥ 0` on nonnegative ones and `b·λ < 0`.
fn classify_dual_infeasible(lp: &LinearProgram, iterations: usize) -> Result<LpSolution, LpError> {
    let (r, v) = lp.constraints.shape();
    let surplus: Vec<usize> = (0..v)
        .filter(|&j| lp.kinds[j] == VarKind::NonNegative)
        .collect();
    let mut a = DMatrix::zeros(v + 1, r + surplus.len());
    for j in 0..v {
        for i in 0..r {
            a[(j, i)] = lp.constraints[(i, j)];
        }
    }
    for (k, &j) in surplus.iter().enumerate() {
        a[(j, r + k)] = -1.0;
    }
    for i in 0..r {
        a[(v, i)] = 1.0;
    }
    let mut b = vec![0.0; v + 1];
    b[v] = 1.0;
    let mut cost = lp.rhs.clone();
    cost.resize(r + surplus.len(), 0.0);
    let outcome = simplex::solve(&a, &b, &cost, max_iterations(v + 1, r + surplus.len()))?;
    let total = iterations + outcome_iterations(&outcome);
    if let Outcome::Optimal { x, .. } = &outcome {
        let value: f64 = lp.rhs.iter().zip(x).map(|(b, y)| b * y).sum();
        if value < -FEAS_TOL {
            return Ok(LpSolution::not_optimal(
                LpStatus::Infeasible,
                total,
                format!("Farkas multipliers on the rows give 0 ≤ {value:.6e}, a contradiction"),
            ));
        }
    }
    Ok(LpSolution::not_optimal(
        LpStatus::Unbounded,
        total,
        "constraints are feasible but the dual system has no solution, so the objective decreases without bound".into(),
    ))
}

fn outcome_iterations(o: &Outcome) -> usize {
    match o {
        Outcome::Optimal { iterations, .. }
        | Outcome::Infeasible { iterations, .. }
        | Outcome::Unbounded { iterations, .. } => *iterations,
    }
}

/// Solves `lp`, returning the optimal primal point and its dual multipliers.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let (r, v) = lp.constraints.shape();
    let c_min = lp.min_objective();
    let (a, cost) = dual_equality_form(lp);
    let outcome = simplex::solve(&a, &c_min, &cost, max_iterations(r, v))?;
    match outcome {
        Outcome::Optimal {
            x: lambda,
            multipliers,
            iterations,
        } => {
            let primal: Vec<f64> = multipliers.iter().map(|p| -p).collect();
            let dual: Vec<f64> = lambda[..r].iter().map(|l| l.max(0.0)).collect();
            let active_rows = (0..r)
                .filter(|&i| lp.slack(i, &primal) <= FEAS_TOL)
                .collect();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                objective_value: lp.objective_at(&primal),
                dual_objective: lp.dual_objective_at(&dual),
                primal,
                dual,
                active_rows,
                iterations,
                reason: None,
            })
        }
        Outcome::Unbounded { column, iterations } => Ok(LpSolution::not_optimal(
            LpStatus::Infeasible,
            iterations,
            format!("dual ray along multiplier of row {column} is unbounded, so the rows cannot all hold"),
        )),
        Outcome::Infeasible { iterations, .. } => classify_dual_infeasible(lp, iterations),
    }
}

/// The dual program over the row multipliers `λ ≥ 0`.
///
/// For a minimization this is `maximize −rhs·λ` subject to `−Aᵀλ = c` on
/// free columns and `−Aᵀλ ≤ c` on nonnegative ones; each equality is
/// emitted as a pair of `≤` rows. For a maximization the objective is
/// negated first and the result is a minimization of `rhs·λ`. Optimal
/// values coincide with the primal's.
pub fn dual_of(lp: &LinearProgram) -> Result<LinearProgram, LpError> {
    lp.validate()?;
    let r = lp.num_rows();
    let c_min = lp.min_objective();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    for (j, &cj) in c_min.iter().enumerate() {
        let col: Vec<f64> = (0..r).map(|i| -lp.constraints[(i, j)]).collect();
        if lp.kinds[j] == VarKind::Free {
            rows.push(col.iter().map(|a| -a).collect());
            rhs.push(-cj);
        }
        rows.push(col);
        rhs.push(cj);
    }
    let matrix = DMatrix::from_fn(rows.len(), r, |i, k| rows[i][k]);
    let kinds = vec![VarKind::NonNegative; r];
    match lp.sense {
        Sense::Minimize => {
            LinearProgram::maximize(lp.rhs.iter().map(|b| -b).collect(), matrix, rhs, kinds)
        }
        Sense::Maximize => LinearProgram::minimize(lp.rhs.clone(), matrix, rhs, kinds),
    }
}
