//! Best uniform approximation of a finite data set as a linear program.
//!
//! For points `x_i`, values `y_i` and basis `Γ_1..Γ_m`, the program has
//! variables `(α_1, …, α_m, z)` and two rows per point:
//!
//! ```text
//! row 2i   :  Σ_j α_j Γ_j(x_i) − z ≤  y_i     (fit above the value)
//! row 2i+1 : −Σ_j α_j Γ_j(x_i) − z ≤ −y_i     (fit below the value)
//! ```
//!
//! minimizing `z`. Weights `μ_i` multiply both rows of point `i`,
//! coefficients and right-hand side alike.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::{design_matrix, matrix_rank_estimate, BasisError, BasisSet, EvaluationPoint};
use crate::lp::{solve_lp, LinearProgram, LpError, LpSolution, LpStatus, VarKind, FEAS_TOL};

/// Tolerance on `|r_i| ≥ d − tol` for active-point membership.
pub fn active_tol(discrepancy: f64) -> f64 {
    1e-7 * discrepancy.max(1.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Solver(#[from] LpError),
    #[error("solver returned {status:?}: {reason}")]
    NotOptimal { status: LpStatus, reason: String },
}

/// Points, target values, optional weights and a basis.
///
/// `point_scale`, when present, multiplies every basis function at a point:
/// the instance then fits `Γ'_k(x_i) = s_i Γ_k(x_i)`. This is how row-level
/// transformations that are not expressible as new formulas are carried.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    points: Vec<EvaluationPoint>,
    values: Vec<f64>,
    weights: Option<Vec<f64>>,
    point_scale: Option<Vec<f64>>,
    basis: BasisSet,
}

impl ProblemInstance {
    pub fn new(
        points: Vec<EvaluationPoint>,
        values: Vec<f64>,
        basis: BasisSet,
    ) -> Result<Self, FitError> {
        let inst = Self {
            points,
            values,
            weights: None,
            point_scale: None,
            basis,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// One-dimensional convenience constructor.
    pub fn from_xy(xs: &[f64], ys: &[f64], basis: BasisSet) -> Result<Self, FitError> {
        Self::new(xs.iter().map(|&x| x.into()).collect(), ys.to_vec(), basis)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self, FitError> {
        self.weights = Some(weights);
        self.validate()?;
        Ok(self)
    }

    pub fn with_point_scale(mut self, scale: Vec<f64>) -> Result<Self, FitError> {
        self.point_scale = Some(scale);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), FitError> {
        let n = self.points.len();
        if n == 0 {
            return Err(FitError::Invalid("at least one point is required".into()));
        }
        if self.basis.is_empty() {
            return Err(FitError::Invalid("basis is empty".into()));
        }
        if self.values.len() != n {
            return Err(FitError::Invalid(format!(
                "{} values for {n} points",
                self.values.len()
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(FitError::Invalid(format!("value {i} is not finite")));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.dimension() != self.basis.dimension() {
                return Err(BasisError::PointDimension {
                    point: i,
                    expected: self.basis.dimension(),
                    found: p.dimension(),
                }
                .into());
            }
            if !p.coordinates.iter().all(|c| c.is_finite()) {
                return Err(FitError::Invalid(format!("point {i} is not finite")));
            }
        }
        if let Some(w) = &self.weights {
            if w.len() != n {
                return Err(FitError::Invalid(format!(
                    "{} weights for {n} points",
                    w.len()
                )));
            }
            if let Some(i) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(FitError::Invalid(format!(
                    "weight {i} must be finite and nonnegative"
                )));
            }
            if w.iter().all(|v| *v == 0.0) {
                return Err(FitError::Invalid("weights are all zero".into()));
            }
        }
        if let Some(s) = &self.point_scale {
            if s.len() != n || !s.iter().all(|v| v.is_finite()) {
                return Err(FitError::Invalid(
                    "point scale must be finite, one per point".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[EvaluationPoint] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn point_scale(&self) -> Option<&[f64]> {
        self.point_scale.as_deref()
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_functions(&self) -> usize {
        self.basis.len()
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// `μ_i`, or 1 when unweighted.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    /// Negates `Γ_k(x_j)` for every `k` together with `y_j`. Applying it
    /// twice at the same point restores the instance.
    pub fn flip_point(&self, j: usize) -> Self {
        let mut out = self.clone();
        let scale = out.point_scale.get_or_insert_with(|| vec![1.0; self.len()]);
        scale[j] = -scale[j];
        if scale.iter().all(|s| *s == 1.0) {
            out.point_scale = None;
        }
        out.values[j] = -out.values[j];
        out
    }

    /// `Γ'_j(x_i)`, including any point scale but not the weights.
    pub fn design(&self) -> Result<DMatrix<f64>, FitError> {
        let mut g = design_matrix(&self.basis, &self.points)?;
        if let Some(s) = &self.point_scale {
            for (i, si) in s.iter().enumerate() {
                g.row_mut(i).scale_mut(*si);
            }
        }
        Ok(g)
    }

    /// Design rows multiplied by the weights: `μ_i Γ'_j(x_i)`.
    pub fn weighted_design(&self) -> Result<DMatrix<f64>, FitError> {
        let mut g = self.design()?;
        if let Some(w) = &self.weights {
            for (i, wi) in w.iter().enumerate() {
                g.row_mut(i).scale_mut(*wi);
            }
        }
        Ok(g)
    }

    /// `μ_i y_i`.
    pub fn weighted_values(&self) -> Vec<f64> {
        match &self.weights {
            Some(w) => self.values.iter().zip(w).map(|(y, w)| w * y).collect(),
            None => self.values.clone(),
        }
    }

    /// Unweighted residuals `y_i − Σ_j α_j Γ'_j(x_i)`.
    pub fn residuals(&self, coefficients: &[f64]) -> Result<Vec<f64>, FitError> {
        if coefficients.len() != self.num_functions() {
            return Err(FitError::Invalid(format!(
                "{} coefficients for {} basis functions",
                coefficients.len(),
                self.num_functions()
            )));
        }
        let g = self.design()?;
        Ok((0..self.len())
            .map(|i| {
                let fitted: f64 = g.row(i).iter().zip(coefficients).map(|(g, a)| g * a).sum();
                self.values[i] - fitted
            })
            .collect())
    }

    pub fn to_record(&self) -> InstanceRecord {
        InstanceRecord {
            basis: self.basis.to_string(),
            dimension: self.dimension(),
            points: self.points.iter().map(|p| p.coordinates.clone()).collect(),
            values: self.values.clone(),
            weights: self.weights.clone(),
            point_scale: self.point_scale.clone(),
        }
    }

    pub fn from_record(record: &InstanceRecord) -> Result<Self, FitError> {
        let basis = BasisSet::parse(&record.basis, record.dimension)?;
        let mut inst = Self::new(
            record
                .points
                .iter()
                .cloned()
                .map(EvaluationPoint::new)
                .collect(),
            record.values.clone(),
            basis,
        )?;
        if let Some(w) = &record.weights {
            inst = inst.with_weights(w.clone())?;
        }
        if let Some(s) = &record.point_scale {
            inst = inst.with_point_scale(s.clone())?;
        }
        Ok(inst)
    }
}

/// Serializable form of a [`ProblemInstance`], used for replaying failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub basis: String,
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_scale: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    /// Optimal `z`: the smallest achievable `max_i μ_i |r_i|`.
    pub discrepancy: f64,
    /// `r_i = y_i − Σ_j α_j Γ_j(x_i)`.
    pub residuals: Vec<f64>,
    /// `μ_i r_i`; identical to `residuals` when unweighted.
    pub scaled_residuals: Vec<f64>,
    /// Indices with `μ_i > 0` and `μ_i |r_i| ≥ d − active_tol(d)`, ascending.
    pub active_points: Vec<usize>,
    pub exact_interpolation: bool,
    pub low_rank: bool,
    pub solution: LpSolution,
}

impl FitResult {
    pub fn active_tol(&self) -> f64 {
        active_tol(self.discrepancy)
    }

    pub fn is_degenerate(&self) -> bool {
        self.exact_interpolation || self.low_rank
    }
}

/// The `2n × (m+1)` program described in the module docs.
pub fn assemble_primal(instance: &ProblemInstance) -> Result<LinearProgram, FitError> {
    let g = instance.weighted_design()?;
    let y = instance.weighted_values();
    let (n, m) = g.shape();
    let mut a = DMatrix::zeros(2 * n, m + 1);
    let mut rhs = Vec::with_capacity(2 * n);
    for i in 0..n {
        for j in 0..m {
            a[(2 * i, j)] = g[(i, j)];
            a[(2 * i + 1, j)] = -g[(i, j)];
        }
        a[(2 * i, m)] = -1.0;
        a[(2 * i + 1, m)] = -1.0;
        rhs.push(y[i]);
        rhs.push(-y[i]);
    }
    let mut objective = vec![0.0; m + 1];
    objective[m] = 1.0;
    Ok(LinearProgram::minimize(
        objective,
        a,
        rhs,
        vec![VarKind::Free; m + 1],
    )?)
}

pub fn fit(instance: &ProblemInstance) -> Result<FitResult, FitError> {
    let lp = assemble_primal(instance)?;
    let solution = solve_lp(&lp)?;
    if solution.status != LpStatus::Optimal {
        return Err(FitError::NotOptimal {
            status: solution.status,
            reason: solution.reason.clone().unwrap_or_default(),
        });
    }
    let m = instance.num_functions();
    let coefficients = solution.primal[..m].to_vec();
    let discrepancy = solution.objective_value.max(0.0);
    let residuals = instance.residuals(&coefficients)?;
    let scaled_residuals: Vec<f64> = residuals
        .iter()
        .enumerate()
        .map(|(i, r)| instance.weight(i) * r)
        .collect();
    let tol = active_tol(discrepancy);
    let active_points = (0..instance.len())
        .filter(|&i| instance.weight(i) > 0.0 && scaled_residuals[i].abs() >= discrepancy - tol)
        .collect();
    let low_rank = matrix_rank_estimate(&instance.weighted_design()?) < m;
    Ok(FitResult {
        coefficients,
        discrepancy,
        residuals,
        scaled_residuals,
        active_points,
        exact_interpolation: discrepancy <= FEAS_TOL,
        low_rank,
        solution,
    })
}

/// `max_i μ_i |y_i − Σ_j α_j Γ_j(x_i)|`, weights applied iff present.
pub fn objective_value(instance: &ProblemInstance, coefficients: &[f64]) -> Result<f64, FitError> {
    let r = instance.residuals(coefficients)?;
    Ok(r.iter()
        .enumerate()
        .map(|(i, r)| instance.weight(i) * r.abs())
        .fold(0.0, f64::max))
}
