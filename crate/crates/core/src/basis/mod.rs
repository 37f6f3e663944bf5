//! Basis-function lists, evaluation points and design matrices.

mod expr;

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expr::{EvalFault, Expr, Func, ParseError};

/// Relative pivot threshold for [`matrix_rank_estimate`].
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("variable x{variable} at position {position} exceeds dimension {dimension}")]
    Dimension {
        variable: usize,
        position: usize,
        dimension: usize,
    },
    #[error("point {point} has dimension {found}, basis expects {expected}")]
    PointDimension {
        point: usize,
        expected: usize,
        found: usize,
    },
    #[error("evaluating {function} at point {point}: {fault}")]
    Evaluation {
        point: usize,
        function: String,
        fault: EvalFault,
    },
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvaluationPoint {
    pub coordinates: Vec<f64>,
}

impl EvaluationPoint {
    pub fn new(coordinates: Vec<f64>) -> Self {
        Self { coordinates }
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    /// First coordinate, the abscissa of a one-dimensional point.
    pub fn x(&self) -> f64 {
        self.coordinates[0]
    }
}

impl From<f64> for EvaluationPoint {
    fn from(x: f64) -> Self {
        Self::new(vec![x])
    }
}

impl From<Vec<f64>> for EvaluationPoint {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl<const N: usize> From<[f64; N]> for EvaluationPoint {
    fn from(v: [f64; N]) -> Self {
        Self::new(v.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction {
    pub expr: Expr,
    pub label: String,
}

impl BasisFunction {
    pub fn eval(&self, point: &EvaluationPoint) -> Result<f64, EvalFault> {
        self.expr.eval(&point.coordinates)
    }
}

/// Ordered list `Γ_1, …, Γ_m` over points of a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    functions: Vec<BasisFunction>,
    dimension: usize,
}

impl BasisSet {
    /// Parses a comma-separated list such as `"1, x, x^2"` or
    /// `"1, x*y^2, exp(x), cos(y - x)"`.
    pub fn parse(text: &str, dimension: usize) -> Result<Self, BasisError> {
        parse_basis_spec(text, dimension)
    }

    /// `1, x, …, x^degree` on the line.
    pub fn monomials(degree: usize) -> Self {
        let functions = (0..=degree)
            .map(|k| {
                let expr = match k {
                    0 => Expr::Const(1.0),
                    1 => Expr::Var(0),
                    _ => Expr::Pow(Box::new(Expr::Var(0)), k as i32),
                };
                let label = match k {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    _ => format!("x^{k}"),
                };
                BasisFunction { expr, label }
            })
            .collect();
        Self {
            functions,
            dimension: 1,
        }
    }

    pub fn functions(&self) -> &[BasisFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn labels(&self) -> Vec<&str> {
        self.functions.iter().map(|f| f.label.as_str()).collect()
    }

    /// `Γ_j(x)` for every `j`; `index` identifies the point in errors.
    pub fn evaluate_row(
        &self,
        point: &EvaluationPoint,
        index: usize,
    ) -> Result<Vec<f64>, BasisError> {
        if point.dimension() != self.dimension {
            return Err(BasisError::PointDimension {
                point: index,
                expected: self.dimension,
                found: point.dimension(),
            });
        }
        self.functions
            .iter()
            .map(|f| {
                f.eval(point).map_err(|fault| BasisError::Evaluation {
                    point: index,
                    function: f.label.clone(),
                    fault,
                })
            })
            .collect()
    }

    /// `Σ_j α_j Γ_j(x)`.
    pub fn combine(
        &self,
        coefficients: &[f64],
        point: &EvaluationPoint,
    ) -> Result<f64, BasisError> {
        let row = self.evaluate_row(point, 0)?;
        Ok(row.iter().zip(coefficients).map(|(g, a)| g * a).sum())
    }
}

/// Canonical text form; parses back to an equivalent basis.
impl fmt::Display for BasisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, func) in self.functions.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", func.expr)?;
        }
        Ok(())
    }
}

pub fn parse_basis_spec(text: &str, dimension: usize) -> Result<BasisSet, BasisError> {
    if dimension == 0 {
        return Err(BasisError::ZeroDimension);
    }
    let items = expr::parse_list(text, dimension)?;
    let mut functions = Vec::with_capacity(items.len());
    for item in items {
        if let Some((position, var)) = item.out_of_range {
            return Err(BasisError::Dimension {
                variable: var + 1,
                position,
                dimension,
            });
        }
        functions.push(BasisFunction {
            expr: item.expr,
            label: item.source,
        });
    }
    Ok(BasisSet {
        functions,
        dimension,
    })
}

/// `n × m` matrix with entry `(i, j) = Γ_j(x_i)`.
pub fn design_matrix(
    basis: &BasisSet,
    points: &[EvaluationPoint],
) -> Result<DMatrix<f64>, BasisError> {
    let m = basis.len();
    let mut out = DMatrix::zeros(points.len(), m);
    for (i, p) in points.iter().enumerate() {
        let row = basis.evaluate_row(p, i)?;
        for (j, v) in row.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// Numerical rank from a column-pivoted QR: the number of diagonal entries
/// of `R` above `RANK_TOL` times the largest one.
pub fn matrix_rank_estimate(matrix: &DMatrix<f64>) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    let qr = matrix.clone().col_piv_qr();
    let r = qr.r();
    let k = r.nrows().min(r.ncols());
    let diag: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let largest = diag.iter().copied().fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return 0;
    }
    diag.iter().filter(|&&d| d > RANK_TOL * largest).count()
}
