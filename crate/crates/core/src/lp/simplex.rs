//! Dense two-phase tableau simplex over the equality form
//! `min c·x  s.t.  A x = b, x ≥ 0`, pivoting with Bland's rule.
//!
//! After the tableau terminates, the basic solution and the simplex
//! multipliers are recomputed from an LU factorization of the final basis,
//! so the returned values carry no accumulated pivoting drift.

use nalgebra::{DMatrix, DVector};

use super::LpError;

/// Result of an equality-form solve.
#[derive(Debug, Clone)]
pub(crate) enum Outcome {
    Optimal {
        /// Values of the structural columns.
        x: Vec<f64>,
        /// Simplex multipliers `π` with `Bᵀπ = c_B`, one per equality row.
        multipliers: Vec<f64>,
        iterations: usize,
    },
    /// Phase one ended with a positive sum of artificials.
    Infeasible { iterations: usize },
    /// Column `column` can enter with no blocking row.
    Unbounded { column: usize, iterations: usize },
}

struct Tableau {
    rows: usize,
    /// Structural columns; artificials follow at `cols..cols + rows`.
    cols: usize,
    /// Row-major, `rows × (cols + rows + 1)`, last entry of each row is the rhs.
    data: Vec<f64>,
    /// Reduced costs, last entry is minus the objective.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Rows whose artificial could not be driven out after phase one.
    redundant: Vec<bool>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + self.rows + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width() - 1)
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let w = self.width();
        let piv = self.data[p * w + q];
        for v in &mut self.data[p * w..(p + 1) * w] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.data[p * w..(p + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == p {
                continue;
            }
            let f = self.data[i * w + q];
            if f != 0.0 {
                for (v, pr) in self.data[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.data[i * w + q] = 0.0;
            }
        }
        let f = self.cost[q];
        if f != 0.0 {
            for (v, pr) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.cost[q] = 0.0;
        }
        self.basis[p] = q;
    }

    /// Reduced costs for the given column costs (artificials cost `art_cost`).
    fn price(&mut self, c: &[f64], art_cost: f64) {
        let w = self.width();
        let col_cost = |j: usize| if j < self.cols { c[j] } else { art_cost };
        let mut cost: Vec<f64> = (0..w - 1).map(col_cost).collect();
        cost.push(0.0);
        for i in 0..self.rows {
            let cb = col_cost(self.basis[i]);
            if cb != 0.0 {
                for (v, t) in cost.iter_mut().zip(&self.data[i * w..(i + 1) * w]) {
                    *v -= cb * t;
                }
            }
        }
        for &b in &self.basis {
            cost[b] = 0.0;
        }
        self.cost = cost;
    }
}

struct Tolerances {
    pivot: f64,
    optimality: f64,
    feasibility: f64,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

/// Runs Bland's-rule pivots until optimal or unbounded.  Only columns for
/// which `allowed` holds may enter.
fn iterate(
    t: &mut Tableau,
    tol: &Tolerances,
    allowed: impl Fn(usize) -> bool,
    iterations: &mut usize,
    max_iterations: usize,
) -> Result<Step, LpError> {
    loop {
        let entering = (0..t.cols + t.rows).find(|&j| allowed(j) && t.cost[j] < -tol.optimality);
        let Some(q) = entering else {
            return Ok(Step::Optimal);
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.rows {
            if t.redundant[i] {
                continue;
            }
            let a = t.at(i, q);
            if a <= tol.pivot {
                continue;
            }
            let ratio = t.rhs(i).max(0.0) / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((k, best)) => {
                    let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                    if (ratio < best && !tie) || (tie && t.basis[i] < t.basis[k]) {
                        Some((i, ratio))
                    } else {
                        Some((k, best))
                    }
                }
            };
        }
        let Some((p, _)) = leave else {
            return Ok(Step::Unbounded(q));
        };
        *iterations += 1;
        if *iterations > max_iterations {
            return Err(LpError::NumericFailure {
                iterations: *iterations,
            });
        }
        t.pivot(p, q);
    }
}

/// Column `j` of `[A | diag(sign)]`.
fn extended_column(a: &DMatrix<f64>, sign: &[f64], j: usize) -> DVector<f64> {
    if j < a.ncols() {
        a.column(j).into_owned()
    } else {
        let mut e = DVector::zeros(a.nrows());
        e[j - a.ncols()] = sign[j - a.ncols()];
        e
    }
}

struct Refined {
    x_basic: DVector<f64>,
    multipliers: DVector<f64>,
}

fn refine(
    a: &DMatrix<f64>,
    b: &[f64],
    c: &[f64],
    sign: &[f64],
    basis: &[usize],
) -> Option<Refined> {
    let m = a.nrows();
    let mut bm = DMatrix::zeros(m, m);
    for (k, &j) in basis.iter().enumerate() {
        bm.set_column(k, &extended_column(a, sign, j));
    }
    let cb = DVector::from_iterator(
        m,
        basis
            .iter()
            .map(|&j| if j < a.ncols() { c[j] } else { 0.0 }),
    );
    let lu = bm.clone().lu();
    let x_basic = lu.solve(&DVector::from_column_slice(b))?;
    let multipliers = bm.transpose().lu().solve(&cb)?;
    Some(Refined {
        x_basic,
        multipliers,
    })
}

/// Rebuilds the tableau as `B⁻¹ [A | diag(sign) | b]` for the current basis.
fn rebuild(t: &mut Tableau, a: &DMatrix<f64>, b: &[f64], sign: &[f64]) -> bool {
    let m = t.rows;
    let mut bm = DMatrix::zeros(m, m);
    for (k, &j) in t.basis.iter().enumerate() {
        bm.set_column(k, &extended_column(a, sign, j));
    }
    let Some(inv) = bm.try_inverse() else {
        return false;
    };
    let w = t.width();
    let mut full = DMatrix::zeros(m, w);
    for j in 0..w - 1 {
        full.set_column(j, &extended_column(a, sign, j));
    }
    full.set_column(w - 1, &DVector::from_column_slice(b));
    let reduced = inv * full;
    for i in 0..m {
        for j in 0..w {
            t.data[i * w + j] = reduced[(i, j)];
        }
    }
    true
}

/// Solves `min c·x s.t. A x = b, x ≥ 0`.
pub(crate) fn solve(
    a: &DMatrix<f64>,
    b: &[f64],
    c: &[f64],
    max_iterations: usize,
) -> Result<Outcome, LpError> {
    let rows = a.nrows();
    let cols = a.ncols();
    let scale_a = a.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    let scale_b = b.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    let scale_c = c.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    let tol = Tolerances {
        pivot: 1e-10 * scale_a,
        optimality: 1e-11 * scale_c,
        feasibility: 1e-9 * scale_b,
    };

    let sign: Vec<f64> = b
        .iter()
        .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let width = cols + rows + 1;
    let mut data = vec![0.0; rows * width];
    for i in 0..rows {
        for j in 0..cols {
            data[i * width + j] = sign[i] * a[(i, j)];
        }
        data[i * width + cols + i] = 1.0;
        data[i * width + width - 1] = sign[i] * b[i];
    }
    let mut t = Tableau {
        rows,
        cols,
        data,
        cost: Vec::new(),
        basis: (cols..cols + rows).collect(),
        redundant: vec![false; rows],
    };
    let mut iterations = 0;

    // Phase one: minimize the sum of artificials.
    t.price(&vec![0.0; cols], 1.0);
    match iterate(&mut t, &tol, |j| j < cols, &mut iterations, max_iterations)? {
        Step::Optimal => {}
        // The phase-one objective is bounded below by zero.
        Step::Unbounded(_) => unreachable!("phase one cannot be unbounded"),
    }
    let residual: f64 = (0..rows)
        .filter(|&i| t.basis[i] >= cols)
        .map(|i| t.rhs(i).abs())
        .sum();
    if residual > tol.feasibility {
        return Ok(Outcome::Infeasible { iterations });
    }
    for i in 0..rows {
        if t.basis[i] < cols {
            continue;
        }
        let best = (0..cols).map(|j| (j, t.at(i, j).abs())).fold(
            None,
            |acc: Option<(usize, f64)>, (j, v)| match acc {
                Some((_, bv)) if bv >= v => acc,
                _ => Some((j, v)),
            },
        );
        match best {
            Some((j, v)) if v > tol.pivot => t.pivot(i, j),
            _ => t.redundant[i] = true,
        }
    }

    // Phase two, with refinement from a fresh factorization of the final
    // basis; pivoting resumes if the refined point is not optimal.
    t.price(c, 0.0);
    for _ in 0..8 {
        match iterate(&mut t, &tol, |j| j < cols, &mut iterations, max_iterations)? {
            Step::Unbounded(column) => {
                return Ok(Outcome::Unbounded { column, iterations });
            }
            Step::Optimal => {}
        }
        let Some(refined) = refine(a, b, c, &sign, &t.basis) else {
            return Err(LpError::NumericFailure { iterations });
        };
        let mut x = vec![0.0; cols];
        let mut primal_ok = true;
        for (k, &j) in t.basis.iter().enumerate() {
            let v = refined.x_basic[k];
            if v < -tol.feasibility {
                primal_ok = false;
            }
            if j < cols {
                x[j] = v.max(0.0);
            }
        }
        let dual_ok = (0..cols).all(|j| {
            let reduced = c[j] - a.column(j).dot(&refined.multipliers);
            reduced >= -tol.optimality
        });
        if primal_ok && dual_ok {
            return Ok(Outcome::Optimal {
                x,
                multipliers: refined.multipliers.iter().copied().collect(),
                iterations,
            });
        }
        if !rebuild(&mut t, a, b, &sign) {
            return Err(LpError::NumericFailure { iterations });
        }
        t.price(c, 0.0);
    }
    Err(LpError::NumericFailure { iterations })
}
