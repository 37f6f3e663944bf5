//! Exhaustive reference for small instances.
//!
//! A vertex of the minimax program with `z > 0` makes `m + 1` rows tight at
//! distinct points, so it solves
//!
//! ```text
//! Σ_j α_j Γ_j(x_i) + s_i d = y_i     for i in S, |S| = m + 1, s_i = ±1
//! ```
//!
//! The oracle solves this square system for every subset and sign pattern,
//! keeps the solutions with `d ≥ 0` that stay within `d` everywhere, and
//! returns the smallest `d`. It shares nothing with the simplex code beyond
//! the design matrix.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fit::{objective_value, FitError, FitResult, ProblemInstance};

pub const MAX_POINTS: usize = 15;
pub const MAX_FUNCTIONS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(
        "oracle limited to {MAX_POINTS} points and {MAX_FUNCTIONS} functions, got n = {n}, m = {m}"
    )]
    TooLarge { n: usize, m: usize },
    #[error("no subset of size m + 1 yields a feasible candidate")]
    NoCandidate,
    #[error(transparent)]
    Fit(#[from] FitError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub coefficients: Vec<f64>,
    pub discrepancy: f64,
    /// Lexicographically first subset attaining the minimum.
    pub witness_subset: Vec<usize>,
    pub witness_signs: Vec<i8>,
    /// Every minimizing candidate has the same coefficients.
    pub unique: bool,
}

#[derive(Debug, Clone)]
struct Candidate {
    subset: Vec<usize>,
    signs: Vec<i8>,
    coefficients: Vec<f64>,
    discrepancy: f64,
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn candidates_for(subset: &[usize], g: &DMatrix<f64>, y: &[f64]) -> Vec<Candidate> {
    let k = subset.len();
    let m = k - 1;
    let n = g.nrows();
    let scale = y.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let mut out = Vec::new();
    for pattern in 0..(1u32 << k) {
        let signs: Vec<i8> = (0..k)
            .map(|b| if pattern >> b & 1 == 1 { -1 } else { 1 })
            .collect();
        let mut a = DMatrix::zeros(k, k);
        let mut rhs = DVector::zeros(k);
        for (r, &i) in subset.iter().enumerate() {
            for j in 0..m {
                a[(r, j)] = g[(i, j)];
            }
            a[(r, m)] = f64::from(signs[r]);
            rhs[r] = y[i];
        }
        let Some(sol) = a.lu().solve(&rhs) else {
            continue;
        };
        if sol.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let d = sol[m];
        if d < -1e-12 * scale {
            continue;
        }
        let d = d.max(0.0);
        let coefficients: Vec<f64> = sol.iter().take(m).copied().collect();
        let within = 1e-9 * scale.max(d);
        let feasible = (0..n).all(|i| {
            let fitted: f64 = (0..m).map(|j| g[(i, j)] * coefficients[j]).sum();
            (y[i] - fitted).abs() <= d + within
        });
        if feasible {
            out.push(Candidate {
                subset: subset.to_vec(),
                signs,
                coefficients,
                discrepancy: d,
            });
        }
    }
    out
}

pub fn brute_force_fit(instance: &ProblemInstance) -> Result<OracleResult, OracleError> {
    let (n, m) = (instance.len(), instance.num_functions());
    if n > MAX_POINTS || m > MAX_FUNCTIONS {
        return Err(OracleError::TooLarge { n, m });
    }
    let g = instance.weighted_design()?;
    let y = instance.weighted_values();
    let all: Vec<Candidate> = subsets(n, m + 1)
        .par_iter()
        .flat_map_iter(|s| candidates_for(s, &g, &y))
        .collect();
    let best = all
        .iter()
        .map(|c| c.discrepancy)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(OracleError::NoCandidate);
    }
    let tie = 1e-10 * best.max(1.0);
    let mut minimal = all.iter().filter(|c| c.discrepancy <= best + tie);
    let first = minimal.next().expect("best comes from a candidate");
    let coef_tol = 1e-7
        * first
            .coefficients
            .iter()
            .fold(1.0_f64, |a, v| a.max(v.abs()));
    let unique = minimal.all(|c| {
        c.coefficients
            .iter()
            .zip(&first.coefficients)
            .all(|(a, b)| (a - b).abs() <= coef_tol)
    });
    Ok(OracleResult {
        coefficients: first.coefficients.clone(),
        discrepancy: first.discrepancy,
        witness_subset: first.subset.clone(),
        witness_signs: first.signs.clone(),
        unique,
    })
}

/// How an LP fit compares with the brute-force answer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub discrepancy_difference: f64,
    /// Largest coefficient difference; only meaningful when the optimum is
    /// unique.
    pub max_coefficient_difference: f64,
    /// Objective of the oracle's coefficients, which must equal the LP
    /// discrepancy whether or not the optimum is unique.
    pub oracle_objective: f64,
    /// `d` within `1e-8`, and coefficients within `1e-7` when unique or
    /// the oracle's coefficients attaining the LP's `d` when not.
    pub agrees: bool,
}

pub fn compare_with_fit(
    fit: &FitResult,
    oracle: &OracleResult,
    instance: &ProblemInstance,
) -> Result<OracleComparison, OracleError> {
    let discrepancy_difference = (fit.discrepancy - oracle.discrepancy).abs();
    let max_coefficient_difference = fit
        .coefficients
        .iter()
        .zip(&oracle.coefficients)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let oracle_objective = objective_value(instance, &oracle.coefficients)?;
    let coefficients_ok = if oracle.unique {
        max_coefficient_difference <= 1e-7
    } else {
        (oracle_objective - fit.discrepancy).abs() <= 1e-8
    };
    Ok(OracleComparison {
        discrepancy_difference,
        max_coefficient_difference,
        oracle_objective,
        agrees: discrepancy_difference <= 1e-8 && coefficients_ok,
    })
}
