//! Dual certificates of minimax fits and the identities they satisfy.
//!
//! Rows are numbered from 1 in the naming below: row `2i−1` is the
//! overshoot row of point `i` (`Σ α_j Γ_j(x_i) − y_i ≤ z`) and row `2i` the
//! undershoot row (`y_i − Σ α_j Γ_j(x_i) ≤ z`). In zero-based storage the
//! overshoot row of point `i` sits at index `2i`.
//!
//! With `β ≥ 0` the row multipliers, stationarity in `α_k` and `z` gives
//!
//! ```text
//! Σ_odd β_i Γ_k(x) − Σ_even β_i Γ_k(x) = 0     for every k
//! Σ β_i = 1
//! ```
//!
//! and strong duality gives `Σ_even β_i y − Σ_odd β_i y = d`, i.e. the
//! dual objective of the ≤-form program. Weighted instances use the
//! rescaled rows `μ_i Γ_k(x_i)` and `μ_i y_i` throughout.

use serde::Serialize;
use thiserror::Error;

use crate::fit::{FitError, FitResult, ProblemInstance};
use crate::lp::LpStatus;

/// Tolerance for the dual identities.
pub fn cert_tol(discrepancy: f64) -> f64 {
    1e-8 * discrepancy.max(1.0)
}

/// Tolerance on `Σβ = 1` and on the odd/even halves.
pub const BETA_SUM_TOL: f64 = 1e-9;

/// Multipliers above this count as nonzero.
pub const BETA_SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error("degenerate fit: {0}")]
    Degenerate(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("certificate does not match instance: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Fit(#[from] FitError),
}

fn ensure_nondegenerate(fit: &FitResult) -> Result<(), CertificateError> {
    if fit.exact_interpolation {
        return Err(CertificateError::Degenerate(
            "exact interpolation (zero discrepancy)",
        ));
    }
    if fit.low_rank {
        return Err(CertificateError::Degenerate(
            "design matrix is rank deficient",
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCertificate {
    /// One multiplier per primal row, interleaved overshoot/undershoot.
    pub beta: Vec<f64>,
    /// Sum over overshoot rows (1-based odd rows).
    pub odd_sum: f64,
    /// Sum over undershoot rows (1-based even rows).
    pub even_sum: f64,
    pub dual_objective: f64,
}

impl DualCertificate {
    pub fn from_beta(beta: Vec<f64>, dual_objective: f64) -> Self {
        let odd_sum = beta.iter().step_by(2).sum();
        let even_sum = beta.iter().skip(1).step_by(2).sum();
        Self {
            beta,
            odd_sum,
            even_sum,
            dual_objective,
        }
    }

    pub fn total(&self) -> f64 {
        self.odd_sum + self.even_sum
    }

    /// Zero-based row indices carrying a nonzero multiplier.
    pub fn support(&self) -> Vec<usize> {
        (0..self.beta.len())
            .filter(|&i| self.beta[i] > BETA_SUPPORT_TOL)
            .collect()
    }
}

/// Reads `β` off the fit's LP solution.
pub fn extract_certificate(
    fit: &FitResult,
    instance: &ProblemInstance,
) -> Result<DualCertificate, CertificateError> {
    ensure_nondegenerate(fit)?;
    if fit.solution.status != LpStatus::Optimal {
        return Err(CertificateError::Precondition(
            "LP solution is not optimal".into(),
        ));
    }
    if fit.solution.dual.len() != 2 * instance.len() {
        return Err(CertificateError::Mismatch(format!(
            "{} multipliers for {} points",
            fit.solution.dual.len(),
            instance.len()
        )));
    }
    Ok(DualCertificate::from_beta(
        fit.solution.dual.clone(),
        fit.solution.dual_objective,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub tolerance: f64,
    /// `(Σ_even β y − Σ_odd β y) − d`, the strong-duality residual.
    pub strong_duality_gap: f64,
    /// `(Σ_odd β y − Σ_even β y) − d`. With overshoot rows odd this side
    /// equals `−2d`; kept to record the orientation of the identity.
    pub reversed_orientation_residual: f64,
    /// `Σβ − 1`.
    pub beta_sum_residual: f64,
    pub beta_nonnegative: bool,
    /// Rows with `β_i > 0` whose signed residual is not `d`.
    pub complementarity_violations: usize,
    /// `Σ_odd β Γ_k − Σ_even β Γ_k`, one per basis function.
    pub orthogonality_residuals: Vec<f64>,
    /// `Σ_k α_k` times the orthogonality rows: `Σ_odd β Γ − Σ_even β Γ`.
    pub identity_g_residual: f64,
    /// `Σ_odd β (Γ − y) + Σ_even β (y − Γ) − d`.
    pub identity_h_residual: f64,
    pub theorem1_active_count: usize,
    pub theorem1_pass: bool,
    /// Present only when the first basis function is identically one.
    pub theorem2_pass: Option<bool>,
    pub duality_pass: bool,
    pub beta_sum_pass: bool,
    pub orthogonality_pass: bool,
    pub identity_h_pass: bool,
    pub all_pass: bool,
}

/// Checks the dual identities for `cert` against `fit` on `instance`.
pub fn verify_identities(
    cert: &DualCertificate,
    fit: &FitResult,
    instance: &ProblemInstance,
) -> Result<CertificateReport, CertificateError> {
    ensure_nondegenerate(fit)?;
    let n = instance.len();
    let m = instance.num_functions();
    if cert.beta.len() != 2 * n {
        return Err(CertificateError::Mismatch(format!(
            "{} multipliers for {n} points",
            cert.beta.len()
        )));
    }
    if fit.coefficients.len() != m || fit.residuals.len() != n {
        return Err(CertificateError::Mismatch(
            "fit does not belong to instance".into(),
        ));
    }
    let d = fit.discrepancy;
    let tol = cert_tol(d);
    let g = instance.weighted_design()?;
    let y = instance.weighted_values();
    let over = |i: usize| cert.beta[2 * i];
    let under = |i: usize| cert.beta[2 * i + 1];

    let odd_y: f64 = (0..n).map(|i| over(i) * y[i]).sum();
    let even_y: f64 = (0..n).map(|i| under(i) * y[i]).sum();
    let strong_duality_gap = (even_y - odd_y) - d;
    let reversed_orientation_residual = (odd_y - even_y) - d;

    let orthogonality_residuals: Vec<f64> = (0..m)
        .map(|k| (0..n).map(|i| (over(i) - under(i)) * g[(i, k)]).sum())
        .collect();
    let fitted: Vec<f64> = (0..n)
        .map(|i| (0..m).map(|k| g[(i, k)] * fit.coefficients[k]).sum())
        .collect();
    let identity_g_residual: f64 = (0..n).map(|i| (over(i) - under(i)) * fitted[i]).sum();
    let identity_h_residual: f64 = (0..n)
        .map(|i| over(i) * (fitted[i] - y[i]) + under(i) * (y[i] - fitted[i]))
        .sum::<f64>()
        - d;

    let active_tol = fit.active_tol();
    let complementarity_violations = (0..2 * n)
        .filter(|&row| cert.beta[row] > BETA_SUPPORT_TOL)
        .filter(|&row| {
            let i = row / 2;
            let signed = if row % 2 == 0 {
                -fit.scaled_residuals[i]
            } else {
                fit.scaled_residuals[i]
            };
            (signed - d).abs() > active_tol
        })
        .count();

    let theorem1_pass = check_theorem1(fit, m)?;
    let theorem2_pass = if first_function_is_one(instance)? {
        Some(check_theorem2(fit, cert, instance)?)
    } else {
        None
    };

    let beta_sum_residual = cert.total() - 1.0;
    let beta_nonnegative = cert.beta.iter().all(|b| *b >= 0.0);
    let duality_pass = strong_duality_gap.abs() <= tol;
    let beta_sum_pass = beta_sum_residual.abs() <= BETA_SUM_TOL && beta_nonnegative;
    let orthogonality_pass = orthogonality_residuals.iter().all(|r| r.abs() <= tol);
    let identity_h_pass = identity_h_residual.abs() <= tol;
    let all_pass = duality_pass
        && beta_sum_pass
        && orthogonality_pass
        && identity_h_pass
        && identity_g_residual.abs() <= tol * m as f64
        && complementarity_violations == 0
        && theorem1_pass
        && theorem2_pass.unwrap_or(true);

    Ok(CertificateReport {
        tolerance: tol,
        strong_duality_gap,
        reversed_orientation_residual,
        beta_sum_residual,
        beta_nonnegative,
        complementarity_violations,
        orthogonality_residuals,
        identity_g_residual,
        identity_h_residual,
        theorem1_active_count: fit.active_points.len(),
        theorem1_pass,
        theorem2_pass,
        duality_pass,
        beta_sum_pass,
        orthogonality_pass,
        identity_h_pass,
        all_pass,
    })
}

/// At least `m + 1` points attain the discrepancy.
pub fn check_theorem1(fit: &FitResult, m: usize) -> Result<bool, CertificateError> {
    ensure_nondegenerate(fit)?;
    let tol = fit.active_tol();
    let d = fit.discrepancy;
    let all_at_d = fit
        .active_points
        .iter()
        .all(|&i| (fit.scaled_residuals[i].abs() - d).abs() <= tol);
    Ok(fit.active_points.len() > m && all_at_d)
}

/// Whether the first column of the (weighted) design is identically one.
pub fn first_function_is_one(instance: &ProblemInstance) -> Result<bool, CertificateError> {
    let g = instance.weighted_design()?;
    Ok(g.column(0).iter().all(|v| (v - 1.0).abs() <= 1e-12))
}

/// With a constant first basis function there is a point at `+d` and one
/// at `−d`, and the multipliers split evenly between overshoot and
/// undershoot rows.
pub fn check_theorem2(
    fit: &FitResult,
    cert: &DualCertificate,
    instance: &ProblemInstance,
) -> Result<bool, CertificateError> {
    if !first_function_is_one(instance)? {
        return Err(CertificateError::Precondition(
            "first basis function is not identically 1 on the points".into(),
        ));
    }
    ensure_nondegenerate(fit)?;
    let d = fit.discrepancy;
    let tol = fit.active_tol();
    let above = fit.scaled_residuals.iter().any(|r| (r - d).abs() <= tol);
    let below = fit.scaled_residuals.iter().any(|r| (r + d).abs() <= tol);
    Ok(above
        && below
        && (cert.odd_sum - 0.5).abs() <= BETA_SUM_TOL
        && (cert.even_sum - 0.5).abs() <= BETA_SUM_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSet;
    use crate::fit::fit;

    fn inst(xs: &[f64], ys: &[f64], basis: &str) -> ProblemInstance {
        ProblemInstance::from_xy(xs, ys, BasisSet::parse(basis, 1).unwrap()).unwrap()
    }

    #[test]
    fn constant_basis_certificate() {
        let i = inst(&[0.0, 1.0], &[0.0, 1.0], "1");
        let f = fit(&i).unwrap();
        let c = extract_certificate(&f, &i).unwrap();
        // Tight rows: overshoot at point 0, undershoot at point 1.
        let expect = [0.5, 0.0, 0.0, 0.5];
        for (b, e) in c.beta.iter().zip(expect) {
            assert!((b - e).abs() < 1e-12, "{:?}", c.beta);
        }
        assert!((c.odd_sum - 0.5).abs() < 1e-12 && (c.even_sum - 0.5).abs() < 1e-12);
        assert!(check_theorem2(&f, &c, &i).unwrap());
    }

    #[test]
    fn doubling_values_keeps_beta() {
        let a = inst(&[0.0, 1.0, 2.0, 3.0], &[0.2, 1.0, -0.4, 0.7], "1, x");
        let b = inst(&[0.0, 1.0, 2.0, 3.0], &[0.4, 2.0, -0.8, 1.4], "1, x");
        let ca = extract_certificate(&fit(&a).unwrap(), &a).unwrap();
        let cb = extract_certificate(&fit(&b).unwrap(), &b).unwrap();
        for (x, y) in ca.beta.iter().zip(&cb.beta) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn hat_identities() {
        let i = inst(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0], "1, x");
        let f = fit(&i).unwrap();
        let c = extract_certificate(&f, &i).unwrap();
        assert!((c.total() - 1.0).abs() < 1e-9);
        let r = verify_identities(&c, &f, &i).unwrap();
        assert!(r.strong_duality_gap.abs() <= 1e-9);
        assert!(r.orthogonality_residuals.iter().all(|v| v.abs() <= 1e-9));
        assert!((r.reversed_orientation_residual + 2.0 * f.discrepancy).abs() < 1e-9);
        assert_eq!(r.theorem1_active_count, 3);
        assert_eq!(r.theorem2_pass, Some(true));
        assert!(r.all_pass);
        let bound = 2.0
            * r.orthogonality_residuals
                .iter()
                .fold(0.0_f64, |a, v| a.max(v.abs()))
            * f.coefficients.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        assert!(r.identity_g_residual.abs() <= bound + 1e-15);
    }

    #[test]
    fn fabricated_certificate_flags_sum() {
        let i = inst(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0], "1, x");
        let f = fit(&i).unwrap();
        let mut beta = f.solution.dual.clone();
        for b in &mut beta {
            *b *= 2.0;
        }
        let c = DualCertificate::from_beta(beta, 0.0);
        let r = verify_identities(&c, &f, &i).unwrap();
        assert!(!r.beta_sum_pass);
        assert!(!r.all_pass);
        let short = DualCertificate::from_beta(vec![1.0], 0.0);
        assert!(matches!(
            verify_identities(&short, &f, &i),
            Err(CertificateError::Mismatch(_))
        ));
    }

    #[test]
    fn theorem1_examples() {
        let i = inst(&[0.0, 0.5, 1.0], &[0.0, 0.25, 1.0], "1, x");
        assert!(check_theorem1(&fit(&i).unwrap(), 2).unwrap());
        let i = inst(&[0.0, 1.0], &[0.0, 1.0], "1, x");
        assert!(matches!(
            check_theorem1(&fit(&i).unwrap(), 2),
            Err(CertificateError::Degenerate(_))
        ));
    }

    #[test]
    fn theorem2_degenerate_and_precondition() {
        let i = inst(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0], "1");
        let f = fit(&i).unwrap();
        let c = DualCertificate::from_beta(f.solution.dual.clone(), 0.0);
        assert!(matches!(
            check_theorem2(&f, &c, &i),
            Err(CertificateError::Degenerate(_))
        ));
        assert!(matches!(
            extract_certificate(&f, &i),
            Err(CertificateError::Degenerate(_))
        ));

        let i = inst(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0], "x, 1");
        let f = fit(&i).unwrap();
        let c = extract_certificate(&f, &i).unwrap();
        assert!(matches!(
            check_theorem2(&f, &c, &i),
            Err(CertificateError::Precondition(_))
        ));
        assert_eq!(verify_identities(&c, &f, &i).unwrap().theorem2_pass, None);
    }

    #[test]
    fn weighted_identities_hold() {
        let i = inst(&[0.0, 0.3, 0.6, 1.0], &[0.1, 0.5, 0.2, 0.9], "1, x")
            .with_weights(vec![1.0, 3.0, 0.5, 2.0])
            .unwrap();
        let f = fit(&i).unwrap();
        let c = extract_certificate(&f, &i).unwrap();
        let r = verify_identities(&c, &f, &i).unwrap();
        assert!(r.duality_pass && r.orthogonality_pass && r.identity_h_pass && r.beta_sum_pass);
        assert_eq!(r.complementarity_violations, 0);
        // The weighted first column is not constant.
        assert_eq!(r.theorem2_pass, None);
    }
}
