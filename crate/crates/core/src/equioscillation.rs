//! Sign alternation of one-dimensional fits.
//!
//! Three tools live here:
//!
//! * [`alternation_pattern`] sorts the active points of a fit by abscissa
//!   and reports whether the residual signs alternate across at least
//!   `t + 2` of them, `t = m − 1` being the polynomial degree.
//! * [`one_sided_construction`] negates one row of the design together with
//!   its value. The linear program is unchanged up to a row swap, so the
//!   optimum is the same while the residual at that point changes side,
//!   which breaks alternation for a non-polynomial basis.
//! * [`perturbation_step`] and [`reduction_step`] replay the exchange
//!   argument on a reference set in which two neighbours sit on the same
//!   side: moving the interpolant toward the data at one of them moves it
//!   toward the data at the other too, by the closed-form factor
//!   `Π_{i≠j,j+1} (z_{j+1} − z_i)/(z_j − z_i)`, after which every reference
//!   point can be brought strictly inside `d`.

use serde::Serialize;
use thiserror::Error;

use crate::fit::{FitError, FitResult, ProblemInstance};
use crate::lagrange::{lagrange_interpolate, InterpolationError, LagrangePolynomial};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquioscillationError {
    #[error("alternation analysis needs one-dimensional points, got dimension {0}")]
    Dimension(usize),
    #[error("degenerate fit: {0}")]
    Degenerate(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Interpolation(#[from] InterpolationError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Active points sorted by abscissa, with the sign of `y − fit` at each.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceSet {
    pub indices: Vec<usize>,
    pub abscissae: Vec<f64>,
    pub signs: Vec<i8>,
    pub discrepancy: f64,
    /// Polynomial degree `t` the alternation count is measured against.
    pub degree: usize,
    /// Signs strictly alternate and there are at least `degree + 2` points.
    pub equioscillates: bool,
}

impl ReferenceSet {
    /// Builds a reference set from explicit data; `degree` is `len − 2`.
    pub fn new(indices: Vec<usize>, abscissae: Vec<f64>, signs: Vec<i8>, discrepancy: f64) -> Self {
        let degree = indices.len().saturating_sub(2);
        let equioscillates = alternates(&signs) && signs.len() >= degree + 2;
        Self {
            indices,
            abscissae,
            signs,
            discrepancy,
            degree,
            equioscillates,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of maximal runs of equal sign.
    pub fn sign_runs(&self) -> usize {
        if self.signs.is_empty() {
            return 0;
        }
        1 + self.signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

fn alternates(signs: &[i8]) -> bool {
    signs.windows(2).all(|w| w[0] != w[1])
}

fn require_line(instance: &ProblemInstance) -> Result<(), EquioscillationError> {
    match instance.dimension() {
        1 => Ok(()),
        p => Err(EquioscillationError::Dimension(p)),
    }
}

pub fn alternation_pattern(
    fit: &FitResult,
    instance: &ProblemInstance,
) -> Result<ReferenceSet, EquioscillationError> {
    require_line(instance)?;
    if fit.exact_interpolation {
        return Err(EquioscillationError::Degenerate(
            "exact interpolation (zero discrepancy)",
        ));
    }
    let mut indices = fit.active_points.clone();
    let x = |i: usize| instance.points()[i].x();
    indices.sort_by(|&a, &b| x(a).total_cmp(&x(b)).then(a.cmp(&b)));
    let abscissae = indices.iter().map(|&i| x(i)).collect();
    let signs: Vec<i8> = indices
        .iter()
        .map(|&i| if fit.scaled_residuals[i] > 0.0 { 1 } else { -1 })
        .collect();
    let degree = instance.num_functions().saturating_sub(1);
    let equioscillates = alternates(&signs) && signs.len() >= degree + 2;
    Ok(ReferenceSet {
        indices,
        abscissae,
        signs,
        discrepancy: fit.discrepancy,
        degree,
        equioscillates,
    })
}

/// Negates `Γ_k(x_j)` and `y_j` at a point where the fit lies above the
/// value by exactly `d` (residual `−d`).
pub fn one_sided_construction(
    instance: &ProblemInstance,
    fit: &FitResult,
    j: usize,
) -> Result<ProblemInstance, EquioscillationError> {
    if j >= instance.len() {
        return Err(EquioscillationError::Precondition(format!(
            "point {j} out of range for {} points",
            instance.len()
        )));
    }
    if fit.exact_interpolation {
        return Err(EquioscillationError::Degenerate(
            "exact interpolation (zero discrepancy)",
        ));
    }
    let overshoot = fit.active_points.contains(&j)
        && (fit.scaled_residuals[j] + fit.discrepancy).abs() <= fit.active_tol();
    if !overshoot {
        return Err(EquioscillationError::Precondition(format!(
            "point {j} is not an active overshoot (residual {:.6e}, discrepancy {:.6e})",
            fit.scaled_residuals[j], fit.discrepancy
        )));
    }
    Ok(instance.flip_point(j))
}

/// Values of the fit at the reference nodes, `f(z_i) = q_i − s_i d`.
fn fit_values(reference: &ReferenceSet, instance: &ProblemInstance) -> Vec<f64> {
    reference
        .indices
        .iter()
        .zip(&reference.signs)
        .map(|(&i, &s)| instance.values()[i] - f64::from(s) * reference.discrepancy)
        .collect()
}

fn check_pair(
    reference: &ReferenceSet,
    instance: &ProblemInstance,
    j: usize,
    epsilon: f64,
) -> Result<(), EquioscillationError> {
    require_line(instance)?;
    let n = reference.len();
    if n < 2 || j + 1 >= n {
        return Err(EquioscillationError::Precondition(format!(
            "pair ({j}, {}) outside a reference set of {n} points",
            j + 1
        )));
    }
    if reference.indices.iter().any(|&i| i >= instance.len()) {
        return Err(EquioscillationError::Precondition(
            "reference index out of range".into(),
        ));
    }
    if !reference.abscissae.windows(2).all(|w| w[0] < w[1]) {
        return Err(EquioscillationError::Precondition(
            "reference abscissae must be strictly increasing".into(),
        ));
    }
    if reference.signs[j] != reference.signs[j + 1] {
        return Err(EquioscillationError::Precondition(format!(
            "signs at {j} and {} differ; the pair already alternates",
            j + 1
        )));
    }
    if !(epsilon >= 0.0 && epsilon <= 0.1 * reference.discrepancy) {
        return Err(EquioscillationError::Precondition(format!(
            "epsilon {epsilon:e} must lie in [0, 0.1·d]"
        )));
    }
    Ok(())
}

/// The interpolant through `(z_i, f(z_i))` for `i ∉ {j, j+1}` and
/// `(z_j, f(z_j) + s_j ε)`: the fit nudged toward the data at `z_j`.
fn nudged(
    reference: &ReferenceSet,
    f: &[f64],
    j: usize,
    epsilon: f64,
) -> Result<LagrangePolynomial, InterpolationError> {
    let toward = f64::from(reference.signs[j]);
    let (nodes, values): (Vec<f64>, Vec<f64>) = (0..reference.len())
        .filter(|&i| i != j + 1)
        .map(|i| {
            let v = if i == j {
                f[i] + toward * epsilon
            } else {
                f[i]
            };
            (reference.abscissae[i], v)
        })
        .unzip();
    lagrange_interpolate(&nodes, &values)
}

/// `Π_{i≠j,j+1} (z_{j+1} − z_i)/(z_j − z_i)`.
pub fn product_factor(abscissae: &[f64], j: usize) -> f64 {
    let (zj, zk) = (abscissae[j], abscissae[j + 1]);
    abscissae
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j && i != j + 1)
        .map(|(_, &zi)| (zk - zi) / (zj - zi))
        .product()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationOutcome {
    /// `f'(z_{j+1})`.
    pub new_value_at_zj1: f64,
    /// `s_j (f'(z_{j+1}) − f(z_{j+1}))`, evaluated directly.
    pub direct_difference: f64,
    /// `ε Π_{i≠j,j+1} (z_{j+1} − z_i)/(z_j − z_i)`.
    pub product_formula_value: f64,
    /// The two agree to `1e-8` relative (absolute against the data scale
    /// when the formula gives exactly zero).
    pub agrees: bool,
    /// The formula value is positive, i.e. the nudge also moves the fit
    /// toward the data at `z_{j+1}`.
    pub positive: bool,
}

/// Nudges the fit by `ε` toward the data at reference position `j`, whose
/// neighbour `j + 1` lies on the same side, and compares the induced change
/// at `z_{j+1}` with the closed-form product.
///
/// Differences are oriented by `s_j`, so they are positive when the change
/// moves the fit toward the data; for a pair above the fit they are the
/// raw differences `f'(z_{j+1}) − f(z_{j+1})`.
pub fn perturbation_step(
    reference: &ReferenceSet,
    instance: &ProblemInstance,
    j: usize,
    epsilon: f64,
) -> Result<PerturbationOutcome, EquioscillationError> {
    check_pair(reference, instance, j, epsilon)?;
    let f = fit_values(reference, instance);
    let f_prime = nudged(reference, &f, j, epsilon)?;
    let toward = f64::from(reference.signs[j]);
    let new_value = f_prime.eval(reference.abscissae[j + 1]);
    let direct = toward * (new_value - f[j + 1]);
    let formula = epsilon * product_factor(&reference.abscissae, j);
    let scale = if formula != 0.0 {
        formula.abs()
    } else {
        f.iter().fold(1.0_f64, |a, v| a.max(v.abs()))
    };
    Ok(PerturbationOutcome {
        new_value_at_zj1: new_value,
        direct_difference: direct,
        product_formula_value: formula,
        agrees: (direct - formula).abs() <= 1e-8 * scale,
        positive: formula > 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionOutcome {
    /// Nudge actually used for `f'`; the requested one halved until
    /// `ε Π < d`, so that `z_{j+1}` is not pushed past the data.
    pub epsilon: f64,
    /// Shift used toward the data at every node except `z_{j+1}`.
    pub delta: f64,
    /// Times the starting shift was halved before succeeding.
    pub halvings: u32,
    /// `max_i |q_i − f''(z_i)|` over the reference set.
    pub max_reference_discrepancy: f64,
    /// The same maximum over every point of the instance.
    pub max_overall_discrepancy: f64,
    /// `max_reference_discrepancy < d`.
    pub reduced: bool,
}

const MAX_HALVINGS: u32 = 60;

/// Second half of the exchange argument: starting from the nudged
/// interpolant `f'`, shift it by `δ` toward the data at the `t + 1` nodes
/// other than `z_{j+1}` and re-interpolate.
///
/// The argument only needs `ε` and `δ` small. `ε` is first halved until
/// the change at `z_{j+1}` stays below `d`, otherwise that point would
/// overshoot to the far side of the data. The starting shift is then
/// `min(ε, gap)/4`, `gap` being `d` minus the largest non-maximal residual
/// off the reference set (or `d` when there is none), and it is halved
/// until every reference point lies strictly within `d`.
pub fn reduction_step(
    reference: &ReferenceSet,
    instance: &ProblemInstance,
    j: usize,
    epsilon: f64,
) -> Result<ReductionOutcome, EquioscillationError> {
    check_pair(reference, instance, j, epsilon)?;
    let d = reference.discrepancy;
    let f = fit_values(reference, instance);
    let factor = product_factor(&reference.abscissae, j);
    let mut epsilon = epsilon;
    for _ in 0..MAX_HALVINGS {
        if epsilon * factor < d {
            break;
        }
        epsilon /= 2.0;
    }
    let f_prime = nudged(reference, &f, j, epsilon)?;
    let q: Vec<f64> = reference
        .indices
        .iter()
        .map(|&i| instance.values()[i])
        .collect();

    // The fit itself, through t + 1 of the reference nodes.
    let fit_poly = lagrange_interpolate(&reference.abscissae[1..], &f[1..])?;
    let tol = crate::fit::active_tol(d);
    let off_max = (0..instance.len())
        .filter(|i| !reference.indices.contains(i))
        .map(|i| (instance.values()[i] - fit_poly.eval(instance.points()[i].x())).abs())
        .filter(|r| *r < d - tol)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        });
    let gap = off_max.map_or(d, |r| d - r);

    let nodes: Vec<f64> = (0..reference.len())
        .filter(|&i| i != j + 1)
        .map(|i| reference.abscissae[i])
        .collect();
    let mut delta = epsilon.min(gap) / 4.0;
    for halvings in 0..=MAX_HALVINGS {
        let values: Vec<f64> = (0..reference.len())
            .filter(|&i| i != j + 1)
            .map(|i| {
                let at = f_prime.eval(reference.abscissae[i]);
                at + delta * (q[i] - at).signum()
            })
            .collect();
        let f2 = lagrange_interpolate(&nodes, &values)?;
        let max_reference_discrepancy = (0..reference.len())
            .map(|i| (q[i] - f2.eval(reference.abscissae[i])).abs())
            .fold(0.0, f64::max);
        if max_reference_discrepancy < d || halvings == MAX_HALVINGS {
            let max_overall_discrepancy = (0..instance.len())
                .map(|i| (instance.values()[i] - f2.eval(instance.points()[i].x())).abs())
                .fold(0.0, f64::max);
            return Ok(ReductionOutcome {
                epsilon,
                delta,
                halvings,
                max_reference_discrepancy,
                max_overall_discrepancy,
                reduced: max_reference_discrepancy < d,
            });
        }
        delta /= 2.0;
    }
    unreachable!("loop returns on the last halving")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSet;
    use crate::fit::fit;

    fn line(xs: &[f64], ys: &[f64]) -> ProblemInstance {
        ProblemInstance::from_xy(xs, ys, BasisSet::monomials(1)).unwrap()
    }

    #[test]
    fn parabola_samples_alternate() {
        let i = line(&[0.0, 0.5, 1.0], &[0.0, 0.25, 1.0]);
        let r = alternation_pattern(&fit(&i).unwrap(), &i).unwrap();
        assert_eq!(r.signs, vec![1, -1, 1]);
        assert_eq!(r.degree, 1);
        assert!(r.equioscillates);
    }

    #[test]
    fn hat_alternates_and_unsorted_input_is_sorted() {
        let i = line(&[2.0, 0.0, 1.0], &[0.0, 0.0, 1.0]);
        let r = alternation_pattern(&fit(&i).unwrap(), &i).unwrap();
        assert_eq!(r.indices, vec![1, 2, 0]);
        assert_eq!(r.abscissae, vec![0.0, 1.0, 2.0]);
        assert_eq!(r.signs, vec![-1, 1, -1]);
        assert!(r.equioscillates);
    }

    #[test]
    fn one_sided_keeps_optimum_and_breaks_alternation() {
        let i = line(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]);
        let f = fit(&i).unwrap();
        // Point 0 has residual −0.5: the line sits above the value.
        let flipped = one_sided_construction(&i, &f, 0).unwrap();
        let g = fit(&flipped).unwrap();
        assert!((g.discrepancy - 0.5).abs() < 1e-12);
        for (a, b) in f.coefficients.iter().zip(&g.coefficients) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((g.scaled_residuals[0] - 0.5).abs() < 1e-12);
        let r = alternation_pattern(&g, &flipped).unwrap();
        assert_eq!(r.signs, vec![1, 1, -1]);
        assert!(!r.equioscillates);
    }

    #[test]
    fn one_sided_requires_overshoot() {
        let i = line(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]);
        let f = fit(&i).unwrap();
        assert!(matches!(
            one_sided_construction(&i, &f, 1),
            Err(EquioscillationError::Precondition(_))
        ));
        assert!(one_sided_construction(&i, &f, 7).is_err());
    }

    #[test]
    fn one_sided_on_parabola_samples() {
        let i = line(&[0.0, 0.5, 1.0], &[0.0, 0.25, 1.0]);
        let f = fit(&i).unwrap();
        let g = fit(&one_sided_construction(&i, &f, 1).unwrap()).unwrap();
        assert!((g.discrepancy - 0.125).abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_points_rejected() {
        let b = BasisSet::parse("1, x, y", 2).unwrap();
        let pts = vec![
            [0.0, 0.0].into(),
            [1.0, 0.0].into(),
            [0.0, 1.0].into(),
            [1.0, 1.0].into(),
        ];
        let i = ProblemInstance::new(pts, vec![0.0, 1.0, 1.0, 0.0], b).unwrap();
        assert!(matches!(
            alternation_pattern(&fit(&i).unwrap(), &i),
            Err(EquioscillationError::Dimension(2))
        ));
    }

    /// t = 1, z = (0, 1, 2) with the fit f ≡ 0, d = 1 and the last two
    /// points both above the fit.
    fn same_sided() -> (ReferenceSet, ProblemInstance) {
        let inst = line(&[0.0, 1.0, 2.0], &[-1.0, 1.0, 1.0]);
        let r = ReferenceSet::new(vec![0, 1, 2], vec![0.0, 1.0, 2.0], vec![-1, 1, 1], 1.0);
        (r, inst)
    }

    #[test]
    fn product_formula_example() {
        let (r, i) = same_sided();
        let out = perturbation_step(&r, &i, 1, 0.01).unwrap();
        // ε (2 − 0)/(1 − 0)
        assert!((out.product_formula_value - 0.02).abs() < 1e-15);
        assert!(out.agrees && out.positive);
        assert!((out.direct_difference - 0.02).abs() < 1e-12);
    }

    #[test]
    fn zero_and_doubled_epsilon() {
        let (r, i) = same_sided();
        let zero = perturbation_step(&r, &i, 1, 0.0).unwrap();
        assert_eq!(zero.product_formula_value, 0.0);
        assert!(zero.direct_difference.abs() < 1e-15 && zero.agrees);
        let a = perturbation_step(&r, &i, 1, 0.03).unwrap();
        let b = perturbation_step(&r, &i, 1, 0.06).unwrap();
        assert!((b.product_formula_value - 2.0 * a.product_formula_value).abs() < 1e-15);
        assert!((b.direct_difference - 2.0 * a.direct_difference).abs() < 1e-12);
    }

    #[test]
    fn perturbation_preconditions() {
        let (r, i) = same_sided();
        assert!(matches!(
            perturbation_step(&r, &i, 0, 0.01),
            Err(EquioscillationError::Precondition(_))
        ));
        assert!(perturbation_step(&r, &i, 1, 0.5).is_err());
        assert!(perturbation_step(&r, &i, 2, 0.01).is_err());
    }

    #[test]
    fn reduction_brings_reference_inside() {
        let (r, i) = same_sided();
        let out = reduction_step(&r, &i, 1, 0.05).unwrap();
        assert!(out.reduced);
        assert!(out.max_reference_discrepancy < 1.0);
        assert!(out.delta > 0.0);
    }

    #[test]
    fn product_factor_is_positive_for_neighbours() {
        let z = [-1.0, -0.4, 0.1, 0.3, 0.9];
        for j in 0..4 {
            assert!(product_factor(&z, j) > 0.0);
        }
    }
}
