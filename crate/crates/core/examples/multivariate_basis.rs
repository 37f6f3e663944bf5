//! Arbitrary basis functions over points in the plane.
//!
//! Any list of expressions in x, y (or x1..xp) with +, −, *, /, integer
//! powers and exp/cos/sin is a valid basis; the fit is still a linear
//! program in the coefficients.
//!
//! Run with `cargo run --example multivariate_basis`.

use minimax_lp::certificate::{check_theorem1, extract_certificate, verify_identities};
use minimax_lp::{fit, BasisSet, EvaluationPoint, ProblemInstance};
use rand::Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let basis = BasisSet::parse("1, x*y^2, exp(x), cos(y - x)", 2)?;
    println!("basis: {basis}");

    let mut rng = minimax_lp::testing::rng(5);
    let points: Vec<EvaluationPoint> = (0..40)
        .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)].into())
        .collect();
    let values: Vec<f64> = points
        .iter()
        .map(|p| (p.coordinates[0] * p.coordinates[1]).sin() + 0.3 * p.coordinates[0])
        .collect();
    let inst = ProblemInstance::new(points, values, basis)?;
    let r = fit(&inst)?;
    for (label, a) in inst.basis().labels().iter().zip(&r.coefficients) {
        println!("  {label:>12}  {a:+.10}");
    }
    println!("discrepancy {:.10}", r.discrepancy);

    let cert = extract_certificate(&r, &inst)?;
    let checks = verify_identities(&cert, &r, &inst)?;
    println!(
        "{} active points, at least m + 1: {}; dual identities hold: {}",
        r.active_points.len(),
        check_theorem1(&r, inst.num_functions())?,
        checks.all_pass
    );
    Ok(())
}
