//! Weighted uniform approximation.
//!
//! Minimizing max μ_i |y_i − Σ α_j Γ_j(x_i)| is the same program as the
//! unweighted one with every design row and value multiplied by μ_i.
//!
//! Run with `cargo run --example weighted_fit`.

use minimax_lp::{fit, testing, BasisSet, ProblemInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two points, constant basis, the first weighted twice as heavily:
    // α = 1/3 balances 2|0 − α| = |1 − α|.
    let small = ProblemInstance::from_xy(&[0.0, 1.0], &[0.0, 1.0], BasisSet::parse("1", 1)?)?
        .with_weights(vec![2.0, 1.0])?;
    let r = fit(&small)?;
    println!(
        "weights (2, 1): alpha = {:.15}, d = {:.15}",
        r.coefficients[0], r.discrepancy
    );

    let inst = testing::weighted_instance(&mut testing::rng(3), 30, 3);
    let weighted = fit(&inst)?;
    let rescaled = fit(&testing::prescaled(&inst))?;
    let worst = weighted
        .coefficients
        .iter()
        .zip(&rescaled.coefficients)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("30 points, cubic, weights in [0.1, 10]");
    println!("  weighted d  {:.15}", weighted.discrepancy);
    println!("  rescaled d  {:.15}", rescaled.discrepancy);
    println!("  largest coefficient difference {worst:.3e}");
    Ok(())
}
