//! Best uniform polynomial fits on the line.
//!
//! Fits a line to 1001 samples of x² on [0, 1] (the answer is
//! x − 1/8 with deviation 1/8), then a quartic to noisy samples of a
//! smooth function.
//!
//! Run with `cargo run --example polynomial_fit`.

use minimax_lp::{fit, testing, BasisSet, ProblemInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let xs: Vec<f64> = (0..=1000).map(|k| f64::from(k) / 1000.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let line = ProblemInstance::from_xy(&xs, &ys, BasisSet::parse("1, x", 1)?)?;
    let r = fit(&line)?;
    println!("x^2 on [0, 1] by a line");
    println!("  coefficients  {:?}", r.coefficients);
    println!("  discrepancy   {:.12}", r.discrepancy);
    let at: Vec<f64> = r.active_points.iter().map(|&i| xs[i]).collect();
    println!("  active at x = {at:?}");

    let noisy = testing::smooth_noise_instance(&mut testing::rng(11), 50, 4);
    let r = fit(&noisy)?;
    println!("quartic fit to 50 noisy samples");
    for (label, a) in noisy.basis().labels().iter().zip(&r.coefficients) {
        println!("  {label:>4}  {a:+.10}");
    }
    println!("  discrepancy   {:.10}", r.discrepancy);
    println!(
        "  {} active points (at least m + 1 = 6 expected)",
        r.active_points.len()
    );
    Ok(())
}
