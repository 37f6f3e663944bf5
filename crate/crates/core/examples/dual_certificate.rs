//! Dual multipliers as a certificate of optimality.
//!
//! The multipliers β of the overshoot and undershoot rows are nonnegative,
//! sum to one, are orthogonal to every basis function in the sense
//! Σ_over β Γ_k = Σ_under β Γ_k, and reproduce the discrepancy from the
//! data alone. With a constant first basis function each side carries
//! exactly half of the weight.
//!
//! Run with `cargo run --example dual_certificate`.

use minimax_lp::certificate::{
    check_theorem1, check_theorem2, extract_certificate, verify_identities,
};
use minimax_lp::{fit, testing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = testing::smooth_noise_instance(&mut testing::rng(1), 50, 4);
    let r = fit(&inst)?;
    let cert = extract_certificate(&r, &inst)?;
    let rep = verify_identities(&cert, &r, &inst)?;

    println!("discrepancy             {:.15}", r.discrepancy);
    println!("dual objective          {:.15}", cert.dual_objective);
    println!("sum of multipliers − 1  {:.3e}", rep.beta_sum_residual);
    println!(
        "overshoot / undershoot  {:.15} / {:.15}",
        cert.odd_sum, cert.even_sum
    );
    let worst = rep
        .orthogonality_residuals
        .iter()
        .fold(0.0_f64, |a, v| a.max(v.abs()));
    println!("orthogonality           {worst:.3e}");
    println!("discrepancy identity    {:.3e}", rep.identity_h_residual);
    println!("multipliers supported on rows {:?}", cert.support());
    println!(
        "m + 1 active points: {}, balanced sides: {}",
        check_theorem1(&r, inst.num_functions())?,
        check_theorem2(&r, &cert, &inst)?
    );
    Ok(())
}
