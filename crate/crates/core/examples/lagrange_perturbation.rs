//! Why two neighbouring extremal points cannot sit on the same side.
//!
//! Take t + 2 reference points where the fit deviates by d, two
//! neighbours z_j, z_{j+1} on the same side. Moving the interpolant by ε
//! toward the data at z_j moves it toward the data at z_{j+1} too, by
//! ε Π_{i≠j,j+1} (z_{j+1} − z_i)/(z_j − z_i) > 0. A further small shift
//! then brings every reference point strictly inside d, so the original
//! fit was not optimal.
//!
//! Run with `cargo run --example lagrange_perturbation`.

use minimax_lp::equioscillation::{perturbation_step, reduction_step};
use minimax_lp::testing;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = testing::rng(21);
    for _ in 0..5 {
        let c = testing::reference_configuration(&mut rng);
        let p = perturbation_step(&c.reference, &c.instance, c.pair, c.epsilon)?;
        let q = reduction_step(&c.reference, &c.instance, c.pair, c.epsilon)?;
        println!(
            "t = {}  pair ({}, {})  eps {:.4}  direct {:+.12}  product {:+.12}  agree {}",
            c.reference.degree,
            c.pair,
            c.pair + 1,
            c.epsilon,
            p.direct_difference,
            p.product_formula_value,
            p.agrees
        );
        println!(
            "       d {:.6} -> {:.6} on the reference set (delta {:.2e})",
            c.reference.discrepancy, q.max_reference_discrepancy, q.delta
        );
    }
    Ok(())
}
