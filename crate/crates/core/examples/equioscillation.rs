//! Sign alternation of polynomial fits, and how to break it.
//!
//! A best polynomial fit of degree t alternates in sign across at least
//! t + 2 points of maximal deviation. Negating one design row together
//! with its value leaves the linear program unchanged, so the optimum
//! stays put while that point changes side; for the modified (no longer
//! polynomial) basis the alternation is gone.
//!
//! Run with `cargo run --example equioscillation`.

use minimax_lp::equioscillation::{alternation_pattern, one_sided_construction, ReferenceSet};
use minimax_lp::{fit, testing};

fn show(label: &str, r: &ReferenceSet) {
    let signs: String = r
        .signs
        .iter()
        .map(|&s| if s > 0 { '+' } else { '-' })
        .collect();
    println!(
        "{label:<10} {signs:<10} {} points, degree {}, equioscillates: {}",
        r.len(),
        r.degree,
        r.equioscillates
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = testing::rng(8);
    for t in 1..=3 {
        let inst = testing::generic_instance(&mut rng, 30, t);
        let r = fit(&inst)?;
        show(&format!("degree {t}"), &alternation_pattern(&r, &inst)?);

        let j = *r
            .active_points
            .iter()
            .find(|&&i| r.scaled_residuals[i] < 0.0)
            .expect("some point lies below the fit");
        let flipped = one_sided_construction(&inst, &r, j)?;
        let g = fit(&flipped)?;
        println!(
            "           flip point {j}: d {:.12} -> {:.12}",
            r.discrepancy, g.discrepancy
        );
        show("flipped", &alternation_pattern(&g, &flipped)?);
    }
    Ok(())
}
