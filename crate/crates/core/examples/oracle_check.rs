//! Cross-checking the simplex path against exhaustive enumeration.
//!
//! For small instances every optimal vertex solves a square system on
//! m + 1 points with chosen signs; enumerating them all gives an
//! independent answer.
//!
//! Run with `cargo run --example oracle_check`.

use minimax_lp::oracle::{brute_force_fit, compare_with_fit};
use minimax_lp::{fit, testing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = testing::rng(4);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let inst = testing::small_instance(&mut rng);
        let lp = fit(&inst)?;
        let brute = brute_force_fit(&inst)?;
        let cmp = compare_with_fit(&lp, &brute, &inst)?;
        worst = worst.max(cmp.discrepancy_difference);
        println!(
            "{k:>2}: n {:>2} m {} p {}  d {:.12}  witness {:?}  unique {}  agrees {}",
            inst.len(),
            inst.num_functions(),
            inst.dimension(),
            lp.discrepancy,
            brute.witness_subset,
            brute.unique,
            cmp.agrees
        );
    }
    println!("largest discrepancy difference {worst:.3e}");
    Ok(())
}
