//! The linear-programming layer on its own.
//!
//! Programs are `min/max c·x` subject to `A x ≤ b`, each variable free or
//! nonnegative. The solution carries row multipliers, and `dual_of`
//! builds the dual program explicitly.
//!
//! Run with `cargo run --example lp_solver`.

use minimax_lp::lp::{dual_of, solve_lp, LinearProgram, VarKind};
use nalgebra::DMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // max x1 + x2  s.t.  x1 + 2 x2 ≤ 4,  3 x1 + x2 ≤ 6,  x ≥ 0
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 1.0]);
    let lp = LinearProgram::maximize(
        vec![1.0, 1.0],
        a,
        vec![4.0, 6.0],
        vec![VarKind::NonNegative; 2],
    )?;
    let s = solve_lp(&lp)?;
    println!(
        "primal  {:?}  x = {:?}  value {:.12}",
        s.status, s.primal, s.objective_value
    );
    println!("row multipliers {:?}", s.dual);

    let d = dual_of(&lp)?;
    let ds = solve_lp(&d)?;
    println!(
        "dual    {:?}  y = {:?}  value {:.12}",
        ds.status, ds.primal, ds.objective_value
    );

    // Unbounded and infeasible programs report a reason.
    let unbounded = LinearProgram::minimize(
        vec![-1.0],
        DMatrix::from_row_slice(1, 1, &[-1.0]),
        vec![0.0],
        vec![VarKind::Free],
    )?;
    let u = solve_lp(&unbounded)?;
    println!("{:?}: {}", u.status, u.reason.unwrap_or_default());
    let infeasible = LinearProgram::minimize(
        vec![0.0],
        DMatrix::from_row_slice(2, 1, &[1.0, -1.0]),
        vec![-1.0, -1.0],
        vec![VarKind::Free],
    )?;
    let i = solve_lp(&infeasible)?;
    println!("{:?}: {}", i.status, i.reason.unwrap_or_default());
    Ok(())
}
