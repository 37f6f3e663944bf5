//! Best uniform (minimax) approximation of finite data sets by linear
//! combinations of basis functions, solved as a linear program.
//!
//! The fit minimizes `max_i μ_i |y_i − Σ_j α_j Γ_j(x_i)|` over `α`. Beyond
//! the coefficients, the crate extracts the dual multipliers of the
//! program and checks the structure they certify: the number of points at
//! maximal deviation, overshoot/undershoot balance, the dual identities,
//! and sign alternation of polynomial fits.
//!
//! ```
//! use minimax_lp::{fit, BasisSet, ProblemInstance};
//!
//! let inst = ProblemInstance::from_xy(
//!     &[0.0, 0.5, 1.0],
//!     &[0.0, 0.25, 1.0],
//!     BasisSet::parse("1, x", 1).unwrap(),
//! )
//! .unwrap();
//! let result = fit(&inst).unwrap();
//! assert!((result.discrepancy - 0.125).abs() < 1e-12);
//! ```

pub mod basis;
pub mod certificate;
pub mod cli;
pub mod equioscillation;
pub mod fit;
pub mod lagrange;
pub mod lp;
pub mod oracle;
pub mod report;
pub mod selftest;
pub mod testing;

pub use basis::{
    design_matrix, matrix_rank_estimate, parse_basis_spec, BasisError, BasisSet, EvaluationPoint,
};
pub use certificate::{
    check_theorem1, check_theorem2, extract_certificate, verify_identities, CertificateReport,
    DualCertificate,
};
pub use equioscillation::{
    alternation_pattern, one_sided_construction, perturbation_step, reduction_step, ReferenceSet,
};
pub use fit::{
    assemble_primal, fit, objective_value, FitError, FitResult, InstanceRecord, ProblemInstance,
};
pub use lagrange::{lagrange_interpolate, LagrangePolynomial};
pub use lp::{dual_of, solve_lp, LinearProgram, LpError, LpSolution, LpStatus, VarKind};
pub use oracle::{brute_force_fit, OracleResult};
pub use report::{FitReport, ReportOptions};
