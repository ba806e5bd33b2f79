//! Matrix-free solver for equality- and bound-constrained nonlinear
//! optimization based on the augmented Lagrangian
//!
//! ```text
//!     L(x, y, mu) = mu * (f(x) - c(x)'y) + 0.5 * ||c(x)||^2
//! ```
//!
//! with an adaptive ("steering") update of the penalty parameter `mu`: at every
//! iteration the solver compares the constraint-violation reduction achieved by
//! a Cauchy step on the augmented Lagrangian against the reduction achievable
//! by a Cauchy step on the violation measure `v(x) = 0.5 * ||c(x)||^2` alone,
//! and decreases `mu` until the augmented Lagrangian step makes acceptable
//! progress toward feasibility.  Line-search and trust-region drivers share the
//! same step machinery; classical single-test penalty updates are available as
//! baseline variants for comparison runs.
//!
//! Problems are supplied in operator form: the library never forms a Jacobian
//! or Hessian, it only asks for products `J v`, `J' w`, and Hessian-of-the-
//! Lagrangian products.  All vectors are plain `Vec<f64>` / `&[f64]`.
//!
//! Crate layout:
//!
//! * [`problem`] — the [`Problem`] trait, projections onto the bound box,
//!   stationarity residuals, and gradient pre-scaling.
//! * [`model`] — augmented Lagrangian evaluation caches and the local
//!   quadratic models used for step computation and steering.
//! * [`cauchy`] — backtracking Cauchy point searches for the violation
//!   model and for the augmented Lagrangian model.
//! * [`qp`] — a projected-CG solver with working sets for the
//!   bound-constrained quadratic subproblems.
//! * [`solver`] — the outer iteration (line-search and trust-region
//!   drivers), termination tests, multiplier and target updates, tracing.
//! * [`suite`] — a registry of small benchmark problems with certified
//!   solutions or certified-infeasible tags.
//! * [`harness`] — batch runs over (problem, variant) pairs, performance
//!   profiles, outperforming factors, penalty histograms, CSV/JSON output.

pub mod cauchy;
pub mod check;
pub mod error;
pub mod harness;
pub mod model;
pub mod problem;
pub mod qp;
pub mod solver;
pub mod suite;
pub mod vecmath;

pub use error::Error;
pub use harness::{
    outperforming_factors, penalty_histogram, performance_profile, read_records_csv, run_suite,
    summarize, write_profile_csv, write_records_csv, write_summary_json, BenchRecord, FactorEntry,
    Metric, Profile, VariantSummary, FACTOR_CLIP, PENALTY_BIN_LABELS, RECORD_CSV_HEADER,
};
pub use model::AlPoint;
pub use problem::{Prescaled, Problem, Residuals, ScaleFactors};
pub use solver::{
    solve, solve_tr, SolveReport, SolveStatus, SolverConfig, SteeringMode, TraceRow, Variant,
    VARIANT_NAMES,
};
