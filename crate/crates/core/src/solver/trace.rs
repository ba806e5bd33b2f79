//! Per-iteration trace records.
//!
//! A trace row captures everything the solver knew and decided during one
//! iteration: the iterate, the penalty parameter before and after any cuts,
//! both Cauchy steps with their model decreases, the step that was finally
//! taken, and the acceptance outcome. The rows are complete enough to replay
//! the sufficient-decrease conditions, the steering test, and the monotone
//! behaviour of the merit function without rerunning the solver.

use std::io::Write;

use crate::error::Result;
use crate::qp::QpStatus;

/// Snapshot of one outer iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    /// Iteration counter, starting at 0.
    pub k: usize,
    /// Penalty parameter when the iteration began.
    pub mu_entry: f64,
    /// Penalty parameter actually used for the step, after any cuts.
    pub mu: f64,
    /// Penalty cuts made because the stationarity residual was exactly zero.
    pub zero_guard_cuts: usize,
    /// Penalty cuts made by the steering loop this iteration.
    pub steering_cuts: usize,

    /// Iterate at the start of the iteration.
    pub x: Vec<f64>,
    /// Multiplier estimate at the start of the iteration.
    pub y: Vec<f64>,
    /// Max norm of the projected-gradient residual of the Lagrangian.
    pub fl_inf: f64,
    /// Euclidean norm of the projected-gradient residual of the violation.
    pub ffeas_two: f64,
    /// Euclidean norm of the augmented-Lagrangian residual at `mu`.
    pub fal_two: f64,
    /// Max norm of the constraint values.
    pub c_inf: f64,
    /// Euclidean norm of the constraint values.
    pub c_two: f64,
    /// Constraint violation, half the squared Euclidean norm of `c`.
    pub v: f64,

    /// Step-size scale: the adaptive factor for line search, or the
    /// trust-region radius.
    pub delta: f64,
    /// Radius given to the feasibility Cauchy search.
    pub theta: f64,
    /// Radius given to the augmented-Lagrangian Cauchy search, at `mu`.
    pub theta_al: f64,
    /// Radius expansion factor chosen by the feasibility Cauchy search.
    pub expansion: f64,
    /// Relaxation recorded by the feasibility Cauchy search.
    pub eps: f64,
    /// Backtracking parameter of the feasibility Cauchy step.
    pub beta: f64,
    /// Feasibility Cauchy step.
    pub r_cauchy: Vec<f64>,
    /// Backtracking parameter of the augmented-Lagrangian Cauchy step.
    pub alpha_cauchy: f64,
    /// Augmented-Lagrangian Cauchy step at `mu`.
    pub s_cauchy: Vec<f64>,
    /// Violation-model decrease of the feasibility Cauchy step.
    pub dqv_r_cauchy: f64,
    /// Violation-model decrease of the augmented-Lagrangian Cauchy step.
    pub dqv_s_cauchy: f64,
    /// Convexified-model decrease of the augmented-Lagrangian Cauchy step.
    pub dqt_s_cauchy: f64,

    /// Step taken (or tried, when rejected).
    pub step: Vec<f64>,
    /// Convexified-model decrease of the step.
    pub dqt_step: f64,
    /// Unconvexified-model decrease of the step.
    pub dq_plain_step: f64,
    /// Whether the convexification clamp was active on the step's curvature.
    pub clamped: bool,
    /// Whether the subspace step beat the Cauchy step in the comparison.
    pub took_candidate: bool,
    /// How the bound-constrained subproblem solve ended.
    pub qp_status: QpStatus,

    /// Augmented Lagrangian at the start of the iteration, at `mu`.
    pub al_before: f64,
    /// Augmented Lagrangian after the iteration's evaluation, at `mu` and the
    /// incoming multipliers. Equals `al_before` when the step was rejected.
    pub al_after: f64,
    /// Accepted step size (line search) or reduction ratio (trust region).
    pub alpha_or_rho: f64,
    /// Whether the iterate moved.
    pub accepted: bool,
    /// Backtracking steps performed by the line search.
    pub ls_backtracks: usize,

    /// Feasibility target in force during the iteration.
    pub t: f64,
    /// Residual target in force during the iteration.
    pub cap_t: f64,
    /// Index of the target pair in force during the iteration.
    pub j: usize,
    /// Whether the multipliers and targets were updated at the end.
    pub y_updated: bool,
    /// Whether a classic penalty cut fired at the end (steering off only).
    pub mu_cut_classic: bool,
}

/// Header of the per-iteration CSV emitted by [`write_trace_csv`].
pub const TRACE_CSV_HEADER: &str = "k,mu,c_inf,fl_inf,fal_2,alpha_or_rho,delta,j,t,cap_t";

/// Writes the compact CSV view of a trace: one row per iteration with the
/// columns in [`TRACE_CSV_HEADER`].
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: &mut W) -> Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{:.17e},{:.17e}",
            row.k,
            row.mu,
            row.c_inf,
            row.fl_inf,
            row.fal_two,
            row.alpha_or_rho,
            row.delta,
            row.j,
            row.t,
            row.cap_t,
        )?;
    }
    Ok(())
}
