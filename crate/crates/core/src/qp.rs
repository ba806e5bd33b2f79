//! Bound-constrained quadratic subproblems via conjugate gradients with
//! working sets.
//!
//! The subproblem is
//!
//! ```text
//!     minimize  psi(s) = b's + 0.5 s'Hs   subject to   lo <= s <= hi,
//! ```
//!
//! with `H` available only as a product callback.  The box is the
//! intersection of the shifted variable bounds with a max-norm trust region,
//! so it is always bounded in the solver pipeline and always contains the
//! (feasible) warm start — the Cauchy step.
//!
//! Strategy: fix the bounds active at the start (the working set), run CG on
//! the free variables, and
//!
//! * when a trial CG iterate crosses an inactive bound, move to the first
//!   crossed face, add it to the working set, and restart CG;
//! * when CG converges on the free variables, compute multiplier estimates
//!   for the working bounds; if all are (essentially) nonnegative the point
//!   is optimal, otherwise the most negative face is released and CG
//!   restarts;
//! * when a direction of nonpositive curvature appears, follow it to the
//!   boundary of the box and return immediately — the augmented Lagrangian
//!   model need not be convex, and the outer solver guards step quality with
//!   a Cauchy comparison ([`sanity_check_step`]) anyway.
//!
//! Work is capped by a total CG iteration budget and a working-set restart
//! budget; hitting either returns the current (always feasible, never worse
//! than the start) iterate with an `IterationCap` status.

use crate::error::{Error, Result};
use crate::vecmath::dot;

/// Multiplier estimates above this (slightly negative) threshold count as
/// nonnegative when testing optimality of a working set.
const MULTIPLIER_TOL: f64 = -1e-10;

/// Directional curvature below this relative threshold is treated as
/// nonpositive.
const CURVATURE_TOL: f64 = 1e-14;

/// CG residual tolerance, applied both absolutely and relative to the
/// start-of-phase gradient.  `Converged` promises a first-order optimal
/// point, so the free gradient is driven to rounding level; work on hard
/// subproblems is bounded by the iteration caps instead of the tolerance.
const CG_TOL: f64 = 1e-10;

/// A bound-constrained quadratic subproblem in operator form.
pub struct QpSpec<'a> {
    /// Hessian product callback `v -> H v`.
    pub apply: &'a dyn Fn(&[f64]) -> Vec<f64>,
    /// Linear term `b`.
    pub linear: Vec<f64>,
    /// Box lower bounds; must satisfy `lower <= 0`.
    pub lower: Vec<f64>,
    /// Box upper bounds; must satisfy `upper >= 0`.
    pub upper: Vec<f64>,
    /// Warm start, clipped into the box on entry.
    pub start: Vec<f64>,
}

/// Why the subproblem solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    /// First-order optimal for the box: free gradient below tolerance and
    /// working-bound multipliers nonnegative.
    Converged,
    /// A direction of nonpositive curvature was followed to the boundary.
    NegativeCurvature,
    /// A work cap was reached; the returned step is the best iterate so far.
    IterationCap,
}

/// Result of [`solve_bound_qp`].
#[derive(Debug, Clone)]
pub struct QpResult {
    /// Final iterate; always inside the box (clipped once at exit).
    pub step: Vec<f64>,
    /// Stop reason.
    pub status: QpStatus,
    /// Total CG iterations across all working-set phases.
    pub cg_iterations: usize,
    /// Working-set changes (bound additions and releases).
    pub working_set_restarts: usize,
}

/// Work caps for [`solve_bound_qp`].
#[derive(Debug, Clone, Copy)]
pub struct QpCaps {
    /// Total CG iteration budget.
    pub max_cg: usize,
    /// Working-set change budget.
    pub max_restarts: usize,
}

impl QpCaps {
    /// Default budgets for dimension `n`: `20 n` CG iterations and `5 n`
    /// working-set changes.
    pub fn for_dim(n: usize) -> Self {
        QpCaps {
            max_cg: 20 * n.max(1),
            max_restarts: 5 * n.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Face {
    Free,
    Lower,
    Upper,
}

/// Solve the bound-constrained quadratic subproblem.  See the module docs
/// for the strategy; post-conditions are: the returned step lies in the box,
/// and its model value never exceeds the model value of the (clipped) start.
pub fn solve_bound_qp(spec: &QpSpec, caps: &QpCaps) -> Result<QpResult> {
    let n = spec.linear.len();
    for (name, len) in [
        ("lower", spec.lower.len()),
        ("upper", spec.upper.len()),
        ("start", spec.start.len()),
    ] {
        if len != n {
            return Err(Error::Config(format!(
                "qp field `{name}` has length {len}, expected {n}"
            )));
        }
    }
    for i in 0..n {
        if !(spec.lower[i] <= 0.0 && spec.upper[i] >= 0.0) {
            return Err(Error::Config(format!(
                "qp box must contain the origin; coordinate {i} is [{}, {}]",
                spec.lower[i], spec.upper[i]
            )));
        }
    }

    // Clip the start and detect its active faces.
    let mut s: Vec<f64> = (0..n)
        .map(|i| spec.start[i].max(spec.lower[i]).min(spec.upper[i]))
        .collect();
    let mut faces: Vec<Face> = (0..n)
        .map(|i| {
            if s[i] == spec.lower[i] {
                Face::Lower
            } else if s[i] == spec.upper[i] {
                Face::Upper
            } else {
                Face::Free
            }
        })
        .collect();

    let mut cg_iterations = 0usize;
    let mut restarts = 0usize;
    let psi = |s: &[f64]| dot(&spec.linear, s) + 0.5 * dot(s, &(spec.apply)(s));
    let psi_start = if cfg!(debug_assertions) { psi(&s) } else { 0.0 };

    let status = 'outer: loop {
        // Start-of-phase gradient restricted to the free variables.
        let grad = full_gradient(spec, &s);
        let mut r: Vec<f64> = (0..n)
            .map(|i| if faces[i] == Face::Free { grad[i] } else { 0.0 })
            .collect();
        let r0 = dot(&r, &r).sqrt();
        let tol = CG_TOL * (1.0 + r0);

        if r0 > tol {
            // CG on the free variables.
            let mut p: Vec<f64> = r.iter().map(|v| -v).collect();
            let mut rr = dot(&r, &r);
            loop {
                let hp = (spec.apply)(&p);
                let curv = dot(&p, &hp);
                let pp = dot(&p, &p);
                if curv <= CURVATURE_TOL * pp {
                    // Nonpositive curvature: follow p to the boundary.
                    let (sigma, _) = max_feasible(&s, &p, &spec.lower, &spec.upper, &faces);
                    step_onto(&mut s, &p, sigma, &spec.lower, &spec.upper);
                    break 'outer QpStatus::NegativeCurvature;
                }
                let alpha = rr / curv;
                let (sigma, blocking) = max_feasible(&s, &p, &spec.lower, &spec.upper, &faces);
                if alpha > sigma {
                    // A bound blocks the full CG step: move onto the first
                    // crossed face, fix it, restart CG.
                    let i = blocking.expect("finite blocking index when sigma < alpha");
                    step_onto(&mut s, &p, sigma, &spec.lower, &spec.upper);
                    faces[i] = if p[i] < 0.0 { Face::Lower } else { Face::Upper };
                    s[i] = if p[i] < 0.0 { spec.lower[i] } else { spec.upper[i] };
                    restarts += 1;
                    if restarts > caps.max_restarts {
                        break 'outer QpStatus::IterationCap;
                    }
                    continue 'outer;
                }
                for i in 0..n {
                    s[i] += alpha * p[i];
                }
                for i in 0..n {
                    if faces[i] == Face::Free {
                        r[i] += alpha * hp[i];
                    }
                }
                cg_iterations += 1;
                if cg_iterations > caps.max_cg {
                    break 'outer QpStatus::IterationCap;
                }
                let rr_new = dot(&r, &r);
                if rr_new.sqrt() <= tol {
                    break;
                }
                let beta = rr_new / rr;
                for i in 0..n {
                    p[i] = -r[i] + beta * p[i];
                }
                rr = rr_new;
            }
        }

        // Free gradient is small: test the working-set multipliers.  For a
        // lower face the bound multiplier is the gradient component; for an
        // upper face its negation.
        let grad = full_gradient(spec, &s);
        let mut worst = (f64::INFINITY, usize::MAX);
        for i in 0..n {
            let lambda = match faces[i] {
                Face::Free => continue,
                Face::Lower => grad[i],
                Face::Upper => -grad[i],
            };
            if lambda < worst.0 {
                worst = (lambda, i);
            }
        }
        if worst.1 == usize::MAX || worst.0 >= MULTIPLIER_TOL {
            break QpStatus::Converged;
        }
        // Release the most negative face and re-optimize.
        faces[worst.1] = Face::Free;
        restarts += 1;
        if restarts > caps.max_restarts {
            break QpStatus::IterationCap;
        }
    };

    // Clip once at exit; all face arithmetic snaps exactly, this only mops
    // up ulp-level drift from the updates.
    for i in 0..n {
        s[i] = s[i].max(spec.lower[i]).min(spec.upper[i]);
    }
    debug_assert!(psi(&s) <= psi_start + 1e-10 * (1.0 + psi_start.abs()));
    Ok(QpResult {
        step: s,
        status,
        cg_iterations,
        working_set_restarts: restarts,
    })
}

/// Gradient `b + H s` of the model.
fn full_gradient(spec: &QpSpec, s: &[f64]) -> Vec<f64> {
    let hs = (spec.apply)(s);
    spec.linear.iter().zip(&hs).map(|(b, h)| b + h).collect()
}

/// Largest feasible `sigma >= 0` with `s + sigma p` inside the box, over the
/// non-working coordinates, plus the index of the blocking bound (if any).
fn max_feasible(
    s: &[f64],
    p: &[f64],
    lower: &[f64],
    upper: &[f64],
    faces: &[Face],
) -> (f64, Option<usize>) {
    let mut sigma = f64::INFINITY;
    let mut blocking = None;
    for i in 0..s.len() {
        if faces[i] != Face::Free || p[i] == 0.0 {
            continue;
        }
        let room = if p[i] > 0.0 {
            (upper[i] - s[i]) / p[i]
        } else {
            (lower[i] - s[i]) / p[i]
        };
        if room < sigma {
            sigma = room;
            blocking = Some(i);
        }
    }
    (sigma.max(0.0), blocking)
}

/// `s += sigma * p`, clamped into the box (used when stepping onto a face).
fn step_onto(s: &mut [f64], p: &[f64], sigma: f64, lower: &[f64], upper: &[f64]) {
    if !sigma.is_finite() {
        return;
    }
    for i in 0..s.len() {
        s[i] = (s[i] + sigma * p[i]).max(lower[i]).min(upper[i]);
    }
}

/// Step quality guard: keep the subproblem candidate only if its model
/// reduction is at least the Cauchy step's; ties go to the candidate.
#[derive(Debug, Clone)]
pub struct SanityCheck {
    /// The chosen step.
    pub step: Vec<f64>,
    /// Model reduction of the chosen step.
    pub reduction: f64,
    /// Whether the candidate (rather than the Cauchy step) was chosen.
    pub took_candidate: bool,
    /// Model reduction of the candidate.
    pub candidate_reduction: f64,
    /// Model reduction of the Cauchy step.
    pub cauchy_reduction: f64,
}

/// Compare a subproblem candidate against the Cauchy step under a model
/// reduction functional and keep the better one (ties favor the candidate).
pub fn sanity_check_step<F: Fn(&[f64]) -> f64>(
    candidate: &[f64],
    cauchy: &[f64],
    reduction: F,
) -> SanityCheck {
    let candidate_reduction = reduction(candidate);
    let cauchy_reduction = reduction(cauchy);
    if candidate_reduction >= cauchy_reduction {
        SanityCheck {
            step: candidate.to_vec(),
            reduction: candidate_reduction,
            took_candidate: true,
            candidate_reduction,
            cauchy_reduction,
        }
    } else {
        SanityCheck {
            step: cauchy.to_vec(),
            reduction: cauchy_reduction,
            took_candidate: false,
            candidate_reduction,
            cauchy_reduction,
        }
    }
}
