//! Backtracking Cauchy point searches.
//!
//! Step computation starts from two projected-gradient ("Cauchy") searches:
//!
//! * [`cauchy_feasibility`] backtracks along the projected arc of the
//!   violation gradient `J'c`, producing a step `r` inside radius `theta`
//!   whose predicted violation reduction is an acceptable fraction of the
//!   directional decrease:
//!
//!   ```text
//!       (c1)   dq_v(r) >= -eps_r * r'J'c   and   ||r|| <= theta.
//!   ```
//!
//!   It also returns the radius expansion factor `Gamma` in `(1, 2]` used to
//!   size the augmented Lagrangian radius, and the largest acceptable-
//!   fraction tolerance `eps` in `[0, eps_r)` observed while backtracking,
//!   which loosens the companion condition below.
//!
//! * [`cauchy_al`] backtracks the projected arc of the augmented Lagrangian
//!   gradient, producing a step `s` inside radius `theta_al` with
//!
//!   ```text
//!       (c2)   dq~(s) >= -((eps + eps_r)/2) * s' grad_x L   and
//!              ||s|| <= theta_al.
//!   ```
//!
//! Both conditions compare a model reduction against a positive multiple of
//! the (negative) directional derivative along the step, so they certify a
//! fixed fraction of ideal first-order progress.  Radius checks use a
//! pluggable norm: the solver pipeline works with max-norm (box) radii so
//! that subproblems stay bound-constrained, while the Euclidean form remains
//! available for analysis-style verification.

use crate::error::{Error, Result};
use crate::model::{reduction_qtilde, reduction_qv, AlPoint};
use crate::problem::{clamp, Problem};
use crate::vecmath::{dot, norm2, norm_inf, sub};

/// Iteration cap for every backtracking loop in this module; exceeding it
/// means a broken invariant (the searches terminate finitely by construction).
const BACKTRACK_CAP: usize = 200;

/// Norm used for step-inside-radius checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusNorm {
    /// Euclidean norm.
    Two,
    /// Max norm; makes a radius constraint a box constraint.
    Inf,
}

impl RadiusNorm {
    /// Evaluate the norm.
    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            RadiusNorm::Two => norm2(v),
            RadiusNorm::Inf => norm_inf(v),
        }
    }
}

/// Outcome of the feasibility Cauchy search.
#[derive(Debug, Clone)]
pub struct FeasCauchyResult {
    /// Accepted arc parameter `beta` in `(0, 1]`.
    pub beta: f64,
    /// Accepted step `P(x - beta J'c) - x`.
    pub step: Vec<f64>,
    /// Largest acceptable-fraction tolerance observed while backtracking,
    /// in `[0, eps_r)`; loosens condition (c2) of the companion search.
    pub eps: f64,
    /// Radius expansion factor `Gamma` in `(1, 2]` for the augmented
    /// Lagrangian radius.
    pub expansion: f64,
}

/// Outcome of the augmented Lagrangian Cauchy search.
#[derive(Debug, Clone)]
pub struct AlCauchyResult {
    /// Accepted arc parameter `alpha` in `(0, 1]`.
    pub alpha: f64,
    /// Accepted step `P(x - alpha grad_x L) - x`.
    pub step: Vec<f64>,
}

/// Projected arc point `P(x - t * d) - x`.
fn arc_step(x: &[f64], d: &[f64], t: f64, l: &[f64], u: &[f64]) -> Vec<f64> {
    let moved: Vec<f64> = x.iter().zip(d).map(|(&xi, &di)| xi - t * di).collect();
    sub(&clamp(&moved, l, u), x)
}

/// Backtracking Cauchy search on the violation model.  Requires
/// `theta >= 0`, `gamma` in `(0,1)`, `eps_r` in `(0,1)`.
///
/// Post-conditions (asserted in debug builds): the returned step satisfies
/// (c1), `beta` is in `(0, 1]`, `expansion` is in `(1, 2]`, and `eps` is in
/// `[0, eps_r)`.
pub fn cauchy_feasibility(
    problem: &dyn Problem,
    point: &AlPoint,
    theta: f64,
    gamma: f64,
    eps_r: f64,
    norm: RadiusNorm,
) -> Result<FeasCauchyResult> {
    if theta < 0.0 {
        return Err(Error::Domain(format!("cauchy_feasibility: theta = {theta} < 0")));
    }
    let (l, u) = (problem.lower(), problem.upper());
    let x = &point.x;
    let d = &point.jtc; // gradient of v

    // Phase 1: smallest backoff power with the arc point inside the radius.
    let mut t = 1.0;
    let mut backoffs = 0usize;
    let mut prev_len = None; // ||step|| at the last power outside the radius
    loop {
        let step = arc_step(x, d, t, l, u);
        let len = norm.eval(&step);
        if len <= theta {
            break;
        }
        prev_len = Some(len);
        t *= gamma;
        backoffs += 1;
        if backoffs > BACKTRACK_CAP {
            return Err(Error::InternalInvariant(format!(
                "feasibility Cauchy radius search exceeded {BACKTRACK_CAP} backoffs \
                 (theta = {theta:.3e})"
            )));
        }
    }

    // Radius expansion factor: 2 when no backoff was needed, otherwise an
    // interpolation based on how far outside the radius the previous arc
    // point was.  Always in (1, 2].
    let expansion = match prev_len {
        None => 2.0,
        Some(len) => 2.0f64.min(0.5 * (1.0 + len / theta)),
    };

    // Phase 2: continue backtracking until the decrease condition holds.
    let mut beta = t;
    let mut eps = 0.0f64;
    let mut backtracks = 0usize;
    let step = loop {
        let step = arc_step(x, d, beta, l, u);
        let dqv = reduction_qv(problem, point, &step);
        let slope = dot(&step, d); // r'J'c, nonpositive along the arc
        if dqv >= -eps_r * slope && norm.eval(&step) <= theta {
            break step;
        }
        if slope != 0.0 {
            eps = eps.max(-dqv / slope);
        }
        beta *= gamma;
        backtracks += 1;
        if backtracks > BACKTRACK_CAP {
            return Err(Error::InternalInvariant(format!(
                "feasibility Cauchy decrease search exceeded {BACKTRACK_CAP} backtracks"
            )));
        }
    };

    debug_assert!(beta > 0.0 && beta <= 1.0);
    debug_assert!(expansion > 1.0 && expansion <= 2.0);
    debug_assert!((0.0..eps_r).contains(&eps));
    debug_assert!(norm.eval(&step) <= theta * (1.0 + 1e-12));
    Ok(FeasCauchyResult {
        beta,
        step,
        eps,
        expansion,
    })
}

/// Backtracking Cauchy search on the convexified augmented Lagrangian model.
/// `eps` is the tolerance returned by the feasibility search.  A zero radius
/// short-circuits to `alpha = 1` with a zero step.
///
/// Post-conditions (asserted in debug builds): the returned step satisfies
/// (c2) and `alpha` is in `(0, 1]`.
pub fn cauchy_al(
    problem: &dyn Problem,
    point: &AlPoint,
    theta_al: f64,
    eps: f64,
    gamma: f64,
    eps_r: f64,
    norm: RadiusNorm,
) -> Result<AlCauchyResult> {
    if theta_al < 0.0 {
        return Err(Error::Domain(format!("cauchy_al: theta_al = {theta_al} < 0")));
    }
    if theta_al == 0.0 {
        return Ok(AlCauchyResult {
            alpha: 1.0,
            step: vec![0.0; problem.dim()],
        });
    }
    let (l, u) = (problem.lower(), problem.upper());
    let x = &point.x;
    let d = &point.grad_al;
    let fraction = 0.5 * (eps + eps_r);

    let mut alpha = 1.0;
    let mut backtracks = 0usize;
    let step = loop {
        let step = arc_step(x, d, alpha, l, u);
        let dqt = reduction_qtilde(problem, point, &step);
        let slope = dot(&step, d); // s' grad_x L, nonpositive along the arc
        if dqt >= -fraction * slope && norm.eval(&step) <= theta_al {
            break step;
        }
        alpha *= gamma;
        backtracks += 1;
        if backtracks > BACKTRACK_CAP {
            return Err(Error::InternalInvariant(format!(
                "AL Cauchy search exceeded {BACKTRACK_CAP} backtracks \
                 (theta_al = {theta_al:.3e})"
            )));
        }
    };

    debug_assert!(alpha > 0.0 && alpha <= 1.0);
    debug_assert!(norm.eval(&step) <= theta_al * (1.0 + 1e-12));
    Ok(AlCauchyResult { alpha, step })
}
