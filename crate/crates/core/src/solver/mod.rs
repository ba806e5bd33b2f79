//! Outer solver loop: penalty steering, Cauchy and subspace steps,
//! line-search or trust-region globalization, and multiplier updates.
//!
//! One iteration proceeds as follows.
//!
//! 1. Check the two convergence tests — stationary-and-feasible, or
//!    stationary for the constraint violation with the penalty parameter
//!    exhausted — and the iteration and wall-clock limits.
//! 2. Take a Cauchy step on the constraint-violation model and one on the
//!    convexified augmented-Lagrangian model, inside radii proportional to
//!    the corresponding projected-gradient residual norms.
//! 3. With steering on, cut the penalty parameter until the
//!    augmented-Lagrangian Cauchy step also makes enough progress on the
//!    violation model (or until it clears the safeguard threshold).
//! 4. Refine the Cauchy step with a bound-constrained conjugate-gradient
//!    subproblem and keep whichever step predicts the larger model decrease.
//! 5. Accept the step by Armijo backtracking (line search) or by the
//!    actual-to-predicted reduction ratio (trust region).
//! 6. On acceptance, check the feasibility target: reach it and the
//!    multipliers move to the better of the current and shifted estimates
//!    while both targets tighten; miss it with steering off and the penalty
//!    parameter is cut instead.
//!
//! Function evaluations are counted once per trial point; gradient
//! evaluations once for the initial point and once per accepted step.
//! Penalty cuts re-derive the cached evaluation and cost nothing.

mod config;
mod trace;

pub use config::{SolverConfig, SteeringMode, Variant, VARIANT_NAMES};
pub use trace::{write_trace_csv, TraceRow, TRACE_CSV_HEADER};

use std::time::Instant;

use crate::cauchy::{cauchy_al, cauchy_feasibility, RadiusNorm};
use crate::error::{Error, Result};
use crate::model::{self, AlPoint, AlQuadratic};
use crate::problem::{project, projected_step, Prescaled, Problem, Residuals, ScaleFactors};
use crate::qp::{sanity_check_step, solve_bound_qp, QpCaps, QpSpec};
use crate::vecmath::{all_finite, dot, norm2, norm_inf};

/// Initial trust-region radius.
const TR_RADIUS_INIT: f64 = 1.0;
/// Trust-region shrink factor after a rejected step.
const TR_SHRINK: f64 = 0.5;
/// Trust-region growth factor after a very successful step at the radius.
const TR_GROW: f64 = 2.0;
/// Fixed scale of the Cauchy radii in the trust-region driver.
const TR_CAUCHY_SCALE: f64 = 1.0;
/// Growth factor for the line-search radius scale after a full step.
const LS_SCALE_GROW: f64 = 5.0 / 3.0;
/// Shrink factor for the line-search radius scale after a damped step.
const LS_SCALE_SHRINK: f64 = 0.5;
/// Armijo backtrack budget; exhausting it means the model and the actual
/// merit function disagree beyond what rounding can explain.
const LS_BACKTRACK_CAP: usize = 60;
/// Steering cut budget; the loop provably terminates, so exceeding this
/// signals a broken invariant rather than a hard problem.
const STEERING_CUT_CAP: usize = 500;
/// Penalty underflow guard.
const MU_FLOOR: f64 = 1e-300;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Stationarity and feasibility tolerances both met.
    FirstOrderStationary,
    /// Stationary for the constraint violation, infeasible, and the penalty
    /// parameter at or below its floor: the constraints look locally
    /// inconsistent.
    InfeasibleStationary,
    /// Iteration limit reached.
    IterationLimit,
    /// Wall-clock limit reached.
    TimeLimit,
    /// An evaluation returned a non-finite value, or the line search failed.
    EvaluationError,
}

impl SolveStatus {
    /// Short flag used in benchmark records.
    pub fn flag(self) -> &'static str {
        match self {
            SolveStatus::FirstOrderStationary => "opt",
            SolveStatus::InfeasibleStationary => "inf",
            SolveStatus::IterationLimit => "itr",
            SolveStatus::TimeLimit => "time",
            SolveStatus::EvaluationError => "err",
        }
    }

    /// Whether the outcome counts as solved: either convergence test.
    pub fn solved(self) -> bool {
        matches!(
            self,
            SolveStatus::FirstOrderStationary | SolveStatus::InfeasibleStationary
        )
    }
}

/// Outcome of a solve.
///
/// Iterates and multipliers refer to the internally scaled problem when
/// pre-scaling is on; [`SolveReport::y_unscaled`] maps the multipliers back.
/// The iterate `x` itself is unaffected by scaling.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// How the solve ended.
    pub status: SolveStatus,
    /// Completed outer iterations.
    pub iterations: usize,
    /// Objective-and-constraint evaluations, one per trial point.
    pub function_evals: usize,
    /// Gradient-and-Jacobian evaluations, one per distinct accepted point.
    pub gradient_evals: usize,
    /// Final penalty parameter.
    pub mu_final: f64,
    /// Final objective value.
    pub f: f64,
    /// Final constraint violation, half the squared Euclidean norm of `c`.
    pub v: f64,
    /// Final max norm of the Lagrangian stationarity residual.
    pub fl_inf: f64,
    /// Final max norm of the violation stationarity residual.
    pub ffeas_inf: f64,
    /// Final Euclidean norm of the augmented-Lagrangian residual.
    pub fal_two: f64,
    /// Final max norm of the constraint values.
    pub c_inf: f64,
    /// Final iterate.
    pub x: Vec<f64>,
    /// Final multiplier estimate.
    pub y: Vec<f64>,
    /// Scale factors that were applied (identity when pre-scaling is off).
    pub scaling: ScaleFactors,
    /// Wall time in seconds.
    pub wall_time_s: f64,
    /// Per-iteration records when tracing was requested.
    pub trace: Option<Vec<TraceRow>>,
    /// Detail accompanying an [`SolveStatus::EvaluationError`].
    pub message: Option<String>,
}

impl SolveReport {
    /// Multipliers mapped back to the unscaled problem.
    pub fn y_unscaled(&self) -> Vec<f64> {
        self.scaling.unscale_multipliers(&self.y)
    }
}

/// Augmented Lagrangian `mu (f - c'y) + 0.5 ||c||^2` from raw values.
fn al_value(mu: f64, f: f64, c: &[f64], y: &[f64]) -> f64 {
    mu * (f - dot(c, y)) + 0.5 * dot(c, c)
}

/// Residuals from the cached pieces of an evaluated point.
fn res_of(point: &AlPoint, l: &[f64], u: &[f64]) -> Residuals {
    Residuals::from_parts(
        &point.x, l, u, &point.g, &point.jty, &point.jtc, &point.c, point.mu,
    )
}

/// Solves the problem with the globalization selected by `config.variant`.
///
/// `x0` is projected onto the bounds before the first evaluation; `y0` is
/// the initial multiplier estimate (zeros are a fine default).
pub fn solve(
    problem: &dyn Problem,
    config: &SolverConfig,
    x0: &[f64],
    y0: &[f64],
) -> Result<SolveReport> {
    drive(problem, config, config.variant, x0, y0)
}

/// Solves the problem with the trust-region globalization, regardless of
/// `config.variant`.
pub fn solve_tr(
    problem: &dyn Problem,
    config: &SolverConfig,
    x0: &[f64],
    y0: &[f64],
) -> Result<SolveReport> {
    drive(problem, config, Variant::TrustRegion, x0, y0)
}

fn drive(
    raw: &dyn Problem,
    cfg: &SolverConfig,
    variant: Variant,
    x0: &[f64],
    y0: &[f64],
) -> Result<SolveReport> {
    cfg.validate()?;
    let n = raw.dim();
    let m = raw.num_constraints();
    if x0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    if y0.len() != m {
        return Err(Error::Dimension {
            expected: m,
            got: y0.len(),
        });
    }
    if !all_finite(x0) || !all_finite(y0) {
        return Err(Error::Domain(
            "initial point and multipliers must be finite".to_string(),
        ));
    }

    let start = Instant::now();
    let limit = cfg.effective_time_limit_s();

    let x_start = project(x0, raw.lower(), raw.upper())?;
    let prescaled = if cfg.prescale {
        Some(Prescaled::new(raw, cfg.grad_scale_cap, &x_start)?)
    } else {
        None
    };
    let (problem, scaling): (&dyn Problem, ScaleFactors) = match &prescaled {
        Some(p) => (p, p.factors().clone()),
        None => (raw, ScaleFactors::identity(m)),
    };
    let lower = problem.lower().to_vec();
    let upper = problem.upper().to_vec();

    let mut mu = cfg.mu_0;
    let mut point = AlPoint::new(problem, &x_start, y0, mu);
    let mut funcs = 1usize;
    let mut grads = 1usize;

    let scale_ok = scaling.objective.is_finite() && all_finite(&scaling.constraints);
    if !scale_ok || !point.is_finite() {
        return Ok(SolveReport {
            status: SolveStatus::EvaluationError,
            iterations: 0,
            function_evals: funcs,
            gradient_evals: grads,
            mu_final: mu,
            f: point.f,
            v: point.v,
            fl_inf: f64::NAN,
            ffeas_inf: f64::NAN,
            fal_two: f64::NAN,
            c_inf: norm_inf(&point.c),
            x: x_start,
            y: y0.to_vec(),
            scaling,
            wall_time_s: start.elapsed().as_secs_f64(),
            trace: cfg.trace.then(Vec::new),
            message: Some("non-finite values at the initial point".to_string()),
        });
    }
    let mut res = res_of(&point, &lower, &upper);

    // Initial targets from the starting residuals.
    let mut t = 1e2_f64.max(1e4_f64.min(res.c_inf));
    let mut cap_t = 1.0_f64.max(1e2_f64.min(res.fl_inf));
    let mut j = 1usize;

    let mut ls_scale = 1.0; // line-search radius scale
    let mut tr_radius = TR_RADIUS_INIT;
    let mut k = 0usize;
    let mut rows: Vec<TraceRow> = Vec::new();

    // Repeated penalty cuts (factors 0.1 and 0.7) leave `mu` a few ulps
    // above an exact decimal floor, so the floor test gets a hair of slack.
    let mu_floor_reached = |mu: f64| mu <= cfg.mu_min * (1.0 + 1e-12);

    let (status, message) = 'outer: loop {
        if res.fl_inf <= cfg.kappa_opt && res.c_inf <= cfg.kappa_feas {
            break (SolveStatus::FirstOrderStationary, None);
        }
        if res.ffeas_inf <= cfg.kappa_opt && res.c_inf > cfg.kappa_feas && mu_floor_reached(mu) {
            break (SolveStatus::InfeasibleStationary, None);
        }
        if k >= cfg.k_max {
            break (SolveStatus::IterationLimit, None);
        }
        if start.elapsed().as_secs_f64() > limit {
            break (SolveStatus::TimeLimit, None);
        }

        let mu_entry = mu;

        let steer_scale = match variant {
            Variant::LineSearch => ls_scale,
            Variant::TrustRegion => TR_CAUCHY_SCALE,
        };
        let radius_cap = |r: f64| match variant {
            Variant::LineSearch => r,
            Variant::TrustRegion => r.min(tr_radius),
        };
        let scale_record = match variant {
            Variant::LineSearch => ls_scale,
            Variant::TrustRegion => tr_radius,
        };

        let mut zero_guard_cuts = 0usize;
        let mut steering_cuts = 0usize;
        let (theta, feas, dqv_r, theta_al, alc, dqv_s, dqt_s) = 'restep: loop {
            // An exactly zero augmented-Lagrangian residual at a
            // nonstationary point can only be an artifact of the current
            // penalty value: cut until the residual reappears or
            // infeasibility is established.
            while res.fal_inf == 0.0 {
                mu *= cfg.gamma_mu;
                zero_guard_cuts += 1;
                if mu < MU_FLOOR {
                    return Err(Error::InternalInvariant(format!(
                        "penalty parameter underflowed at iteration {k} while the \
                         augmented-Lagrangian residual stayed exactly zero"
                    )));
                }
                point = point.with_mu(mu);
                res = res_of(&point, &lower, &upper);
                if mu_floor_reached(mu)
                    && res.ffeas_inf <= cfg.kappa_opt
                    && res.c_inf > cfg.kappa_feas
                {
                    break 'outer (SolveStatus::InfeasibleStationary, None);
                }
            }

            // Cauchy step on the violation model.
            let theta = radius_cap(steer_scale * res.ffeas_two);
            let feas =
                cauchy_feasibility(problem, &point, theta, cfg.gamma, cfg.eps_r, RadiusNorm::Inf)?;
            let dqv_r = model::reduction_qv(problem, &point, &feas.step);

            // Cauchy step on the convexified augmented-Lagrangian model.
            let mut theta_al = radius_cap(feas.expansion * steer_scale * res.fal_two);
            let mut alc = cauchy_al(
                problem, &point, theta_al, feas.eps, cfg.gamma, cfg.eps_r, RadiusNorm::Inf,
            )?;
            let mut dqv_s = model::reduction_qv(problem, &point, &alc.step);
            let mut dqt_s = model::reduction_qtilde(problem, &point, &alc.step);

            // Steering: cut the penalty until that step also makes enough
            // progress on the violation model.
            if cfg.steering != SteeringMode::Off {
                loop {
                    if cfg.steering == SteeringMode::Safeguarded && mu <= cfg.safeguard_threshold {
                        break;
                    }
                    let target_term = point.v - 0.5 * (cfg.kappa_t * t).powi(2);
                    let needed = (cfg.kappa_3 * dqv_r).min(target_term);
                    if dqv_s >= needed && res.fal_inf != 0.0 {
                        break;
                    }
                    steering_cuts += 1;
                    if steering_cuts > STEERING_CUT_CAP {
                        return Err(Error::InternalInvariant(format!(
                            "steering exceeded {STEERING_CUT_CAP} penalty cuts at iteration {k} \
                             (mu = {mu:.3e}); the cut loop should terminate finitely"
                        )));
                    }
                    mu *= cfg.steering_decrease;
                    point = point.with_mu(mu);
                    res = res_of(&point, &lower, &upper);
                    theta_al = radius_cap(feas.expansion * steer_scale * res.fal_two);
                    alc = cauchy_al(
                        problem, &point, theta_al, feas.eps, cfg.gamma, cfg.eps_r, RadiusNorm::Inf,
                    )?;
                    dqv_s = model::reduction_qv(problem, &point, &alc.step);
                    dqt_s = model::reduction_qtilde(problem, &point, &alc.step);
                }
            }

            // Stall guard.  A nonzero residual guarantees the projected
            // gradient arc moves for every positive step in exact
            // arithmetic, so an exactly zero Cauchy step means every trial
            // inside the radius rounded away: the subproblem is solved to
            // machine precision at this penalty value.  Respond as the zero
            // guard does -- cut the penalty and recompute -- instead of
            // running a search that can no longer move.
            if alc.step.iter().all(|&s| s == 0.0) && !mu_floor_reached(mu) {
                mu *= cfg.gamma_mu;
                zero_guard_cuts += 1;
                point = point.with_mu(mu);
                res = res_of(&point, &lower, &upper);
                if mu_floor_reached(mu)
                    && res.ffeas_inf <= cfg.kappa_opt
                    && res.c_inf > cfg.kappa_feas
                {
                    break 'outer (SolveStatus::InfeasibleStationary, None);
                }
                continue 'restep;
            }

            break (theta, feas, dqv_r, theta_al, alc, dqv_s, dqt_s);
        };

        // The penalty value the step is computed and judged at; the classic
        // cut below may lower `mu` again after the step is taken.
        let mu_used = mu;

        // Subspace refinement: bound-constrained quadratic at the final
        // penalty value, warm-started from the Cauchy step.
        let step_radius = cfg.kappa_2 * theta_al;
        let box_lo: Vec<f64> = (0..n)
            .map(|i| (lower[i] - point.x[i]).max(-step_radius))
            .collect();
        let box_hi: Vec<f64> = (0..n)
            .map(|i| (upper[i] - point.x[i]).min(step_radius))
            .collect();
        let qp_out = {
            let apply = |v: &[f64]| -> Vec<f64> {
                let hv = problem.hess_lagrangian_apply(&point.x, &point.y, v);
                let jv = problem.jacobian_apply(&point.x, v);
                let jtjv = problem.jacobian_transpose_apply(&point.x, &jv);
                (0..n).map(|i| mu * hv[i] + jtjv[i]).collect()
            };
            let spec = QpSpec {
                apply: &apply,
                linear: point.grad_al.clone(),
                lower: box_lo,
                upper: box_hi,
                start: alc.step.clone(),
            };
            solve_bound_qp(&spec, &QpCaps::for_dim(n))?
        };

        // Keep whichever step predicts the larger decrease, under the
        // convexified model for line search and the plain one for trust
        // region.
        let pick = {
            let reduction = |s: &[f64]| {
                let quad = AlQuadratic::at(problem, &point, s);
                match variant {
                    Variant::LineSearch => quad.reduction_convexified(),
                    Variant::TrustRegion => quad.reduction_plain(),
                }
            };
            sanity_check_step(&qp_out.step, &alc.step, reduction)
        };
        let step_quad = AlQuadratic::at(problem, &point, &pick.step);
        let dqt_step = step_quad.reduction_convexified();
        let dq_plain_step = step_quad.reduction_plain();

        // Globalize.
        let al_before = point.al;
        let accepted;
        let alpha_or_rho;
        let mut ls_backtracks = 0usize;
        let al_after;
        let mut moved: Option<(Vec<f64>, f64, Vec<f64>)> = None; // (x, f, c)
        match variant {
            Variant::LineSearch => {
                let mut alpha = 1.0;
                loop {
                    let xt: Vec<f64> = point
                        .x
                        .iter()
                        .zip(&pick.step)
                        .map(|(&xi, &si)| xi + alpha * si)
                        .collect();
                    let ft = problem.objective(&xt);
                    let ct = problem.constraints(&xt);
                    funcs += 1;
                    if !ft.is_finite() || !all_finite(&ct) {
                        break 'outer (
                            SolveStatus::EvaluationError,
                            Some(format!(
                                "non-finite objective or constraint value at a \
                                 line-search trial (iteration {k}, step size {alpha:.3e})"
                            )),
                        );
                    }
                    let lt = al_value(mu, ft, &ct, &point.y);
                    if lt <= al_before - cfg.eta_s * alpha * dqt_step {
                        moved = Some((xt, ft, ct));
                        al_after = lt;
                        break;
                    }
                    ls_backtracks += 1;
                    if ls_backtracks > LS_BACKTRACK_CAP {
                        break 'outer (
                            SolveStatus::EvaluationError,
                            Some(format!(
                                "line search exhausted {LS_BACKTRACK_CAP} backtracks at \
                                 iteration {k}; the model and the merit function disagree"
                            )),
                        );
                    }
                    alpha *= cfg.gamma_alpha;
                }
                accepted = true;
                alpha_or_rho = alpha;
                ls_scale *= if alpha == 1.0 {
                    LS_SCALE_GROW
                } else {
                    LS_SCALE_SHRINK
                };
            }
            Variant::TrustRegion => {
                let xt: Vec<f64> = point
                    .x
                    .iter()
                    .zip(&pick.step)
                    .map(|(&xi, &si)| xi + si)
                    .collect();
                let ft = problem.objective(&xt);
                let ct = problem.constraints(&xt);
                funcs += 1;
                if !ft.is_finite() || !all_finite(&ct) {
                    break 'outer (
                        SolveStatus::EvaluationError,
                        Some(format!(
                            "non-finite objective or constraint value at a \
                             trust-region trial (iteration {k})"
                        )),
                    );
                }
                let lt = al_value(mu, ft, &ct, &point.y);
                let predicted = dq_plain_step;
                let actual = al_before - lt;
                let rho = if predicted > 0.0 {
                    actual / predicted
                } else {
                    f64::NEG_INFINITY
                };
                if rho >= cfg.eta_s {
                    accepted = true;
                    al_after = lt;
                    if rho >= cfg.eta_vs && norm_inf(&pick.step) >= 0.999 * tr_radius {
                        tr_radius *= TR_GROW;
                    }
                    moved = Some((xt, ft, ct));
                } else {
                    accepted = false;
                    al_after = al_before;
                    tr_radius *= TR_SHRINK;
                }
                alpha_or_rho = rho;
            }
        }

        // End-of-iteration point: the accepted trial, or the unchanged
        // iterate after a trust-region rejection.
        let (mut np, mut nres) = if let Some((x_next, trial_f, trial_c)) = moved {
            let np = AlPoint::with_values(problem, &x_next, &point.y, mu, trial_f, trial_c);
            grads += 1;
            if !np.is_finite() {
                break 'outer (
                    SolveStatus::EvaluationError,
                    Some(format!(
                        "non-finite gradient or Jacobian product at the accepted \
                         point of iteration {k}"
                    )),
                );
            }
            let nres = res_of(&np, &lower, &upper);
            (np, nres)
        } else {
            (point.clone(), res.clone())
        };

        // Multiplier, target, and penalty bookkeeping at that point. This
        // runs whether or not the step was accepted, so a converged
        // subproblem still advances the outer machinery while the
        // globalization is stalling.
        let t_record = t;
        let cap_t_record = cap_t;
        let j_record = j;
        let mut y_updated = false;
        let mut mu_cut_classic = false;
        let opportunity = match cfg.steering {
            SteeringMode::Off => nres.fal_two <= cap_t,
            _ => true,
        };
        if opportunity {
            if nres.c_two <= t {
                // Candidate multipliers: keep the current estimate or move
                // to the shifted one, whichever leaves the smaller
                // Lagrangian residual.
                let pi = model::pi(&np.c, &np.y, mu)?;
                let jtpi = problem.jacobian_transpose_apply(&np.x, &pi);
                let d_pi: Vec<f64> = (0..n).map(|i| np.g[i] - jtpi[i]).collect();
                let fl_pi_two = norm2(&projected_step(&np.x, &d_pi, &lower, &upper));
                let (take_pi, fl_hat_two) = if fl_pi_two <= nres.fl_two {
                    (true, fl_pi_two)
                } else {
                    (false, nres.fl_two)
                };
                let fire = match cfg.steering {
                    SteeringMode::Off => true,
                    _ => fl_hat_two.min(nres.fal_two) <= cap_t,
                };
                if fire {
                    t = (cfg.gamma_t * t).min(t.powf(1.0 + cfg.target_exponent));
                    cap_t *= cfg.gamma_cap_t;
                    j += 1;
                    y_updated = true;
                    if take_pi {
                        let x_same = np.x.clone();
                        np = AlPoint::with_values(problem, &x_same, &pi, mu, np.f, np.c.clone());
                        nres = res_of(&np, &lower, &upper);
                    }
                }
            } else if cfg.steering == SteeringMode::Off {
                mu *= cfg.gamma_mu;
                mu_cut_classic = true;
                np = np.with_mu(mu);
                nres = res_of(&np, &lower, &upper);
            }
        }
        let (next_point, next_res) = (np, nres);

        if cfg.trace {
            rows.push(TraceRow {
                k,
                mu_entry,
                mu: mu_used,
                zero_guard_cuts,
                steering_cuts,
                x: point.x.clone(),
                y: point.y.clone(),
                fl_inf: res.fl_inf,
                ffeas_two: res.ffeas_two,
                fal_two: res.fal_two,
                c_inf: res.c_inf,
                c_two: res.c_two,
                v: point.v,
                delta: scale_record,
                theta,
                theta_al,
                expansion: feas.expansion,
                eps: feas.eps,
                beta: feas.beta,
                r_cauchy: feas.step.clone(),
                alpha_cauchy: alc.alpha,
                s_cauchy: alc.step.clone(),
                dqv_r_cauchy: dqv_r,
                dqv_s_cauchy: dqv_s,
                dqt_s_cauchy: dqt_s,
                step: pick.step.clone(),
                dqt_step,
                dq_plain_step,
                clamped: step_quad.clamped(),
                took_candidate: pick.took_candidate,
                qp_status: qp_out.status,
                al_before,
                al_after,
                alpha_or_rho,
                accepted,
                ls_backtracks,
                t: t_record,
                cap_t: cap_t_record,
                j: j_record,
                y_updated,
                mu_cut_classic,
            });
        }

        point = next_point;
        res = next_res;
        k += 1;
    };

    Ok(SolveReport {
        status,
        iterations: k,
        function_evals: funcs,
        gradient_evals: grads,
        mu_final: mu,
        f: point.f,
        v: point.v,
        fl_inf: res.fl_inf,
        ffeas_inf: res.ffeas_inf,
        fal_two: res.fal_two,
        c_inf: res.c_inf,
        x: point.x.clone(),
        y: point.y.clone(),
        scaling,
        wall_time_s: start.elapsed().as_secs_f64(),
        trace: cfg.trace.then_some(rows),
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// min 0.5||x||^2  s.t.  x1 + x2 = 2; solution (1, 1), multiplier 1.
    struct EqQuad {
        bounds: (Vec<f64>, Vec<f64>),
    }

    impl EqQuad {
        fn new() -> Self {
            EqQuad {
                bounds: (vec![f64::NEG_INFINITY; 2], vec![f64::INFINITY; 2]),
            }
        }
    }

    impl Problem for EqQuad {
        fn dim(&self) -> usize {
            2
        }
        fn num_constraints(&self) -> usize {
            1
        }
        fn objective(&self, x: &[f64]) -> f64 {
            0.5 * (x[0] * x[0] + x[1] * x[1])
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            x.to_vec()
        }
        fn constraints(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] + x[1] - 2.0]
        }
        fn jacobian_apply(&self, _x: &[f64], v: &[f64]) -> Vec<f64> {
            vec![v[0] + v[1]]
        }
        fn jacobian_transpose_apply(&self, _x: &[f64], w: &[f64]) -> Vec<f64> {
            vec![w[0], w[0]]
        }
        fn hess_lagrangian_apply(&self, _x: &[f64], _y: &[f64], v: &[f64]) -> Vec<f64> {
            v.to_vec()
        }
        fn lower(&self) -> &[f64] {
            &self.bounds.0
        }
        fn upper(&self) -> &[f64] {
            &self.bounds.1
        }
    }

    /// min 0.5((x1+1)^2 + x2^2)  s.t.  x >= 0; solution (0, 0) with the
    /// first bound active. No equality constraints.
    struct BoundQuad {
        lower: Vec<f64>,
        upper: Vec<f64>,
    }

    impl BoundQuad {
        fn new() -> Self {
            BoundQuad {
                lower: vec![0.0, 0.0],
                upper: vec![f64::INFINITY; 2],
            }
        }
    }

    impl Problem for BoundQuad {
        fn dim(&self) -> usize {
            2
        }
        fn num_constraints(&self) -> usize {
            0
        }
        fn objective(&self, x: &[f64]) -> f64 {
            0.5 * ((x[0] + 1.0).powi(2) + x[1] * x[1])
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] + 1.0, x[1]]
        }
        fn constraints(&self, _x: &[f64]) -> Vec<f64> {
            Vec::new()
        }
        fn jacobian_apply(&self, _x: &[f64], _v: &[f64]) -> Vec<f64> {
            Vec::new()
        }
        fn jacobian_transpose_apply(&self, _x: &[f64], _w: &[f64]) -> Vec<f64> {
            vec![0.0, 0.0]
        }
        fn hess_lagrangian_apply(&self, _x: &[f64], _y: &[f64], v: &[f64]) -> Vec<f64> {
            v.to_vec()
        }
        fn lower(&self) -> &[f64] {
            &self.lower
        }
        fn upper(&self) -> &[f64] {
            &self.upper
        }
    }

    /// f = 0 with the inconsistent constraints x = 1 and x = -1; the
    /// violation is minimized at x = 0.
    struct Inconsistent {
        bounds: (Vec<f64>, Vec<f64>),
    }

    impl Inconsistent {
        fn new() -> Self {
            Inconsistent {
                bounds: (vec![f64::NEG_INFINITY], vec![f64::INFINITY]),
            }
        }
    }

    impl Problem for Inconsistent {
        fn dim(&self) -> usize {
            1
        }
        fn num_constraints(&self) -> usize {
            2
        }
        fn objective(&self, _x: &[f64]) -> f64 {
            0.0
        }
        fn gradient(&self, _x: &[f64]) -> Vec<f64> {
            vec![0.0]
        }
        fn constraints(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] - 1.0, x[0] + 1.0]
        }
        fn jacobian_apply(&self, _x: &[f64], v: &[f64]) -> Vec<f64> {
            vec![v[0], v[0]]
        }
        fn jacobian_transpose_apply(&self, _x: &[f64], w: &[f64]) -> Vec<f64> {
            vec![w[0] + w[1]]
        }
        fn hess_lagrangian_apply(&self, _x: &[f64], _y: &[f64], _v: &[f64]) -> Vec<f64> {
            vec![0.0]
        }
        fn lower(&self) -> &[f64] {
            &self.bounds.0
        }
        fn upper(&self) -> &[f64] {
            &self.bounds.1
        }
    }

    /// Linear descent toward an objective that turns non-finite past x = 3.
    struct NanTrap {
        lower: Vec<f64>,
        upper: Vec<f64>,
    }

    impl NanTrap {
        fn new() -> Self {
            NanTrap {
                lower: vec![f64::NEG_INFINITY],
                upper: vec![10.0],
            }
        }
    }

    impl Problem for NanTrap {
        fn dim(&self) -> usize {
            1
        }
        fn num_constraints(&self) -> usize {
            0
        }
        fn objective(&self, x: &[f64]) -> f64 {
            if x[0] > 3.0 {
                f64::NAN
            } else {
                -x[0]
            }
        }
        fn gradient(&self, _x: &[f64]) -> Vec<f64> {
            vec![-1.0]
        }
        fn constraints(&self, _x: &[f64]) -> Vec<f64> {
            Vec::new()
        }
        fn jacobian_apply(&self, _x: &[f64], _v: &[f64]) -> Vec<f64> {
            Vec::new()
        }
        fn jacobian_transpose_apply(&self, _x: &[f64], _w: &[f64]) -> Vec<f64> {
            vec![0.0]
        }
        fn hess_lagrangian_apply(&self, _x: &[f64], _y: &[f64], _v: &[f64]) -> Vec<f64> {
            vec![0.0]
        }
        fn lower(&self) -> &[f64] {
            &self.lower
        }
        fn upper(&self) -> &[f64] {
            &self.upper
        }
    }

    fn traced(name: &str) -> SolverConfig {
        let mut cfg = SolverConfig::named(name).unwrap();
        cfg.trace = true;
        cfg
    }

    #[test]
    fn all_variants_solve_the_equality_quadratic() {
        let p = EqQuad::new();
        for name in VARIANT_NAMES {
            let cfg = SolverConfig::named(name).unwrap();
            let report = solve(&p, &cfg, &[3.0, -1.0], &[0.0]).unwrap();
            assert_eq!(report.status, SolveStatus::FirstOrderStationary, "{name}");
            assert!(report.fl_inf <= cfg.kappa_opt, "{name}");
            assert!(report.c_inf <= cfg.kappa_feas, "{name}");
            assert!((report.x[0] - 1.0).abs() < 1e-3, "{name}: {:?}", report.x);
            assert!((report.x[1] - 1.0).abs() < 1e-3, "{name}: {:?}", report.x);
            assert!((report.y[0] - 1.0).abs() < 1e-2, "{name}: {:?}", report.y);
        }
    }

    #[test]
    fn bound_constrained_objective_without_constraints() {
        let p = BoundQuad::new();
        for name in ["aalls", "aaltr"] {
            let cfg = SolverConfig::named(name).unwrap();
            let report = solve(&p, &cfg, &[2.0, 1.5], &[]).unwrap();
            assert_eq!(report.status, SolveStatus::FirstOrderStationary, "{name}");
            assert!(report.x[0].abs() < 1e-4, "{name}: {:?}", report.x);
            assert!(report.x[1].abs() < 1e-4, "{name}: {:?}", report.x);
        }
    }

    #[test]
    fn inconsistent_constraints_are_flagged_infeasible() {
        let p = Inconsistent::new();
        for name in VARIANT_NAMES {
            let cfg = SolverConfig::named(name).unwrap();
            let report = solve(&p, &cfg, &[0.5], &[0.0, 0.0]).unwrap();
            assert_eq!(report.status, SolveStatus::InfeasibleStationary, "{name}");
            assert_eq!(report.status.flag(), "inf");
            // The floor test allows a few ulps of slack over mu_min.
            assert!(report.mu_final <= cfg.mu_min * (1.0 + 1e-12), "{name}");
            assert!(report.x[0].abs() < 1e-3, "{name}: {:?}", report.x);
            assert!((report.v - 1.0).abs() < 1e-2, "{name}");
        }
    }

    #[test]
    fn non_finite_evaluations_abort_with_an_error_status() {
        let p = NanTrap::new();
        let cfg = SolverConfig::named("aalls").unwrap();
        let report = solve(&p, &cfg, &[0.0], &[]).unwrap();
        assert_eq!(report.status, SolveStatus::EvaluationError);
        assert_eq!(report.status.flag(), "err");
        assert!(report.message.is_some());
    }

    #[test]
    fn reports_are_deterministic() {
        let p = EqQuad::new();
        let cfg = traced("aalls");
        let a = solve(&p, &cfg, &[3.0, -1.0], &[0.0]).unwrap();
        let b = solve(&p, &cfg, &[3.0, -1.0], &[0.0]).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.function_evals, b.function_evals);
        assert_eq!(a.trace.as_ref().unwrap(), b.trace.as_ref().unwrap());
    }

    #[test]
    fn solve_tr_matches_solve_with_trust_region_config() {
        let p = EqQuad::new();
        let ls_cfg = SolverConfig::named("aalls").unwrap();
        let mut tr_cfg = ls_cfg.clone();
        tr_cfg.variant = Variant::TrustRegion;
        let via_override = solve_tr(&p, &ls_cfg, &[3.0, -1.0], &[0.0]).unwrap();
        let via_config = solve(&p, &tr_cfg, &[3.0, -1.0], &[0.0]).unwrap();
        assert_eq!(via_override.x, via_config.x);
        assert_eq!(via_override.iterations, via_config.iterations);
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let p = EqQuad::new();
        let cfg = SolverConfig::default();
        assert!(matches!(
            solve(&p, &cfg, &[1.0], &[0.0]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            solve(&p, &cfg, &[1.0, 1.0], &[]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn invalid_config_is_rejected_before_any_evaluation() {
        let p = EqQuad::new();
        let mut cfg = SolverConfig::default();
        cfg.gamma = 2.0;
        assert!(matches!(
            solve(&p, &cfg, &[3.0, -1.0], &[0.0]),
            Err(Error::Config(_))
        ));
    }

    /// The trace must reproduce the bookkeeping laws: the Armijo decrease,
    /// the radius-scale update, the target updates, and the evaluation
    /// counters.
    #[test]
    fn line_search_trace_obeys_the_update_laws() {
        let p = EqQuad::new();
        let cfg = traced("aalls");
        let report = solve(&p, &cfg, &[3.0, -1.0], &[0.0]).unwrap();
        assert_eq!(report.status, SolveStatus::FirstOrderStationary);
        let rows = report.trace.as_ref().unwrap();
        assert_eq!(rows.len(), report.iterations);

        let mut funcs = 1;
        let mut grads = 1;
        for (i, row) in rows.iter().enumerate() {
            assert!(row.accepted);
            // Armijo decrease with the step size actually accepted.
            assert!(
                row.al_after
                    <= row.al_before - cfg.eta_s * row.alpha_or_rho * row.dqt_step + 1e-14,
                "row {i}"
            );
            // Monotone merit decrease at fixed multipliers and penalty.
            assert!(row.al_after <= row.al_before + 1e-14, "row {i}");
            funcs += row.ls_backtracks + 1;
            grads += 1;
            if let Some(next) = rows.get(i + 1) {
                let expected = if row.alpha_or_rho == 1.0 {
                    row.delta * LS_SCALE_GROW
                } else {
                    row.delta * LS_SCALE_SHRINK
                };
                assert_eq!(next.delta, expected, "row {i}");
                if row.y_updated {
                    let expected_t = (cfg.gamma_t * row.t).min(row.t.powf(1.5));
                    assert_eq!(next.t, expected_t, "row {i}");
                    assert_eq!(next.cap_t, cfg.gamma_cap_t * row.cap_t, "row {i}");
                    assert_eq!(next.j, row.j + 1, "row {i}");
                } else {
                    assert_eq!(next.t, row.t, "row {i}");
                    assert_eq!(next.j, row.j, "row {i}");
                }
            }
        }
        assert_eq!(report.function_evals, funcs);
        assert_eq!(report.gradient_evals, grads);
        // The first update happens from t = 100: min(10, 1000) = 10.
        let first_update = rows.iter().find(|r| r.y_updated).unwrap();
        assert_eq!(first_update.t, 100.0);
        if let Some(after) = rows.iter().find(|r| r.j == first_update.j + 1) {
            assert_eq!(after.t, 10.0);
        }
    }

    #[test]
    fn trust_region_trace_obeys_the_radius_laws() {
        let p = EqQuad::new();
        let cfg = traced("aaltr");
        let report = solve(&p, &cfg, &[3.0, -1.0], &[0.0]).unwrap();
        assert_eq!(report.status, SolveStatus::FirstOrderStationary);
        let rows = report.trace.as_ref().unwrap();
        let mut grads = 1;
        for (i, row) in rows.iter().enumerate() {
            if row.accepted {
                grads += 1;
                assert!(row.alpha_or_rho >= cfg.eta_s, "row {i}");
            } else {
                assert_eq!(row.al_after, row.al_before, "row {i}");
            }
            if let Some(next) = rows.get(i + 1) {
                let expected = if !row.accepted {
                    row.delta * TR_SHRINK
                } else if row.alpha_or_rho >= cfg.eta_vs
                    && norm_inf(&row.step) >= 0.999 * row.delta
                {
                    row.delta * TR_GROW
                } else {
                    row.delta
                };
                assert_eq!(next.delta, expected, "row {i}");
            }
        }
        assert_eq!(report.gradient_evals, grads);
        assert_eq!(report.function_evals, 1 + rows.len());
    }

    #[test]
    fn steering_cuts_only_lower_the_penalty() {
        let p = Inconsistent::new();
        for name in ["aalls", "aaltr", "aalls-safe", "aaltr-safe"] {
            let cfg = traced(name);
            let report = solve(&p, &cfg, &[0.5], &[0.0, 0.0]).unwrap();
            let rows = report.trace.as_ref().unwrap();
            for (i, row) in rows.iter().enumerate() {
                assert!(row.mu <= row.mu_entry, "{name} row {i}");
                if row.steering_cuts > 0 {
                    let cut = cfg.steering_decrease.powi(row.steering_cuts as i32);
                    let after_guard =
                        row.mu_entry * cfg.gamma_mu.powi(row.zero_guard_cuts as i32);
                    assert!((row.mu - after_guard * cut).abs() <= 1e-12 * row.mu_entry);
                }
                if let Some(next) = rows.get(i + 1) {
                    assert!(next.mu_entry <= row.mu + 1e-300, "{name} row {i}");
                }
                // Safeguarded steering never cuts below the threshold.
                if name.ends_with("safe") && row.steering_cuts > 0 {
                    assert!(
                        row.mu >= cfg.safeguard_threshold * cfg.steering_decrease,
                        "{name} row {i}: mu = {}",
                        row.mu
                    );
                }
            }
        }
    }

    #[test]
    fn basic_variants_cut_the_penalty_classically() {
        // f = 0 with c = x^2 + 1, which can never vanish: iterates approach
        // the violation minimizer x = 0 only asymptotically, so the penalty
        // descent must come from the classic cut rule rather than the
        // zero-residual guard.
        struct CurvedInfeasible {
            bounds: (Vec<f64>, Vec<f64>),
        }
        impl Problem for CurvedInfeasible {
            fn dim(&self) -> usize {
                1
            }
            fn num_constraints(&self) -> usize {
                1
            }
            fn objective(&self, _x: &[f64]) -> f64 {
                0.0
            }
            fn gradient(&self, _x: &[f64]) -> Vec<f64> {
                vec![0.0]
            }
            fn constraints(&self, x: &[f64]) -> Vec<f64> {
                vec![x[0] * x[0] + 1.0]
            }
            fn jacobian_apply(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
                vec![2.0 * x[0] * v[0]]
            }
            fn jacobian_transpose_apply(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
                vec![2.0 * x[0] * w[0]]
            }
            fn hess_lagrangian_apply(&self, _x: &[f64], y: &[f64], v: &[f64]) -> Vec<f64> {
                vec![-2.0 * y[0] * v[0]]
            }
            fn lower(&self) -> &[f64] {
                &self.bounds.0
            }
            fn upper(&self) -> &[f64] {
                &self.bounds.1
            }
        }
        let p = CurvedInfeasible {
            bounds: (vec![f64::NEG_INFINITY], vec![f64::INFINITY]),
        };
        let cfg = traced("balls");
        let report = solve(&p, &cfg, &[3.0], &[0.0]).unwrap();
        assert_eq!(report.status, SolveStatus::InfeasibleStationary);
        let rows = report.trace.as_ref().unwrap();
        assert!(rows.iter().all(|r| r.steering_cuts == 0));
        assert!(rows.iter().any(|r| r.mu_cut_classic));
        // Each classic cut multiplies the penalty by gamma_mu.
        for (i, row) in rows.iter().enumerate() {
            if row.mu_cut_classic {
                if let Some(next) = rows.get(i + 1) {
                    assert!((next.mu_entry - cfg.gamma_mu * row.mu).abs() <= 1e-18);
                }
            }
        }
    }

    #[test]
    fn prescaling_is_recorded_and_multipliers_map_back() {
        /// min 5000(x1-2)^2 + 5000 x2^2  s.t.  x1 = 1; multiplier -10000.
        struct Steep {
            bounds: (Vec<f64>, Vec<f64>),
        }
        impl Problem for Steep {
            fn dim(&self) -> usize {
                2
            }
            fn num_constraints(&self) -> usize {
                1
            }
            fn objective(&self, x: &[f64]) -> f64 {
                5000.0 * ((x[0] - 2.0).powi(2) + x[1] * x[1])
            }
            fn gradient(&self, x: &[f64]) -> Vec<f64> {
                vec![10_000.0 * (x[0] - 2.0), 10_000.0 * x[1]]
            }
            fn constraints(&self, x: &[f64]) -> Vec<f64> {
                vec![x[0] - 1.0]
            }
            fn jacobian_apply(&self, _x: &[f64], v: &[f64]) -> Vec<f64> {
                vec![v[0]]
            }
            fn jacobian_transpose_apply(&self, _x: &[f64], w: &[f64]) -> Vec<f64> {
                vec![w[0], 0.0]
            }
            fn hess_lagrangian_apply(&self, _x: &[f64], _y: &[f64], v: &[f64]) -> Vec<f64> {
                vec![10_000.0 * v[0], 10_000.0 * v[1]]
            }
            fn lower(&self) -> &[f64] {
                &self.bounds.0
            }
            fn upper(&self) -> &[f64] {
                &self.bounds.1
            }
        }
        let p = Steep {
            bounds: (vec![f64::NEG_INFINITY; 2], vec![f64::INFINITY; 2]),
        };
        let cfg = SolverConfig::named("aalls").unwrap();
        let report = solve(&p, &cfg, &[0.0, 0.0], &[0.0]).unwrap();
        assert_eq!(report.status, SolveStatus::FirstOrderStationary);
        assert!(!report.scaling.is_identity());
        assert_eq!(report.scaling.objective, 100.0 / 20_000.0);
        assert!((report.x[0] - 1.0).abs() < 1e-4);
        let y = report.y_unscaled();
        assert!((y[0] + 10_000.0).abs() < 1.0, "unscaled multiplier {y:?}");

        let mut plain = cfg.clone();
        plain.prescale = false;
        let report = solve(&p, &plain, &[0.0, 0.0], &[0.0]).unwrap();
        assert!(report.scaling.is_identity());
    }
}
