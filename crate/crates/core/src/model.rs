//! Augmented Lagrangian evaluation cache and local quadratic models.
//!
//! With `v(x) = 0.5 ||c(x)||^2` and the Lagrangian `l(x,y) = f(x) - c(x)'y`,
//! the augmented Lagrangian in the penalty scaling used by the solver is
//!
//! ```text
//!     L(x, y, mu) = mu * l(x, y) + v(x),      mu > 0,
//! ```
//!
//! with gradient `grad_x L = mu (g - J'pi)` for the shifted multiplier
//! `pi(x, y, mu) = y - c(x)/mu`.  Step quality is judged with two local
//! quadratic models at a base point `x`:
//!
//! * the Gauss-Newton violation model `q_v(s) = 0.5 ||c + J s||^2`, and
//! * the (optionally convexified) augmented Lagrangian model
//!   `q~(s) = L + grad_x L's + max{ 0.5 s'(mu H + J'J)s, 0 }`,
//!   where `H = D2_xx l(x, y)`; dropping the clamp gives the plain model
//!   `q(s)` used by the trust-region driver's acceptance ratio.
//!
//! Model *reductions* are always "value at zero minus value at step", so a
//! positive reduction means predicted progress.
//!
//! Two further models in the `1/mu` penalty scaling are provided for
//! comparison runs against LANCELOT-style subproblem definitions: `q_hat`
//! (Hessian at the incoming multiplier) and `q_newton` (Hessian at the
//! shifted multiplier).  `mu * q_hat(s)` equals `q(s) - L` — the plain model
//! above up to its constant term — so reductions can only be compared within
//! one fixed scaling convention.

use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::vecmath::{dot, norm2};

/// First-order shifted multiplier estimate `pi(c, y, mu) = y - c / mu`.
///
/// Requires `mu > 0`; when `c = 0` this returns `y` exactly.
pub fn pi(c: &[f64], y: &[f64], mu: f64) -> Result<Vec<f64>> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("pi requires mu > 0, got {mu}")));
    }
    if c.len() != y.len() {
        return Err(Error::Dimension {
            expected: y.len(),
            got: c.len(),
        });
    }
    Ok(y.iter().zip(c).map(|(&yi, &ci)| yi - ci / mu).collect())
}

/// All quantities of the augmented Lagrangian at one `(x, y, mu)` triple,
/// evaluated once and reused.
///
/// Construction costs one objective, one gradient, one constraint evaluation
/// and two transposed Jacobian products (`J'y` and `J'c`).  Everything that
/// depends only on `mu` is derived from these cached pieces, so re-deriving
/// the point at a smaller penalty ([`AlPoint::with_mu`]) is free of problem
/// callbacks — the property that makes penalty steering cheap.
#[derive(Debug, Clone)]
pub struct AlPoint {
    /// Base point.
    pub x: Vec<f64>,
    /// Multiplier estimate.
    pub y: Vec<f64>,
    /// Penalty parameter, `> 0`.
    pub mu: f64,
    /// `f(x)`.
    pub f: f64,
    /// `c(x)`.
    pub c: Vec<f64>,
    /// `g(x)`.
    pub g: Vec<f64>,
    /// `J(x)' y`.
    pub jty: Vec<f64>,
    /// `J(x)' c(x)`, the gradient of `v`.
    pub jtc: Vec<f64>,
    /// `v(x) = 0.5 ||c||^2`.
    pub v: f64,
    /// Lagrangian `l(x, y) = f - c'y`.
    pub lag: f64,
    /// `L(x, y, mu) = mu * lag + v`.
    pub al: f64,
    /// `grad_x L = mu (g - J'y) + J'c`.
    pub grad_al: Vec<f64>,
}

impl AlPoint {
    /// Evaluate the problem at `(x, y, mu)` and cache every derived quantity.
    pub fn new(problem: &dyn Problem, x: &[f64], y: &[f64], mu: f64) -> Self {
        let f = problem.objective(x);
        let c = problem.constraints(x);
        Self::with_values(problem, x, y, mu, f, c)
    }

    /// Like [`AlPoint::new`] but reusing already-known `f(x)` and `c(x)`
    /// (e.g. from the accepted line-search trial), so only the gradient and
    /// the two transposed products are freshly evaluated.
    pub fn with_values(
        problem: &dyn Problem,
        x: &[f64],
        y: &[f64],
        mu: f64,
        f: f64,
        c: Vec<f64>,
    ) -> Self {
        let g = problem.gradient(x);
        let jty = problem.jacobian_transpose_apply(x, y);
        let jtc = problem.jacobian_transpose_apply(x, &c);
        let v = 0.5 * dot(&c, &c);
        let lag = f - dot(&c, y);
        let n = x.len();
        let mut grad_al = vec![0.0; n];
        for i in 0..n {
            grad_al[i] = mu * (g[i] - jty[i]) + jtc[i];
        }
        AlPoint {
            x: x.to_vec(),
            y: y.to_vec(),
            mu,
            f,
            c,
            g,
            jty,
            jtc,
            v,
            lag,
            al: mu * lag + v,
            grad_al,
        }
    }

    /// Re-derive the point at a new penalty without any problem callbacks.
    pub fn with_mu(&self, mu: f64) -> Self {
        let n = self.x.len();
        let mut grad_al = vec![0.0; n];
        for i in 0..n {
            grad_al[i] = mu * (self.g[i] - self.jty[i]) + self.jtc[i];
        }
        AlPoint {
            mu,
            al: mu * self.lag + self.v,
            grad_al,
            ..self.clone()
        }
    }

    /// Shifted multiplier `pi(x, y, mu) = y - c(x)/mu` at this point.
    pub fn pi(&self) -> Vec<f64> {
        pi(&self.c, &self.y, self.mu).expect("mu > 0 is maintained by construction")
    }

    /// True iff every cached scalar and vector entry is finite.
    pub fn is_finite(&self) -> bool {
        self.f.is_finite()
            && self.v.is_finite()
            && self.al.is_finite()
            && crate::vecmath::all_finite(&self.c)
            && crate::vecmath::all_finite(&self.g)
            && crate::vecmath::all_finite(&self.jty)
            && crate::vecmath::all_finite(&self.jtc)
            && crate::vecmath::all_finite(&self.grad_al)
    }
}

/// Which local model a [`ModelEval`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// `q_v(s) = 0.5 ||c + J s||^2`.
    GaussNewtonViolation,
    /// Convexified AL model `q~`.
    ConvexifiedAl,
    /// Plain (unconvexified) AL model `q`.
    PlainAl,
    /// `1/mu`-scaled model with Hessian at the incoming multiplier.
    LancelotHat,
    /// `1/mu`-scaled model with Hessian at the shifted multiplier.
    LancelotNewton,
}

/// A model evaluated at one step: its value and its reduction from zero.
#[derive(Debug, Clone, Copy)]
pub struct ModelEval {
    /// The model evaluated.
    pub kind: ModelKind,
    /// Model value at the step.
    pub value: f64,
    /// `model(0) - model(step)`; positive means predicted progress.
    pub reduction: f64,
}

/// Violation model value and reduction: `q_v(s) = 0.5||c + Js||^2`,
/// reduction `v - q_v(s)`.  One Jacobian product.
pub fn eval_qv(problem: &dyn Problem, point: &AlPoint, s: &[f64]) -> ModelEval {
    let js = problem.jacobian_apply(&point.x, s);
    let r: Vec<f64> = point.c.iter().zip(&js).map(|(ci, ji)| ci + ji).collect();
    let value = 0.5 * dot(&r, &r);
    ModelEval {
        kind: ModelKind::GaussNewtonViolation,
        value,
        reduction: point.v - value,
    }
}

/// Reduction of the violation model only.
pub fn reduction_qv(problem: &dyn Problem, point: &AlPoint, s: &[f64]) -> f64 {
    eval_qv(problem, point, s).reduction
}

/// The two ingredients of the AL quadratic models at a step: the linear term
/// `grad_x L's` and the curvature `s'(mu H + J'J)s`.  One Hessian product and
/// one Jacobian product.
#[derive(Debug, Clone, Copy)]
pub struct AlQuadratic {
    /// `grad_x L(x,y,mu)' s`.
    pub grad_dot_s: f64,
    /// `s' (mu H + J'J) s` with `H = D2_xx l(x,y)`.
    pub curvature: f64,
}

impl AlQuadratic {
    /// Evaluate both ingredients at `s`.
    pub fn at(problem: &dyn Problem, point: &AlPoint, s: &[f64]) -> Self {
        let hs = problem.hess_lagrangian_apply(&point.x, &point.y, s);
        let js = problem.jacobian_apply(&point.x, s);
        AlQuadratic {
            grad_dot_s: dot(&point.grad_al, s),
            curvature: point.mu * dot(s, &hs) + dot(&js, &js),
        }
    }

    /// Reduction of the convexified model `q~`:
    /// `-grad_x L's - max{0.5 * curvature, 0}`.
    pub fn reduction_convexified(&self) -> f64 {
        -self.grad_dot_s - (0.5 * self.curvature).max(0.0)
    }

    /// Reduction of the plain model `q`: `-grad_x L's - 0.5 * curvature`.
    pub fn reduction_plain(&self) -> f64 {
        -self.grad_dot_s - 0.5 * self.curvature
    }

    /// True iff the convexification clamp is active (negative curvature).
    pub fn clamped(&self) -> bool {
        self.curvature < 0.0
    }
}

/// Convexified AL model `q~(s) = L + grad_x L's + max{0.5 s'(mu H + J'J)s, 0}`.
pub fn eval_qtilde(problem: &dyn Problem, point: &AlPoint, s: &[f64]) -> ModelEval {
    let quad = AlQuadratic::at(problem, point, s);
    let reduction = quad.reduction_convexified();
    ModelEval {
        kind: ModelKind::ConvexifiedAl,
        value: point.al - reduction,
        reduction,
    }
}

/// Reduction of the convexified AL model only.
pub fn reduction_qtilde(problem: &dyn Problem, point: &AlPoint, s: &[f64]) -> f64 {
    AlQuadratic::at(problem, point, s).reduction_convexified()
}

/// Plain AL model `q(s) = L + grad_x L's + 0.5 s'(mu H + J'J)s`.
pub fn eval_q(problem: &dyn Problem, point: &AlPoint, s: &[f64]) -> ModelEval {
    let quad = AlQuadratic::at(problem, point, s);
    let reduction = quad.reduction_plain();
    ModelEval {
        kind: ModelKind::PlainAl,
        value: point.al - reduction,
        reduction,
    }
}

/// `1/mu`-scaled model with the Hessian at the incoming multiplier:
/// `q_hat(s) = s' grad_x l(x, pi) + 0.5 s'(H(x,y) + J'J/mu) s`.
///
/// `mu * q_hat(s)` equals the plain model `q(s)` minus its constant term `L`.
pub fn eval_qhat(problem: &dyn Problem, point: &AlPoint, s: &[f64]) -> ModelEval {
    let quad = AlQuadratic::at(problem, point, s);
    // grad_x l(x, pi)'s = (g - J'pi)'s = grad_x L's / mu.
    let value = (quad.grad_dot_s + 0.5 * quad.curvature) / point.mu;
    ModelEval {
        kind: ModelKind::LancelotHat,
        value,
        reduction: -value,
    }
}

/// `1/mu`-scaled model with the Hessian at the shifted multiplier:
/// `q_newton(s) = s' grad_x l(x, pi) + 0.5 s'(H(x,pi) + J'J/mu) s`.
///
/// Identical to [`eval_qhat`] whenever `c(x) = 0` (the shift vanishes) or the
/// constraint Hessians vanish (e.g. affine constraints).
pub fn eval_qn(problem: &dyn Problem, point: &AlPoint, s: &[f64]) -> ModelEval {
    let shifted = point.pi();
    let hs = problem.hess_lagrangian_apply(&point.x, &shifted, s);
    let js = problem.jacobian_apply(&point.x, s);
    let linear = dot(&point.grad_al, s) / point.mu;
    let value = linear + 0.5 * (dot(s, &hs) + dot(&js, &js) / point.mu);
    ModelEval {
        kind: ModelKind::LancelotNewton,
        value,
        reduction: -value,
    }
}

/// Sampled sup-distance between the convexified AL model and the violation
/// model: `max |q~(s) - q_v(s)|` over `dirs` random unit directions, each
/// scaled to the radii `theta/2`, `theta`, and `2*theta`, plus `s = 0`.
///
/// As `mu` decreases toward zero the two models coincide on bounded sets, so
/// this gap shrinks roughly linearly in `mu`; the test suite uses that decay
/// as an oracle for the steering mechanism's foundation.  With `theta = 0`
/// only `s = 0` is sampled and the gap is exactly `|L - v| = mu * |l(x,y)|`.
pub fn model_convergence_gap<R: Rng>(
    problem: &dyn Problem,
    x: &[f64],
    y: &[f64],
    mu: f64,
    theta: f64,
    dirs: usize,
    rng: &mut R,
) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("gap requires mu > 0, got {mu}")));
    }
    if theta < 0.0 {
        return Err(Error::Domain(format!("gap requires theta >= 0, got {theta}")));
    }
    let point = AlPoint::new(problem, x, y, mu);
    // s = 0: q~(0) = L, q_v(0) = v.
    let mut gap = (point.al - point.v).abs();
    if theta > 0.0 {
        let n = x.len();
        for _ in 0..dirs {
            // Direction uniform on the sphere via normalized Gaussians.
            let mut d: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
            let nrm = norm2(&d);
            if nrm == 0.0 {
                continue;
            }
            d.iter_mut().for_each(|v| *v /= nrm);
            for radius in [0.5 * theta, theta, 2.0 * theta] {
                let s: Vec<f64> = d.iter().map(|di| di * radius).collect();
                let qt = eval_qtilde(problem, &point, &s);
                let qv = eval_qv(problem, &point, &s);
                gap = gap.max((qt.value - qv.value).abs());
            }
        }
    }
    Ok(gap)
}

/// Standard normal via Box-Muller; avoids an extra distribution dependency.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
