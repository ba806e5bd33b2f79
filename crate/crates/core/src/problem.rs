//! Problem interface, bound projection, stationarity residuals, pre-scaling.
//!
//! A problem is
//!
//! ```text
//!     minimize f(x)  subject to  c(x) = 0,  l <= x <= u,
//! ```
//!
//! with `f: R^n -> R` and `c: R^n -> R^m`, supplied in operator form: the
//! solver only ever asks for values, gradients, and the products `J(x) v`,
//! `J(x)' w`, and Hessian-of-the-Lagrangian products.  Infinite bounds are
//! expressed with `f64::INFINITY` / `f64::NEG_INFINITY` sentinels.
//!
//! The Lagrangian convention used throughout the crate is
//!
//! ```text
//!     l(x, y) = f(x) - c(x)'y,
//! ```
//!
//! so `hess_lagrangian_apply` must compute `(D2 f(x) - sum_i y_i D2 c_i(x)) v`.
//!
//! Three projected-gradient stationarity residuals drive the solver:
//!
//! * `F_L(x, y)   = P(x - (g - J'y)) - x` — Lagrangian stationarity,
//! * `F_FEAS(x)   = P(x - J'c) - x` — stationarity of `v(x) = 0.5||c||^2`,
//! * `F_AL(x,y,mu)= P(x - grad_x L(x,y,mu)) - x` — stationarity of the
//!   augmented Lagrangian,
//!
//! where `P` clamps componentwise onto `[l, u]`.

use crate::error::{Error, Result};
use crate::vecmath::{norm2, norm_inf, sub};

/// Operator-form nonlinear problem with equality constraints and bounds.
///
/// Implementations must be deterministic: repeated calls with the same
/// arguments must return the same values, since the solver freely re-evaluates
/// and the batch harness asserts byte-identical reruns.
pub trait Problem {
    /// Number of variables `n`.
    fn dim(&self) -> usize;

    /// Number of equality constraints `m` (0 is allowed).
    fn num_constraints(&self) -> usize;

    /// Objective value `f(x)`.
    fn objective(&self, x: &[f64]) -> f64;

    /// Objective gradient `g(x)`, length `n`.
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Constraint values `c(x)`, length `m`.
    fn constraints(&self, x: &[f64]) -> Vec<f64>;

    /// Jacobian-vector product `J(x) v`, mapping length-`n` to length-`m`.
    fn jacobian_apply(&self, x: &[f64], v: &[f64]) -> Vec<f64>;

    /// Transposed product `J(x)' w`, mapping length-`m` to length-`n`.
    fn jacobian_transpose_apply(&self, x: &[f64], w: &[f64]) -> Vec<f64>;

    /// Product `(D2 f(x) - sum_i y_i D2 c_i(x)) v` with the Hessian of the
    /// Lagrangian `l(x,y) = f(x) - c(x)'y`; maps length-`n` to length-`n`.
    fn hess_lagrangian_apply(&self, x: &[f64], y: &[f64], v: &[f64]) -> Vec<f64>;

    /// Lower bounds, length `n`, `-inf` where absent.
    fn lower(&self) -> &[f64];

    /// Upper bounds, length `n`, `+inf` where absent.
    fn upper(&self) -> &[f64];
}

/// Componentwise projection of `x` onto the box `[l, u]`.
///
/// Returns a configuration error when the three slices disagree in length.
pub fn project(x: &[f64], l: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    if x.len() != l.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: l.len(),
        });
    }
    if x.len() != u.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: u.len(),
        });
    }
    Ok(clamp(x, l, u))
}

/// Projection without the length checks; internal hot path.
pub(crate) fn clamp(x: &[f64], l: &[f64], u: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), l.len());
    debug_assert_eq!(x.len(), u.len());
    x.iter()
        .zip(l.iter().zip(u))
        .map(|(&xi, (&li, &ui))| xi.max(li).min(ui))
        .collect()
}

/// Projected step `P(x - d) - x` for a displacement `d`; the common kernel of
/// all three stationarity residuals.
pub(crate) fn projected_step(x: &[f64], d: &[f64], l: &[f64], u: &[f64]) -> Vec<f64> {
    let moved: Vec<f64> = x.iter().zip(d).map(|(&xi, &di)| xi - di).collect();
    sub(&clamp(&moved, l, u), x)
}

/// Lagrangian stationarity residual `F_L(x, y) = P(x - (g - J'y)) - x`.
pub fn residual_fl(problem: &dyn Problem, x: &[f64], y: &[f64]) -> Vec<f64> {
    let g = problem.gradient(x);
    let jty = problem.jacobian_transpose_apply(x, y);
    let d = sub(&g, &jty);
    projected_step(x, &d, problem.lower(), problem.upper())
}

/// Feasibility stationarity residual `F_FEAS(x) = P(x - J'c) - x`; the
/// projected negative gradient of `v(x) = 0.5 ||c(x)||^2`.
pub fn residual_ffeas(problem: &dyn Problem, x: &[f64]) -> Vec<f64> {
    let c = problem.constraints(x);
    let jtc = problem.jacobian_transpose_apply(x, &c);
    projected_step(x, &jtc, problem.lower(), problem.upper())
}

/// Augmented Lagrangian stationarity residual
/// `F_AL(x, y, mu) = P(x - (mu (g - J'y) + J'c)) - x`.
///
/// Requires `mu > 0`.
pub fn residual_fal(problem: &dyn Problem, x: &[f64], y: &[f64], mu: f64) -> Result<Vec<f64>> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("residual_fal requires mu > 0, got {mu}")));
    }
    let g = problem.gradient(x);
    let jty = problem.jacobian_transpose_apply(x, y);
    let c = problem.constraints(x);
    let jtc = problem.jacobian_transpose_apply(x, &c);
    let n = problem.dim();
    let mut d = vec![0.0; n];
    for i in 0..n {
        d[i] = mu * (g[i] - jty[i]) + jtc[i];
    }
    Ok(projected_step(x, &d, problem.lower(), problem.upper()))
}

/// The three stationarity residuals at one iterate, with both the max norm
/// (used by the termination tests) and the Euclidean norm (used by the radius
/// and target formulas) cached so each is computed exactly once per iterate.
#[derive(Debug, Clone)]
pub struct Residuals {
    /// `F_L(x, y)`.
    pub fl: Vec<f64>,
    /// `F_FEAS(x)`.
    pub ffeas: Vec<f64>,
    /// `F_AL(x, y, mu)`.
    pub fal: Vec<f64>,
    /// `||F_L||_inf`.
    pub fl_inf: f64,
    /// `||F_L||_2`.
    pub fl_two: f64,
    /// `||F_FEAS||_inf`.
    pub ffeas_inf: f64,
    /// `||F_FEAS||_2`.
    pub ffeas_two: f64,
    /// `||F_AL||_inf`.
    pub fal_inf: f64,
    /// `||F_AL||_2`.
    pub fal_two: f64,
    /// `||c(x)||_inf`.
    pub c_inf: f64,
    /// `||c(x)||_2`.
    pub c_two: f64,
}

impl Residuals {
    /// Assemble residuals from cached evaluation pieces: gradient `g`, the
    /// products `J'y` and `J'c`, constraint values `c`, and the penalty `mu`.
    /// No problem callbacks are invoked.
    pub fn from_parts(
        x: &[f64],
        l: &[f64],
        u: &[f64],
        g: &[f64],
        jty: &[f64],
        jtc: &[f64],
        c: &[f64],
        mu: f64,
    ) -> Self {
        let n = x.len();
        let d_l: Vec<f64> = (0..n).map(|i| g[i] - jty[i]).collect();
        let d_al: Vec<f64> = (0..n).map(|i| mu * d_l[i] + jtc[i]).collect();
        let fl = projected_step(x, &d_l, l, u);
        let ffeas = projected_step(x, jtc, l, u);
        let fal = projected_step(x, &d_al, l, u);
        Residuals {
            fl_inf: norm_inf(&fl),
            fl_two: norm2(&fl),
            ffeas_inf: norm_inf(&ffeas),
            ffeas_two: norm2(&ffeas),
            fal_inf: norm_inf(&fal),
            fal_two: norm2(&fal),
            c_inf: norm_inf(c),
            c_two: norm2(c),
            fl,
            ffeas,
            fal,
        }
    }

    /// Evaluate all residuals directly from the problem callbacks.
    pub fn compute(problem: &dyn Problem, x: &[f64], y: &[f64], mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::Domain(format!("residuals require mu > 0, got {mu}")));
        }
        let g = problem.gradient(x);
        let jty = problem.jacobian_transpose_apply(x, y);
        let c = problem.constraints(x);
        let jtc = problem.jacobian_transpose_apply(x, &c);
        Ok(Self::from_parts(
            x,
            problem.lower(),
            problem.upper(),
            &g,
            &jty,
            &jtc,
            &c,
            mu,
        ))
    }
}

/// Constant scale factors applied to the objective and each constraint so
/// that initial gradient magnitudes do not exceed a cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFactors {
    /// Factor multiplying `f`.
    pub objective: f64,
    /// Factor multiplying `c_i`, length `m`.
    pub constraints: Vec<f64>,
}

impl ScaleFactors {
    /// Identity scaling (all factors 1).
    pub fn identity(m: usize) -> Self {
        ScaleFactors {
            objective: 1.0,
            constraints: vec![1.0; m],
        }
    }

    /// True when no function is actually rescaled.
    pub fn is_identity(&self) -> bool {
        self.objective == 1.0 && self.constraints.iter().all(|&s| s == 1.0)
    }

    /// Map multipliers of the scaled problem back to multipliers of the
    /// original problem: stationarity `sf*g = sum_i y_i*si*grad c_i` of the
    /// scaled problem rearranges to `g = sum_i (y_i*si/sf) grad c_i`.
    pub fn unscale_multipliers(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.constraints)
            .map(|(&yi, &si)| yi * si / self.objective)
            .collect()
    }
}

/// A problem wrapped with constant per-function scale factors.
///
/// Produced by [`Prescaled::new`], which picks for the objective the factor
/// `min(1, cap / ||grad f(x0)||_inf)` and for each constraint `c_i` the factor
/// `min(1, cap / ||grad c_i(x0)||_inf)` (functions with zero gradient at `x0`
/// keep factor 1).  Scaling never enlarges a function and the variables and
/// bounds are untouched, so the feasible set and minimizers are unchanged.
pub struct Prescaled<'a> {
    inner: &'a dyn Problem,
    factors: ScaleFactors,
}

impl<'a> Prescaled<'a> {
    /// Compute scale factors at `x0` with gradient cap `cap` (> 0) and wrap
    /// the problem.  Constraint gradient rows are probed with `J' e_i`.
    pub fn new(inner: &'a dyn Problem, cap: f64, x0: &[f64]) -> Result<Self> {
        if !(cap > 0.0) {
            return Err(Error::Domain(format!("gradient cap must be > 0, got {cap}")));
        }
        if x0.len() != inner.dim() {
            return Err(Error::Dimension {
                expected: inner.dim(),
                got: x0.len(),
            });
        }
        let m = inner.num_constraints();
        let g = inner.gradient(x0);
        let factor = |h: f64| if h > cap { cap / h } else { 1.0 };
        let objective = factor(norm_inf(&g));
        let mut constraints = Vec::with_capacity(m);
        let mut e = vec![0.0; m];
        for i in 0..m {
            e[i] = 1.0;
            let row = inner.jacobian_transpose_apply(x0, &e);
            e[i] = 0.0;
            constraints.push(factor(norm_inf(&row)));
        }
        Ok(Prescaled {
            inner,
            factors: ScaleFactors {
                objective,
                constraints,
            },
        })
    }

    /// The factors chosen at construction.
    pub fn factors(&self) -> &ScaleFactors {
        &self.factors
    }
}

impl Problem for Prescaled<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn num_constraints(&self) -> usize {
        self.inner.num_constraints()
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.factors.objective * self.inner.objective(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.inner.gradient(x);
        for v in &mut g {
            *v *= self.factors.objective;
        }
        g
    }

    fn constraints(&self, x: &[f64]) -> Vec<f64> {
        let mut c = self.inner.constraints(x);
        for (v, s) in c.iter_mut().zip(&self.factors.constraints) {
            *v *= s;
        }
        c
    }

    fn jacobian_apply(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let mut jv = self.inner.jacobian_apply(x, v);
        for (w, s) in jv.iter_mut().zip(&self.factors.constraints) {
            *w *= s;
        }
        jv
    }

    fn jacobian_transpose_apply(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = w
            .iter()
            .zip(&self.factors.constraints)
            .map(|(&wi, &si)| wi * si)
            .collect();
        self.inner.jacobian_transpose_apply(x, &scaled)
    }

    fn hess_lagrangian_apply(&self, x: &[f64], y: &[f64], v: &[f64]) -> Vec<f64> {
        // Scaled Lagrangian: sf*f - sum_i y_i*si*c_i = sf * l(x, D y / sf)
        // with D = diag(si); sf > 0 always holds since factors are in (0, 1].
        let sf = self.factors.objective;
        let shifted: Vec<f64> = y
            .iter()
            .zip(&self.factors.constraints)
            .map(|(&yi, &si)| yi * si / sf)
            .collect();
        let mut hv = self.inner.hess_lagrangian_apply(x, &shifted, v);
        for w in &mut hv {
            *w *= sf;
        }
        hv
    }

    fn lower(&self) -> &[f64] {
        self.inner.lower()
    }

    fn upper(&self) -> &[f64] {
        self.inner.upper()
    }
}
