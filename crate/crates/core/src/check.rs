//! Derivative consistency checks for [`Problem`] implementations.
//!
//! Problems are user-supplied operator callbacks, so nothing forces the
//! gradient, Jacobian products, and Hessian products to agree with the value
//! callbacks.  This module provides the independent checks used to certify
//! every registered benchmark problem before its results are trusted:
//!
//! * adjoint consistency `<J v, w> == <v, J' w>` on random vector pairs,
//! * objective gradient vs. central finite differences of `f`,
//! * augmented Lagrangian gradient vs. central finite differences of `L`,
//! * Hessian-product symmetry `<H v, w> == <v, H w>`,
//! * a dense finite-difference Jacobian (row extraction) for KKT residual
//!   certification of reference solutions.
//!
//! All randomness is seeded by the caller, so check runs are reproducible.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;

use crate::model::AlPoint;
use crate::problem::Problem;
use crate::vecmath::{dot, norm2};

/// Central-difference step for a coordinate of magnitude `|x_i|`; the cube
/// root of machine epsilon balances truncation against roundoff.
fn fd_step(xi: f64) -> f64 {
    6.0e-6 * (1.0 + xi.abs())
}

/// Central finite-difference gradient of a scalar function.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = fd_step(x[i]);
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central finite-difference Jacobian of `c`, returned as `m` rows of length
/// `n`.  Used to certify reference solutions independently of the problem's
/// own Jacobian callbacks.
pub fn fd_jacobian(problem: &dyn Problem, x: &[f64]) -> Vec<Vec<f64>> {
    let (n, m) = (problem.dim(), problem.num_constraints());
    let mut rows = vec![vec![0.0; n]; m];
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = fd_step(x[j]);
        xp[j] = x[j] + h;
        let cp = problem.constraints(&xp);
        xp[j] = x[j] - h;
        let cm = problem.constraints(&xp);
        xp[j] = x[j];
        for i in 0..m {
            rows[i][j] = (cp[i] - cm[i]) / (2.0 * h);
        }
    }
    rows
}

/// Worst normalized adjoint defect `|<Jv,w> - <v,J'w>| / (1 + ||v|| ||w||)`
/// over `trials` random pairs at `x`.
pub fn adjoint_defect<R: Rng>(problem: &dyn Problem, x: &[f64], rng: &mut R, trials: usize) -> f64 {
    let (n, m) = (problem.dim(), problem.num_constraints());
    let span = Uniform::new_inclusive(-1.0, 1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let v: Vec<f64> = (0..n).map(|_| span.sample(rng)).collect();
        let w: Vec<f64> = (0..m).map(|_| span.sample(rng)).collect();
        let jv = problem.jacobian_apply(x, &v);
        let jtw = problem.jacobian_transpose_apply(x, &w);
        let defect = (dot(&jv, &w) - dot(&v, &jtw)).abs() / (1.0 + norm2(&v) * norm2(&w));
        worst = worst.max(defect);
    }
    worst
}

/// Worst normalized symmetry defect `|<Hv,w> - <v,Hw>| / (1 + ||v|| ||w||)`
/// of the Lagrangian Hessian product over `trials` random pairs.
pub fn hessian_symmetry_defect<R: Rng>(
    problem: &dyn Problem,
    x: &[f64],
    y: &[f64],
    rng: &mut R,
    trials: usize,
) -> f64 {
    let n = problem.dim();
    let span = Uniform::new_inclusive(-1.0, 1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let v: Vec<f64> = (0..n).map(|_| span.sample(rng)).collect();
        let w: Vec<f64> = (0..n).map(|_| span.sample(rng)).collect();
        let hv = problem.hess_lagrangian_apply(x, y, &v);
        let hw = problem.hess_lagrangian_apply(x, y, &w);
        let defect = (dot(&hv, &w) - dot(&v, &hw)).abs() / (1.0 + norm2(&v) * norm2(&w));
        worst = worst.max(defect);
    }
    worst
}

/// Relative error between the analytic objective gradient and central
/// finite differences: `||g - g_fd||_inf / (1 + ||g||_inf)`.
pub fn objective_gradient_error(problem: &dyn Problem, x: &[f64]) -> f64 {
    let g = problem.gradient(x);
    let gfd = fd_gradient(|z| problem.objective(z), x);
    relative_inf_error(&g, &gfd)
}

/// Relative error between the analytic augmented Lagrangian gradient
/// `mu (g - J'y) + J'c` and central finite differences of the value
/// `L(., y, mu)`.  Exercises gradient, Jacobian products, and value
/// callbacks together.
pub fn al_gradient_error(problem: &dyn Problem, x: &[f64], y: &[f64], mu: f64) -> f64 {
    let point = AlPoint::new(problem, x, y, mu);
    let gfd = fd_gradient(
        |z| {
            let f = problem.objective(z);
            let c = problem.constraints(z);
            mu * (f - dot(&c, y)) + 0.5 * dot(&c, &c)
        },
        x,
    );
    relative_inf_error(&point.grad_al, &gfd)
}

fn relative_inf_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = 1.0 + crate::vecmath::norm_inf(a);
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / scale
}

/// Outcome of [`certify`]: the three defect measures at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyReport {
    /// Worst adjoint defect over the random trials.
    pub adjoint: f64,
    /// Worst Hessian-product symmetry defect over the random trials.
    pub hessian_symmetry: f64,
    /// Objective gradient vs. finite differences.
    pub gradient: f64,
}

impl CertifyReport {
    /// Whether all defects are within the customary tolerances (1e-10 for
    /// the exact identities, 1e-6 for the finite-difference comparison).
    pub fn passed(&self) -> bool {
        self.adjoint < 1e-10 && self.hessian_symmetry < 1e-10 && self.gradient < 1e-6
    }
}

/// Runs the adjoint, Hessian-symmetry, and gradient checks at `x` with a
/// seeded generator (30 random trials each); `y` sizes the Hessian check.
pub fn certify(problem: &dyn Problem, x: &[f64], y: &[f64], seed: u64) -> CertifyReport {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    CertifyReport {
        adjoint: adjoint_defect(problem, x, &mut rng, 30),
        hessian_symmetry: hessian_symmetry_defect(problem, x, y, &mut rng, 30),
        gradient: objective_gradient_error(problem, x),
    }
}
