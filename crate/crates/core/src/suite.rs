//! Benchmark problem suite: twenty-two small problems with hand-checkable
//! data.
//!
//! Every problem carries closed-form derivative callbacks and an expected
//! outcome — either a stationary point (often with known multipliers and
//! objective value) or a certificate of local infeasibility (a stationary
//! point of the constraint violation with its violation value). The unit
//! tests certify each entry twice over: derivative callbacks are compared
//! against finite differences and adjoint identities, and the recorded
//! solutions are verified to satisfy the first-order conditions directly
//! from the callbacks. Solver runs are *not* involved in certification, so
//! a bug in the solver cannot silently re-freeze wrong reference data.
//!
//! The mix covers unconstrained-direction curvature of both signs, active
//! and inactive bounds, linear and nonlinear equality constraints, a badly
//! scaled problem, pure feasibility systems, a bounds-only problem with no
//! equality constraints, and three locally inconsistent problems.

use crate::error::{Error, Result};
use crate::problem::Problem;

/// Expected outcome of a solve, used by certification and acceptance tests.
#[derive(Debug, Clone)]
pub enum Expected {
    /// The solver should reach a first-order stationary point.
    Solution {
        /// Reference solution, when the basin reached from `x0` is
        /// unambiguous; `None` when several solutions share the outcome.
        x: Option<Vec<f64>>,
        /// Reference multipliers at that solution, for the problem as
        /// written (before any internal scaling).
        y: Option<Vec<f64>>,
        /// Reference objective value, when shared by all target solutions.
        f: Option<f64>,
    },
    /// The constraints are locally inconsistent: the solver should stop at
    /// a stationary point of the violation with the penalty exhausted.
    Infeasible {
        /// The violation-stationary point reached from `x0`.
        x: Vec<f64>,
        /// Half the squared constraint norm there.
        v: f64,
    },
}

/// A dense benchmark problem built from plain function pointers.
///
/// The Jacobian is supplied row-wise; the two product callbacks of
/// [`Problem`] are derived from it. `hess` must compute the product
/// `(D2 f(x) - sum_i y_i D2 c_i(x)) v`.
pub struct DenseProblem {
    /// Registry name.
    pub name: &'static str,
    /// Variable count.
    pub n: usize,
    /// Equality constraint count.
    pub m: usize,
    /// Objective value.
    pub f: fn(&[f64]) -> f64,
    /// Objective gradient.
    pub grad: fn(&[f64]) -> Vec<f64>,
    /// Constraint values.
    pub cons: fn(&[f64]) -> Vec<f64>,
    /// Jacobian rows, `m` rows of length `n`.
    pub jac: fn(&[f64]) -> Vec<Vec<f64>>,
    /// Lagrangian Hessian product `(x, y, v) -> H v`.
    pub hess: fn(&[f64], &[f64], &[f64]) -> Vec<f64>,
    /// Lower bounds.
    pub lower: Vec<f64>,
    /// Upper bounds.
    pub upper: Vec<f64>,
    /// Standard starting point.
    pub x0: Vec<f64>,
    /// Standard initial multipliers.
    pub y0: Vec<f64>,
    /// Expected outcome from the standard start.
    pub expected: Expected,
}

impl Problem for DenseProblem {
    fn dim(&self) -> usize {
        self.n
    }
    fn num_constraints(&self) -> usize {
        self.m
    }
    fn objective(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.grad)(x)
    }
    fn constraints(&self, x: &[f64]) -> Vec<f64> {
        (self.cons)(x)
    }
    fn jacobian_apply(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        (self.jac)(x)
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
    fn jacobian_transpose_apply(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (row, &wi) in (self.jac)(x).iter().zip(w) {
            for (o, &r) in out.iter_mut().zip(row) {
                *o += wi * r;
            }
        }
        out
    }
    fn hess_lagrangian_apply(&self, x: &[f64], y: &[f64], v: &[f64]) -> Vec<f64> {
        (self.hess)(x, y, v)
    }
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
}

const INF: f64 = f64::INFINITY;

fn free(n: usize) -> (Vec<f64>, Vec<f64>) {
    (vec![-INF; n], vec![INF; n])
}

/// Builds the full twenty-two-problem suite.
pub fn registry() -> Vec<DenseProblem> {
    use std::f64::consts::{E, FRAC_PI_3};

    let mut problems = Vec::new();

    // Rosenbrock objective restricted to the line x1 + x2 = 1. Started at
    // (0, 1) to sit in the basin of the global constrained minimum; the
    // classic (-1.2, 1) start descends into a local minimum near
    // x1 = -1.62 instead.
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "rosenbrock_line",
        n: 2,
        m: 1,
        f: |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
        grad: |x| {
            vec![
                -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        },
        cons: |x| vec![x[0] + x[1] - 1.0],
        jac: |_| vec![vec![1.0, 1.0]],
        hess: |x, _y, v| {
            let a = 1200.0 * x[0] * x[0] - 400.0 * x[1] + 2.0;
            let b = -400.0 * x[0];
            vec![a * v[0] + b * v[1], b * v[0] + 200.0 * v[1]]
        },
        lower: l,
        upper: u,
        x0: vec![0.0, 1.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.61879561907502540, 0.38120438092497460]),
            y: Some(vec![-0.34072745229386833]),
            f: Some(0.14560701802825981),
        },
    });

    // Linear objective over the unit circle intersected with a line that
    // misses it: locally inconsistent. The violation is stationary on the
    // diagonal at x1 = x2 = cbrt(3/4).
    let (l, u) = free(2);
    let t = 0.90856029641606983_f64;
    problems.push(DenseProblem {
        name: "circle_line",
        n: 2,
        m: 2,
        f: |x| x[0] + x[1],
        grad: |_| vec![1.0, 1.0],
        cons: |x| vec![x[0] * x[0] + x[1] * x[1] - 1.0, x[0] + x[1] - 3.0],
        jac: |x| vec![vec![2.0 * x[0], 2.0 * x[1]], vec![1.0, 1.0]],
        hess: |_x, y, v| vec![-2.0 * y[0] * v[0], -2.0 * y[0] * v[1]],
        lower: l,
        upper: u,
        x0: vec![1.0, 1.0],
        y0: vec![0.0, 0.0],
        expected: Expected::Infeasible {
            x: vec![t, t],
            v: 0.91147866612768577,
        },
    });

    // Logarithmic objective on a quartic level set; solution (0, sqrt(3)).
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "hs7",
        n: 2,
        m: 1,
        f: |x| (1.0 + x[0] * x[0]).ln() - x[1],
        grad: |x| vec![2.0 * x[0] / (1.0 + x[0] * x[0]), -1.0],
        cons: |x| vec![(1.0 + x[0] * x[0]).powi(2) + x[1] * x[1] - 4.0],
        jac: |x| vec![vec![4.0 * x[0] * (1.0 + x[0] * x[0]), 2.0 * x[1]]],
        hess: |x, y, v| {
            let s = 1.0 + x[0] * x[0];
            let f11 = (2.0 - 2.0 * x[0] * x[0]) / (s * s);
            let c11 = 4.0 + 12.0 * x[0] * x[0];
            vec![(f11 - y[0] * c11) * v[0], -2.0 * y[0] * v[1]]
        },
        lower: l,
        upper: u,
        x0: vec![2.0, 2.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.0, 1.7320508075688772]),
            y: Some(vec![-0.28867513459481288]),
            f: Some(-1.7320508075688772),
        },
    });

    // Squared distance from (0, 3) to the parabola x2 = x1^2, started on
    // the right branch.
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "dist_to_parabola",
        n: 2,
        m: 1,
        f: |x| x[0] * x[0] + (x[1] - 3.0).powi(2),
        grad: |x| vec![2.0 * x[0], 2.0 * (x[1] - 3.0)],
        cons: |x| vec![x[1] - x[0] * x[0]],
        jac: |x| vec![vec![-2.0 * x[0], 1.0]],
        hess: |_x, y, v| vec![(2.0 + 2.0 * y[0]) * v[0], 2.0 * v[1]],
        lower: l,
        upper: u,
        x0: vec![2.0, 0.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![1.5811388300841898, 2.5]),
            y: Some(vec![-1.0]),
            f: Some(2.75),
        },
    });

    // Quadratic objective on a trigonometric level set; from the symmetric
    // start the iterates stay on the diagonal and reach (pi/3, pi/3).
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "trig_eq",
        n: 2,
        m: 1,
        f: |x| x[0] * x[0] + x[1] * x[1],
        grad: |x| vec![2.0 * x[0], 2.0 * x[1]],
        cons: |x| vec![x[0].cos() + x[1].cos() - 1.0],
        jac: |x| vec![vec![-x[0].sin(), -x[1].sin()]],
        hess: |x, y, v| {
            vec![
                (2.0 + y[0] * x[0].cos()) * v[0],
                (2.0 + y[0] * x[1].cos()) * v[1],
            ]
        },
        lower: l,
        upper: u,
        x0: vec![1.0, 1.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![FRAC_PI_3, FRAC_PI_3]),
            y: Some(vec![-2.4183991523122905]),
            f: Some(2.0 * FRAC_PI_3 * FRAC_PI_3),
        },
    });

    // Indefinite objective with the saddle direction fixed by the
    // constraint; exercises the convexification clamp.
    problems.push(DenseProblem {
        name: "saddle_equality",
        n: 2,
        m: 1,
        f: |x| x[0] * x[0] - x[1] * x[1],
        grad: |x| vec![2.0 * x[0], -2.0 * x[1]],
        cons: |x| vec![x[1] - 0.5],
        jac: |_| vec![vec![0.0, 1.0]],
        hess: |_x, _y, v| vec![2.0 * v[0], -2.0 * v[1]],
        lower: vec![-2.0, -2.0],
        upper: vec![2.0, 2.0],
        x0: vec![0.1, 1.9],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.0, 0.5]),
            y: Some(vec![-1.0]),
            f: Some(-0.25),
        },
    });

    // Strictly convex diagonal quadratic with two linear constraints in
    // four variables; solution and multipliers are exact by construction.
    let (l, u) = free(4);
    problems.push(DenseProblem {
        name: "eq_quadratic_4",
        n: 4,
        m: 2,
        f: |x| {
            0.5 * (2.0 * x[0] * x[0] + 3.0 * x[1] * x[1] + 4.0 * x[2] * x[2] + 5.0 * x[3] * x[3])
                - 0.5 * x[0]
                + 2.5 * x[1]
                - 10.0 * x[2]
                - 6.5 * x[3]
        },
        grad: |x| {
            vec![
                2.0 * x[0] - 0.5,
                3.0 * x[1] + 2.5,
                4.0 * x[2] - 10.0,
                5.0 * x[3] - 6.5,
            ]
        },
        cons: |x| vec![x[0] + x[1], x[1] + x[2] + 2.0 * x[3] - 2.0],
        jac: |_| vec![vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 2.0]],
        hess: |_x, _y, v| vec![2.0 * v[0], 3.0 * v[1], 4.0 * v[2], 5.0 * v[3]],
        lower: l,
        upper: u,
        x0: vec![0.0, 0.0, 0.0, 0.0],
        y0: vec![0.0, 0.0],
        expected: Expected::Solution {
            x: Some(vec![1.0, -1.0, 2.0, 0.5]),
            y: Some(vec![1.5, -2.0]),
            f: Some(-15.125),
        },
    });

    // Badly scaled quadratic; the gradient-based pre-scaling has to tame
    // objective and constraint magnitudes of 1e4 and 1e2.
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "ill_scaled_quadratic",
        n: 2,
        m: 1,
        f: |x| 5000.0 * (x[0] * x[0] + x[1] * x[1]),
        grad: |x| vec![10_000.0 * x[0], 10_000.0 * x[1]],
        cons: |x| vec![100.0 * (x[0] + x[1] - 1.0)],
        jac: |_| vec![vec![100.0, 100.0]],
        hess: |_x, _y, v| vec![10_000.0 * v[0], 10_000.0 * v[1]],
        lower: l,
        upper: u,
        x0: vec![2.0, -1.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.5, 0.5]),
            y: Some(vec![50.0]),
            f: Some(2500.0),
        },
    });

    // Shifted quadratic whose unconstrained-on-the-line minimizer violates
    // the box: the first variable ends on its upper bound.
    problems.push(DenseProblem {
        name: "bound_shifted_quadratic",
        n: 2,
        m: 1,
        f: |x| (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2),
        grad: |x| vec![2.0 * (x[0] - 2.0), 2.0 * (x[1] + 1.0)],
        cons: |x| vec![x[0] + x[1]],
        jac: |_| vec![vec![1.0, 1.0]],
        hess: |_x, _y, v| vec![2.0 * v[0], 2.0 * v[1]],
        lower: vec![-0.5, -INF],
        upper: vec![0.5, INF],
        x0: vec![0.0, 0.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.5, -0.5]),
            y: Some(vec![1.0]),
            f: Some(2.5),
        },
    });

    // Linear-plus-quadratic objective with a lower bound active at the
    // solution and a zero multiplier on the equality constraint.
    problems.push(DenseProblem {
        name: "bound_active_linear",
        n: 2,
        m: 1,
        f: |x| 3.0 * x[0] + (x[1] - 1.0).powi(2),
        grad: |x| vec![3.0, 2.0 * (x[1] - 1.0)],
        cons: |x| vec![x[1] - x[0] - 1.0],
        jac: |_| vec![vec![-1.0, 1.0]],
        hess: |_x, _y, v| vec![0.0, 2.0 * v[1]],
        lower: vec![0.0, 0.0],
        upper: vec![INF, INF],
        x0: vec![1.0, 1.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.0, 1.0]),
            y: Some(vec![0.0]),
            f: Some(0.0),
        },
    });

    // Square nonlinear system (as many constraints as variables) with a
    // linear objective selecting nothing: the start decides the root.
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "square_system",
        n: 2,
        m: 2,
        f: |x| x[0] + x[1],
        grad: |_| vec![1.0, 1.0],
        cons: |x| vec![x[0] * x[0] + x[1] * x[1] - 2.0, x[0] - x[1]],
        jac: |x| vec![vec![2.0 * x[0], 2.0 * x[1]], vec![1.0, -1.0]],
        hess: |_x, y, v| vec![-2.0 * y[0] * v[0], -2.0 * y[0] * v[1]],
        lower: l,
        upper: u,
        x0: vec![-1.2, -0.8],
        y0: vec![0.0, 0.0],
        expected: Expected::Solution {
            x: Some(vec![-1.0, -1.0]),
            y: Some(vec![-0.5, 0.0]),
            f: Some(-2.0),
        },
    });

    // Two parallel constraints one unit apart: the smallest inconsistent
    // problem, with the violation minimized exactly between them.
    let (l, u) = free(1);
    problems.push(DenseProblem {
        name: "inconsistent_pair",
        n: 1,
        m: 2,
        f: |_| 0.0,
        grad: |_| vec![0.0],
        cons: |x| vec![x[0] - 1.0, x[0] + 1.0],
        jac: |_| vec![vec![1.0], vec![1.0]],
        hess: |_x, _y, _v| vec![0.0],
        lower: l,
        upper: u,
        x0: vec![0.5],
        y0: vec![0.0, 0.0],
        expected: Expected::Infeasible {
            x: vec![0.0],
            v: 1.0,
        },
    });

    // The simplest equality-constrained quadratic: nearest point (in the
    // f = ||x||^2 metric) to the origin on the line x1 + x2 = 1.
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "lin_eq_quadratic",
        n: 2,
        m: 1,
        f: |x| x[0] * x[0] + x[1] * x[1],
        grad: |x| vec![2.0 * x[0], 2.0 * x[1]],
        cons: |x| vec![x[0] + x[1] - 1.0],
        jac: |_| vec![vec![1.0, 1.0]],
        hess: |_x, _y, v| vec![2.0 * v[0], 2.0 * v[1]],
        lower: l,
        upper: u,
        x0: vec![0.0, 0.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.5, 0.5]),
            y: Some(vec![1.0]),
            f: Some(0.5),
        },
    });

    // Strictly convex quadratic pulled toward (2, 0) along the diagonal
    // x1 = x2 inside the unit box; the constrained minimizer lands exactly
    // on the (1, 1) corner with a vanishing bound multiplier.
    problems.push(DenseProblem {
        name: "box_corner_quadratic",
        n: 2,
        m: 1,
        f: |x| (x[0] - 2.0).powi(2) + x[1] * x[1],
        grad: |x| vec![2.0 * (x[0] - 2.0), 2.0 * x[1]],
        cons: |x| vec![x[0] - x[1]],
        jac: |_| vec![vec![1.0, -1.0]],
        hess: |_x, _y, v| vec![2.0 * v[0], 2.0 * v[1]],
        lower: vec![0.0, 0.0],
        upper: vec![1.0, 1.0],
        x0: vec![0.5, 0.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![1.0, 1.0]),
            y: Some(vec![-2.0]),
            f: Some(2.0),
        },
    });

    // Bound constraints only (no equality constraints): separable quadratic
    // whose unconstrained minimum (-1, 2) sits outside the unit box, so
    // both bounds are active at the solution.
    problems.push(DenseProblem {
        name: "box_only_quadratic",
        n: 2,
        m: 0,
        f: |x| (x[0] + 1.0).powi(2) + (x[1] - 2.0).powi(2),
        grad: |x| vec![2.0 * (x[0] + 1.0), 2.0 * (x[1] - 2.0)],
        cons: |_| Vec::new(),
        jac: |_| Vec::new(),
        hess: |_x, _y, v| vec![2.0 * v[0], 2.0 * v[1]],
        lower: vec![0.0, 0.0],
        upper: vec![1.0, 1.0],
        x0: vec![0.5, 0.5],
        y0: vec![],
        expected: Expected::Solution {
            x: Some(vec![0.0, 1.0]),
            y: Some(vec![]),
            f: Some(2.0),
        },
    });

    // Quadratic objective with a scaled parabola constraint; the global
    // minimum of the objective is feasible, so the multiplier vanishes.
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "hs6",
        n: 2,
        m: 1,
        f: |x| (1.0 - x[0]).powi(2),
        grad: |x| vec![-2.0 * (1.0 - x[0]), 0.0],
        cons: |x| vec![10.0 * (x[1] - x[0] * x[0])],
        jac: |x| vec![vec![-20.0 * x[0], 10.0]],
        hess: |_x, y, v| vec![(2.0 + 20.0 * y[0]) * v[0], 0.0],
        lower: l,
        upper: u,
        x0: vec![-1.2, 1.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![1.0, 1.0]),
            y: Some(vec![0.0]),
            f: Some(0.0),
        },
    });

    // Pure feasibility for a circle-hyperbola intersection (constant
    // objective): four symmetric roots, so only the outcome values are
    // pinned down.
    let (l, u) = free(2);
    problems.push(DenseProblem {
        name: "hs8",
        n: 2,
        m: 2,
        f: |_| -1.0,
        grad: |_| vec![0.0, 0.0],
        cons: |x| vec![x[0] * x[0] + x[1] * x[1] - 25.0, x[0] * x[1] - 9.0],
        jac: |x| vec![vec![2.0 * x[0], 2.0 * x[1]], vec![x[1], x[0]]],
        hess: |_x, y, v| {
            vec![
                -2.0 * y[0] * v[0] - y[1] * v[1],
                -2.0 * y[0] * v[1] - y[1] * v[0],
            ]
        },
        lower: l,
        upper: u,
        x0: vec![2.0, 1.0],
        y0: vec![0.0, 0.0],
        expected: Expected::Solution {
            x: None,
            y: Some(vec![0.0, 0.0]),
            f: Some(-1.0),
        },
    });

    // Convex quadratic over a linear constraint inside a box, started at a
    // feasible interior point; one lower bound is active at the solution.
    problems.push(DenseProblem {
        name: "box_lin_eq3",
        n: 3,
        m: 1,
        f: |x| (x[0] + x[1]).powi(2) + (x[2] - 1.0).powi(2),
        grad: |x| {
            let s = 2.0 * (x[0] + x[1]);
            vec![s, s, 2.0 * (x[2] - 1.0)]
        },
        cons: |x| vec![x[0] + 2.0 * x[1] + 3.0 * x[2] - 6.0],
        jac: |_| vec![vec![1.0, 2.0, 3.0]],
        hess: |_x, _y, v| {
            let s = 2.0 * (v[0] + v[1]);
            vec![s, s, 2.0 * v[2]]
        },
        lower: vec![0.0, 0.0, 0.0],
        upper: vec![2.0, 2.0, 2.0],
        x0: vec![1.0, 1.0, 1.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.0, 6.0 / 13.0, 22.0 / 13.0]),
            y: Some(vec![6.0 / 13.0]),
            f: Some(9.0 / 13.0),
        },
    });

    // Separable strictly convex quadratic in five variables with two
    // decoupled constraints; everything rational.
    let (l, u) = free(5);
    problems.push(DenseProblem {
        name: "sep_quad5",
        n: 5,
        m: 2,
        f: |x| {
            x.iter()
                .enumerate()
                .map(|(i, &xi)| (i + 1) as f64 * xi * xi)
                .sum()
        },
        grad: |x| {
            x.iter()
                .enumerate()
                .map(|(i, &xi)| 2.0 * (i + 1) as f64 * xi)
                .collect()
        },
        cons: |x| vec![x[0] + x[1] + x[2] - 3.0, x[3] - x[4] - 1.0],
        jac: |_| {
            vec![
                vec![1.0, 1.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0, -1.0],
            ]
        },
        hess: |_x, _y, v| {
            v.iter()
                .enumerate()
                .map(|(i, &vi)| 2.0 * (i + 1) as f64 * vi)
                .collect()
        },
        lower: l,
        upper: u,
        x0: vec![0.0, 0.0, 0.0, 0.0, 0.0],
        y0: vec![0.0, 0.0],
        expected: Expected::Solution {
            x: Some(vec![
                18.0 / 11.0,
                9.0 / 11.0,
                6.0 / 11.0,
                5.0 / 9.0,
                -4.0 / 9.0,
            ]),
            y: Some(vec![36.0 / 11.0, 40.0 / 9.0]),
            f: Some(706.0 / 99.0),
        },
    });

    // Linear objective pushed along an exponential curve until a bound
    // stops it.
    problems.push(DenseProblem {
        name: "exp_bound",
        n: 2,
        m: 1,
        f: |x| x[0] + x[1],
        grad: |_| vec![1.0, 1.0],
        cons: |x| vec![x[1] - x[0].exp()],
        jac: |x| vec![vec![-x[0].exp(), 1.0]],
        hess: |x, y, v| vec![y[0] * x[0].exp() * v[0], 0.0],
        lower: vec![-2.0, -INF],
        upper: vec![2.0, INF],
        x0: vec![0.0, 1.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![-2.0, (-2.0_f64).exp()]),
            y: Some(vec![1.0]),
            f: Some(-2.0 + E.powi(-2)),
        },
    });

    // A constraint sum that the box cannot reach: the violation is
    // minimized at the far corner of the box.
    problems.push(DenseProblem {
        name: "infeasible_box",
        n: 2,
        m: 1,
        f: |x| x[0] * x[0],
        grad: |x| vec![2.0 * x[0], 0.0],
        cons: |x| vec![x[0] + x[1] - 4.0],
        jac: |_| vec![vec![1.0, 1.0]],
        hess: |_x, _y, v| vec![2.0 * v[0], 0.0],
        lower: vec![0.0, 0.0],
        upper: vec![1.0, 1.0],
        x0: vec![0.2, 0.3],
        y0: vec![0.0],
        expected: Expected::Infeasible {
            x: vec![1.0, 1.0],
            v: 2.0,
        },
    });

    // Rosenbrock-on-a-line again, but with an upper bound cutting off the
    // unconstrained-on-the-line minimizer.
    problems.push(DenseProblem {
        name: "rosenbrock_box",
        n: 2,
        m: 1,
        f: |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
        grad: |x| {
            vec![
                -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ]
        },
        cons: |x| vec![x[0] + x[1] - 1.0],
        jac: |_| vec![vec![1.0, 1.0]],
        hess: |x, _y, v| {
            let a = 1200.0 * x[0] * x[0] - 400.0 * x[1] + 2.0;
            let b = -400.0 * x[0];
            vec![a * v[0] + b * v[1], b * v[0] + 200.0 * v[1]]
        },
        lower: vec![-INF, -INF],
        upper: vec![0.5, INF],
        x0: vec![0.0, 1.0],
        y0: vec![0.0],
        expected: Expected::Solution {
            x: Some(vec![0.5, 0.5]),
            y: Some(vec![50.0]),
            f: Some(6.5),
        },
    });

    problems
}

/// Looks a problem up by registry name.
pub fn problem(name: &str) -> Result<DenseProblem> {
    registry()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownName(format!("benchmark problem `{name}`")))
}

/// Names of all registered problems, in registry order.
pub fn names() -> Vec<&'static str> {
    registry().iter().map(|p| p.name).collect()
}
