//! Shared helpers for the integration tests: a small dense linear solver and
//! a brute-force reference solver for box-constrained quadratic programs.

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot smaller than `1e-12` in absolute value shows
/// up, which these tests treat as singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Evaluates the QP objective `b' s + 0.5 s' H s`.
pub fn qp_objective(h: &[Vec<f64>], b: &[f64], s: &[f64]) -> f64 {
    let n = b.len();
    let mut value = 0.0;
    for i in 0..n {
        let mut hs = 0.0;
        for j in 0..n {
            hs += h[i][j] * s[j];
        }
        value += b[i] * s[i] + 0.5 * s[i] * hs;
    }
    value
}

/// Global minimizer of a strictly convex box QP by enumerating every
/// active-set pattern.
///
/// Each coordinate is either free, fixed at its lower bound, or fixed at its
/// upper bound.  For each of the `3^n` patterns the free block is solved as a
/// dense linear system and the candidate is kept when it lies inside the box;
/// patterns that would pin a coordinate to an infinite bound are skipped.
/// Strict convexity guarantees the true minimizer appears under its own
/// active set, so the best feasible candidate is the global solution.
pub fn brute_force_box_qp(
    h: &[Vec<f64>],
    b: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> (Vec<f64>, f64) {
    let n = b.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let patterns = 3usize.pow(n as u32);
    for code in 0..patterns {
        let mut digits = code;
        let mut s = vec![0.0; n];
        let mut fixed = vec![false; n];
        let mut usable = true;
        for i in 0..n {
            match digits % 3 {
                0 => {}
                1 => {
                    usable &= lower[i].is_finite();
                    s[i] = lower[i];
                    fixed[i] = true;
                }
                _ => {
                    usable &= upper[i].is_finite();
                    s[i] = upper[i];
                    fixed[i] = true;
                }
            }
            digits /= 3;
        }
        if !usable {
            continue;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
        if !free.is_empty() {
            let mut block = vec![vec![0.0; free.len()]; free.len()];
            let mut rhs = vec![0.0; free.len()];
            for (r, &i) in free.iter().enumerate() {
                for (c, &j) in free.iter().enumerate() {
                    block[r][c] = h[i][j];
                }
                let mut ri = -b[i];
                for j in 0..n {
                    if fixed[j] {
                        ri -= h[i][j] * s[j];
                    }
                }
                rhs[r] = ri;
            }
            let Some(sf) = solve_dense(block, rhs) else {
                continue;
            };
            for (r, &i) in free.iter().enumerate() {
                s[i] = sf[r];
            }
        }
        let inside = (0..n).all(|i| s[i] >= lower[i] - 1e-9 && s[i] <= upper[i] + 1e-9);
        if !inside {
            continue;
        }
        let value = qp_objective(h, b, &s);
        if best.as_ref().map_or(true, |(_, v)| value < *v) {
            best = Some((s, value));
        }
    }
    best.expect("every all-fixed pattern with finite bounds is feasible")
}
