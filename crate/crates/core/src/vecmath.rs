//! Small dense vector helpers used throughout the crate.
//!
//! Everything operates on plain slices; no vector type is introduced.  These
//! are deliberately minimal — the solver's working dimensions are small and
//! all heavy lifting happens inside user-supplied operator callbacks.

/// Dot product `x' y`.  Panics on length mismatch (internal misuse).
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Euclidean norm `||x||_2`.
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Max norm `||x||_inf`; 0 for the empty vector.
pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `x + alpha * s` as a new vector.
pub fn axpy(x: &[f64], alpha: f64, s: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), s.len());
    x.iter().zip(s).map(|(a, b)| a + alpha * b).collect()
}

/// Elementwise difference `a - b`.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `alpha * x` as a new vector.
pub fn scale(x: &[f64], alpha: f64) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

/// True iff every entry is finite (no NaN, no infinities).
pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}
