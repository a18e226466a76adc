//! Safeguarded Newton iteration with a bisection fallback for strictly
//! increasing scalar equations g(y) = 0.
//!
//! Used by the per-coordinate resolvent solver, where
//! g(y) = y + λ f(y) − c is increasing whenever f is nondecreasing.

use crate::error::{Error, Result};

pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// Find a bracket [lo, hi] with g(lo) ≤ 0 ≤ g(hi) around `start`, by
/// doubling steps. Expects g nondecreasing.
pub fn bracket_increasing(g: impl Fn(f64) -> f64, start: f64, coord: usize) -> Result<Bracket> {
    let mut lo = start;
    let mut hi = start;
    let g0 = g(start);
    if g0 > 0.0 {
        let mut step = 1.0_f64.max(start.abs() * 1e-3);
        for _ in 0..200 {
            lo = hi - step;
            if g(lo) <= 0.0 {
                return Ok(Bracket { lo, hi });
            }
            hi = lo;
            step *= 2.0;
        }
    } else if g0 < 0.0 {
        let mut step = 1.0_f64.max(start.abs() * 1e-3);
        for _ in 0..200 {
            hi = lo + step;
            if g(hi) >= 0.0 {
                return Ok(Bracket { lo, hi });
            }
            lo = hi;
            step *= 2.0;
        }
    } else {
        return Ok(Bracket { lo, hi });
    }
    Err(Error::SolverFailure {
        coord,
        residual: f64::INFINITY,
        tol: 0.0,
        budget: 200,
    })
}

/// Solve g(y) = 0 for nondecreasing g with g(lo) ≤ 0 ≤ g(hi).
///
/// Newton steps are accepted while they stay inside the current bracket
/// and at least halve the previous step (otherwise the iteration could
/// creep across a wide bracket); any rejected step becomes a bisection,
/// which guarantees convergence. Terminates when |g(y)| ≤ tol or the
/// bracket collapses to machine width.
pub fn solve_increasing(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    bracket: Bracket,
    start: f64,
    tol: f64,
    max_iter: usize,
    coord: usize,
) -> Result<f64> {
    let Bracket { mut lo, mut hi } = bracket;
    let mut y = start.clamp(lo, hi);
    let mut best = (y, f64::INFINITY);
    let mut dx_old = hi - lo;
    for _ in 0..max_iter {
        let gy = g(y);
        let agy = gy.abs();
        if agy < best.1 {
            best = (y, agy);
        }
        if agy <= tol {
            return Ok(y);
        }
        if gy > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let width = hi - lo;
        if width <= f64::EPSILON * (1.0 + y.abs()) {
            // As converged as binary64 permits.
            return Ok(best.0);
        }
        let d = dg(y);
        let newton = y - gy / d;
        let step = (newton - y).abs();
        y = if newton.is_finite() && newton > lo && newton < hi && step <= 0.5 * dx_old {
            dx_old = step;
            newton
        } else {
            dx_old = 0.5 * width;
            0.5 * (lo + hi)
        };
    }
    if best.1 <= tol * 16.0 {
        return Ok(best.0);
    }
    Err(Error::SolverFailure {
        coord,
        residual: best.1,
        tol,
        budget: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        // y + y^3 = 2 has the root 1.
        let g = |y: f64| y + y * y * y - 2.0;
        let dg = |y: f64| 1.0 + 3.0 * y * y;
        let br = bracket_increasing(g, 2.0, 0).unwrap();
        let root = solve_increasing(g, dg, br, 2.0, 1e-14, 200, 0).unwrap();
        assert!((root - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exp_extreme_start() {
        // y + e^y = 1000: root near ln(1000 - y); start far right where
        // e^y overflows and the bracket search must back off.
        let g = |y: f64| y + y.exp() - 1000.0;
        let dg = |y: f64| 1.0 + y.exp();
        let br = bracket_increasing(g, 800.0, 0).unwrap();
        let root = solve_increasing(g, dg, br, 800.0, 1e-10, 200, 0).unwrap();
        assert!((root + root.exp() - 1000.0).abs() <= 1e-10);
    }

    #[test]
    fn flat_function_bisection_fallback() {
        // Nearly flat region forces bisection safeguards.
        let g = |y: f64| (y - 3.0).powi(3);
        let dg = |y: f64| 3.0 * (y - 3.0).powi(2);
        let br = bracket_increasing(g, 0.0, 0).unwrap();
        let root = solve_increasing(g, dg, br, 0.0, 1e-12, 200, 0).unwrap();
        assert!((root - 3.0).abs() < 1e-3);
    }
}
