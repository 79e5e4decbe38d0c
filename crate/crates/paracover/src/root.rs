//! Bracketed scalar root finding: secant steps safeguarded by bisection.

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of a bracketed solve, including the diagnostics the CLI reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootReport {
    pub root: f64,
    /// Bracket the search started from.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Function value at the returned root.
    pub residual: f64,
}

/// Find a root of `f` on `[lo, hi]`, requiring a sign change.
///
/// Each iteration tries a secant step through the current bracket endpoints
/// and falls back to bisection whenever the step leaves the bracket or fails
/// to shrink it geometrically, so convergence to absolute width `tol` is
/// guaranteed within `max_iter` for any bracket the tolerance can resolve.
pub(crate) fn solve_bracketed<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RootReport>
where
    F: FnMut(f64) -> Result<f64>,
{
    debug_assert!(lo < hi && tol > 0.0);
    let f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(RootReport {
            root: lo,
            bracket: (lo, hi),
            iterations: 0,
            residual: 0.0,
        });
    }
    let f_hi = f(hi)?;
    if f_hi == 0.0 {
        return Ok(RootReport {
            root: hi,
            bracket: (lo, hi),
            iterations: 0,
            residual: 0.0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot { lo, hi, f_lo, f_hi });
    }

    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f_lo, f_hi);
    let mut force_bisect = false;
    for iter in 1..=max_iter {
        let width = b - a;
        let mut x = if force_bisect {
            a + 0.5 * width
        } else {
            b - fb * width / (fb - fa)
        };
        // keep the candidate strictly interior
        if !x.is_finite() || x <= a || x >= b {
            x = a + 0.5 * width;
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(RootReport {
                root: x,
                bracket: (lo, hi),
                iterations: iter,
                residual: 0.0,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // a secant step that barely moved an endpoint gets a bisection next
        force_bisect = (b - a) > 0.5 * width;
        if b - a <= tol {
            let (root, residual) = if fa.abs() <= fb.abs() {
                (a, fa)
            } else {
                (b, fb)
            };
            return Ok(RootReport {
                root,
                bracket: (lo, hi),
                iterations: iter,
                residual,
            });
        }
    }
    Err(Error::RootNotConverged {
        tol,
        max_iter,
        width: b - a,
    })
}
