//! Bracketed root finding for continuous increasing functions.
//!
//! Every target function in this crate is strictly monotone on a known
//! bracket, so a derivative-free bracketing method always converges. Each
//! step tries a regula-falsi point with the Illinois modification and falls
//! back to bisection whenever the secant step leaves the bracket or fails to
//! halve it.

use crate::error::{Error, Result};

/// Stopping rule for [`solve_increasing`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Absolute tolerance on the function value.
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl RootConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Finds `x` in `[lo, hi]` with `|f(x)| <= cfg.abs_tol`, for `f` increasing
/// with `f(lo) <= 0 <= f(hi)`.
///
/// When the bracket shrinks to adjacent floating-point values before the
/// tolerance is met, the endpoint with the smaller residual is returned: no
/// representable point does better.
pub fn solve_increasing<F>(mut f: F, lo: f64, hi: f64, cfg: &RootConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    if f_lo.abs() <= cfg.abs_tol {
        return Ok(lo);
    }
    let mut f_hi = f(hi);
    if f_hi.abs() <= cfg.abs_tol {
        return Ok(hi);
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: if f_lo > 0.0 { f_lo } else { f_hi },
        });
    }

    // -1: last update moved `lo`, +1: moved `hi`.
    let mut last_side = 0i8;
    let mut bisect_next = false;
    for iter in 0..cfg.max_iter {
        let width = hi - lo;
        let mut x = if bisect_next {
            0.5 * (lo + hi)
        } else {
            hi - f_hi * (hi - lo) / (f_hi - f_lo)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        if !(x > lo && x < hi) {
            // lo and hi are adjacent doubles
            return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
        }

        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::NoConvergence {
                iterations: iter + 1,
                residual: fx,
            });
        }
        if fx.abs() <= cfg.abs_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
            if last_side == -1 {
                f_hi *= 0.5;
            }
            last_side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if last_side == 1 {
                f_lo *= 0.5;
            }
            last_side = 1;
        }
        bisect_next = hi - lo > 0.5 * width;
    }

    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: f_lo.abs().min(f_hi.abs()),
    })
}

/// Newton iteration safeguarded by a bracket, for `f` increasing on
/// `[lo, hi]` with `f(lo) <= 0 <= f(hi)`. `fdf` returns the value and the
/// derivative; a step leaving the bracket, or one that fails to halve the
/// residual, is replaced by bisection.
pub fn solve_increasing_newton<F>(mut fdf: F, lo: f64, hi: f64, cfg: &RootConfig) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, _) = fdf(lo);
    if f_lo.abs() <= cfg.abs_tol {
        return Ok(lo);
    }
    let (f_hi, _) = fdf(hi);
    if f_hi.abs() <= cfg.abs_tol {
        return Ok(hi);
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: if f_lo > 0.0 { f_lo } else { f_hi },
        });
    }

    let mut x = 0.5 * (lo + hi);
    let mut prev_abs = f64::INFINITY;
    for iter in 0..cfg.max_iter {
        let (fx, dfx) = fdf(x);
        if fx.is_nan() {
            return Err(Error::NoConvergence {
                iterations: iter + 1,
                residual: fx,
            });
        }
        if fx.abs() <= cfg.abs_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let slow = fx.abs() > 0.5 * prev_abs;
        prev_abs = fx.abs();
        let next = if newton > lo && newton < hi && !slow {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if !(next > lo && next < hi) {
            return Ok(x);
        }
        x = next;
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: fdf(x).0,
    })
}
