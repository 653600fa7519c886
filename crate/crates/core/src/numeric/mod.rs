//! Special functions, root finding and summation used by the economic models.

mod beta;
mod sum;

pub use beta::{ln_beta, regularized_incomplete_beta};
pub(crate) use beta::{incomplete_beta_pair, log_beta_kernel};
pub use sum::{exact_sum, ExactSum};

/// Safeguarded Newton iteration for an increasing function on `[lo, hi]`.
///
/// `f` returns `(value, derivative)`; the root of `value` is bracketed by
/// `f(lo) <= 0 <= f(hi)`. Newton steps that leave the current bracket fall
/// back to bisection.
pub(crate) fn bracketed_newton<F>(mut lo: f64, mut hi: f64, x_tol: f64, f_tol: f64, mut f: F) -> f64
where
    F: FnMut(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let (fx, dfx) = f(x);
        if fx.abs() <= f_tol {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= x_tol.max(4.0 * f64::EPSILON * hi.abs()) {
            return 0.5 * (lo + hi);
        }
        let newton = x - fx / dfx;
        x = if dfx.is_finite() && dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    x
}
