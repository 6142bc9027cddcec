//! Bracketed root finding for continuous functions with a sign change.

use crate::error::{Error, Result};
use crate::Real;

const MAX_ITER: usize = 256;

/// Finds `x` in `[lo, hi]` with `f(x) = 0`, given `f(lo)` and `f(hi)` of
/// opposite sign.
///
/// Secant proposals through the current bracket endpoints are interleaved
/// with plain bisection, so the bracket at least halves every second step
/// regardless of the function's shape. Convergence is declared when the
/// bracket width drops below `rel_tol` times the bracket magnitude.
pub fn bisect_secant<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, rel_tol: T) -> Result<T> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::RootFinding("bracket must be finite and ordered".into()));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::RootFinding("function not finite at bracket".into()));
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::RootFinding(format!(
            "no sign change on bracket [{}, {}]",
            a.as_f64(),
            b.as_f64()
        )));
    }

    for iter in 0..MAX_ITER {
        let width = b - a;
        let tol = rel_tol * a.abs().max(b.abs());
        if width <= tol {
            return Ok((a + b) * T::lit(0.5));
        }

        let mid = (a + b) * T::lit(0.5);
        let x = if iter % 2 == 0 {
            let s = b - fb * (b - a) / (fb - fa);
            if s.is_finite() && s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        if x <= a || x >= b {
            // Bracket has collapsed to adjacent floats.
            return Ok(mid);
        }

        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::RootFinding(format!(
                "function not finite at {}",
                x.as_f64()
            )));
        }
        if (fx > T::zero()) == (fa > T::zero()) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Err(Error::RootFinding("iteration limit reached".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_root() {
        // x^2/2 + x = 4 has the positive root -1 + 3 = 2.
        let r = bisect_secant(|x: f64| 0.5 * x * x + x - 4.0, 0.0, 4.0, 1e-14).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn root_at_bracket_end() {
        let r = bisect_secant(|x: f64| x - 1.0, 1.0, 2.0, 1e-14).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn flat_then_steep() {
        // Nearly flat left of the root; secant alone would crawl.
        let f = |x: f64| (x - 0.9).powi(7) + 1e-9 * x - 0.9e-9;
        let r = bisect_secant(f, 0.0, 1.0, 1e-13).unwrap();
        assert!((r - 0.9).abs() < 1e-6, "got {r}");
    }

    #[test]
    fn missing_sign_change_is_an_error() {
        let r = bisect_secant(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::RootFinding(_))));
    }

    #[test]
    fn tiny_bracket_scale() {
        let r = bisect_secant(|x: f64| x - 1e-9, 0.0, 1e-3, 1e-12).unwrap();
        assert!((r - 1e-9).abs() < 1e-15 + 1e-12 * 1e-9);
    }
}
