//! Bracketed scalar root finding.
//!
//! Bisection keeps a guaranteed bracket; a Newton step is taken whenever the
//! derivative is available and large enough in magnitude to be trustworthy.
//! The period-map inversions hit functions whose derivative vanishes at the
//! bracket endpoints, so pure Newton is unsafe there.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;
/// Newton steps are only attempted when |f'| exceeds this.
const NEWTON_DERIV_FLOOR: f64 = 1e-6;

/// Find the root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` must not
/// have the same strict sign. `df` is an optional analytic derivative.
///
/// Converges to a combined tolerance `|step| <= abs_tol + rel_tol*|x|`.
pub fn bracketed_root<F, D>(
    f: F,
    df: Option<D>,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Domain(format!(
            "no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
        )));
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        let width = hi - lo;
        if width <= abs_tol + rel_tol * x.abs() {
            return Ok(0.5 * (lo + hi));
        }

        // Prefer a Newton step from the current iterate when it stays
        // strictly inside the bracket.
        let mut next = f64::NAN;
        if let Some(ref d) = df {
            let dx = d(x);
            if dx.abs() > NEWTON_DERIV_FLOOR {
                let cand = x - fx / dx;
                if cand > lo && cand < hi {
                    next = cand;
                }
            }
        }
        if !next.is_finite() {
            // Secant through the bracket endpoints, safeguarded by bisection.
            let cand = (lo * fhi - hi * flo) / (fhi - flo);
            let margin = 0.01 * width;
            next = if cand > lo + margin && cand < hi - margin {
                cand
            } else {
                0.5 * (lo + hi)
            };
        }
        x = next;
    }
    let _ = fhi;
    Err(Error::NonConvergence(format!(
        "bracketed root did not converge on [{lo}, {hi}]"
    )))
}

/// Convenience wrapper for roots without an analytic derivative.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    bracketed_root(f, None::<fn(f64) -> f64>, lo, hi, abs_tol, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt2() {
        let r = bracketed_root(|x| x * x - 2.0, Some(|x: f64| 2.0 * x), 0.0, 2.0, 1e-15, 1e-15)
            .unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn handles_flat_derivative_at_endpoint() {
        // f'(0) = 0; Newton from the midpoint must be safeguarded.
        let r = bisect(|x| x * x * x - 1e-6, 0.0, 1.0, 1e-15, 1e-14).unwrap();
        assert!((r - 1e-2).abs() < 1e-12);
    }

    #[test]
    fn tiny_root_keeps_relative_precision() {
        let target = 1e-12;
        let r = bracketed_root(
            |x: f64| x * x - target,
            Some(|x: f64| 2.0 * x),
            0.0,
            1.0,
            0.0,
            1e-14,
        )
        .unwrap();
        assert!((r - 1e-6).abs() / 1e-6 < 1e-10);
    }

    #[test]
    fn rejects_no_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 1e-12).is_err());
    }
}
