//! Period functions of the three reduced oscillators and their monotone
//! inverses.
//!
//! For a level value c the minimal period is a turning-point integral
//! L(c) = 2 ∮ dy / sqrt(c - w(y)) over the admissible y-range, where w is
//! the potential part of the first integral. The endpoint singularities are
//! removed by the substitution y = N ∓ u² at each turning point N, which
//! leaves a smooth integrand built from the stable divided difference
//! (a^{p+1} - b^{p+1})/(a - b). The derivative of the rogue-case period is
//! evaluated from a singularity-free integral representation whose kernel
//! has a removable singularity at y = 1, handled by a local series branch.

use crate::error::{Error, Result};
use crate::phase_plane::{self, OdeCase, Variant};
use crate::quad;

const PI: f64 = std::f64::consts::PI;

/// Absolute / relative tolerances for the period quadratures.
const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-12;

/// Below this level value the focusing/defocusing period is returned as the
/// linearized limit 2π. Kept tiny so that inversion near s = 2π (where the
/// level value scales like (2π - s)^{2/(p-1)}) still resolves c accurately.
const SMALL_C_CUTOFF: f64 = 1e-13;

/// `(a^{p+1} - b^{p+1}) / (a - b)` for a, b >= 0, stable when a ≈ b.
fn pow_diff_quot(p: f64, a: f64, b: f64) -> f64 {
    let scale = a.max(b);
    if scale == 0.0 {
        return 0.0;
    }
    let d = a - b;
    if d.abs() < 1e-4 * scale {
        // Midpoint expansion: (p+1) m^{p-2} (m² + p(p-1) d²/24) + O(d⁴).
        let m = 0.5 * (a + b);
        (p + 1.0) * m.powf(p - 2.0) * (m * m + p * (p - 1.0) * d * d / 24.0)
    } else {
        (a.powf(p + 1.0) - b.powf(p + 1.0)) / d
    }
}

/// Minimal period of the orbit at level `c`.
pub fn period(case: OdeCase, p: f64, c: f64) -> Result<f64> {
    let case = OdeCase { p, ..case };
    match case.variant {
        Variant::PlusFocusing => {
            if c < 0.0 {
                return Err(Error::Domain(format!("c={c} negative for the focusing case")));
            }
            if c <= SMALL_C_CUTOFF {
                return Ok(2.0 * PI);
            }
            let (_, n) = phase_plane::amplitude_bounds(case, c)?;
            // Quarter period from y=0 to y=N; y = N - u².
            let h = |y: f64| (n + y) + 2.0 / (p + 1.0) * pow_diff_quot(p, n, y);
            let quarter = quad::adaptive(
                |u| 2.0 / h(n - u * u).sqrt(),
                0.0,
                n.sqrt(),
                QUAD_ABS,
                QUAD_REL,
            )?;
            Ok(4.0 * quarter)
        }
        Variant::MinusDefocusing => {
            let c_max = (p - 1.0) / (p + 1.0);
            if c < 0.0 || c >= c_max {
                return Err(Error::Domain(format!(
                    "c={c} outside [0, {c_max}) for the defocusing case"
                )));
            }
            if c <= SMALL_C_CUTOFF {
                return Ok(2.0 * PI);
            }
            let (_, n) = phase_plane::amplitude_bounds(case, c)?;
            let h = |y: f64| (n + y) - 2.0 / (p + 1.0) * pow_diff_quot(p, n, y);
            let quarter = quad::adaptive(
                |u| 2.0 / h(n - u * u).sqrt(),
                0.0,
                n.sqrt(),
                QUAD_ABS,
                QUAD_REL,
            )?;
            Ok(4.0 * quarter)
        }
        Variant::Rogue => {
            let c_min = (1.0 - p) / (1.0 + p);
            if c >= 0.0 || c < c_min {
                return Err(Error::Domain(format!(
                    "c={c} outside [{c_min}, 0) for the rogue case"
                )));
            }
            if c - c_min <= 1e-10 * c_min.abs() {
                return Ok(2.0 * PI / (p - 1.0).sqrt());
            }
            let (half_left, half_right) = rogue_half_period_integrals(p, c)?;
            Ok(2.0 * (half_left + half_right))
        }
    }
}

/// The two halves of ∫_{N-}^{N+} dy / sqrt(c - a(y)), split at y = 1 and
/// desingularized by y = N∓ ± u².
fn rogue_half_period_integrals(p: f64, c: f64) -> Result<(f64, f64)> {
    let case = OdeCase { variant: Variant::Rogue, p };
    let (n_minus, n_plus) = phase_plane::amplitude_bounds(case, c)?;
    // c - a(y) = (y - N-) g_minus(y) = (N+ - y) g_plus(y).
    let g_minus = |y: f64| (y + n_minus) - 2.0 / (p + 1.0) * pow_diff_quot(p, n_minus, y);
    let g_plus = |y: f64| 2.0 / (p + 1.0) * pow_diff_quot(p, n_plus, y) - (n_plus + y);
    let left = quad::adaptive(
        |u| 2.0 / g_minus(n_minus + u * u).sqrt(),
        0.0,
        (1.0 - n_minus).sqrt(),
        QUAD_ABS,
        QUAD_REL,
    )?;
    let right = quad::adaptive(
        |u| 2.0 / g_plus(n_plus - u * u).sqrt(),
        0.0,
        (n_plus - 1.0).sqrt(),
        QUAD_ABS,
        QUAD_REL,
    )?;
    Ok((left, right))
}

// --- kernel functions for the rogue period derivative -----------------------

fn k_fun(p: f64, y: f64) -> f64 {
    1.0 - y * y + 2.0 / (p + 1.0) * (y.powf(p + 1.0) - 1.0)
}

fn k_prime(p: f64, y: f64) -> f64 {
    2.0 * (y.powf(p) - y)
}

fn k_second(p: f64, y: f64) -> f64 {
    2.0 * (p * y.powf(p - 1.0) - 1.0)
}

/// Φ(y) = 3 y^{2-p} k''(y) ∫₁^y t^{p-2} k(t) dt − k(y) k'(y), for y > 0.
pub fn phi_function(p: f64, y: f64) -> Result<f64> {
    if y <= 0.0 {
        return Err(Error::Domain(format!("phi_function requires y > 0, got {y}")));
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    let integrand = |t: f64| t.powf(p - 2.0) * k_fun(p, t);
    let j = if y > 1.0 {
        quad::adaptive(integrand, 1.0, y, 1e-14, 1e-12)?
    } else {
        -quad::adaptive(integrand, y, 1.0, 1e-14, 1e-12)?
    };
    Ok(3.0 * y.powf(2.0 - p) * k_second(p, y) * j - k_fun(p, y) * k_prime(p, y))
}

// --- truncated power series in h = y - 1 for the kernel Ψ = Φ / k'⁴ ---------

const SLEN: usize = 16;
type Series = [f64; SLEN];

/// Half-width of the series branch around y = 1.
const SERIES_HALF_WIDTH: f64 = 0.05;

fn falling(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x - i as f64))
}

fn s_mul(a: &Series, b: &Series) -> Series {
    let mut out = [0.0; SLEN];
    for i in 0..SLEN {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..SLEN - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

fn s_deriv(a: &Series) -> Series {
    let mut out = [0.0; SLEN];
    for i in 1..SLEN {
        out[i - 1] = a[i] * i as f64;
    }
    out
}

fn s_integ(a: &Series) -> Series {
    let mut out = [0.0; SLEN];
    for i in 0..SLEN - 1 {
        out[i + 1] = a[i] / (i + 1) as f64;
    }
    out
}

/// Series of (1 + h)^alpha.
fn s_binom(alpha: f64) -> Series {
    let mut out = [0.0; SLEN];
    let mut fact = 1.0;
    for n in 0..SLEN {
        if n > 0 {
            fact *= n as f64;
        }
        out[n] = falling(alpha, n) / fact;
    }
    out
}

fn s_eval(a: &Series, h: f64, degree: usize) -> f64 {
    let mut acc = 0.0;
    for i in (0..=degree.min(SLEN - 1)).rev() {
        acc = acc * h + a[i];
    }
    acc
}

/// Taylor coefficients of Ψ(1+h) = Φ(1+h)/k'(1+h)⁴ around h = 0.
///
/// Both Φ and k'⁴ have fourth-order zeros at h = 0; the leading ratio is the
/// finite limit (p+3)/(48(p-1)²). Valid through degree SLEN-5.
fn psi_series(p: f64) -> Series {
    // k(1+h): k(1) = k'(1) = 0, k''(1) = 2(p-1), k^(n)(1) = 2·falling(p, n-1).
    let mut k = [0.0; SLEN];
    k[2] = p - 1.0;
    let mut fact = 2.0;
    for n in 3..SLEN {
        fact *= n as f64;
        k[n] = 2.0 * falling(p, n - 1) / fact;
    }
    let kp = s_deriv(&k);
    let kpp = s_deriv(&kp);
    let j = s_integ(&s_mul(&s_binom(p - 2.0), &k));
    let mut phi = s_mul(&s_mul(&s_binom(2.0 - p), &kpp), &j);
    for v in phi.iter_mut() {
        *v *= 3.0;
    }
    let kkp = s_mul(&k, &kp);
    for i in 0..SLEN {
        phi[i] -= kkp[i];
    }
    let kp2 = s_mul(&kp, &kp);
    let kp4 = s_mul(&kp2, &kp2);
    // Shift out the common fourth-order zero (low coefficients are
    // analytically zero; drop the rounding residue).
    let mut num = [0.0; SLEN];
    let mut den = [0.0; SLEN];
    for i in 0..SLEN - 4 {
        num[i] = phi[i + 4];
        den[i] = kp4[i + 4];
    }
    let mut psi = [0.0; SLEN];
    for n in 0..SLEN - 4 {
        let mut acc = num[n];
        for j in 0..n {
            acc -= psi[j] * den[n - j];
        }
        psi[n] = acc / den[0];
    }
    psi
}

/// Ψ(y) = Φ(y)/k'(y)⁴ with the removable singularity at y = 1 bridged by the
/// local series.
fn psi_kernel(p: f64, y: f64, series: &Series) -> Result<f64> {
    let h = y - 1.0;
    if h.abs() <= SERIES_HALF_WIDTH {
        Ok(s_eval(series, h, SLEN - 5))
    } else {
        let kp = k_prime(p, y);
        Ok(phi_function(p, y)? / (kp * kp * kp * kp))
    }
}

/// Derivative L'(c) of the rogue-case period, for c strictly inside
/// ((1-p)/(1+p), 0).
pub fn period_derivative_rogue(p: f64, c: f64) -> Result<f64> {
    let c_min = (1.0 - p) / (1.0 + p);
    if c <= c_min || c >= 0.0 {
        return Err(Error::Domain(format!("c={c} outside ({c_min}, 0)")));
    }
    let case = OdeCase { variant: Variant::Rogue, p };
    let (n_minus, n_plus) = phase_plane::amplitude_bounds(case, c)?;
    let series = psi_series(p);
    let g_minus = |y: f64| (y + n_minus) - 2.0 / (p + 1.0) * pow_diff_quot(p, n_minus, y);
    let g_plus = |y: f64| 2.0 / (p + 1.0) * pow_diff_quot(p, n_plus, y) - (n_plus + y);
    let f = |y: f64| -> f64 {
        y.powf(p - 2.0) * psi_kernel(p, y, &series).unwrap_or(f64::NAN)
    };
    // ∫ f(y) sqrt(c - a(y)) dy, desingularized as in the period itself; the
    // sqrt factor vanishes at the ends so the substitution gives weight
    // 2u² sqrt(g).
    let left = quad::adaptive(
        |u| {
            let y = n_minus + u * u;
            2.0 * u * u * g_minus(y).sqrt() * f(y)
        },
        0.0,
        (1.0 - n_minus).sqrt(),
        QUAD_ABS,
        QUAD_REL,
    )?;
    let right = quad::adaptive(
        |u| {
            let y = n_plus - u * u;
            2.0 * u * u * g_plus(y).sqrt() * f(y)
        },
        0.0,
        (n_plus - 1.0).sqrt(),
        QUAD_ABS,
        QUAD_REL,
    )?;
    let c_tilde = c - c_min;
    let value = 8.0 * p * (p - 1.0) * (left + right) / c_tilde;
    if !value.is_finite() {
        return Err(Error::QuadratureFailure("non-finite period derivative".into()));
    }
    Ok(value)
}

/// Lower end of the period image for a case: 2π/√(p-1) for the rogue case,
/// 2π otherwise.
pub fn base_period(case: OdeCase) -> f64 {
    match case.variant {
        Variant::Rogue => 2.0 * PI / (case.p - 1.0).sqrt(),
        _ => 2.0 * PI,
    }
}

/// Reparametrization of the level value by an unbounded variable, chosen so
/// that bisection keeps relative precision at *both* ends of the c-range:
/// focusing c = e^l; defocusing c = c_max/(1+e^{-l}); rogue
/// c = c_min/(1+e^{l-}) approaches 0 like -e^{-l} and the center value like
/// c_min + O(e^{l}).
fn c_of_param(case: OdeCase, l: f64) -> f64 {
    let p = case.p;
    match case.variant {
        Variant::PlusFocusing => l.exp(),
        Variant::MinusDefocusing => {
            let c_max = (p - 1.0) / (p + 1.0);
            c_max / (1.0 + (-l).exp())
        }
        Variant::Rogue => {
            let c_min = (1.0 - p) / (1.0 + p);
            c_min / (1.0 + l.exp())
        }
    }
}

/// Inverse of the period map: the level value c with period(c) = s.
///
/// Endpoint values are returned exactly: s = 2π gives 0 for the
/// focusing/defocusing cases, s = 2π/√(p-1) gives (1-p)/(1+p) for the rogue
/// case.
pub fn invert_period(case: OdeCase, p: f64, s: f64) -> Result<f64> {
    let case = OdeCase { p, ..case };
    let base = base_period(case);
    let endpoint_c = match case.variant {
        Variant::PlusFocusing | Variant::MinusDefocusing => 0.0,
        Variant::Rogue => (1.0 - p) / (1.0 + p),
    };
    // Image orientation: focusing periods lie below 2π, the others above.
    let increasing = !matches!(case.variant, Variant::PlusFocusing);
    let margin = 1e-12 * base;
    if (s - base).abs() <= margin {
        return Ok(endpoint_c);
    }
    let out_of_image = if increasing { s < base } else { s > base };
    if out_of_image || s <= 0.0 {
        return Err(Error::Domain(format!(
            "s={s} outside the period image (base period {base})"
        )));
    }

    // Period as a function of the reparametrized level; decreasing in l for
    // the rogue case, increasing otherwise.
    let l_period = |l: f64| period(case, p, c_of_param(case, l));
    let target_above = |val: f64| val >= s;

    // Bracket by geometric expansion from l = 0.
    let mut l_lo = 0.0f64;
    let mut l_hi = 0.0f64;
    let v0 = l_period(0.0)?;
    let dir_up_increases = match case.variant {
        Variant::PlusFocusing => false,  // larger c, smaller period
        Variant::MinusDefocusing => true, // c -> c_max, period diverges
        Variant::Rogue => true,           // c -> 0-, period diverges
    };
    let mut step = 1.0f64;
    if target_above(v0) == dir_up_increases {
        // Need to move down in l to bracket.
        loop {
            l_lo -= step;
            step *= 2.0;
            let v = l_period(l_lo)?;
            if target_above(v) != target_above(v0) {
                break;
            }
            if step > 1e6 {
                return Err(Error::NonConvergence(format!("no bracket for s={s}")));
            }
        }
        l_hi = 0.0;
    } else {
        loop {
            l_hi += step;
            step *= 2.0;
            let v = l_period(l_hi)?;
            if target_above(v) != target_above(v0) {
                break;
            }
            if step > 1e6 {
                return Err(Error::NonConvergence(format!("no bracket for s={s}")));
            }
        }
        l_lo = 0.0;
    }

    // Bisection in the reparametrized variable; converge on the width of the
    // c-bracket, not on |L - s| (the latter exits too early where L is flat).
    let mut best;
    for _ in 0..200 {
        let mid = 0.5 * (l_lo + l_hi);
        let v = l_period(mid)?;
        best = c_of_param(case, mid);
        let above = v > s;
        if above == dir_up_increases {
            l_hi = mid;
        } else {
            l_lo = mid;
        }
        let (ca, cb) = (c_of_param(case, l_lo), c_of_param(case, l_hi));
        let c_scale = ca.abs().max(cb.abs());
        if (cb - ca).abs() <= 1e-10 * c_scale
            || l_hi - l_lo < 5e-14 * (1.0 + l_lo.abs().max(l_hi.abs()))
        {
            return Ok(best);
        }
    }
    Err(Error::NonConvergence(format!("period inversion stalled at s={s}")))
}

/// Bundled period map for one case: evaluation, derivative (rogue case) and
/// monotone inverse.
#[derive(Debug, Clone, Copy)]
pub struct PeriodMap {
    pub case: OdeCase,
}

impl PeriodMap {
    pub fn new(case: OdeCase) -> Self {
        PeriodMap { case }
    }

    /// Admissible open range of level values.
    pub fn domain(&self) -> (f64, f64) {
        let p = self.case.p;
        match self.case.variant {
            Variant::PlusFocusing => (0.0, f64::INFINITY),
            Variant::MinusDefocusing => (0.0, (p - 1.0) / (p + 1.0)),
            Variant::Rogue => ((1.0 - p) / (1.0 + p), 0.0),
        }
    }

    pub fn eval(&self, c: f64) -> Result<f64> {
        period(self.case, self.case.p, c)
    }

    pub fn derivative(&self, c: f64) -> Result<f64> {
        match self.case.variant {
            Variant::Rogue => period_derivative_rogue(self.case.p, c),
            _ => Err(Error::Domain(
                "analytic period derivative is only provided for the rogue case".into(),
            )),
        }
    }

    pub fn invert(&self, s: f64) -> Result<f64> {
        invert_period(self.case, self.case.p, s)
    }
}
