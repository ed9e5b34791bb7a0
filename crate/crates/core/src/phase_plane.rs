//! Phase-plane analysis of the three reduced oscillator equations
//!
//!   focusing:    y'' = -y - |y|^{p-1} y
//!   defocusing:  y'' = -y + |y|^{p-1} y
//!   rogue:       y'' =  y - |y|^{p-1} y
//!
//! Bounded orbits are level sets of the first integral; this module builds
//! orbit evaluators (periodic, equilibrium, homoclinic), the normalized
//! positive family of the rogue case, and turning-point data.

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, Trajectory};
use crate::roots;

/// Which reduced equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    PlusFocusing,
    MinusDefocusing,
    Rogue,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeCase {
    pub variant: Variant,
    pub p: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PhasePoint {
    pub xi: f64,
    pub eta: f64,
}

/// `sign(y) * |y|^p`, well-defined for non-integer p and y < 0.
#[inline]
pub fn sgn_pow(y: f64, p: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        y.signum() * y.abs().powf(p)
    }
}

/// Largest amplitude of the positive rogue-case orbits: `((p+1)/2)^{1/(p-1)}`.
pub fn rogue_max_amplitude(p: f64) -> f64 {
    (0.5 * (p + 1.0)).powf(1.0 / (p - 1.0))
}

/// `a(xi) = -xi^2 + (2/(p+1)) xi^{p+1}` — the first integral restricted to
/// the positive position axis of the rogue case.
pub fn a_value(p: f64, xi: f64) -> f64 {
    -xi * xi + 2.0 / (p + 1.0) * xi.abs().powf(p + 1.0)
}

/// Inverse of `a` on `[1, rogue_max_amplitude(p)]`, where it increases from
/// `(1-p)/(1+p)` to 0.
pub fn a_inverse(p: f64, c: f64) -> Result<f64> {
    let c_min = (1.0 - p) / (1.0 + p);
    if !(c_min..=0.0).contains(&c) {
        return Err(Error::Domain(format!(
            "c={c} outside [{c_min}, 0] for the normalized family"
        )));
    }
    if c == 0.0 {
        return Ok(rogue_max_amplitude(p));
    }
    let hi = rogue_max_amplitude(p);
    // a'(xi) = 2 xi (xi^{p-1} - 1) vanishes at xi = 1; keep the bracket.
    roots::bracketed_root(
        |x| a_value(p, x) - c,
        Some(|x: f64| 2.0 * x * (x.powf(p - 1.0) - 1.0)),
        1.0,
        hi,
        1e-15,
        1e-14,
    )
}

impl OdeCase {
    pub fn new(variant: Variant, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::Domain(format!("p must exceed 1, got {p}")));
        }
        Ok(OdeCase { variant, p })
    }

    /// Right-hand side of `y'' = accel(y)`.
    pub fn accel(&self, y: f64) -> f64 {
        let nl = sgn_pow(y, self.p);
        match self.variant {
            Variant::PlusFocusing => -y - nl,
            Variant::MinusDefocusing => -y + nl,
            Variant::Rogue => y - nl,
        }
    }

    /// Derivative of the right-hand side, for linearization at equilibria.
    pub fn accel_prime(&self, y: f64) -> f64 {
        let nl = self.p * y.abs().powf(self.p - 1.0);
        match self.variant {
            Variant::PlusFocusing => -1.0 - nl,
            Variant::MinusDefocusing => -1.0 + nl,
            Variant::Rogue => 1.0 - nl,
        }
    }

    /// Conserved quantity whose level sets are the orbits.
    pub fn first_integral(&self, pt: PhasePoint) -> f64 {
        let PhasePoint { xi, eta } = pt;
        let nl = 2.0 / (self.p + 1.0) * xi.abs().powf(self.p + 1.0);
        match self.variant {
            Variant::PlusFocusing => eta * eta + xi * xi + nl,
            Variant::MinusDefocusing => eta * eta + xi * xi - nl,
            Variant::Rogue => eta * eta - xi * xi + nl,
        }
    }

    /// Admissible range of the first-integral value for bounded orbits.
    pub fn c_range(&self) -> (f64, f64) {
        let p = self.p;
        match self.variant {
            Variant::PlusFocusing => (0.0, f64::INFINITY),
            Variant::MinusDefocusing => (0.0, (p - 1.0) / (p + 1.0)),
            Variant::Rogue => ((1.0 - p) / (1.0 + p), 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    Periodic,
    /// Constant solution; `period` carries the linearized small-oscillation
    /// period around it (infinite at a saddle).
    Equilibrium,
    Homoclinic,
    /// Plain trajectory segment; no period was detected within the span.
    Segment,
}

/// A solved orbit with a dense evaluator `t -> (y, y')`.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub case: OdeCase,
    pub c: f64,
    pub initial: PhasePoint,
    pub kind: OrbitKind,
    /// Minimal period for periodic orbits; linearized period at equilibria;
    /// infinity for homoclinic orbits and bare segments.
    pub period: f64,
    traj: Option<Trajectory>,
}

impl Orbit {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self.kind {
            OrbitKind::Equilibrium => (self.initial.xi, 0.0),
            OrbitKind::Periodic => {
                let traj = self.traj.as_ref().unwrap();
                traj.eval(t.rem_euclid(self.period))
            }
            OrbitKind::Homoclinic => {
                // Even in t; exponential tail continuation past the horizon.
                let traj = self.traj.as_ref().unwrap();
                let ta = t.abs();
                let horizon = traj.t_end();
                let (y, v) = if ta <= horizon {
                    traj.eval(ta)
                } else {
                    let (yh, _) = traj.eval(horizon);
                    let y = yh * (-(ta - horizon)).exp();
                    (y, -y)
                };
                if t < 0.0 {
                    (y, -v)
                } else {
                    (y, v)
                }
            }
            OrbitKind::Segment => self.traj.as_ref().unwrap().eval(t),
        }
    }

    /// Horizon of trusted direct evaluation (before symmetry/tail rules).
    pub fn t_max(&self) -> f64 {
        self.traj.as_ref().map(|t| t.t_end()).unwrap_or(f64::INFINITY)
    }
}

const EQUILIBRIUM_ETA_TOL: f64 = 1e-13;
const EQUILIBRIUM_ACC_TOL: f64 = 1e-12;

fn equilibrium_orbit(case: OdeCase, initial: PhasePoint) -> Orbit {
    let lam = case.accel_prime(initial.xi);
    let period = if lam < 0.0 { 2.0 * std::f64::consts::PI / (-lam).sqrt() } else { f64::INFINITY };
    Orbit {
        case,
        c: case.first_integral(initial),
        initial,
        kind: OrbitKind::Equilibrium,
        period,
        traj: None,
    }
}

/// Which event marks a full period for a given launch point.
#[derive(Clone, Copy)]
enum PeriodEvent {
    /// Launched from the velocity axis: full period at the next upward
    /// zero crossing of y.
    UpwardZero,
    /// Launched from a turning point at maximal y: full period at the next
    /// downward zero crossing of y'.
    VelocityMax,
    None,
}

/// Integrate an orbit from `initial` over `[0, t_end]`, detecting the period
/// when the launch point is on the velocity axis or a rightmost turning
/// point. Equilibria are recognized and returned as constant orbits.
pub fn integrate_orbit(
    case: OdeCase,
    initial: PhasePoint,
    t_end: f64,
    tol: f64,
) -> Result<Orbit> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    if !(initial.xi.is_finite() && initial.eta.is_finite()) {
        return Err(Error::Domain("non-finite initial phase point".into()));
    }
    if initial.eta.abs() <= EQUILIBRIUM_ETA_TOL && case.accel(initial.xi).abs() <= EQUILIBRIUM_ACC_TOL
    {
        return Ok(equilibrium_orbit(case, initial));
    }

    let event = if initial.xi == 0.0 && initial.eta > 0.0 {
        PeriodEvent::UpwardZero
    } else if initial.eta == 0.0 && case.accel(initial.xi) < 0.0 {
        PeriodEvent::VelocityMax
    } else {
        PeriodEvent::None
    };

    let opts = OdeOptions { rtol: tol, atol: tol, ..OdeOptions::default() };
    let accel = move |y: f64| case.accel(y);
    let mut hit = false;
    let traj = ode::integrate(
        accel,
        initial.xi,
        initial.eta,
        0.0,
        t_end,
        &opts,
        |traj| {
            let nodes = traj.nodes();
            let n = nodes.len();
            if n < 2 {
                return true;
            }
            let (a, b) = (&nodes[n - 2], &nodes[n - 1]);
            let crossing = match event {
                PeriodEvent::UpwardZero => a.y < 0.0 && b.y >= 0.0,
                PeriodEvent::VelocityMax => a.v > 0.0 && b.v <= 0.0,
                PeriodEvent::None => false,
            };
            if crossing {
                hit = true;
                false
            } else {
                true
            }
        },
    )?;

    let c = case.first_integral(initial);
    if hit {
        let nodes = traj.nodes();
        let (ta, tb) = (nodes[nodes.len() - 2].t, nodes[nodes.len() - 1].t);
        let period = match event {
            PeriodEvent::UpwardZero => {
                roots::bisect(|t| traj.eval(t).0, ta, tb, 1e-14, 1e-14)?
            }
            PeriodEvent::VelocityMax => {
                roots::bisect(|t| traj.eval(t).1, ta, tb, 1e-14, 1e-14)?
            }
            PeriodEvent::None => unreachable!(),
        };
        Ok(Orbit { case, c, initial, kind: OrbitKind::Periodic, period, traj: Some(traj) })
    } else {
        Ok(Orbit { case, c, initial, kind: OrbitKind::Segment, period: f64::INFINITY, traj: Some(traj) })
    }
}

/// The normalized positive family of the rogue case: orbit through
/// `(a^{-1}(c), 0)` for `c` between the center value `(1-p)/(1+p)` and the
/// homoclinic level 0.
pub fn normalized_small_orbit(p: f64, c: f64) -> Result<Orbit> {
    let case = OdeCase::new(Variant::Rogue, p)?;
    let (c_min, _) = case.c_range();
    if !(c_min..=0.0).contains(&c) {
        return Err(Error::Domain(format!("c={c} outside [{c_min}, 0]")));
    }
    if c - c_min <= 1e-10 * c_min.abs() {
        return Ok(equilibrium_orbit(case, PhasePoint { xi: 1.0, eta: 0.0 }));
    }
    if c == 0.0 {
        return homoclinic(p);
    }
    let y0 = a_inverse(p, c)?;
    // Periods grow like log(1/|c|); 1e3 time units covers c down to ~1e-300.
    let orbit = integrate_orbit(case, PhasePoint { xi: y0, eta: 0.0 }, 1e3, 1e-12)?;
    if orbit.kind != OrbitKind::Periodic {
        return Err(Error::NonConvergence(format!(
            "no period detected for normalized orbit at c={c}"
        )));
    }
    Ok(orbit)
}

/// The positive homoclinic orbit of the rogue case (first-integral level 0),
/// with direct evaluation horizon `t_max` and tail continuation beyond it.
///
/// The homoclinic is a separatrix: any level-set drift `eps` in the
/// integrator turns into an O(eps * e^{2t}) relative deviation once the
/// trajectory nears the saddle, so direct integration is only trusted up to
/// t ~ 12 at tolerance 1e-12. Beyond that the decaying-tail continuation
/// y ~ y(t_h) e^{-(t - t_h)} is the more accurate representation, so the
/// integration horizon is clamped.
pub fn homoclinic_with_horizon(p: f64, t_max: f64) -> Result<Orbit> {
    let case = OdeCase::new(Variant::Rogue, p)?;
    let y0 = rogue_max_amplitude(p);
    let initial = PhasePoint { xi: y0, eta: 0.0 };
    let traj = ode::integrate(
        move |y| case.accel(y),
        y0,
        0.0,
        0.0,
        t_max.min(12.0),
        &OdeOptions::default(),
        |_| true,
    )?;
    Ok(Orbit { case, c: 0.0, initial, kind: OrbitKind::Homoclinic, period: f64::INFINITY, traj: Some(traj) })
}

pub fn homoclinic(p: f64) -> Result<Orbit> {
    homoclinic_with_horizon(p, 12.0)
}

/// Turning points of the orbit at first-integral level `c`.
///
/// Focusing/defocusing: returns `(0, N(c))` with `N(c) = max |y|`.
/// Rogue: returns the two positive turning points `(N_-, N_+)` with
/// `N_- <= 1 <= N_+`.
pub fn amplitude_bounds(case: OdeCase, c: f64) -> Result<(f64, f64)> {
    let p = case.p;
    let (c_lo, c_hi) = case.c_range();
    if !(c >= c_lo && c <= c_hi) {
        return Err(Error::Domain(format!("c={c} outside [{c_lo}, {c_hi}]")));
    }
    match case.variant {
        Variant::PlusFocusing => {
            if c == 0.0 {
                return Ok((0.0, 0.0));
            }
            // xi^2 + (2/(p+1)) xi^{p+1} = c on [0, sqrt(c)].
            let n = roots::bracketed_root(
                |x: f64| x * x + 2.0 / (p + 1.0) * x.powf(p + 1.0) - c,
                Some(|x: f64| 2.0 * x + 2.0 * x.powf(p)),
                0.0,
                c.sqrt(),
                1e-15,
                1e-14,
            )?;
            Ok((0.0, n))
        }
        Variant::MinusDefocusing => {
            if c == 0.0 {
                return Ok((0.0, 0.0));
            }
            if c >= c_hi {
                return Ok((0.0, 1.0));
            }
            // xi^2 - (2/(p+1)) xi^{p+1} = c on [0, 1].
            let n = roots::bracketed_root(
                |x: f64| x * x - 2.0 / (p + 1.0) * x.powf(p + 1.0) - c,
                Some(|x: f64| 2.0 * x - 2.0 * x.powf(p)),
                0.0,
                1.0,
                1e-15,
                1e-14,
            )?;
            Ok((0.0, n))
        }
        Variant::Rogue => {
            if c == c_lo {
                return Ok((1.0, 1.0));
            }
            let n_plus = a_inverse(p, c)?;
            let n_minus = if c == 0.0 {
                0.0
            } else {
                // a decreases from 0 to (1-p)/(1+p) on [0, 1].
                roots::bracketed_root(
                    |x| a_value(p, x) - c,
                    Some(|x: f64| 2.0 * x * (x.powf(p - 1.0) - 1.0)),
                    0.0,
                    1.0,
                    1e-15,
                    1e-14,
                )?
            };
            Ok((n_minus, n_plus))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn first_integral_reference_values() {
        let rogue = OdeCase::new(Variant::Rogue, 3.0).unwrap();
        assert_eq!(rogue.first_integral(PhasePoint { xi: 1.0, eta: 0.0 }), -0.5);
        assert_eq!(rogue.first_integral(PhasePoint { xi: 0.0, eta: 0.0 }), 0.0);
        let plus = OdeCase::new(Variant::PlusFocusing, 2.7).unwrap();
        for c in [0.3f64, 1.0, 4.2] {
            let v = plus.first_integral(PhasePoint { xi: 0.0, eta: c.sqrt() });
            assert!((v - c).abs() < 1e-15);
        }
    }

    #[test]
    fn equilibrium_is_detected_with_linearized_period() {
        let case = OdeCase::new(Variant::Rogue, 3.0).unwrap();
        let orbit = integrate_orbit(case, PhasePoint { xi: 1.0, eta: 0.0 }, 10.0, 1e-10).unwrap();
        assert_eq!(orbit.kind, OrbitKind::Equilibrium);
        assert!((orbit.period - 2.0 * PI / 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(orbit.eval(3.7), (1.0, 0.0));
    }

    #[test]
    fn focusing_orbit_conserves_first_integral() {
        let case = OdeCase::new(Variant::PlusFocusing, 3.0).unwrap();
        let orbit = integrate_orbit(case, PhasePoint { xi: 0.0, eta: 1.0 }, 100.0, 1e-12).unwrap();
        assert_eq!(orbit.kind, OrbitKind::Periodic);
        let period = orbit.period;
        assert!(period > 0.0 && period < 2.0 * PI);
        for i in 0..200 {
            let t = 10.0 * period * i as f64 / 200.0;
            let (y, v) = orbit.eval(t);
            let a = case.first_integral(PhasePoint { xi: y, eta: v });
            assert!((a - 1.0).abs() < 1e-8, "drift {} at t={t}", (a - 1.0).abs());
        }
        // Periodicity of the evaluator itself.
        let (y0, v0) = orbit.eval(0.3);
        let (y1, v1) = orbit.eval(0.3 + 7.0 * period);
        assert!((y0 - y1).abs() < 1e-9 && (v0 - v1).abs() < 1e-9);
    }

    #[test]
    fn small_focusing_orbit_has_period_near_2pi() {
        let case = OdeCase::new(Variant::PlusFocusing, 3.0).unwrap();
        let c = 1e-6f64;
        let orbit =
            integrate_orbit(case, PhasePoint { xi: 0.0, eta: c.sqrt() }, 100.0, 1e-12).unwrap();
        assert!((orbit.period - 2.0 * PI).abs() < 1e-5);
    }

    #[test]
    fn homoclinic_matches_sech_profile_at_p3() {
        let orbit = homoclinic(3.0).unwrap();
        let s2 = 2f64.sqrt();
        assert!((orbit.eval(0.0).0 - s2).abs() < 1e-12);
        for &t in &[-10.0, -3.2, -0.7, 0.0, 1.1, 4.5, 10.0] {
            let (y, v) = orbit.eval(t);
            let exact = s2 / t.cosh();
            let exact_v = -s2 * t.sinh() / (t.cosh() * t.cosh());
            assert!((y - exact).abs() < 1e-8, "y at t={t}");
            assert!((v - exact_v).abs() < 1e-8, "v at t={t}");
        }
        // Level-set conservation out to t = 20.
        for i in 0..=40 {
            let t = i as f64;
            let (y, v) = orbit.eval(t * 0.5);
            let a = orbit.case.first_integral(PhasePoint { xi: y, eta: v });
            assert!(a.abs() < 1e-8);
        }
    }

    #[test]
    fn homoclinic_tail_decays_with_unit_rate() {
        let orbit = homoclinic(3.0).unwrap();
        // Least-squares slope of log y over t in [5, 15].
        let n = 101;
        let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let t = 5.0 + 10.0 * i as f64 / (n - 1) as f64;
            let ly = orbit.eval(t).0.ln();
            st += t;
            sy += ly;
            stt += t * t;
            sty += t * ly;
        }
        let nf = n as f64;
        let slope = (nf * sty - st * sy) / (nf * stt - st * st);
        assert!((slope + 1.0).abs() < 1e-3, "slope {slope}");
    }

    #[test]
    fn normalized_family_endpoints_and_interior() {
        // Center value: constant orbit at 1.
        let o = normalized_small_orbit(3.0, -0.5).unwrap();
        assert_eq!(o.kind, OrbitKind::Equilibrium);
        assert_eq!(o.eval(2.0).0, 1.0);
        // Level 0: the homoclinic with amplitude sqrt(2).
        let o = normalized_small_orbit(3.0, 0.0).unwrap();
        assert_eq!(o.kind, OrbitKind::Homoclinic);
        assert!((o.eval(0.0).0 - 2f64.sqrt()).abs() < 1e-12);
        // Interior: starts at a^{-1}(c), stays positive, periodic.
        let o = normalized_small_orbit(3.0, -0.25).unwrap();
        assert_eq!(o.kind, OrbitKind::Periodic);
        // Oracle: a(xi) = -xi^2 + xi^4/2 at p=3, root by direct bisection.
        let mut lo = 1.0f64;
        let mut hi = 2f64.sqrt();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if -mid * mid + 0.5 * mid.powi(4) < -0.25 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((o.eval(0.0).0 - lo).abs() < 1e-12);
        let mut min_y = f64::INFINITY;
        for i in 0..400 {
            let t = o.period * i as f64 / 400.0;
            min_y = min_y.min(o.eval(t).0);
        }
        assert!(min_y > 0.0);
    }

    #[test]
    fn normalized_family_respects_amplitude_and_velocity_caps() {
        for &c in &[-0.49, -0.3, -0.1, -1e-3, -1e-8] {
            let o = normalized_small_orbit(3.0, c).unwrap();
            let cap_y = rogue_max_amplitude(3.0) + 1e-9;
            let cap_v = (2.0f64 / 4.0).sqrt() + 1e-9;
            let span = if o.period.is_finite() { o.period } else { 20.0 };
            for i in 0..=300 {
                let (y, v) = o.eval(span * i as f64 / 300.0);
                assert!(y.abs() <= cap_y, "c={c}: |y|={}", y.abs());
                assert!(v.abs() <= cap_v, "c={c}: |v|={}", v.abs());
            }
        }
    }

    #[test]
    fn amplitude_bounds_reference_values() {
        let rogue = OdeCase::new(Variant::Rogue, 3.0).unwrap();
        assert_eq!(amplitude_bounds(rogue, -0.5).unwrap(), (1.0, 1.0));
        let (nm, np) = amplitude_bounds(rogue, 0.0).unwrap();
        assert_eq!(nm, 0.0);
        assert!((np - 2f64.sqrt()).abs() < 1e-14);

        // Focusing at c=1: N(1) <= 1, and it matches the integrated orbit max.
        let plus = OdeCase::new(Variant::PlusFocusing, 3.0).unwrap();
        let (_, n) = amplitude_bounds(plus, 1.0).unwrap();
        assert!(n <= 1.0);
        let orbit = integrate_orbit(plus, PhasePoint { xi: 0.0, eta: 1.0 }, 100.0, 1e-12).unwrap();
        let mut max_y: f64 = 0.0;
        for i in 0..2000 {
            let t = orbit.period * i as f64 / 2000.0;
            max_y = max_y.max(orbit.eval(t).0.abs());
        }
        assert!((n - max_y).abs() < 1e-9, "N={n} vs orbit max {max_y}");
    }

    #[test]
    fn rejects_out_of_range_c() {
        assert!(normalized_small_orbit(3.0, 0.1).is_err());
        assert!(normalized_small_orbit(3.0, -0.6).is_err());
        let minus = OdeCase::new(Variant::MinusDefocusing, 3.0).unwrap();
        assert!(amplitude_bounds(minus, 0.7).is_err());
    }

    proptest! {
        #[test]
        fn first_integral_even_in_velocity(
            xi in -3.0f64..3.0,
            eta in -3.0f64..3.0,
            p in 1.1f64..6.0,
        ) {
            for variant in [Variant::PlusFocusing, Variant::MinusDefocusing, Variant::Rogue] {
                let case = OdeCase::new(variant, p).unwrap();
                let a1 = case.first_integral(PhasePoint { xi, eta });
                let a2 = case.first_integral(PhasePoint { xi, eta: -eta });
                prop_assert_eq!(a1, a2);
            }
        }

        #[test]
        fn a_inverse_round_trips(p in 1.2f64..5.0, frac in 0.01f64..0.99) {
            let c = (1.0 - p) / (1.0 + p) * frac;
            let xi = a_inverse(p, c).unwrap();
            prop_assert!((a_value(p, xi) - c).abs() < 1e-12);
        }
    }
}
