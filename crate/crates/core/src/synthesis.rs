//! Assembly of vector-valued wave fields U(x,t) = ψ(g(x),t) ∇g/|∇g| from
//! phase-plane orbits, the period-map inverses, and a geometry profile.
//!
//! All field kinds share the scalar structure ψ(ζ,t) = τ̃(ζ) y(σ̃(ζ)t; c(ζ))
//! with the level value c(ζ) chosen by inverting the period map at σ̃(ζ)T;
//! the rogue wave uses the homoclinic instead, and the monochromatic kind a
//! complex exponential with an explicitly solvable profile.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::geometry::{scale, CoefficientProfiles, GeometryProfile, Vec3};
use crate::period_maps;
use crate::phase_plane::{self, sgn_pow, OdeCase, Orbit, PhasePoint, Variant};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    BreatherPlus,
    BreatherMinus,
    DarkBreather,
    DarkConstant,
    RogueWave,
    RogueApproximantT,
    Monochromatic,
    ExplicitRogue,
}

/// Which reduced scalar equation the field satisfies:
/// s̃ψ_tt + q̃ψ ± Ṽ|ψ|^{p-1}ψ = 0, or the sign-flipped linear term of the
/// rogue family: s̃ψ_tt − q̃ψ + Ṽ|ψ|^{p-1}ψ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    BreatherPlus,
    BreatherMinus,
    Rogue,
}

/// Launch curve through the level sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Curve {
    /// (0, √c): the focusing/defocusing normalization.
    VelocityAxis,
    /// (a⁻¹(c), 0): the positive rogue family normalization.
    TurningPoint,
}

/// Memoized orbit solves keyed by the level value quantized to 1e-12.
struct OrbitCache {
    map: Mutex<(HashMap<i64, Arc<Orbit>>, VecDeque<i64>)>,
}

const CACHE_CAP: usize = 512;

impl OrbitCache {
    fn new() -> Self {
        OrbitCache { map: Mutex::new((HashMap::new(), VecDeque::new())) }
    }

    fn key(c: f64) -> i64 {
        (c * 1e12).round() as i64
    }

    fn get_or_insert(&self, c: f64, make: impl FnOnce() -> Result<Orbit>) -> Result<Arc<Orbit>> {
        let key = Self::key(c);
        {
            let guard = self.map.lock().unwrap();
            if let Some(orbit) = guard.0.get(&key) {
                return Ok(orbit.clone());
            }
        }
        let orbit = Arc::new(make()?);
        let mut guard = self.map.lock().unwrap();
        if guard.0.len() >= CACHE_CAP {
            if let Some(old) = guard.1.pop_front() {
                guard.0.remove(&old);
            }
        }
        guard.0.insert(key, orbit.clone());
        guard.1.push_back(key);
        Ok(orbit)
    }
}

enum Scalar {
    /// y(σ̃(ζ)t + b(c); c(ζ)) with c(ζ) from inverting the period map at
    /// σ̃(ζ)T.
    OrbitFamily {
        case: OdeCase,
        curve: Curve,
        t_period: f64,
        /// Optional launch-curve shift b(c), in orbit time.
        curve_offset: Option<ScalarFn>,
        cache: OrbitCache,
    },
    /// The homoclinic y₀(σ̃(ζ)t).
    Homoclinic { orbit: Arc<Orbit> },
    /// y ≡ 1 (the stationary solution ψ = τ̃).
    Stationary,
    /// Closed form √2 / cosh(σ̃ t) at p = 3.
    ClosedFormSech,
    /// φ(ζ)e^{iωt}; handled through the complex evaluators.
    Monochromatic,
}

/// A synthesized solution evaluator with its construction metadata.
pub struct WaveField {
    pub kind: FieldKind,
    pub equation: EquationKind,
    pub p: f64,
    /// Temporal period for time-periodic kinds.
    pub period: Option<f64>,
    pub omega: Option<f64>,
    pub geo: Arc<GeometryProfile>,
    pub coeffs: Arc<CoefficientProfiles>,
    scalar: Arc<Scalar>,
    /// Phase-shift function a: ζ -> time shift.
    shift: Option<ScalarFn>,
    /// Amplitude multiplier; 1 for genuine solutions, ≠1 only for the
    /// deliberately corrupted negative-control copies.
    amp_scale: f64,
    /// Background scalar for localization relative to a nontrivial limit:
    /// t -> ψ∞(t); the background field is ψ∞(t)·direction(x).
    pub reference_scalar: Option<ScalarFn>,
    /// Space-time decay exponent target recorded at construction.
    pub decay_target: Option<f64>,
}

impl Clone for WaveField {
    fn clone(&self) -> Self {
        WaveField {
            kind: self.kind,
            equation: self.equation,
            p: self.p,
            period: self.period,
            omega: self.omega,
            geo: self.geo.clone(),
            coeffs: self.coeffs.clone(),
            scalar: self.scalar.clone(),
            shift: self.shift.clone(),
            amp_scale: self.amp_scale,
            reference_scalar: self.reference_scalar.clone(),
            decay_target: self.decay_target,
        }
    }
}

/// Sampling used for the construction-time hypothesis checks.
#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    pub sample_radius: f64,
    pub n_directions: usize,
    pub n_radii: usize,
    /// Linear-growth constant C̃ allowed for rogue phase shifts.
    pub growth_limit: f64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { sample_radius: 10.0, n_directions: 64, n_radii: 8, growth_limit: 10.0 }
    }
}

fn sample_points(geo: &GeometryProfile, opts: &SynthesisOptions) -> Vec<Vec3> {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::new();
    for k in 1..=opts.n_radii {
        let rad = opts.sample_radius * k as f64 / opts.n_radii as f64;
        for i in 0..opts.n_directions {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / opts.n_directions as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            let x = [rad * rho * phi.cos(), rad * rho * phi.sin(), rad * z];
            if !geo.is_singular(x) {
                pts.push(x);
            }
        }
    }
    pts
}

fn sample_zetas(geo: &GeometryProfile, opts: &SynthesisOptions) -> Vec<f64> {
    sample_points(geo, opts).iter().map(|&x| geo.g(x)).collect()
}

impl WaveField {
    fn effective_time(&self, zeta: f64, t: f64) -> f64 {
        match &self.shift {
            Some(a) => t + a(zeta),
            None => t,
        }
    }

    /// The scalar profile ψ(ζ, t) for real-valued kinds.
    pub fn psi(&self, zeta: f64, t: f64) -> Result<f64> {
        let t = self.effective_time(zeta, t);
        let tau = self.coeffs.tau(zeta, self.p);
        let sigma = self.coeffs.sigma(zeta);
        let y = match &*self.scalar {
            Scalar::OrbitFamily { case, curve, t_period, curve_offset, cache } => {
                let c = period_maps::invert_period(*case, self.p, sigma * t_period)?;
                let orbit = cache.get_or_insert(c, || match curve {
                    Curve::VelocityAxis => phase_plane::integrate_orbit(
                        *case,
                        PhasePoint { xi: 0.0, eta: c.sqrt() },
                        1e3,
                        1e-12,
                    ),
                    Curve::TurningPoint => phase_plane::normalized_small_orbit(case.p, c),
                })?;
                let offset = curve_offset.as_ref().map(|b| b(c)).unwrap_or(0.0);
                orbit.eval(sigma * t + offset).0
            }
            Scalar::Homoclinic { orbit } => orbit.eval(sigma * t).0,
            Scalar::Stationary => 1.0,
            Scalar::ClosedFormSech => 2f64.sqrt() / (sigma * t).cosh(),
            Scalar::Monochromatic => {
                return Err(Error::Domain(
                    "monochromatic fields are complex; use psi_complex".into(),
                ))
            }
        };
        Ok(self.amp_scale * tau * y)
    }

    /// Complex scalar profile (re, im) for the monochromatic kind.
    pub fn psi_complex(&self, zeta: f64, t: f64) -> Result<(f64, f64)> {
        match &*self.scalar {
            Scalar::Monochromatic => {
                let t = self.effective_time(zeta, t);
                let omega = self.omega.unwrap_or(0.0);
                let phi = self.amp_scale * self.monochromatic_profile(zeta)?;
                Ok((phi * (omega * t).cos(), phi * (omega * t).sin()))
            }
            _ => {
                let v = self.psi(zeta, t)?;
                Ok((v, 0.0))
            }
        }
    }

    /// The time-independent amplitude φ(ζ) of the monochromatic kind.
    pub fn monochromatic_profile(&self, zeta: f64) -> Result<f64> {
        let omega = self
            .omega
            .ok_or_else(|| Error::Domain("monochromatic field without omega".into()))?;
        let sigma = self.coeffs.sigma(zeta);
        let tau = self.coeffs.tau(zeta, self.p);
        let ratio = omega * omega / (sigma * sigma);
        let factor = match self.equation {
            EquationKind::Rogue => ratio + 1.0,
            EquationKind::BreatherMinus => 1.0 - ratio,
            EquationKind::BreatherPlus => ratio - 1.0,
        };
        if factor < 0.0 {
            return Err(Error::Domain(format!(
                "omega={omega} incompatible with sigma={sigma} for {:?}",
                self.equation
            )));
        }
        Ok(factor.powf(1.0 / (self.p - 1.0)) * tau)
    }

    /// Analytic second time derivative of ψ, read off from the reduced
    /// equation itself.
    pub fn psi_tt(&self, zeta: f64, t: f64) -> Result<f64> {
        let psi = self.psi(zeta, t)?;
        let s = self.coeffs.s.eval(zeta);
        let q = self.coeffs.q.eval(zeta);
        let v = self.coeffs.v.eval(zeta);
        let nl = sgn_pow(psi, self.p);
        Ok(match self.equation {
            EquationKind::BreatherPlus => -(q * psi + v * nl) / s,
            EquationKind::BreatherMinus => -(q * psi - v * nl) / s,
            EquationKind::Rogue => (q * psi - v * nl) / s,
        })
    }

    /// U(x, t) for real-valued kinds.
    pub fn eval(&self, x: Vec3, t: f64) -> Result<Vec3> {
        let dir = self.geo.direction(x)?;
        let val = self.psi(self.geo.g(x), t)?;
        Ok(scale(dir, val))
    }

    /// (Re U, Im U) for the monochromatic kind (imaginary part zero
    /// otherwise).
    pub fn eval_complex(&self, x: Vec3, t: f64) -> Result<(Vec3, Vec3)> {
        let dir = self.geo.direction(x)?;
        let (re, im) = self.psi_complex(self.geo.g(x), t)?;
        Ok((scale(dir, re), scale(dir, im)))
    }

    /// The background field U∞(x,t) this field is localized against
    /// (zero when none is attached).
    pub fn reference_eval(&self, x: Vec3, t: f64) -> Result<Vec3> {
        match &self.reference_scalar {
            Some(f) => {
                let dir = self.geo.direction(x)?;
                Ok(scale(dir, f(t)))
            }
            None => Ok([0.0; 3]),
        }
    }

    /// A copy with the scalar amplitude multiplied by `factor`; for
    /// `factor != 1` this is *not* a solution and serves as a negative
    /// control in the verification suite.
    pub fn scaled(&self, factor: f64) -> WaveField {
        let mut out = self.clone();
        out.amp_scale *= factor;
        out
    }
}

/// Time-shift a field along the level sets: U_a(x,t) = U(x, t + a(g(x))).
pub fn apply_phase_shift(field: &WaveField, a: ScalarFn) -> Result<WaveField> {
    let opts = SynthesisOptions::default();
    if matches!(field.kind, FieldKind::RogueWave | FieldKind::RogueApproximantT) {
        check_shift_growth(&field.geo, &a, &opts)?;
    }
    let mut out = field.clone();
    let prev = field.shift.clone();
    out.shift = Some(match prev {
        Some(prev) => Arc::new(move |z| prev(z) + a(z)),
        None => a,
    });
    Ok(out)
}

fn check_shift_growth(
    geo: &GeometryProfile,
    a: &ScalarFn,
    opts: &SynthesisOptions,
) -> Result<()> {
    for x in sample_points(geo, opts) {
        let bound = opts.growth_limit * (1.0 + crate::geometry::norm(x));
        let val = a(geo.g(x)).abs();
        if val > bound {
            return Err(Error::Growth(format!(
                "|a(g(x))| = {val} exceeds {bound} at x = {x:?}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreatherSign {
    Plus,
    Minus,
}

/// Time-periodic breather of the focusing (+) or defocusing (−) family,
/// with period T = 2π/σ∞ and level curve (0, √c).
pub fn synth_breather(
    sign: BreatherSign,
    p: f64,
    geo: GeometryProfile,
    coeffs: CoefficientProfiles,
) -> Result<WaveField> {
    synth_breather_with_curve_shift(sign, p, geo, coeffs, None)
}

/// Same construction launched from the shifted curve
/// γ̂(c) = (y(b(c); c), ẏ(b(c); c)).
pub fn synth_breather_with_curve_shift(
    sign: BreatherSign,
    p: f64,
    geo: GeometryProfile,
    coeffs: CoefficientProfiles,
    curve_shift: Option<ScalarFn>,
) -> Result<WaveField> {
    let opts = SynthesisOptions::default();
    let sigma_inf = coeffs
        .sigma_inf
        .ok_or_else(|| Error::MissingLimit("sigma_inf required for breather synthesis".into()))?;
    let zetas = sample_zetas(&geo, &opts);
    coeffs.validate_positive(&zetas)?;
    let admissible = match sign {
        BreatherSign::Plus => coeffs.sigma_at_most_inf(&zetas)?,
        BreatherSign::Minus => coeffs.sigma_at_least_inf(&zetas)?,
    };
    if !admissible {
        return Err(Error::Domain(format!(
            "sigma profile leaves the admissible side of sigma_inf={sigma_inf} for {sign:?}"
        )));
    }
    let t_period = 2.0 * std::f64::consts::PI / sigma_inf;
    let (kind, equation, variant) = match sign {
        BreatherSign::Plus => (FieldKind::BreatherPlus, EquationKind::BreatherPlus, Variant::PlusFocusing),
        BreatherSign::Minus => {
            (FieldKind::BreatherMinus, EquationKind::BreatherMinus, Variant::MinusDefocusing)
        }
    };
    let case = OdeCase::new(variant, p)?;
    Ok(WaveField {
        kind,
        equation,
        p,
        period: Some(t_period),
        omega: None,
        geo: Arc::new(geo),
        coeffs: Arc::new(coeffs),
        scalar: Arc::new(Scalar::OrbitFamily {
            case,
            curve: Curve::VelocityAxis,
            t_period,
            curve_offset: curve_shift,
            cache: OrbitCache::new(),
        }),
        shift: None,
        amp_scale: 1.0,
        reference_scalar: None,
        decay_target: None,
    })
}

/// Dark-type breather: 2π/ω-periodic, localized relative to the background
/// U∞(x,t) = τ∞ y(σ∞ t; c∞) · direction(x).
pub fn synth_dark_breather(
    p: f64,
    geo: GeometryProfile,
    coeffs: CoefficientProfiles,
    omega: f64,
) -> Result<WaveField> {
    let opts = SynthesisOptions::default();
    let sigma_inf = coeffs
        .sigma_inf
        .ok_or_else(|| Error::MissingLimit("sigma_inf required".into()))?;
    if !(omega > 0.0 && omega <= sigma_inf * (p - 1.0).sqrt()) {
        return Err(Error::Domain(format!(
            "omega={omega} outside (0, sigma_inf*sqrt(p-1)] = (0, {}]",
            sigma_inf * (p - 1.0).sqrt()
        )));
    }
    let zetas = sample_zetas(&geo, &opts);
    coeffs.validate_positive(&zetas)?;
    if !coeffs.sigma_at_least_inf(&zetas)? {
        return Err(Error::Domain("sigma must dominate sigma_inf for the dark family".into()));
    }
    let t_period = 2.0 * std::f64::consts::PI / omega;
    let case = OdeCase::new(Variant::Rogue, p)?;
    // Background orbit at the limit level value.
    let c_inf = period_maps::invert_period(case, p, sigma_inf * t_period)?;
    let bg_orbit = Arc::new(phase_plane::normalized_small_orbit(p, c_inf)?);
    let tau_inf = coeffs
        .tau_inf
        .ok_or_else(|| Error::MissingLimit("tau_inf required for the background field".into()))?;
    let reference: ScalarFn = {
        let orbit = bg_orbit;
        Arc::new(move |t: f64| tau_inf * orbit.eval(sigma_inf * t).0)
    };
    Ok(WaveField {
        kind: FieldKind::DarkBreather,
        equation: EquationKind::Rogue,
        p,
        period: Some(t_period),
        omega: Some(omega),
        geo: Arc::new(geo),
        coeffs: Arc::new(coeffs.clone()),
        scalar: Arc::new(Scalar::OrbitFamily {
            case,
            curve: Curve::TurningPoint,
            t_period,
            curve_offset: None,
            cache: OrbitCache::new(),
        }),
        shift: None,
        amp_scale: 1.0,
        reference_scalar: Some(reference),
        decay_target: coeffs.decay_delta.map(|d| d / 2.0),
    })
}

/// The stationary member of the dark family: ψ(ζ,t) = τ̃(ζ), constant in
/// time.
pub fn synth_dark_constant(
    p: f64,
    geo: GeometryProfile,
    coeffs: CoefficientProfiles,
) -> Result<WaveField> {
    let opts = SynthesisOptions::default();
    let zetas = sample_zetas(&geo, &opts);
    coeffs.validate_positive(&zetas)?;
    Ok(WaveField {
        kind: FieldKind::DarkConstant,
        equation: EquationKind::Rogue,
        p,
        period: None,
        omega: None,
        geo: Arc::new(geo),
        coeffs: Arc::new(coeffs),
        scalar: Arc::new(Scalar::Stationary),
        shift: None,
        amp_scale: 1.0,
        reference_scalar: None,
        decay_target: None,
    })
}

/// Rogue wave built from the homoclinic: ψ(ζ,t) = τ̃(ζ) y₀(σ̃(ζ)t),
/// optionally phase-shifted by a(ζ).
pub fn synth_rogue(
    p: f64,
    geo: GeometryProfile,
    coeffs: CoefficientProfiles,
    shift: Option<ScalarFn>,
) -> Result<WaveField> {
    let opts = SynthesisOptions::default();
    let zetas = sample_zetas(&geo, &opts);
    coeffs.validate_positive(&zetas)?;
    let sigma_star = zetas.iter().map(|&z| coeffs.sigma(z)).fold(f64::INFINITY, f64::min);
    if !(sigma_star > 0.0) {
        return Err(Error::Domain("inf sigma must be positive".into()));
    }
    if let Some(a) = &shift {
        check_shift_growth(&geo, a, &opts)?;
    }
    let decay_target = coeffs.decay_delta.map(|d| {
        let c_tilde = opts.growth_limit;
        (d / 2.0).min(sigma_star / 2.0).min(d / (4.0 * c_tilde))
    });
    let orbit = Arc::new(phase_plane::homoclinic(p)?);
    Ok(WaveField {
        kind: FieldKind::RogueWave,
        equation: EquationKind::Rogue,
        p,
        period: None,
        omega: None,
        geo: Arc::new(geo),
        coeffs: Arc::new(coeffs),
        scalar: Arc::new(Scalar::Homoclinic { orbit }),
        shift,
        amp_scale: 1.0,
        reference_scalar: None,
        decay_target,
    })
}

/// T-periodic approximant of the rogue wave: the orbit family at
/// c(ζ) = M(σ̃(ζ)T), launched from the rightmost turning point.
pub fn synth_rogue_approximant(
    p: f64,
    geo: GeometryProfile,
    coeffs: CoefficientProfiles,
    t_period: f64,
) -> Result<WaveField> {
    let opts = SynthesisOptions::default();
    let zetas = sample_zetas(&geo, &opts);
    coeffs.validate_positive(&zetas)?;
    let sigma_star = zetas.iter().map(|&z| coeffs.sigma(z)).fold(f64::INFINITY, f64::min);
    let threshold = 2.0 * std::f64::consts::PI / ((p - 1.0).sqrt() * sigma_star);
    if !(t_period > threshold) {
        return Err(Error::Domain(format!(
            "period {t_period} at or below the admissible threshold {threshold}"
        )));
    }
    let case = OdeCase::new(Variant::Rogue, p)?;
    Ok(WaveField {
        kind: FieldKind::RogueApproximantT,
        equation: EquationKind::Rogue,
        p,
        period: Some(t_period),
        omega: None,
        geo: Arc::new(geo),
        coeffs: Arc::new(coeffs),
        scalar: Arc::new(Scalar::OrbitFamily {
            case,
            curve: Curve::TurningPoint,
            t_period,
            curve_offset: None,
            cache: OrbitCache::new(),
        }),
        shift: None,
        amp_scale: 1.0,
        reference_scalar: None,
        decay_target: None,
    })
}

/// Complex monochromatic solution U = φ(g(x)) e^{iωt} direction(x) with the
/// explicitly solvable profile φ.
pub fn synth_monochromatic(
    equation: EquationKind,
    p: f64,
    geo: GeometryProfile,
    coeffs: CoefficientProfiles,
    omega: f64,
) -> Result<WaveField> {
    if omega < 0.0 {
        return Err(Error::Domain("omega must be nonnegative".into()));
    }
    let opts = SynthesisOptions::default();
    let zetas = sample_zetas(&geo, &opts);
    coeffs.validate_positive(&zetas)?;
    let field = WaveField {
        kind: FieldKind::Monochromatic,
        equation,
        p,
        period: if omega > 0.0 { Some(2.0 * std::f64::consts::PI / omega) } else { None },
        omega: Some(omega),
        geo: Arc::new(geo),
        coeffs: Arc::new(coeffs),
        scalar: Arc::new(Scalar::Monochromatic),
        shift: None,
        amp_scale: 1.0,
        reference_scalar: None,
        decay_target: None,
    };
    // The profile must be well-defined on the sampled range.
    for &z in &zetas {
        field.monochromatic_profile(z)?;
    }
    Ok(field)
}

/// The closed-form rogue wave at p = 3 with s̃ = q̃ ≡ 1:
/// ψ(ζ,t) = √(2/Ṽ(ζ)) / cosh t.
pub fn synth_explicit_rogue(
    geo: GeometryProfile,
    coeffs: CoefficientProfiles,
) -> Result<WaveField> {
    let opts = SynthesisOptions::default();
    let zetas = sample_zetas(&geo, &opts);
    coeffs.validate_positive(&zetas)?;
    for &z in zetas.iter().take(16) {
        if (coeffs.s.eval(z) - 1.0).abs() > 1e-14 || (coeffs.q.eval(z) - 1.0).abs() > 1e-14 {
            return Err(Error::Domain(
                "the closed-form rogue wave requires s and q identically 1".into(),
            ));
        }
    }
    Ok(WaveField {
        kind: FieldKind::ExplicitRogue,
        equation: EquationKind::Rogue,
        p: 3.0,
        period: None,
        omega: None,
        geo: Arc::new(geo),
        coeffs: Arc::new(coeffs),
        scalar: Arc::new(Scalar::ClosedFormSech),
        shift: None,
        amp_scale: 1.0,
        reference_scalar: None,
        decay_target: None,
    })
}
