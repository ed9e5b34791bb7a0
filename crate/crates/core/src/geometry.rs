//! Scalar level functions g with the eikonal-type compatibility property
//! |∇g(x)| = G(g(x)), coefficient profiles along the level sets, and the
//! derived direction field ∇g/|∇g| used for all synthesized vector fields.

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr};

pub type Vec3 = [f64; 3];

pub fn norm(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn scale(v: Vec3, s: f64) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

fn cyl_r(x: Vec3) -> f64 {
    (x[0] * x[0] + x[1] * x[1]).sqrt()
}

/// Built-in level-function families, plus custom expressions.
#[derive(Debug, Clone)]
pub enum Family {
    /// g = γ|r - r₀| + x₃ with G ≡ √(1+γ²).
    ConeAxial { gamma: f64, r0: f64 },
    /// g = γ|r - r₀| + |x₃| with G ≡ √(1+γ²).
    ConeAbsAxial { gamma: f64, r0: f64 },
    /// g = √((r - r₀)² + x₃²) with G ≡ 1; r₀ = 0 degenerates to g = |x|.
    Torus { r0: f64 },
    /// User-supplied g(x1,x2,x3,r) and G(zeta); gradient by central
    /// differences.
    Custom { g: Expr, big_g: Expr },
}

#[derive(Debug, Clone)]
pub struct GeometryProfile {
    pub family: Family,
    /// Points within this distance of the singular loci (kinks, axis,
    /// zero-gradient set) are excluded from sampling.
    pub exclusion_radius: f64,
}

const DEFAULT_EXCLUSION: f64 = 1e-6;

impl GeometryProfile {
    pub fn cone_axial(gamma: f64, r0: f64) -> Result<Self> {
        if !(gamma > 0.0) || r0 < 0.0 {
            return Err(Error::Domain("require gamma > 0 and r0 >= 0".into()));
        }
        Ok(Self { family: Family::ConeAxial { gamma, r0 }, exclusion_radius: DEFAULT_EXCLUSION })
    }

    pub fn cone_abs_axial(gamma: f64, r0: f64) -> Result<Self> {
        if !(gamma > 0.0) || r0 < 0.0 {
            return Err(Error::Domain("require gamma > 0 and r0 >= 0".into()));
        }
        Ok(Self { family: Family::ConeAbsAxial { gamma, r0 }, exclusion_radius: DEFAULT_EXCLUSION })
    }

    pub fn torus(r0: f64) -> Result<Self> {
        if r0 < 0.0 {
            return Err(Error::Domain("require r0 >= 0".into()));
        }
        Ok(Self { family: Family::Torus { r0 }, exclusion_radius: DEFAULT_EXCLUSION })
    }

    pub fn custom(g_src: &str, big_g_src: &str) -> Result<Self> {
        Ok(Self {
            family: Family::Custom { g: Expr::parse(g_src)?, big_g: Expr::parse(big_g_src)? },
            exclusion_radius: DEFAULT_EXCLUSION,
        })
    }

    pub fn g(&self, x: Vec3) -> f64 {
        let r = cyl_r(x);
        match &self.family {
            Family::ConeAxial { gamma, r0 } => gamma * (r - r0).abs() + x[2],
            Family::ConeAbsAxial { gamma, r0 } => gamma * (r - r0).abs() + x[2].abs(),
            Family::Torus { r0 } => {
                let dr = r - r0;
                (dr * dr + x[2] * x[2]).sqrt()
            }
            Family::Custom { g, .. } => g.eval(&Bindings::point(x)),
        }
    }

    /// G evaluated at a level value.
    pub fn big_g(&self, zeta: f64) -> f64 {
        match &self.family {
            Family::ConeAxial { gamma, .. } | Family::ConeAbsAxial { gamma, .. } => {
                (1.0 + gamma * gamma).sqrt()
            }
            Family::Torus { .. } => 1.0,
            Family::Custom { big_g, .. } => big_g.eval(&Bindings::zeta(zeta)),
        }
    }

    pub fn is_singular(&self, x: Vec3) -> bool {
        let tube = self.exclusion_radius;
        let r = cyl_r(x);
        match &self.family {
            Family::ConeAxial { r0, .. } => r < tube || (r - r0).abs() < tube,
            Family::ConeAbsAxial { r0, .. } => {
                r < tube || (r - r0).abs() < tube || x[2].abs() < tube
            }
            Family::Torus { r0 } => {
                if *r0 == 0.0 {
                    norm(x) < tube
                } else {
                    let dr = r - r0;
                    r < tube || (dr * dr + x[2] * x[2]).sqrt() < tube
                }
            }
            Family::Custom { .. } => match self.grad_custom(x) {
                Some(grad) => {
                    let n = norm(grad);
                    !n.is_finite() || n < 1e-10
                }
                None => true,
            },
        }
    }

    fn grad_custom(&self, x: Vec3) -> Option<Vec3> {
        let h = 1e-6 * (1.0 + norm(x));
        let mut grad = [0.0; 3];
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            grad[i] = (self.g(xp) - self.g(xm)) / (2.0 * h);
            if !grad[i].is_finite() {
                return None;
            }
        }
        Some(grad)
    }

    pub fn grad_g(&self, x: Vec3) -> Result<Vec3> {
        if self.is_singular(x) {
            return Err(Error::SingularPoint(format!("gradient undefined near {x:?}")));
        }
        let r = cyl_r(x);
        let grad = match &self.family {
            Family::ConeAxial { gamma, r0 } => {
                let s = gamma * (r - r0).signum() / r;
                [s * x[0], s * x[1], 1.0]
            }
            Family::ConeAbsAxial { gamma, r0 } => {
                let s = gamma * (r - r0).signum() / r;
                [s * x[0], s * x[1], x[2].signum()]
            }
            Family::Torus { r0 } => {
                let g = self.g(x);
                if *r0 == 0.0 {
                    scale(x, 1.0 / g)
                } else {
                    let s = (r - r0) / (r * g);
                    [s * x[0], s * x[1], x[2] / g]
                }
            }
            Family::Custom { .. } => self
                .grad_custom(x)
                .ok_or_else(|| Error::SingularPoint(format!("non-finite gradient at {x:?}")))?,
        };
        Ok(grad)
    }

    /// Unit direction ∇g/|∇g| of the vector ansatz.
    pub fn direction(&self, x: Vec3) -> Result<Vec3> {
        let grad = self.grad_g(x)?;
        let n = norm(grad);
        if !(n > 0.0) {
            return Err(Error::SingularPoint(format!("zero gradient at {x:?}")));
        }
        Ok(scale(grad, 1.0 / n))
    }

    /// Whether the gradient is analytic (built-in) or finite-difference.
    pub fn analytic_gradient(&self) -> bool {
        !matches!(self.family, Family::Custom { .. })
    }
}

/// Result of sampling the compatibility condition |∇g| = G(g).
#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    pub max_rel_defect: f64,
    pub samples_used: usize,
    pub analytic: bool,
    pub pass: bool,
}

/// Max relative defect of |∇g(x)| - G(g(x)) over the sample. Threshold:
/// 1e-8 for analytic gradients, 1e-5 for finite-difference ones.
pub fn check_compatibility(geo: &GeometryProfile, sample: &[Vec3]) -> CompatibilityReport {
    let mut max_rel = 0.0f64;
    let mut used = 0;
    for &x in sample {
        if geo.is_singular(x) {
            continue;
        }
        if let Ok(grad) = geo.grad_g(x) {
            let lhs = norm(grad);
            let rhs = geo.big_g(geo.g(x));
            max_rel = max_rel.max((lhs - rhs).abs() / rhs.abs().max(1e-300));
            used += 1;
        }
    }
    let threshold = if geo.analytic_gradient() { 1e-8 } else { 1e-5 };
    CompatibilityReport {
        max_rel_defect: max_rel,
        samples_used: used,
        analytic: geo.analytic_gradient(),
        pass: used > 0 && max_rel <= threshold,
    }
}

/// Estimated structure of the set of finite accumulation values of g along
/// |x| -> infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccumulationClass {
    Empty,
    Bounded,
    AllReals,
}

#[derive(Debug, Clone)]
pub struct AccumulationReport {
    pub class: AccumulationClass,
    /// Per probed radius: (radius, min g, max g) over the sphere sample.
    pub ranges: Vec<(f64, f64, f64)>,
}

/// Deterministic, roughly uniform directions on the unit sphere.
fn sphere_directions(n: usize) -> Vec<Vec3> {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// Record the range of g on spheres of growing radius and classify the set
/// of finite accumulation values by the growth of the per-sphere extrema.
pub fn accumulation_set_probe(geo: &GeometryProfile, radii: &[f64]) -> Result<AccumulationReport> {
    if radii.len() < 2 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("need at least two strictly increasing radii".into()));
    }
    let dirs = sphere_directions(256);
    let mut ranges = Vec::with_capacity(radii.len());
    for &rad in radii {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in &dirs {
            let x = scale(*d, rad);
            if geo.is_singular(x) {
                continue;
            }
            let v = geo.g(x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        ranges.push((rad, lo, hi));
    }
    // Slopes of the extrema against the radius, over the outer half.
    let tail = &ranges[ranges.len() / 2..];
    let slope = |pick: fn(&(f64, f64, f64)) -> f64| -> f64 {
        let n = tail.len() as f64;
        let sx: f64 = tail.iter().map(|t| t.0).sum();
        let sy: f64 = tail.iter().map(pick).sum();
        let sxx: f64 = tail.iter().map(|t| t.0 * t.0).sum();
        let sxy: f64 = tail.iter().map(|t| t.0 * pick(t)).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    let slope_min = slope(|t| t.1);
    let slope_max = slope(|t| t.2);
    const EPS: f64 = 1e-3;
    let class = if slope_min > EPS {
        // Even the smallest value on large spheres escapes to +infinity.
        AccumulationClass::Empty
    } else if slope_min < -EPS && slope_max > EPS {
        AccumulationClass::AllReals
    } else {
        AccumulationClass::Bounded
    };
    Ok(AccumulationReport { class, ranges })
}

/// A scalar profile along level values.
#[derive(Debug, Clone)]
pub enum Profile {
    Constant(f64),
    /// base + amp · exp(-((ζ-center)/width)²)
    GaussianBump { base: f64, amp: f64, width: f64, center: f64 },
    /// base + amp · (1 - (ζ/radius)²)² inside |ζ| < radius, and *exactly*
    /// `base` outside — the compact-support constructions rely on bit-exact
    /// equality there.
    CompactBump { base: f64, amp: f64, radius: f64 },
    Expr(Expr),
}

impl Profile {
    pub fn eval(&self, zeta: f64) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::GaussianBump { base, amp, width, center } => {
                let u = (zeta - center) / width;
                base + amp * (-u * u).exp()
            }
            Profile::CompactBump { base, amp, radius } => {
                if zeta.abs() < *radius {
                    let u = 1.0 - (zeta / radius) * (zeta / radius);
                    base + amp * u * u
                } else {
                    *base
                }
            }
            Profile::Expr(e) => e.eval(&Bindings::zeta(zeta)),
        }
    }
}

/// The coefficient triple (s̃, q̃, Ṽ) along level values with the derived
/// σ̃ = √(q̃/s̃) and τ̃ = (q̃/Ṽ)^{1/(p-1)}, plus limit data for the
/// localization assumptions.
#[derive(Debug, Clone)]
pub struct CoefficientProfiles {
    pub s: Profile,
    pub q: Profile,
    pub v: Profile,
    pub sigma_inf: Option<f64>,
    pub tau_inf: Option<f64>,
    pub decay_delta: Option<f64>,
}

impl CoefficientProfiles {
    /// s̃ = q̃ = Ṽ ≡ 1 (σ̃ = τ̃ ≡ 1).
    pub fn unit() -> Self {
        CoefficientProfiles {
            s: Profile::Constant(1.0),
            q: Profile::Constant(1.0),
            v: Profile::Constant(1.0),
            sigma_inf: Some(1.0),
            tau_inf: Some(1.0),
            decay_delta: None,
        }
    }

    pub fn sigma(&self, zeta: f64) -> f64 {
        (self.q.eval(zeta) / self.s.eval(zeta)).sqrt()
    }

    pub fn tau(&self, zeta: f64, p: f64) -> f64 {
        (self.q.eval(zeta) / self.v.eval(zeta)).powf(1.0 / (p - 1.0))
    }

    /// All three coefficients must be strictly positive on the sample.
    pub fn validate_positive(&self, zetas: &[f64]) -> Result<()> {
        for &z in zetas {
            for (name, prof) in [("s", &self.s), ("q", &self.q), ("V", &self.v)] {
                let val = prof.eval(z);
                if !(val > 0.0) || !val.is_finite() {
                    return Err(Error::Domain(format!(
                        "coefficient {name} is {val} at zeta={z}; must be positive"
                    )));
                }
            }
        }
        Ok(())
    }

    /// σ̃ <= σ∞ on the sample (required by the focusing breather family).
    pub fn sigma_at_most_inf(&self, zetas: &[f64]) -> Result<bool> {
        let s_inf = self.sigma_inf.ok_or_else(|| Error::MissingLimit("sigma_inf unset".into()))?;
        Ok(zetas.iter().all(|&z| self.sigma(z) <= s_inf + 1e-14))
    }

    /// σ̃ >= σ∞ on the sample (defocusing / dark families).
    pub fn sigma_at_least_inf(&self, zetas: &[f64]) -> Result<bool> {
        let s_inf = self.sigma_inf.ok_or_else(|| Error::MissingLimit("sigma_inf unset".into()))?;
        Ok(zetas.iter().all(|&z| self.sigma(z) >= s_inf - 1e-14))
    }
}
