//! Quantitative checks on synthesized fields: equation residuals, discrete
//! curl, parallelism, periodicity, exponential-decay fits, continuity-in-c
//! bounds, and the period-approximation convergence table.
//!
//! Grid evaluation parallelizes over points; all reductions run in a fixed
//! sequential order over the collected per-point results, so reports are
//! reproducible.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{norm, Vec3};
use crate::phase_plane;
use crate::synthesis::{synth_rogue_approximant, FieldKind, WaveField};

/// Finite-difference step for the second time derivative.
pub const FD_STEP: f64 = 1e-3;

/// A fitted exponent with the standard error of the fit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FittedExponent {
    pub exponent: f64,
    pub stderr: f64,
}

/// Aggregated check results; partially filled by the individual operations
/// and completely by [`run_suite`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub residual_max: f64,
    pub residual_l2: f64,
    pub curl_defect: f64,
    pub curl_order: Option<f64>,
    pub parallelism_defect: f64,
    pub periodicity_defect: f64,
    pub spatial_decay: Option<FittedExponent>,
    pub spacetime_decay: Option<FittedExponent>,
    pub support_radius: Option<f64>,
    pub convergence_table: Vec<(f64, f64)>,
    pub holder_ratios: Vec<f64>,
    pub pass_flags: BTreeMap<String, bool>,
}

impl Diagnostics {
    pub fn to_json(&self) -> String {
        // Serialization of these plain fields cannot fail.
        serde_json::to_string_pretty(self).expect("diagnostics serialize")
    }

    pub fn all_pass(&self) -> bool {
        self.pass_flags.values().all(|&b| b)
    }
}

/// Uniform space-time sampling box: the cube [-extent, extent]^3 with
/// `resolution` points per axis and `t_samples` times in [-t_extent,
/// t_extent].
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub extent: f64,
    pub resolution: usize,
    pub t_extent: f64,
    pub t_samples: usize,
}

impl GridSpec {
    pub fn new(extent: f64, resolution: usize, t_extent: f64, t_samples: usize) -> Result<Self> {
        if resolution < 2 || t_samples < 1 {
            return Err(Error::Domain(
                "grid needs at least 2 points per axis and 1 time sample".into(),
            ));
        }
        Ok(GridSpec { extent, resolution, t_extent, t_samples })
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.resolution)
            .map(|i| -self.extent + 2.0 * self.extent * i as f64 / (self.resolution - 1) as f64)
            .collect()
    }

    pub fn times(&self) -> Vec<f64> {
        if self.t_samples == 1 {
            return vec![0.0];
        }
        (0..self.t_samples)
            .map(|i| {
                -self.t_extent + 2.0 * self.t_extent * i as f64 / (self.t_samples - 1) as f64
            })
            .collect()
    }

    /// All grid points off the singular set of `field`'s geometry.
    pub fn points(&self, field: &WaveField) -> Vec<Vec3> {
        let axis = self.axis();
        let mut pts = Vec::new();
        for &a in &axis {
            for &b in &axis {
                for &c in &axis {
                    let x = [a, b, c];
                    if !field.geo.is_singular(x) {
                        pts.push(x);
                    }
                }
            }
        }
        pts
    }
}

/// Real part of the field; identical to `eval` for real-valued kinds and
/// well-defined for the monochromatic one.
fn eval_re(field: &WaveField, x: Vec3, t: f64) -> Result<Vec3> {
    Ok(field.eval_complex(x, t)?.0)
}

fn stencil_second_derivative(f: [f64; 5], h: f64) -> f64 {
    // Zero-sum form of (-1, 16, -30, 16, -1)/12h^2: exact zero on constants.
    let f0 = f[2];
    (-(f[0] - f0) + 16.0 * (f[1] - f0) + 16.0 * (f[3] - f0) - (f[4] - f0)) / (12.0 * h * h)
}

/// Pointwise residual of the reduced scalar equation at (ζ, t), with the
/// second derivative from a five-point stencil of width `h`. Complex kinds
/// are checked per component with the true complex modulus in the
/// nonlinearity.
fn scalar_residual(field: &WaveField, zeta: f64, t: f64, h: f64) -> Result<f64> {
    let mut re = [0.0; 5];
    let mut im = [0.0; 5];
    for (i, k) in (-2i32..=2).enumerate() {
        let (r, m) = field.psi_complex(zeta, t + k as f64 * h)?;
        re[i] = r;
        im[i] = m;
    }
    let s = field.coeffs.s.eval(zeta);
    let q = field.coeffs.q.eval(zeta);
    let v = field.coeffs.v.eval(zeta);
    let modulus = re[2].hypot(im[2]);
    let amp = if modulus > 0.0 { modulus.powf(field.p - 1.0) } else { 0.0 };
    let component = |vals: [f64; 5]| -> f64 {
        let dd = stencil_second_derivative(vals, h);
        let psi = vals[2];
        let nl = amp * psi;
        use crate::synthesis::EquationKind::*;
        match field.equation {
            BreatherPlus => s * dd + q * psi + v * nl,
            BreatherMinus => s * dd + q * psi - v * nl,
            Rogue => s * dd - q * psi + v * nl,
        }
    };
    let r = component(re).abs();
    let m = if im.iter().all(|&x| x == 0.0) { 0.0 } else { component(im).abs() };
    Ok(r.max(m))
}

/// Residual, parallelism, and periodicity defects over the grid, with the
/// default finite-difference step.
pub fn ode_residual(field: &WaveField, grid: &GridSpec) -> Result<Diagnostics> {
    ode_residual_with_step(field, grid, FD_STEP)
}

/// Same with an explicit stencil width, for refinement studies.
pub fn ode_residual_with_step(field: &WaveField, grid: &GridSpec, h: f64) -> Result<Diagnostics> {
    let pts = grid.points(field);
    let ts = grid.times();
    if pts.is_empty() {
        return Err(Error::Domain("grid contains no admissible points".into()));
    }
    struct PointStats {
        res_max: f64,
        res_sq: f64,
        n: usize,
        field_max: f64,
        cross_max: f64,
        period_gap: f64,
    }
    let period = field.period;
    let per_point: Vec<Result<PointStats>> = pts
        .par_iter()
        .map(|&x| {
            let zeta = field.geo.g(x);
            let dir = field.geo.direction(x)?;
            let mut st = PointStats {
                res_max: 0.0,
                res_sq: 0.0,
                n: 0,
                field_max: 0.0,
                cross_max: 0.0,
                period_gap: 0.0,
            };
            for &t in &ts {
                let r = scalar_residual(field, zeta, t, h)?;
                st.res_max = st.res_max.max(r);
                st.res_sq += r * r;
                st.n += 1;
                let u = eval_re(field, x, t)?;
                st.field_max = st.field_max.max(norm(u));
                let cross = [
                    u[1] * dir[2] - u[2] * dir[1],
                    u[2] * dir[0] - u[0] * dir[2],
                    u[0] * dir[1] - u[1] * dir[0],
                ];
                st.cross_max = st.cross_max.max(norm(cross));
                if let Some(t_p) = period {
                    let u1 = eval_re(field, x, t + t_p)?;
                    let gap = (0..3).map(|i| (u1[i] - u[i]).abs()).fold(0.0, f64::max);
                    st.period_gap = st.period_gap.max(gap);
                }
            }
            Ok(st)
        })
        .collect();
    let mut d = Diagnostics::default();
    let mut sq = 0.0;
    let mut n = 0usize;
    let mut field_max: f64 = 0.0;
    let mut cross_max: f64 = 0.0;
    let mut period_gap: f64 = 0.0;
    for st in per_point {
        let st = st?;
        d.residual_max = d.residual_max.max(st.res_max);
        sq += st.res_sq;
        n += st.n;
        field_max = field_max.max(st.field_max);
        cross_max = cross_max.max(st.cross_max);
        period_gap = period_gap.max(st.period_gap);
    }
    d.residual_l2 = (sq / n as f64).sqrt();
    let scale = if field_max > 0.0 { field_max } else { 1.0 };
    d.parallelism_defect = cross_max / scale;
    d.periodicity_defect = period_gap / scale;
    Ok(d)
}

/// Max norm of the second-order central-difference curl of an arbitrary
/// vector-field evaluator over the given points and times, normalized by the
/// max field norm. Points whose stencil neighbors hit the singular set are
/// skipped.
pub fn discrete_curl_defect_of<F>(f: &F, pts: &[Vec3], ts: &[f64], h: f64) -> Result<f64>
where
    F: Fn(Vec3, f64) -> Result<Vec3> + Sync,
{
    let per_point: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&x| {
            let mut curl_max: f64 = 0.0;
            let mut u_max: f64 = 0.0;
            for &t in ts {
                let mut plus = [[0.0; 3]; 3];
                let mut minus = [[0.0; 3]; 3];
                let mut ok = true;
                for i in 0..3 {
                    let mut xp = x;
                    xp[i] += h;
                    let mut xm = x;
                    xm[i] -= h;
                    match (f(xp, t), f(xm, t)) {
                        (Ok(a), Ok(b)) => {
                            plus[i] = a;
                            minus[i] = b;
                        }
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let d = |i: usize, j: usize| (plus[i][j] - minus[i][j]) / (2.0 * h);
                let curl = [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)];
                curl_max = curl_max.max(norm(curl));
                if let Ok(u) = f(x, t) {
                    u_max = u_max.max(norm(u));
                }
            }
            (curl_max, u_max)
        })
        .collect();
    let mut curl_max: f64 = 0.0;
    let mut u_max: f64 = 0.0;
    for (c, u) in per_point {
        curl_max = curl_max.max(c);
        u_max = u_max.max(u);
    }
    if u_max == 0.0 {
        return Ok(0.0);
    }
    Ok(curl_max / u_max)
}

/// Discrete curl defect of a synthesized field over the grid.
pub fn discrete_curl_defect(field: &WaveField, grid: &GridSpec, h: f64) -> Result<f64> {
    let pts = grid.points(field);
    let ts = grid.times();
    discrete_curl_defect_of(&|x, t| eval_re(field, x, t), &pts, &ts, h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayMode {
    /// Fit log max over spheres |x| = R (sup over the time samples) against
    /// R.
    Spatial,
    /// Fit log max over the cones |x| + |t| = R against R.
    Spacetime,
}

fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0f64),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = norm(v);
        if n > 1e-3 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let pred = my + slope * (x - mx);
            (y - pred) * (y - pred)
        })
        .sum();
    let stderr = (ssr / (n - 2.0).max(1.0) / sxx).sqrt();
    (slope, stderr)
}

/// Least-squares exponential-decay fit of |U - U∞| over shells. Returns the
/// decay exponent (minus the fitted slope of the log) with its standard
/// error; `InsufficientDecay` when the slope is not significantly negative
/// or the field vanishes on the shells.
pub fn decay_fit(
    field: &WaveField,
    mode: DecayMode,
    shells: &[f64],
    ts: &[f64],
    seed: u64,
) -> Result<FittedExponent> {
    if shells.len() < 4 {
        return Err(Error::Domain("decay fit needs at least 4 shells".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const DIRECTIONS: usize = 64;
    let mut radii = Vec::new();
    let mut logs = Vec::new();
    for &rad in shells {
        let mut m: f64 = 0.0;
        for _ in 0..DIRECTIONS {
            let dir = random_direction(&mut rng);
            match mode {
                DecayMode::Spatial => {
                    let x = [rad * dir[0], rad * dir[1], rad * dir[2]];
                    if field.geo.is_singular(x) {
                        continue;
                    }
                    for &t in ts {
                        let u = eval_re(field, x, t)?;
                        let bg = field.reference_eval(x, t)?;
                        let gap = [u[0] - bg[0], u[1] - bg[1], u[2] - bg[2]];
                        m = m.max(norm(gap));
                    }
                }
                DecayMode::Spacetime => {
                    let u_frac: f64 = rng.gen_range(0.0..1.0);
                    let t = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * (1.0 - u_frac) * rad;
                    let x = [
                        u_frac * rad * dir[0],
                        u_frac * rad * dir[1],
                        u_frac * rad * dir[2],
                    ];
                    if field.geo.is_singular(x) {
                        continue;
                    }
                    let u = eval_re(field, x, t)?;
                    let bg = field.reference_eval(x, t)?;
                    let gap = [u[0] - bg[0], u[1] - bg[1], u[2] - bg[2]];
                    m = m.max(norm(gap));
                }
            }
        }
        if m <= 1e-300 {
            return Err(Error::InsufficientDecay(format!(
                "field indistinguishable from the background on the shell at {rad}"
            )));
        }
        radii.push(rad);
        logs.push(m.ln());
    }
    let (slope, stderr) = linear_fit(&radii, &logs);
    if slope + 2.0 * stderr >= 0.0 {
        return Err(Error::InsufficientDecay(format!(
            "fitted slope {slope} ± {stderr} is not significantly negative"
        )));
    }
    Ok(FittedExponent { exponent: -slope, stderr })
}

/// Largest sampled |x| at which the field is (exactly) nonzero for some
/// sampled time; `None` when the field vanishes on the whole grid.
pub fn support_radius(field: &WaveField, grid: &GridSpec) -> Result<Option<f64>> {
    let pts = grid.points(field);
    let ts = grid.times();
    let mut r: Option<f64> = None;
    for &x in &pts {
        for &t in &ts {
            let u = eval_re(field, x, t)?;
            if norm(u) != 0.0 {
                let rad = norm(x);
                r = Some(r.map_or(rad, |cur: f64| cur.max(rad)));
                break;
            }
        }
    }
    Ok(r)
}

/// Sup-grid distances between the periodic approximants U_T and the rogue
/// field, per T, and the strict-decrease flag.
pub fn convergence_check(
    rogue: &WaveField,
    t_list: &[f64],
    grid: &GridSpec,
) -> Result<(Vec<(f64, f64)>, bool)> {
    if rogue.kind != FieldKind::RogueWave {
        return Err(Error::Domain("convergence check expects a rogue-wave field".into()));
    }
    let pts = grid.points(rogue);
    let ts = grid.times();
    let mut table = Vec::new();
    for &t_period in t_list {
        let approx = synth_rogue_approximant(
            rogue.p,
            (*rogue.geo).clone(),
            (*rogue.coeffs).clone(),
            t_period,
        )?;
        let sup = pts
            .par_iter()
            .map(|&x| {
                let mut m: f64 = 0.0;
                for &t in &ts {
                    let a = eval_re(&approx, x, t)?;
                    let b = eval_re(rogue, x, t)?;
                    let gap = (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
                    m = m.max(gap);
                }
                Ok(m)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        table.push((t_period, sup));
    }
    let monotone = table.windows(2).all(|w| w[1].1 < w[0].1);
    Ok((table, monotone))
}

/// Result of the continuity-in-c check on the normalized rogue orbits.
#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    pub ratios: Vec<f64>,
    /// The bound constant C_T = H e^{T(2 + p(p+1)/2)/2}.
    pub c_t: f64,
    /// Sampled square-root-Hölder constant of the turning-point map c ->
    /// a⁻¹(c).
    pub h_const: f64,
    pub pass: bool,
}

/// Checks ‖y(·,c₁) − y(·,c₂)‖_{L∞[0,T]} ≤ C_T √|c₁−c₂| on the normalized
/// rogue orbit family, with C_T built from a sampled Hölder constant of the
/// initial-condition map and the Gronwall rate of the oscillator.
pub fn holder_check(p: f64, t_max: f64, c_pairs: &[(f64, f64)]) -> Result<HolderReport> {
    let c_min = (1.0 - p) / (1.0 + p);
    for &(c1, c2) in c_pairs {
        for c in [c1, c2] {
            if !(c >= c_min && c <= 0.0) {
                return Err(Error::Domain(format!("c = {c} outside [{c_min}, 0]")));
            }
        }
    }
    // Sampled Hölder-1/2 constant of a⁻¹: adjacent quotients on a fine grid
    // (captures the square-root behavior at the center level) plus the
    // quotients of the supplied pairs themselves.
    let mut h_const: f64 = 0.0;
    const NH: usize = 400;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=NH {
        let c = c_min + (0.0 - c_min) * i as f64 / NH as f64;
        let y = phase_plane::a_inverse(p, c)?;
        if let Some((cp, yp)) = prev {
            let q = (y - yp).abs() / (c - cp).abs().sqrt();
            h_const = h_const.max(q);
        }
        prev = Some((c, y));
    }
    for &(c1, c2) in c_pairs {
        if c1 != c2 {
            let q = (phase_plane::a_inverse(p, c1)? - phase_plane::a_inverse(p, c2)?).abs()
                / (c1 - c2).abs().sqrt();
            h_const = h_const.max(q);
        }
    }
    let rate = (2.0 + p * (p + 1.0) / 2.0) / 2.0;
    let c_t = h_const * (rate * t_max).exp();
    const NT: usize = 257;
    let ratios = c_pairs
        .par_iter()
        .map(|&(c1, c2)| {
            if c1 == c2 {
                return Ok(0.0);
            }
            let o1 = phase_plane::normalized_small_orbit(p, c1)?;
            let o2 = phase_plane::normalized_small_orbit(p, c2)?;
            let mut sup: f64 = 0.0;
            for k in 0..NT {
                let t = t_max * k as f64 / (NT - 1) as f64;
                sup = sup.max((o1.eval(t).0 - o2.eval(t).0).abs());
            }
            Ok(sup / (c1 - c2).abs().sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let pass = ratios.iter().all(|&r| r <= c_t);
    Ok(HolderReport { ratios, c_t, h_const, pass })
}

/// Runs residual, parallelism, periodicity, curl (with a refinement-order
/// estimate), and support checks, and sets the pass flags.
pub fn run_suite(field: &WaveField, grid: &GridSpec) -> Result<Diagnostics> {
    let mut d = ode_residual(field, grid)?;
    let h = 1e-2;
    let coarse = discrete_curl_defect(field, grid, h)?;
    let fine = discrete_curl_defect(field, grid, h / 2.0)?;
    d.curl_defect = fine;
    d.curl_order = if coarse > 1e-13 && fine > 1e-13 {
        Some((coarse / fine).log2())
    } else {
        None
    };
    d.support_radius = support_radius(field, grid)?;
    d.pass_flags.insert("residual".into(), d.residual_max <= 1e-6);
    d.pass_flags.insert("parallelism".into(), d.parallelism_defect <= 1e-10);
    if field.period.is_some() {
        d.pass_flags.insert("periodicity".into(), d.periodicity_defect <= 1e-8);
    }
    let curl_ok = fine <= 1e-10 || d.curl_order.map_or(false, |o| o >= 1.9);
    d.pass_flags.insert("curl".into(), curl_ok);
    Ok(d)
}
