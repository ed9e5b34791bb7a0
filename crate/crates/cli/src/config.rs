//! JSON run configuration: strict parsing (unknown keys rejected) and
//! per-subcommand validation.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use curlwave_core::expr::Expr;
use curlwave_core::geometry::{CoefficientProfiles, GeometryProfile, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindConfig {
    BreatherPlus,
    BreatherMinus,
    DarkBreather,
    DarkConstant,
    Rogue,
    RogueApproximant,
    Monochromatic,
    ExplicitRogue,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "family", rename_all = "snake_case")]
pub enum GeometryConfig {
    ConeAxial { gamma: f64, r0: f64 },
    ConeAbsAxial { gamma: f64, r0: f64 },
    Torus { r0: f64 },
    Custom { g: String, big_g: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "shape", rename_all = "snake_case")]
pub enum ProfileConfig {
    Constant { value: f64 },
    GaussianBump { base: f64, amp: f64, width: f64, center: f64 },
    CompactBump { base: f64, amp: f64, radius: f64 },
    Expr { expr: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffConfig {
    pub s: ProfileConfig,
    pub q: ProfileConfig,
    pub v: ProfileConfig,
    #[serde(default)]
    pub sigma_inf: Option<f64>,
    #[serde(default)]
    pub tau_inf: Option<f64>,
    #[serde(default)]
    pub decay_delta: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub extent: f64,
    pub resolution: usize,
    pub t_extent: f64,
    pub t_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantConfig {
    Plus,
    Minus,
    Rogue,
}

/// Tabulation request for the `periodmap` subcommand: sweep either the level
/// value c (emitting the period and, for the rogue case, its derivative) or
/// the period s (emitting the inverse map).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodMapConfig {
    pub variant: VariantConfig,
    /// "c" or "s".
    pub sweep: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: f64,
    #[serde(default)]
    pub kind: Option<KindConfig>,
    #[serde(default)]
    pub equation: Option<VariantConfig>,
    #[serde(default)]
    pub geometry: Option<GeometryConfig>,
    #[serde(default)]
    pub coefficients: Option<CoeffConfig>,
    #[serde(default)]
    pub omega: Option<f64>,
    /// Temporal period T for the rogue approximant.
    #[serde(default)]
    pub period: Option<f64>,
    /// Phase-shift expression in `zeta`.
    #[serde(default)]
    pub phase_shift: Option<String>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub periodmap: Option<PeriodMapConfig>,
    /// Period list for the `approximate` subcommand.
    #[serde(default)]
    pub t_list: Option<Vec<f64>>,
    /// Scalar amplitude multiplier; values other than 1 produce a
    /// deliberately corrupted field for negative-control runs.
    #[serde(default = "default_amp_scale")]
    pub amp_scale: f64,
}

fn default_tolerance() -> f64 {
    1e-12
}

fn default_amp_scale() -> f64 {
    1.0
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .with_context(|| format!("invalid config {}", path.display()))?;
    validate_common(&cfg)?;
    Ok(cfg)
}

fn validate_common(cfg: &RunConfig) -> Result<()> {
    if !(cfg.p > 1.0) {
        bail!("p must exceed 1");
    }
    if !(cfg.tolerance > 0.0) {
        bail!("tolerance must be positive");
    }
    if let Some(g) = &cfg.grid {
        if g.resolution < 2 {
            bail!("grid.resolution must be at least 2 per axis");
        }
        if g.t_samples < 1 {
            bail!("grid.t_samples must be at least 1");
        }
    }
    if let Some(pm) = &cfg.periodmap {
        if pm.count < 1 {
            bail!("periodmap.count must be at least 1");
        }
        if !(pm.min < pm.max) && pm.count > 1 {
            bail!("periodmap sweep needs min < max");
        }
        if pm.sweep != "c" && pm.sweep != "s" {
            bail!("periodmap.sweep must be \"c\" or \"s\"");
        }
    }
    Ok(())
}

/// Checks the fields required by a specific subcommand.
pub fn validate_for(cfg: &RunConfig, subcommand: &str) -> Result<()> {
    let needs_field = matches!(subcommand, "synthesize" | "verify" | "approximate");
    if needs_field {
        if cfg.kind.is_none() {
            bail!("{subcommand} requires \"kind\"");
        }
        if cfg.geometry.is_none() {
            bail!("{subcommand} requires \"geometry\"");
        }
        if cfg.coefficients.is_none() {
            bail!("{subcommand} requires \"coefficients\"");
        }
        if cfg.grid.is_none() {
            bail!("{subcommand} requires \"grid\"");
        }
    }
    match subcommand {
        "periodmap" => {
            if cfg.periodmap.is_none() {
                bail!("periodmap requires a \"periodmap\" section");
            }
        }
        "approximate" => {
            if cfg.kind != Some(KindConfig::Rogue) {
                bail!("approximate requires kind = \"rogue\"");
            }
            if cfg.t_list.as_ref().map_or(true, |l| l.is_empty()) {
                bail!("approximate requires a non-empty \"t_list\"");
            }
        }
        _ => {}
    }
    match cfg.kind {
        Some(KindConfig::DarkBreather) | Some(KindConfig::Monochromatic) if cfg.omega.is_none() => {
            bail!("this kind requires \"omega\"")
        }
        Some(KindConfig::RogueApproximant) if cfg.period.is_none() => {
            bail!("rogue_approximant requires \"period\"")
        }
        Some(KindConfig::Monochromatic) if cfg.equation.is_none() => {
            bail!("monochromatic requires \"equation\"")
        }
        _ => {}
    }
    Ok(())
}

pub fn build_geometry(cfg: &GeometryConfig) -> Result<GeometryProfile> {
    Ok(match cfg {
        GeometryConfig::ConeAxial { gamma, r0 } => GeometryProfile::cone_axial(*gamma, *r0)?,
        GeometryConfig::ConeAbsAxial { gamma, r0 } => {
            GeometryProfile::cone_abs_axial(*gamma, *r0)?
        }
        GeometryConfig::Torus { r0 } => GeometryProfile::torus(*r0)?,
        GeometryConfig::Custom { g, big_g } => GeometryProfile::custom(g, big_g)?,
    })
}

pub fn build_profile(cfg: &ProfileConfig) -> Result<Profile> {
    Ok(match cfg {
        ProfileConfig::Constant { value } => Profile::Constant(*value),
        ProfileConfig::GaussianBump { base, amp, width, center } => Profile::GaussianBump {
            base: *base,
            amp: *amp,
            width: *width,
            center: *center,
        },
        ProfileConfig::CompactBump { base, amp, radius } => {
            Profile::CompactBump { base: *base, amp: *amp, radius: *radius }
        }
        ProfileConfig::Expr { expr } => Profile::Expr(Expr::parse(expr)?),
    })
}

pub fn build_coefficients(cfg: &CoeffConfig) -> Result<CoefficientProfiles> {
    Ok(CoefficientProfiles {
        s: build_profile(&cfg.s)?,
        q: build_profile(&cfg.q)?,
        v: build_profile(&cfg.v)?,
        sigma_inf: cfg.sigma_inf,
        tau_inf: cfg.tau_inf,
        decay_delta: cfg.decay_delta,
    })
}
