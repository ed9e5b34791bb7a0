//! Library surface of the command-line tool: config parsing, field
//! construction from a [`config::RunConfig`], and CSV/JSON export.

pub mod config;
pub mod export;

use std::sync::Arc;

use anyhow::{bail, Result};

use config::{KindConfig, RunConfig, VariantConfig};
use curlwave_core::expr::{Bindings, Expr};
use curlwave_core::synthesis::{
    apply_phase_shift, synth_breather, synth_dark_breather, synth_dark_constant,
    synth_explicit_rogue, synth_monochromatic, synth_rogue, synth_rogue_approximant, BreatherSign,
    EquationKind, ScalarFn, WaveField,
};
use curlwave_core::verification::GridSpec;

pub fn equation_kind(v: VariantConfig) -> EquationKind {
    match v {
        VariantConfig::Plus => EquationKind::BreatherPlus,
        VariantConfig::Minus => EquationKind::BreatherMinus,
        VariantConfig::Rogue => EquationKind::Rogue,
    }
}

fn shift_fn(expr_src: &str) -> Result<ScalarFn> {
    let expr = Expr::parse(expr_src)?;
    Ok(Arc::new(move |zeta: f64| expr.eval(&Bindings::zeta(zeta))))
}

/// Builds the synthesized field described by the config.
pub fn build_field(cfg: &RunConfig) -> Result<WaveField> {
    let kind = cfg.kind.ok_or_else(|| anyhow::anyhow!("config is missing \"kind\""))?;
    let geo = config::build_geometry(
        cfg.geometry.as_ref().ok_or_else(|| anyhow::anyhow!("config is missing \"geometry\""))?,
    )?;
    let coeffs = config::build_coefficients(
        cfg.coefficients
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("config is missing \"coefficients\""))?,
    )?;
    let p = cfg.p;
    let shift = cfg.phase_shift.as_deref().map(shift_fn).transpose()?;
    let mut field = match kind {
        KindConfig::BreatherPlus => synth_breather(BreatherSign::Plus, p, geo, coeffs)?,
        KindConfig::BreatherMinus => synth_breather(BreatherSign::Minus, p, geo, coeffs)?,
        KindConfig::DarkBreather => {
            let omega = cfg.omega.ok_or_else(|| anyhow::anyhow!("dark_breather needs omega"))?;
            synth_dark_breather(p, geo, coeffs, omega)?
        }
        KindConfig::DarkConstant => synth_dark_constant(p, geo, coeffs)?,
        KindConfig::Rogue => synth_rogue(p, geo, coeffs, shift.clone())?,
        KindConfig::RogueApproximant => {
            let t = cfg.period.ok_or_else(|| anyhow::anyhow!("rogue_approximant needs period"))?;
            synth_rogue_approximant(p, geo, coeffs, t)?
        }
        KindConfig::Monochromatic => {
            let omega = cfg.omega.ok_or_else(|| anyhow::anyhow!("monochromatic needs omega"))?;
            let eq = cfg
                .equation
                .ok_or_else(|| anyhow::anyhow!("monochromatic needs equation"))?;
            synth_monochromatic(equation_kind(eq), p, geo, coeffs, omega)?
        }
        KindConfig::ExplicitRogue => synth_explicit_rogue(geo, coeffs)?,
    };
    // The rogue constructor consumes the shift itself; apply it to the other
    // kinds after construction.
    if kind != KindConfig::Rogue {
        if let Some(a) = shift {
            field = apply_phase_shift(&field, a)?;
        }
    }
    if cfg.amp_scale != 1.0 {
        field = field.scaled(cfg.amp_scale);
    }
    Ok(field)
}

pub fn build_grid(cfg: &RunConfig) -> Result<GridSpec> {
    let g = cfg.grid.as_ref().ok_or_else(|| anyhow::anyhow!("config is missing \"grid\""))?;
    Ok(GridSpec::new(g.extent, g.resolution, g.t_extent, g.t_samples)?)
}

/// Resolves the worker thread count: CLI flag, then the CURLWAVE_THREADS
/// environment variable, then the rayon default.
pub fn configure_threads(flag: Option<usize>) -> Result<usize> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("CURLWAVE_THREADS") {
            Ok(s) => Some(s.parse::<usize>().map_err(|_| {
                anyhow::anyhow!("CURLWAVE_THREADS must be a positive integer, got {s:?}")
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
        Ok(n)
    } else {
        Ok(rayon::current_num_threads())
    }
}
