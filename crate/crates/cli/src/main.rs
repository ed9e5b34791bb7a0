//! Command-line driver. Exit codes: 0 all checks pass, 1 a quantitative
//! check failed, 2 usage or configuration error.

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use curlwave::config::{self, RunConfig, VariantConfig};
use curlwave::{build_field, build_grid, configure_threads};
use curlwave_core::period_maps::{invert_period, period, period_derivative_rogue};
use curlwave_core::phase_plane::{OdeCase, Variant};
use curlwave_core::synthesis::FieldKind;
use curlwave_core::verification::{convergence_check, decay_fit, run_suite, DecayMode};

#[derive(Parser)]
#[command(name = "curlwave", about = "Construct and verify breather and rogue wave fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output path (CSV or JSON depending on the subcommand); stdout for
    /// JSON reports when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled checks; recorded in output metadata.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (falls back to CURLWAVE_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the period map (and its derivative) or its inverse.
    Periodmap(Common),
    /// Evaluate a synthesized field on a grid and export it as CSV.
    Synthesize(Common),
    /// Run the verification suite and emit Diagnostics JSON.
    Verify(Common),
    /// Tabulate the periodic-approximant convergence toward the rogue wave.
    Approximate(Common),
}

fn main() {
    let cli = Cli::parse();
    let (name, common) = match &cli.cmd {
        Cmd::Periodmap(c) => ("periodmap", c.clone()),
        Cmd::Synthesize(c) => ("synthesize", c.clone()),
        Cmd::Verify(c) => ("verify", c.clone()),
        Cmd::Approximate(c) => ("approximate", c.clone()),
    };
    let code = match run(name, &common) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // Configuration and usage problems are distinguished from check
            // failures by the Ok(1) path; everything reaching here is 2.
            2
        }
    };
    std::process::exit(code);
}

fn run(name: &str, common: &Common) -> Result<i32> {
    let cfg = config::parse_config(&common.config)?;
    config::validate_for(&cfg, name)?;
    let threads = configure_threads(common.threads)?;
    match name {
        "periodmap" => cmd_periodmap(&cfg, common.out.as_deref()),
        "synthesize" => cmd_synthesize(&cfg, common.out.as_deref()),
        "verify" => cmd_verify(&cfg, common.out.as_deref(), common.seed, threads),
        "approximate" => cmd_approximate(&cfg, common.out.as_deref(), common.seed, threads),
        _ => unreachable!(),
    }
}

fn variant(v: VariantConfig) -> Variant {
    match v {
        VariantConfig::Plus => Variant::PlusFocusing,
        VariantConfig::Minus => Variant::MinusDefocusing,
        VariantConfig::Rogue => Variant::Rogue,
    }
}

fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_periodmap(cfg: &RunConfig, out: Option<&Path>) -> Result<i32> {
    let pm = cfg.periodmap.as_ref().unwrap();
    let case = OdeCase::new(variant(pm.variant), cfg.p)?;
    let rogue = pm.variant == VariantConfig::Rogue;
    let mut text = String::new();
    let values = |i: usize| {
        if pm.count == 1 {
            pm.min
        } else {
            pm.min + (pm.max - pm.min) * i as f64 / (pm.count - 1) as f64
        }
    };
    match pm.sweep.as_str() {
        "c" => {
            text.push_str(if rogue { "c,period,period_derivative\n" } else { "c,period\n" });
            for i in 0..pm.count {
                let c = values(i);
                let l = period(case, cfg.p, c)?;
                if rogue {
                    let lp = period_derivative_rogue(cfg.p, c)?;
                    text.push_str(&format!("{c:.16e},{l:.16e},{lp:.16e}\n"));
                } else {
                    text.push_str(&format!("{c:.16e},{l:.16e}\n"));
                }
            }
        }
        "s" => {
            text.push_str("s,c\n");
            for i in 0..pm.count {
                let s = values(i);
                let c = invert_period(case, cfg.p, s)?;
                text.push_str(&format!("{s:.16e},{c:.16e}\n"));
            }
        }
        _ => unreachable!(),
    }
    write_text(&text, out)?;
    Ok(0)
}

fn cmd_synthesize(cfg: &RunConfig, out: Option<&Path>) -> Result<i32> {
    let Some(out) = out else {
        bail!("synthesize requires --out for the CSV");
    };
    let field = build_field(cfg)?;
    let grid = build_grid(cfg)?;
    curlwave::export::export_field(&field, &grid, out)?;
    Ok(0)
}

fn cmd_verify(cfg: &RunConfig, out: Option<&Path>, seed: u64, threads: usize) -> Result<i32> {
    let field = build_field(cfg)?;
    let grid = build_grid(cfg)?;
    let mut diag = run_suite(&field, &grid)?;
    // Exponential-localization fit for the decaying kinds, when a target
    // rate was configured.
    if field.decay_target.is_some()
        && matches!(field.kind, FieldKind::RogueWave | FieldKind::ExplicitRogue | FieldKind::DarkBreather)
    {
        let g = cfg.grid.as_ref().unwrap();
        let shells: Vec<f64> =
            (0..6).map(|i| g.extent * (0.4 + 0.5 * i as f64 / 5.0)).collect();
        let ts = grid.times();
        match decay_fit(&field, DecayMode::Spatial, &shells, &ts, seed) {
            Ok(fit) => {
                let target = field.decay_target.unwrap();
                diag.pass_flags.insert(
                    "spatial_decay".into(),
                    fit.exponent + 2.0 * fit.stderr >= target,
                );
                diag.spatial_decay = Some(fit);
            }
            Err(e) => {
                diag.pass_flags.insert("spatial_decay".into(), false);
                eprintln!("decay fit failed: {e}");
            }
        }
    }
    let pass = diag.all_pass();
    let report = json!({
        "diagnostics": serde_json::to_value(&diag)?,
        "seed": seed,
        "threads": threads,
        "pass": pass,
    });
    curlwave::export::write_json(&report, out)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_approximate(cfg: &RunConfig, out: Option<&Path>, seed: u64, threads: usize) -> Result<i32> {
    let field = build_field(cfg)?;
    let grid = build_grid(cfg)?;
    let t_list = cfg.t_list.clone().unwrap();
    let (table, monotone) = convergence_check(&field, &t_list, &grid)?;
    let report = json!({
        "table": table.iter().map(|(t, e)| json!({"T": t, "sup_error": e})).collect::<Vec<_>>(),
        "monotone_decrease": monotone,
        "seed": seed,
        "threads": threads,
    });
    curlwave::export::write_json(&report, out)?;
    Ok(if monotone { 0 } else { 1 })
}
