//! End-to-end tests of the command-line surface: config validation, CSV
//! round trips, and the exit-code contract.

use std::path::Path;
use std::process::Command;

use curlwave::config::{parse_config, validate_for};
use curlwave::export::read_field_csv;
use curlwave::{build_field, build_grid};

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn rogue_config(extra: &str) -> String {
    format!(
        r#"{{
  "p": 3.0,
  "kind": "explicit_rogue",
  "geometry": {{ "family": "torus", "r0": 0.0 }},
  "coefficients": {{
    "s": {{ "shape": "constant", "value": 1.0 }},
    "q": {{ "shape": "constant", "value": 1.0 }},
    "v": {{ "shape": "expr", "expr": "exp(zeta)" }},
    "sigma_inf": 1.0,
    "decay_delta": 1.0
  }},
  "grid": {{ "extent": 2.0, "resolution": 4, "t_extent": 1.0, "t_samples": 3 }}{extra}
}}"#
    )
}

#[test]
fn parses_minimal_config_and_validates_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "ok.json", &rogue_config(""));
    let cfg = parse_config(&path).unwrap();
    assert_eq!(cfg.p, 3.0);
    assert_eq!(cfg.tolerance, 1e-12);
    assert_eq!(cfg.amp_scale, 1.0);
    validate_for(&cfg, "synthesize").unwrap();
    validate_for(&cfg, "verify").unwrap();
    // periodmap needs its own section; approximate needs kind = rogue.
    assert!(validate_for(&cfg, "periodmap").is_err());
    assert!(validate_for(&cfg, "approximate").is_err());
}

#[test]
fn rejects_bad_p_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let bad_p = write_config(dir.path(), "badp.json", &rogue_config("").replace("3.0,", "0.5,"));
    let err = parse_config(&bad_p).unwrap_err();
    assert!(format!("{err:#}").contains("p must exceed 1"), "got {err:#}");
    let unknown = write_config(
        dir.path(),
        "unknown.json",
        &rogue_config(",\n  \"sigma_infinity\": 2.0"),
    );
    let err = parse_config(&unknown).unwrap_err();
    assert!(format!("{err:#}").contains("sigma_infinity"), "got {err:#}");
}

#[test]
fn csv_round_trip_matches_evaluator() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&write_config(dir.path(), "c.json", &rogue_config(""))).unwrap();
    let field = build_field(&cfg).unwrap();
    let grid = build_grid(&cfg).unwrap();
    let csv = dir.path().join("field.csv");
    curlwave::export::export_field(&field, &grid, &csv).unwrap();
    let rows = read_field_csv(&csv).unwrap();
    assert_eq!(rows.len(), 4 * 4 * 4 * 3);
    let mut nonsingular = 0;
    for row in &rows {
        if row.singular {
            assert!(row.u.iter().all(|v| v.is_nan()));
            continue;
        }
        nonsingular += 1;
        let u = field.eval(row.x, row.t).unwrap();
        for i in 0..3 {
            assert!(
                (u[i] - row.u[i]).abs() <= 1e-12 * (1.0 + u[i].abs()),
                "round trip off at {:?} t={}: {} vs {}",
                row.x,
                row.t,
                u[i],
                row.u[i]
            );
        }
    }
    assert!(nonsingular > 0);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curlwave"))
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(dir.path(), "ok.json", &rogue_config(""));

    // 0: verification passes.
    let out_json = dir.path().join("diag.json");
    let status = bin()
        .args(["verify", "--config"])
        .arg(&ok)
        .arg("--out")
        .arg(&out_json)
        .args(["--threads", "2"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_json).unwrap()).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert_eq!(report["seed"], serde_json::json!(0));

    // 1: a corrupted field fails the residual check.
    let bad = write_config(dir.path(), "bad.json", &rogue_config(",\n  \"amp_scale\": 1.01"));
    let status = bin().args(["verify", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(1));

    // 2: configuration error.
    let badp = write_config(dir.path(), "badp.json", &rogue_config("").replace("3.0,", "0.5,"));
    let status = bin().args(["verify", "--config"]).arg(&badp).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // 2: usage error (missing required flag).
    let status = bin().arg("verify").status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn periodmap_and_synthesize_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let pm_cfg = write_config(
        dir.path(),
        "pm.json",
        r#"{
  "p": 3.0,
  "periodmap": { "variant": "rogue", "sweep": "c", "min": -0.45, "max": -0.05, "count": 5 }
}"#,
    );
    let out = dir.path().join("pm.csv");
    let status = bin()
        .args(["periodmap", "--config"])
        .arg(&pm_cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "c,period,period_derivative");
    assert_eq!(lines.count(), 5);

    let syn_cfg = write_config(dir.path(), "syn.json", &rogue_config(""));
    let csv = dir.path().join("field.csv");
    let status = bin()
        .args(["synthesize", "--config"])
        .arg(&syn_cfg)
        .arg("--out")
        .arg(&csv)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(read_field_csv(&csv).unwrap().len(), 4 * 4 * 4 * 3);

    // synthesize without --out is a usage error.
    let status = bin().args(["synthesize", "--config"]).arg(&syn_cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn approximate_reports_monotone_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "rogue.json",
        &rogue_config(",\n  \"t_list\": [8.0, 16.0]").replace("explicit_rogue", "rogue"),
    );
    let out = dir.path().join("conv.json");
    let status = bin()
        .args(["approximate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["monotone_decrease"], serde_json::Value::Bool(true));
    assert_eq!(report["table"].as_array().unwrap().len(), 2);
}
