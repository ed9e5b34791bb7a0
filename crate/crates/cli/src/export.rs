//! CSV export of sampled fields and JSON export of diagnostics.
//!
//! Field CSV layout (one row per space-time sample, `{:.16e}` everywhere —
//! lossless at 17 significant digits):
//!
//! ```text
//! x1,x2,x3,t,U1,U2,U3[,U1_im,U2_im,U3_im],singular
//! ```
//!
//! Singular points are emitted with literal `NaN` components and
//! `singular = 1`; all other rows carry `singular = 0`.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

use curlwave_core::synthesis::{FieldKind, WaveField};
use curlwave_core::verification::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub x: [f64; 3],
    pub t: f64,
    pub u: [f64; 3],
    pub u_im: Option<[f64; 3]>,
    pub singular: bool,
}

fn is_complex(field: &WaveField) -> bool {
    field.kind == FieldKind::Monochromatic
}

/// Samples the field on the full grid (including singular points, flagged)
/// and writes the CSV.
pub fn export_field(field: &WaveField, grid: &GridSpec, path: &Path) -> Result<()> {
    let complex = is_complex(field);
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?,
    );
    if complex {
        writeln!(out, "x1,x2,x3,t,U1,U2,U3,U1_im,U2_im,U3_im,singular")?;
    } else {
        writeln!(out, "x1,x2,x3,t,U1,U2,U3,singular")?;
    }
    let axis = grid.axis();
    let times = grid.times();
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                let x = [a, b, c];
                let singular = field.geo.is_singular(x);
                for &t in &times {
                    let (re, im) = if singular {
                        ([f64::NAN; 3], [f64::NAN; 3])
                    } else {
                        field.eval_complex(x, t)?
                    };
                    write!(
                        out,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        x[0], x[1], x[2], t, re[0], re[1], re[2]
                    )?;
                    if complex {
                        write!(out, ",{:.16e},{:.16e},{:.16e}", im[0], im[1], im[2])?;
                    }
                    writeln!(out, ",{}", if singular { 1 } else { 0 })?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a field CSV produced by [`export_field`].
pub fn read_field_csv(path: &Path) -> Result<Vec<FieldRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("empty CSV")?;
    let complex = match header {
        "x1,x2,x3,t,U1,U2,U3,singular" => false,
        "x1,x2,x3,t,U1,U2,U3,U1_im,U2_im,U3_im,singular" => true,
        other => bail!("unrecognized CSV header {other:?}"),
    };
    let expected = if complex { 11 } else { 8 };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != expected {
            bail!("row {}: expected {expected} columns, found {}", i + 2, parts.len());
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().with_context(|| format!("row {}: bad number {s:?}", i + 2))
        };
        let x = [num(parts[0])?, num(parts[1])?, num(parts[2])?];
        let t = num(parts[3])?;
        let u = [num(parts[4])?, num(parts[5])?, num(parts[6])?];
        let u_im = if complex {
            Some([num(parts[7])?, num(parts[8])?, num(parts[9])?])
        } else {
            None
        };
        let singular = match parts[expected - 1] {
            "0" => false,
            "1" => true,
            other => bail!("row {}: bad singular flag {other:?}", i + 2),
        };
        rows.push(FieldRow { x, t, u, u_im, singular });
    }
    Ok(rows)
}

/// Writes a JSON document to `path`, or to stdout when no path is given.
pub fn write_json(value: &serde_json::Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")
            .with_context(|| format!("cannot write {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}
