//! JSON/CSV writers. Floats are written with 12 significant digits.

use std::io::Write;
use std::path::Path;

use serde_json::Value;
use steering_core::SweepRow;

use crate::{CliError, CliResult};

pub const SWEEP_HEADER: &str = "param,s_opt,m1x,m1y,m1z,m2x,m2y,m2z,cx,cy,cz,dx,dy,dz,converged";

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every float inside `v` in place.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("cannot write {}: {e}", path.display()))
}

/// Pretty JSON to `out`, or stdout when `None`.
pub fn emit_json(mut v: Value, out: Option<&Path>) -> CliResult<()> {
    round_json(&mut v);
    let text = serde_json::to_string_pretty(&v).expect("JSON values always serialise");
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| io_err(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{}", round12(x))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        let mut cols = vec![fmt(r.param), fmt(r.s_opt)];
        for v in [r.m1, r.m2, r.c, r.d] {
            cols.extend(v.iter().map(|x| fmt(*x)));
        }
        cols.push(r.converged.to_string());
        s.push_str(&cols.join(","));
        s.push('\n');
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| io_err(path, e))
}

/// Inverse of [`sweep_csv`].
pub fn parse_sweep_csv(text: &str) -> CliResult<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SWEEP_HEADER) {
        return Err(CliError::Input("sweep CSV: unexpected header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            let bad = || CliError::Input(format!("sweep CSV: malformed row {}", i + 1));
            if cols.len() != 15 {
                return Err(bad());
            }
            let nums: Vec<f64> = cols[..14]
                .iter()
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?;
            let v3 = |k: usize| [nums[k], nums[k + 1], nums[k + 2]];
            Ok(SweepRow {
                param: nums[0],
                s_opt: nums[1],
                m1: v3(2),
                m2: v3(5),
                c: v3(8),
                d: v3(11),
                converged: cols[14].trim().parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Standalone matplotlib script plotting `csv_name` (resolved next to the script).
pub fn plot_script(csv_name: &str, param_label: &str, png_name: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
# s_opt against {param_label}; reference lines at the local bound 2 and at 2*sqrt(2).
import csv
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "{csv_name}"), newline="") as fh:
    rows = list(csv.DictReader(fh))

x = [float(r["param"]) for r in rows]
y = [float(r["s_opt"]) for r in rows]

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(x, y, "-", lw=1.5, label="max S")
ax.axhline(2.0, color="k", ls="--", lw=1, label="S = 2")
ax.axhline(2 * math.sqrt(2), color="grey", ls=":", lw=1)
ax.set_xlabel("{param_label}")
ax.set_ylabel("S")
ax.legend(loc="best")
fig.tight_layout()
fig.savefig(os.path.join(here, "{png_name}"), dpi=150)
"#
    )
}
