//! One function per subcommand.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use steering_core::lhs::recombine;
use steering_core::optimizer::{crossing, uniform_grid};
use steering_core::sampling::bound_scan;
use steering_core::{
    chsh_value, correlation_table, global_eta_opt, lhs_membership, optimize, steering_value, sweep_pure,
    sweep_werner, BlochVector3, DichotomicObservable, JmReport, MeasurementScenario, MubPair, TwoQubitState,
    ETA_OPT, TSIRELSON,
};

use crate::config::{Command, Family, Flags, Format, Triple, DEFAULT_JM_SAMPLES, DEFAULT_SCAN_SAMPLES, OUT_DIR_ENV};
use crate::output::{emit_json, plot_script, sweep_csv, write_file};
use crate::state::StateSpec;
use crate::{CliError, CliResult};

const WARN_TOL: f64 = 1e-9;

pub fn run(command: Command) -> CliResult<()> {
    let flags = command.flags().clone().resolve()?;
    match command {
        Command::Eval(_) => eval(&flags),
        Command::Optimize(_) => optimize_cmd(&flags),
        Command::Sweep(_) => sweep(&flags),
        Command::BoundScan(_) => scan(&flags),
        Command::Jm(_) => jm(&flags),
        Command::Lhs(_) => lhs(&flags),
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn json_only(flags: &Flags, cmd: &str) -> CliResult<()> {
    match flags.format {
        Some(Format::Csv) => Err(CliError::Input(format!("{cmd} only writes JSON"))),
        _ => Ok(()),
    }
}

fn require_state(flags: &Flags) -> CliResult<(StateSpec, TwoQubitState)> {
    let spec = flags
        .state
        .clone()
        .ok_or_else(|| CliError::Input("--state is required".into()))?;
    let state = spec.build()?;
    Ok((spec, state))
}

fn unit(name: &str, t: Option<Triple>) -> CliResult<BlochVector3> {
    let Triple([x, y, z]) = t.ok_or_else(|| CliError::Input(format!("--{name} is required")))?;
    let v = BlochVector3::normalized(x, y, z).map_err(|_| CliError::Input(format!("--{name} is the zero vector")))?;
    let norm = (x * x + y * y + z * z).sqrt();
    if (norm - 1.0).abs() > WARN_TOL {
        warn(&format!("--{name} has norm {norm}; normalised"));
    }
    Ok(v)
}

/// Explicit settings from `--a1 --a2 --b1 --b2`, or `None` if none are given.
fn explicit_scenario(flags: &Flags) -> CliResult<Option<MeasurementScenario>> {
    let given = [flags.a1, flags.a2, flags.b1, flags.b2];
    if given.iter().all(Option::is_none) {
        return Ok(None);
    }
    let m = unit("a1", flags.a1)?;
    let n = unit("a2", flags.a2)?;
    let c = unit("b1", flags.b1)?;
    let d = unit("b2", flags.b2)?;
    let (bob, overlap) = MubPair::orthonormalized(c.to_array(), d.to_array())
        .map_err(|_| CliError::Input("--b1 and --b2 are parallel".into()))?;
    if overlap.abs() > WARN_TOL {
        warn(&format!("Bob's directions overlap by c·d = {overlap}; re-orthonormalised"));
    }
    let eta = flags.eta.unwrap_or(1.0);
    let alice = [DichotomicObservable::new(m, eta)?, DichotomicObservable::new(n, eta)?];
    Ok(Some(MeasurementScenario::new(alice, bob)))
}

fn scenario_json(sc: &MeasurementScenario) -> Value {
    json!({
        "a1": sc.alice[0].direction().to_array(),
        "a2": sc.alice[1].direction().to_array(),
        "eta": sc.alice[0].eta(),
        "b1": sc.bob.c().to_array(),
        "b2": sc.bob.d().to_array(),
    })
}

fn eval(flags: &Flags) -> CliResult<()> {
    json_only(flags, "eval")?;
    let (spec, state) = require_state(flags)?;
    let scenario = explicit_scenario(flags)?
        .ok_or_else(|| CliError::Input("eval needs --a1 --a2 --b1 --b2".into()))?;
    let table = correlation_table(&state, &scenario);
    let s = steering_value(&table);
    emit_json(
        json!({
            "state": spec.label(),
            "settings": scenario_json(&scenario),
            "e": table.e,
            "alice_marg": table.alice_marg,
            "bob_marg": table.bob_marg,
            "s": s.value(),
            "chsh": chsh_value(&table),
            "violated": s.violates(),
        }),
        flags.out.as_deref(),
    )
}

fn optimize_cmd(flags: &Flags) -> CliResult<()> {
    json_only(flags, "optimize")?;
    let (spec, state) = require_state(flags)?;
    let cfg = flags.opt_config();
    let r = optimize(&state, &cfg)?;
    if !r.converged {
        warn("best restart hit the iteration budget before converging");
    }
    emit_json(
        json!({
            "state": spec.label(),
            "config": cfg,
            "s_opt": r.s_opt.value(),
            "violated": r.s_opt.violates(),
            "scenario": scenario_json(&r.scenario),
            "restarts_used": r.restarts_used,
            "best_restart": r.best_restart,
            "converged": r.converged,
        }),
        flags.out.as_deref(),
    )
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn sweep(flags: &Flags) -> CliResult<()> {
    let family = flags
        .family
        .ok_or_else(|| CliError::Input("--family pure|werner is required".into()))?;
    let n = flags.grid();
    if n < 2 {
        return Err(CliError::Input(format!("--grid needs at least 2 points, got {n}")));
    }
    let span = flags.range.unwrap_or(crate::config::Span(0.0, 1.0));
    let grid = uniform_grid(n, span.0, span.1);
    let cfg = flags.opt_config();
    let (rows, label, name) = match family {
        Family::Pure => (sweep_pure(&grid, &cfg)?, "a", "sweep_pure"),
        Family::Werner => (sweep_werner(&grid, &cfg)?, "w", "sweep_werner"),
    };
    let format = flags.format.unwrap_or(Format::Csv);
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let out = flags
        .out
        .clone()
        .unwrap_or_else(|| default_out_dir().join(format!("{name}.{ext}")));

    let mut plot = None;
    match format {
        Format::Csv => {
            write_file(&out, &sweep_csv(&rows))?;
            let csv_name = out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let script = sibling(&out, "py");
            let png = sibling(&out, "png");
            let png_name = png.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            write_file(&script, &plot_script(&csv_name, label, &png_name))?;
            plot = Some(script);
        }
        Format::Json => {
            let mut v = serde_json::to_value(&rows).expect("rows serialise");
            crate::output::round_json(&mut v);
            let text = serde_json::to_string_pretty(&v).expect("rows serialise");
            write_file(&out, &(text + "\n"))?;
        }
    }

    let best = rows
        .iter()
        .fold(&rows[0], |b, r| if r.s_opt > b.s_opt { r } else { b });
    let unconverged = rows.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        warn(&format!("{unconverged} grid points did not converge"));
    }
    emit_json(
        json!({
            "family": label,
            "points": rows.len(),
            "range": [span.0, span.1],
            "output": out,
            "plot_script": plot,
            "max_s": best.s_opt,
            "argmax": best.param,
            "crossing_at_2": crossing(&rows, 2.0),
            "unconverged": unconverged,
        }),
        None,
    )
}

fn scan(flags: &Flags) -> CliResult<()> {
    json_only(flags, "bound-scan")?;
    let samples = flags.samples.unwrap_or(DEFAULT_SCAN_SAMPLES);
    let summary = bound_scan(samples, flags.seed(), flags.inject);
    emit_json(serde_json::to_value(&summary).expect("summary serialises"), flags.out.as_deref())?;
    if !summary.within_bound {
        return Err(CliError::BoundViolation(format!(
            "{} samples exceed 2√2 = {TSIRELSON}; max S = {}",
            summary.violations, summary.max_s
        )));
    }
    Ok(())
}

fn strict_unit(name: &str, t: Option<Triple>) -> CliResult<BlochVector3> {
    let Triple([x, y, z]) = t.ok_or_else(|| CliError::Input(format!("--{name} is required (or use --scan)")))?;
    let v = BlochVector3 { x, y, z };
    if (v.norm() - 1.0).abs() > WARN_TOL {
        return Err(CliError::Input(format!("--{name} must be a unit vector, norm is {}", v.norm())));
    }
    Ok(v)
}

fn jm(flags: &Flags) -> CliResult<()> {
    json_only(flags, "jm")?;
    if flags.scan {
        let samples = flags.samples.unwrap_or(DEFAULT_JM_SAMPLES);
        let eta = global_eta_opt(samples, flags.seed());
        return emit_json(
            json!({
                "samples": samples,
                "seed": flags.seed(),
                "eta_opt": eta,
                "deviation_from_1_over_sqrt2": eta - ETA_OPT,
            }),
            flags.out.as_deref(),
        );
    }
    let m = strict_unit("a1", flags.a1)?;
    let n = strict_unit("a2", flags.a2)?;
    let report = JmReport::new(&m, &n, flags.eta)?;
    let mut v = serde_json::to_value(&report).expect("report serialises");
    v["a1"] = json!(m.to_array());
    v["a2"] = json!(n.to_array());
    emit_json(v, flags.out.as_deref())
}

fn lhs(flags: &Flags) -> CliResult<()> {
    json_only(flags, "lhs")?;
    let ngon = flags.ngon();
    let (e, source) = match (flags.table, &flags.state) {
        (Some(t), None) => (t.0, json!("table")),
        (None, Some(_)) => {
            let (spec, state) = require_state(flags)?;
            let scenario = match explicit_scenario(flags)? {
                Some(sc) => sc,
                None => optimize(&state, &flags.opt_config())?.scenario,
            };
            let table = correlation_table(&state, &scenario);
            (table.e, json!({ "state": spec.label(), "settings": scenario_json(&scenario) }))
        }
        (Some(_), Some(_)) => return Err(CliError::Input("give either --table or --state, not both".into())),
        (None, None) => return Err(CliError::Input("lhs needs --table or --state".into())),
    };
    let r = lhs_membership(&e, ngon)?;
    let (recombined, _) = recombine(&r.weights);
    let reconstruction_error = if r.member {
        e.iter()
            .flatten()
            .zip(recombined.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    if r.member && reconstruction_error > 1e-7 {
        return Err(CliError::Solver(format!(
            "LP decomposition does not reproduce the table (error {reconstruction_error:e})"
        )));
    }
    let weights: Vec<Value> = r
        .weights
        .iter()
        .map(|(v, w)| json!({ "alice_outcomes": [v.alice_outcomes.0, v.alice_outcomes.1], "bob_point": [v.bob_point.0, v.bob_point.1], "weight": w }))
        .collect();
    emit_json(
        json!({
            "source": source,
            "e": e,
            "member": r.member,
            "margin": r.margin,
            "s": r.steering,
            "s_violates": r.steering > 2.0,
            "ngon": ngon,
            "weights": weights,
        }),
        flags.out.as_deref(),
    )
}
