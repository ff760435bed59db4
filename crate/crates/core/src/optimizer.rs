//! Maximisation of the steering value over measurement settings for a fixed
//! state, and the one-parameter sweeps over pure Schmidt and Werner states.
//!
//! Settings are parametrised by seven angles: `(θ₁, φ₁)` and `(θ₂, φ₂)` for
//! Alice's directions, and a frame `(θ_c, φ_c, ψ)` for Bob, where `c` sits at
//! `(θ_c, φ_c)` and `d` is rotated by `ψ` inside the plane orthogonal to `c`.
//! Bob's pair is therefore orthonormal by construction. Each restart runs a
//! Nelder–Mead search from a seeded random point; restarts are independent
//! and may run in parallel.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{correlation_table, steering_from_matrix, steering_value, SteeringValue};
use crate::error::{Error, Result};
use crate::measurements::{DichotomicObservable, MeasurementScenario, MubPair};
use crate::qubit::{BlochVector3, PureSchmidtParams, TwoQubitState, WernerParams};
use crate::seed;

const DIM: usize = 7;
type Point = [f64; DIM];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Convergence tolerance on the spread of `S` across the simplex.
    pub tol: f64,
    /// Iteration budget per restart.
    pub max_iters: usize,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self { restarts: 64, seed: 42, tol: 1e-10, max_iters: 2000 }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Invalid("restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub s_opt: SteeringValue,
    pub scenario: MeasurementScenario,
    pub restarts_used: usize,
    /// Restart that produced the reported optimum.
    pub best_restart: usize,
    pub converged: bool,
}

fn scenario_from_point(p: &Point) -> MeasurementScenario {
    let m = BlochVector3::from_angles(p[0], p[1]);
    let n = BlochVector3::from_angles(p[2], p[3]);
    MeasurementScenario {
        alice: [DichotomicObservable::sharp_unchecked(m), DichotomicObservable::sharp_unchecked(n)],
        bob: MubPair::from_frame_angles(p[4], p[5], p[6]),
    }
}

fn objective(t: &[[f64; 3]; 3], p: &Point) -> f64 {
    let sc = scenario_from_point(p);
    -steering_from_matrix(
        t,
        sc.alice.map(|o| o.direction().to_array()),
        sc.bob.directions().map(|v| v.to_array()),
    )
}

struct LocalResult {
    x: Point,
    f: f64,
    converged: bool,
}

/// Nelder–Mead with standard coefficients; after the simplex collapses it is
/// rebuilt around the best vertex until a rebuild no longer improves `f`.
fn nelder_mead<F: Fn(&Point) -> f64>(f: F, start: Point, step: f64, tol: f64, max_iters: usize) -> LocalResult {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;
    const MAX_REBUILDS: usize = 4;

    let build = |x0: &Point, h: f64| -> Vec<(Point, f64)> {
        let mut simplex = Vec::with_capacity(DIM + 1);
        simplex.push((*x0, f(x0)));
        for k in 0..DIM {
            let mut x = *x0;
            x[k] += h;
            simplex.push((x, f(&x)));
        }
        simplex
    };

    let mut simplex = build(&start, step);
    let mut iters = 0;
    let mut rebuilds = 0;
    let mut converged = false;
    let mut last_best = f64::INFINITY;

    while iters < max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[DIM].1;
        if (worst - best).abs() <= tol {
            if last_best - best <= tol || rebuilds >= MAX_REBUILDS {
                converged = true;
                break;
            }
            last_best = best;
            rebuilds += 1;
            let x0 = simplex[0].0;
            simplex = build(&x0, step * 0.1_f64.powi(rebuilds as i32));
            continue;
        }
        iters += 1;

        let mut centroid = [0.0; DIM];
        for (x, _) in &simplex[..DIM] {
            for k in 0..DIM {
                centroid[k] += x[k] / DIM as f64;
            }
        }
        let along = |t: f64| -> Point {
            let w = &simplex[DIM].0;
            let mut x = [0.0; DIM];
            for k in 0..DIM {
                x[k] = centroid[k] + t * (centroid[k] - w[k]);
            }
            x
        };

        let xr = along(ALPHA);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(GAMMA);
            let fe = f(&xe);
            simplex[DIM] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[DIM - 1].1 {
            simplex[DIM] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst {
                let x = along(RHO);
                (x, f(&x))
            } else {
                let x = along(-RHO);
                (x, f(&x))
            };
            if fc < fr.min(worst) {
                simplex[DIM] = (xc, fc);
            } else {
                let x0 = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    for k in 0..DIM {
                        v.0[k] = x0[k] + SIGMA * (v.0[k] - x0[k]);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    LocalResult { x: simplex[0].0, f: simplex[0].1, converged }
}

fn random_start<R: Rng>(rng: &mut R) -> Point {
    use std::f64::consts::{PI, TAU};
    let mut p = [0.0; DIM];
    for pair in 0..3 {
        // uniform on the sphere: cos θ uniform
        p[2 * pair] = rng.random_range(-1.0f64..=1.0).acos();
        p[2 * pair + 1] = rng.random_range(0.0..TAU);
    }
    p[6] = rng.random_range(0.0..PI);
    p
}

/// Best `S` over multistart local searches. The reported value is
/// re-evaluated from the returned scenario through [`correlation_table`].
pub fn optimize(state: &TwoQubitState, cfg: &OptConfig) -> Result<OptResult> {
    cfg.validate()?;
    let t = state.correlation_matrix();
    let runs: Vec<LocalResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::rng(cfg.seed, r as u64);
            let start = random_start(&mut rng);
            nelder_mead(|p| objective(&t, p), start, 0.4, cfg.tol, cfg.max_iters)
        })
        .collect();

    // strict improvement only: the lowest restart index wins ties
    let mut best = 0;
    for (i, run) in runs.iter().enumerate().skip(1) {
        if run.f < runs[best].f {
            best = i;
        }
    }
    let scenario = scenario_from_point(&runs[best].x);
    let s_opt = steering_value(&correlation_table(state, &scenario));
    Ok(OptResult {
        s_opt,
        scenario,
        restarts_used: cfg.restarts,
        best_restart: best,
        converged: runs[best].converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub s_opt: f64,
    pub m1: [f64; 3],
    pub m2: [f64; 3],
    pub c: [f64; 3],
    pub d: [f64; 3],
    pub converged: bool,
}

impl SweepRow {
    pub fn from_result(param: f64, r: &OptResult) -> Self {
        Self {
            param,
            s_opt: r.s_opt.value(),
            m1: r.scenario.alice[0].direction().to_array(),
            m2: r.scenario.alice[1].direction().to_array(),
            c: r.scenario.bob.c().to_array(),
            d: r.scenario.bob.d().to_array(),
            converged: r.converged,
        }
    }

    /// Rebuilds the row's sharp scenario, re-orthonormalising Bob's pair to
    /// absorb rounding from serialisation.
    pub fn scenario(&self) -> Result<MeasurementScenario> {
        let m = BlochVector3::normalized(self.m1[0], self.m1[1], self.m1[2])?;
        let n = BlochVector3::normalized(self.m2[0], self.m2[1], self.m2[2])?;
        let (bob, _) = MubPair::orthonormalized(self.c, self.d)?;
        MeasurementScenario::sharp(m, n, bob)
    }
}

/// `n` evenly spaced points on `[lo, hi]` (both ends included).
pub fn uniform_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn sweep<F>(grid: &[f64], cfg: &OptConfig, make: F) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<TwoQubitState> + Sync,
{
    cfg.validate()?;
    grid.par_iter()
        .map(|&p| {
            let state = make(p)?;
            optimize(&state, cfg).map(|r| SweepRow::from_result(p, &r))
        })
        .collect()
}

/// One row per Schmidt coefficient `a`, in grid order.
pub fn sweep_pure(grid: &[f64], cfg: &OptConfig) -> Result<Vec<SweepRow>> {
    sweep(grid, cfg, |a| Ok(TwoQubitState::pure_schmidt(PureSchmidtParams::new(a)?)))
}

/// One row per Werner weight `w`, in grid order.
pub fn sweep_werner(grid: &[f64], cfg: &OptConfig) -> Result<Vec<SweepRow>> {
    sweep(grid, cfg, |w| Ok(TwoQubitState::werner(WernerParams::new(w)?)))
}

/// Parameter at which the piecewise-linear interpolant of `rows` first
/// crosses `level` from below.
pub fn crossing(rows: &[SweepRow], level: f64) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.s_opt <= level && b.s_opt > level {
            let t = (level - a.s_opt) / (b.s_opt - a.s_opt);
            Some(a.param + t * (b.param - a.param))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TSIRELSON;

    fn quick() -> OptConfig {
        OptConfig { restarts: 16, ..OptConfig::default() }
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let target = [0.3, -1.2, 0.5, 2.0, -0.7, 0.1, 1.1];
        let f = |p: &Point| p.iter().zip(&target).map(|(x, t)| (x - t).powi(2)).sum::<f64>();
        let r = nelder_mead(f, [0.0; DIM], 0.5, 1e-14, 20_000);
        assert!(r.converged);
        for (x, t) in r.x.iter().zip(&target) {
            assert!((x - t).abs() < 1e-5);
        }
    }

    #[test]
    fn config_validation() {
        let bad = OptConfig { restarts: 0, ..OptConfig::default() };
        assert!(optimize(&TwoQubitState::singlet(), &bad).is_err());
        let bad = OptConfig { tol: 0.0, ..OptConfig::default() };
        assert!(bad.validate().is_err());
        let bad = OptConfig { max_iters: 0, ..OptConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn maximally_entangled_reaches_tsirelson() {
        let r = optimize(&TwoQubitState::phi_plus(), &quick()).unwrap();
        assert!((r.s_opt.value() - TSIRELSON).abs() < 1e-6, "{}", r.s_opt.value());
        assert!(r.s_opt.value() <= TSIRELSON + 1e-9);
        assert!(r.scenario.bob.c().dot(&r.scenario.bob.d()).abs() < 1e-12);
    }

    #[test]
    fn product_state_gives_two() {
        let st = TwoQubitState::pure_schmidt(PureSchmidtParams::new(1.0).unwrap());
        let r = optimize(&st, &quick()).unwrap();
        assert!((r.s_opt.value() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn optimize_is_deterministic() {
        let st = TwoQubitState::pure_schmidt(PureSchmidtParams::new(0.6).unwrap());
        let cfg = OptConfig { restarts: 8, seed: 3, ..OptConfig::default() };
        assert_eq!(optimize(&st, &cfg).unwrap(), optimize(&st, &cfg).unwrap());
    }

    #[test]
    fn result_is_self_certifying() {
        let st = TwoQubitState::werner(WernerParams::new(0.9).unwrap());
        let r = optimize(&st, &quick()).unwrap();
        let again = steering_value(&correlation_table(&st, &r.scenario)).value();
        assert!((again - r.s_opt.value()).abs() < 1e-10);
    }

    #[test]
    fn grid_helpers() {
        assert_eq!(uniform_grid(3, 0.0, 1.0), vec![0.0, 0.5, 1.0]);
        assert_eq!(uniform_grid(1, 0.2, 1.0), vec![0.2]);
        assert!(uniform_grid(0, 0.0, 1.0).is_empty());

        let row = |p: f64, s: f64| SweepRow { param: p, s_opt: s, m1: [0.0; 3], m2: [0.0; 3], c: [0.0; 3], d: [0.0; 3], converged: true };
        let rows = vec![row(0.0, 1.0), row(0.5, 1.5), row(1.0, 2.5)];
        assert!((crossing(&rows, 2.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(crossing(&rows, 3.0).is_none());
    }

    #[test]
    fn sweep_rejects_out_of_range_parameters() {
        assert!(sweep_pure(&[0.5, 1.5], &quick()).is_err());
        assert!(sweep_werner(&[-0.1], &quick()).is_err());
    }
}
