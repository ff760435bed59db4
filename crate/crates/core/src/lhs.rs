//! LHV–LHS models at the level of the four correlators, and Bob's
//! assemblage.
//!
//! With Bob measuring the orthonormal pair `(c, d)`, a hidden state `σ_λ`
//! only enters through its two Bloch projections `β = (c·r_λ, d·r_λ)`, a
//! point of the unit disk. Alice answers deterministically with
//! `(a₁, a₂) ∈ {±1}²`, so every local table is a convex combination of
//!
//! ```text
//! E = (a₁β₁, a₁β₂, a₂β₁, a₂β₂).
//! ```
//!
//! The disk is replaced by its inscribed regular `ngon`, which turns
//! membership into a linear feasibility problem. The polygon contains the
//! disk of radius `cos(π/ngon)`, so membership implies `S ≤ 2` and
//! `S ≤ 2cos(π/ngon)` implies membership.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{correlation_table, steering_from_correlators};
use crate::error::{Error, Result};
use crate::measurements::{effects, random_scenario_with, DichotomicObservable, MubPair};
use crate::qubit::{eigenvalues2, identity2, kron, partial_trace_alice, pauli_dot, Matrix2, TwoQubitState};
use crate::sampling::{random_mixed_state, random_pure_state};
use crate::seed;
use crate::simplex::{find_feasible, Feasibility};

/// Constraint tolerance for the membership LP.
pub const LP_TOL: f64 = 1e-9;
pub const DEFAULT_NGON: usize = 256;

/// Bob's unnormalised conditional states, `sigma[a][x]` with `a = 0` for
/// outcome `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    pub sigma: [[Matrix2; 2]; 2],
}

pub fn assemblage_from_state(state: &TwoQubitState, alice: &[DichotomicObservable; 2]) -> Assemblage {
    let id = identity2();
    let mut sigma = [[Matrix2::zeros(); 2]; 2];
    for (x, obs) in alice.iter().enumerate() {
        let e = effects(obs);
        for (a, eff) in [e.plus, e.minus].iter().enumerate() {
            sigma[a][x] = partial_trace_alice(&(kron(eff, &id) * state.rho()));
        }
    }
    Assemblage { sigma }
}

impl Assemblage {
    /// `Σ_a σ_{a|x}` for setting `x`.
    pub fn bob_reduced(&self, x: usize) -> Matrix2 {
        self.sigma[0][x] + self.sigma[1][x]
    }

    /// Largest entrywise difference between the two reduced states.
    pub fn no_signaling_defect(&self) -> f64 {
        (self.bob_reduced(0) - self.bob_reduced(1))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.sigma.iter().flatten().map(|s| eigenvalues2(s)[0]).fold(f64::INFINITY, f64::min)
    }

    /// `Tr Σ_a σ_{a|x}` per setting.
    pub fn traces(&self) -> [f64; 2] {
        [0, 1].map(|x| self.bob_reduced(x).trace().re)
    }

    /// `p(a|x) = Tr σ_{a|x}`.
    pub fn alice_probability(&self, a: usize, x: usize) -> f64 {
        self.sigma[a][x].trace().re
    }

    /// Correlators `Σ_a a·Tr[σ_{a|x} (b_y·σ)]` for Bob's pair.
    pub fn correlators(&self, bob: &MubPair) -> [[f64; 2]; 2] {
        let ops = bob.directions().map(|v| pauli_dot(&v));
        let mut e = [[0.0; 2]; 2];
        for x in 0..2 {
            for (y, op) in ops.iter().enumerate() {
                let diff = self.sigma[0][x] - self.sigma[1][x];
                e[x][y] = (diff * op).trace().re;
            }
        }
        e
    }
}

/// Deterministic Alice answers plus a Bob disk point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LhsVertex {
    pub alice_outcomes: (i8, i8),
    pub bob_point: (f64, f64),
}

impl LhsVertex {
    pub fn correlators(&self) -> [[f64; 2]; 2] {
        let (a1, a2) = (self.alice_outcomes.0 as f64, self.alice_outcomes.1 as f64);
        let (b1, b2) = self.bob_point;
        [[a1 * b1, a1 * b2], [a2 * b1, a2 * b2]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipResult {
    pub member: bool,
    /// Nonzero weights of the decomposition when `member`.
    pub weights: Vec<(LhsVertex, f64)>,
    /// Phase-one objective of the LP: zero for members, positive otherwise.
    pub margin: f64,
    pub steering: f64,
    pub ngon: usize,
}

const STRATEGIES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

fn vertices(ngon: usize) -> Vec<LhsVertex> {
    let step = std::f64::consts::TAU / ngon as f64;
    STRATEGIES
        .iter()
        .flat_map(|&s| {
            (0..ngon).map(move |k| {
                let (sin, cos) = (k as f64 * step).sin_cos();
                LhsVertex { alice_outcomes: s, bob_point: (cos, sin) }
            })
        })
        .collect()
}

/// Decides whether `e` is a convex combination of polygonal LHS vertices.
pub fn lhs_membership(e: &[[f64; 2]; 2], ngon: usize) -> Result<MembershipResult> {
    if ngon < 8 {
        return Err(Error::Invalid(format!("ngon must be at least 8, got {ngon}")));
    }
    if e.iter().flatten().any(|v| !v.is_finite() || v.abs() > 1.0 + 1e-9) {
        return Err(Error::Invalid(format!("correlators must lie in [-1, 1]: {e:?}")));
    }

    let verts = vertices(ngon);
    let mut rows: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(verts.len())).collect();
    for v in &verts {
        let c = v.correlators();
        rows[0].push(c[0][0]);
        rows[1].push(c[0][1]);
        rows[2].push(c[1][0]);
        rows[3].push(c[1][1]);
        rows[4].push(1.0);
    }
    let rhs = [e[0][0], e[0][1], e[1][0], e[1][1], 1.0];
    let steering = steering_from_correlators(e);

    match find_feasible(&rows, &rhs, LP_TOL)? {
        Feasibility::Feasible { x } => {
            let weights = verts
                .into_iter()
                .zip(x)
                .filter(|(_, w)| *w > 0.0)
                .collect();
            Ok(MembershipResult { member: true, weights, margin: 0.0, steering, ngon })
        }
        Feasibility::Infeasible { residual } => Ok(MembershipResult {
            member: false,
            weights: Vec::new(),
            margin: residual,
            steering,
            ngon,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub samples: usize,
    pub ngon: usize,
    pub members: usize,
    pub non_members: usize,
    /// Members with `S > 2 + 1e-8`.
    pub necessary_violations: usize,
    /// Non-members with `S ≤ 2cos(π/ngon)`.
    pub sufficient_violations: usize,
    pub counterexamples: Vec<[[f64; 2]; 2]>,
}

impl CrossValidation {
    pub fn passed(&self) -> bool {
        self.necessary_violations == 0 && self.sufficient_violations == 0
    }
}

/// Table for sample `i`: uniform in `[−1,1]⁴`, a quantum table from a random
/// state and scenario, or a uniform table rescaled to `S ∈ [1.9, 2.1]`.
pub fn sample_table(seed: u64, i: u64) -> [[f64; 2]; 2] {
    let mut rng = seed::rng(seed, i);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> [[f64; 2]; 2] {
        [
            [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)],
            [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)],
        ]
    };
    match i % 3 {
        0 => draw(&mut rng),
        1 => {
            let state = if rng.random_bool(0.5) {
                random_pure_state(&mut rng)
            } else {
                random_mixed_state(&mut rng)
            };
            let mut scenario = random_scenario_with(&mut rng);
            let eta = rng.random_range(0.3..=1.0);
            scenario = scenario.with_alice_smearing(eta).expect("eta in range");
            correlation_table(&state, &scenario).e
        }
        _ => loop {
            let e = draw(&mut rng);
            let s = steering_from_correlators(&e);
            let target = rng.random_range(1.9..=2.1);
            if s > 1e-6 {
                let scaled = e.map(|row| row.map(|v| v * target / s));
                if scaled.iter().flatten().all(|v| v.abs() <= 1.0) {
                    break scaled;
                }
            }
        },
    }
}

/// Checks both directions of the polygon sandwich on `samples` seeded tables.
pub fn cross_validate(samples: usize, seed: u64, ngon: usize) -> Result<CrossValidation> {
    if ngon < 64 {
        return Err(Error::Invalid(format!("cross validation needs ngon ≥ 64, got {ngon}")));
    }
    let inner = 2.0 * (std::f64::consts::PI / ngon as f64).cos();
    let results: Vec<([[f64; 2]; 2], MembershipResult)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let e = sample_table(seed, i);
            lhs_membership(&e, ngon).map(|r| (e, r))
        })
        .collect::<Result<_>>()?;

    let mut report = CrossValidation {
        samples,
        ngon,
        members: 0,
        non_members: 0,
        necessary_violations: 0,
        sufficient_violations: 0,
        counterexamples: Vec::new(),
    };
    for (e, r) in results {
        if r.member {
            report.members += 1;
            if r.steering > 2.0 + 1e-8 {
                report.necessary_violations += 1;
                report.counterexamples.push(e);
            }
        } else {
            report.non_members += 1;
            if r.steering <= inner {
                report.sufficient_violations += 1;
                report.counterexamples.push(e);
            }
        }
    }
    Ok(report)
}

/// Rescales a weight vector's correlators back into a table, for checking
/// decompositions.
pub fn recombine(weights: &[(LhsVertex, f64)]) -> ([[f64; 2]; 2], f64) {
    let mut e = [[0.0; 2]; 2];
    let mut total = 0.0;
    for (v, w) in weights {
        let c = v.correlators();
        for x in 0..2 {
            for y in 0..2 {
                e[x][y] += w * c[x][y];
            }
        }
        total += w;
    }
    (e, total)
}
