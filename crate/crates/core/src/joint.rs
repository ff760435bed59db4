//! Joint measurability of two unsharp dichotomic qubit observables.
//!
//! The pair `(m, η)`, `(n, η)` admits a four-outcome mother POVM
//!
//! ```text
//! G[a1][a2] = ¼[(1 + a1·a2·γ) I + η(a1 m + a2 n)·σ]
//! ```
//!
//! whose marginals are the two effect pairs. Positivity requires
//! `η|m+n| − 1 ≤ γ ≤ 1 − η|m−n|`, which is nonempty exactly when
//! `η ≤ 2 / (|m+n| + |m−n|)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurements::DIRECTION_TOL;
use crate::qubit::{eigenvalues2, identity2, pauli_dot_components, BlochVector3, Matrix2};
use crate::seed;

/// Slack on `η ≤ eta_max` accepted by [`mother_povm`].
pub const THRESHOLD_TOL: f64 = 1e-12;

fn check_unit(v: &BlochVector3) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > DIRECTION_TOL {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

fn sum_diff_norms(m: &BlochVector3, n: &BlochVector3) -> (f64, f64) {
    let s = (m.x + n.x).hypot(m.y + n.y).hypot(m.z + n.z);
    let d = (m.x - n.x).hypot(m.y - n.y).hypot(m.z - n.z);
    (s, d)
}

/// Largest sharpness at which `(m, η)` and `(n, η)` are jointly measurable.
pub fn eta_max(m: &BlochVector3, n: &BlochVector3) -> Result<f64> {
    check_unit(m)?;
    check_unit(n)?;
    let (s, d) = sum_diff_norms(m, n);
    Ok((2.0 / (s + d)).min(1.0))
}

/// Four-outcome mother observable, `effects[i][j]` for outcomes
/// `(a1, a2) = (±1, ±1)` with index 0 for `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotherPovm {
    pub effects: [[Matrix2; 2]; 2],
    pub gamma: f64,
}

const SIGNS: [f64; 2] = [1.0, -1.0];

impl MotherPovm {
    /// Smallest eigenvalue of each effect.
    pub fn min_eigenvalues(&self) -> [[f64; 2]; 2] {
        self.effects.map(|row| row.map(|g| eigenvalues2(&g)[0]))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalues().iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// `‖Σ G − I‖_max`.
    pub fn completeness_defect(&self) -> f64 {
        let total = self.effects.iter().flatten().fold(Matrix2::zeros(), |acc, g| acc + g);
        max_entry(&(total - identity2()))
    }

    /// Largest entrywise deviation of the two marginals from the target
    /// effects `(I ± η m·σ)/2` and `(I ± η n·σ)/2`.
    pub fn marginal_defect(&self, m: &BlochVector3, n: &BlochVector3, eta: f64) -> f64 {
        let half = Complex64::new(0.5, 0.0);
        let mut worst: f64 = 0.0;
        for (i, s) in SIGNS.iter().enumerate() {
            let target_m = (identity2() + pauli_dot_components(m.to_array()) * Complex64::new(s * eta, 0.0)) * half;
            let target_n = (identity2() + pauli_dot_components(n.to_array()) * Complex64::new(s * eta, 0.0)) * half;
            let first = self.effects[i][0] + self.effects[i][1];
            let second = self.effects[0][i] + self.effects[1][i];
            worst = worst.max(max_entry(&(first - target_m))).max(max_entry(&(second - target_n)));
        }
        worst
    }
}

fn max_entry(m: &Matrix2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn mother_effects(m: &BlochVector3, n: &BlochVector3, eta: f64, gamma: f64) -> [[Matrix2; 2]; 2] {
    let quarter = Complex64::new(0.25, 0.0);
    let mut out = [[Matrix2::zeros(); 2]; 2];
    for (i, a1) in SIGNS.iter().enumerate() {
        for (j, a2) in SIGNS.iter().enumerate() {
            let v = [
                eta * (a1 * m.x + a2 * n.x),
                eta * (a1 * m.y + a2 * n.y),
                eta * (a1 * m.z + a2 * n.z),
            ];
            let scalar = Complex64::new(1.0 + a1 * a2 * gamma, 0.0);
            out[i][j] = (identity2() * scalar + pauli_dot_components(v)) * quarter;
        }
    }
    out
}

/// Builds the mother POVM with `γ` at the midpoint of its feasible interval.
pub fn mother_povm(m: &BlochVector3, n: &BlochVector3, eta: f64) -> Result<MotherPovm> {
    let limit = eta_max(m, n)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfRange { name: "eta", value: eta, lo: 0.0, hi: 1.0 });
    }
    if eta > limit + THRESHOLD_TOL {
        return Err(Error::NotJointlyMeasurable { eta, eta_max: limit });
    }
    let (s, d) = sum_diff_norms(m, n);
    let gamma = 0.5 * (eta * s - eta * d);
    Ok(MotherPovm { effects: mother_effects(m, n, eta, gamma), gamma })
}

/// Summary for a pair of directions, evaluated at sharpness `eta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JmReport {
    pub eta_max: f64,
    pub eta: f64,
    pub gamma: f64,
    /// Minimum eigenvalue of each mother effect, `[a1][a2]`.
    pub min_eigenvalues: [[f64; 2]; 2],
    pub completeness_defect: f64,
    pub marginal_defect: f64,
}

impl JmReport {
    /// Report at `eta` (defaults to the threshold itself).
    pub fn new(m: &BlochVector3, n: &BlochVector3, eta: Option<f64>) -> Result<Self> {
        let eta_max = eta_max(m, n)?;
        let eta = eta.unwrap_or(eta_max);
        let povm = mother_povm(m, n, eta)?;
        Ok(Self {
            eta_max,
            eta,
            gamma: povm.gamma,
            min_eigenvalues: povm.min_eigenvalues(),
            completeness_defect: povm.completeness_defect(),
            marginal_defect: povm.marginal_defect(m, n, eta),
        })
    }

    pub fn jointly_measurable_at(&self, eta: f64) -> bool {
        eta <= self.eta_max + THRESHOLD_TOL
    }
}

/// Minimum of [`eta_max`] over explicit pairs; `1` for an empty set.
pub fn min_eta_max(pairs: &[(BlochVector3, BlochVector3)]) -> Result<f64> {
    pairs
        .iter()
        .map(|(m, n)| eta_max(m, n))
        .try_fold(1.0, |acc: f64, e| e.map(|e| acc.min(e)))
}

fn random_unit<R: Rng>(rng: &mut R) -> BlochVector3 {
    let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
    BlochVector3 { x, y, z }
}

/// Worst-case threshold over `samples` random unit pairs plus the
/// orthogonal pair `(x̂, ŷ)`.
pub fn global_eta_opt(samples: usize, seed: u64) -> f64 {
    let sampled = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed, i);
            let m = random_unit(&mut rng);
            let n = random_unit(&mut rng);
            let (s, d) = sum_diff_norms(&m, &n);
            (2.0 / (s + d)).min(1.0)
        })
        .reduce(|| 1.0, f64::min);
    let orth = eta_max(&BlochVector3::X, &BlochVector3::Y).expect("unit axes");
    sampled.min(orth)
}
