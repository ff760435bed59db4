//! Random two-qubit states, local unitaries and the quantum-bound scan.

use nalgebra::Vector4;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{correlation_table, steering_value};
use crate::measurements::{random_scenario_with, MeasurementScenario, MubPair};
use crate::qubit::{identity2, pauli_dot_components, BlochVector3, Matrix2, Matrix4, TwoQubitState};
use crate::seed;
use crate::TSIRELSON;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random pure state from a normalised complex Gaussian vector.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let psi = Vector4::from_fn(|_, _| gaussian(rng));
    TwoQubitState::from_vector(&psi).expect("gaussian vector is nonzero almost surely")
}

/// Mixed state `G G† / Tr(G G†)` with `G` a complex Gaussian 4×4 matrix.
pub fn random_mixed_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let g = Matrix4::from_fn(|_, _| gaussian(rng));
    let w = g * g.adjoint();
    let w = (w + w.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = w.trace().re;
    TwoQubitState::from_matrix(w / Complex64::new(tr, 0.0)).expect("Wishart matrix is a valid state")
}

/// Single-qubit rotation `cos(θ/2) I − i sin(θ/2) n·σ` with uniform axis.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Matrix2 {
    let axis: [f64; 3] = UnitSphere.sample(rng);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (s, c) = (0.5 * theta).sin_cos();
    identity2() * Complex64::new(c, 0.0) - pauli_dot_components(axis) * Complex64::new(0.0, s)
}

/// Φ⁺ with Alice along `(x̂ ± ẑ)/√2` and Bob along `(x̂, ẑ)`; attains `2√2`.
pub fn saturating_point() -> (TwoQubitState, MeasurementScenario) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let scenario = MeasurementScenario::sharp(
        BlochVector3 { x: h, y: 0.0, z: h },
        BlochVector3 { x: h, y: 0.0, z: -h },
        MubPair::new(BlochVector3::X, BlochVector3::Z).expect("orthonormal axes"),
    )
    .expect("unit directions");
    (TwoQubitState::phi_plus(), scenario)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BoundScan {
    pub samples: usize,
    pub seed: u64,
    pub max_s: f64,
    pub argmax: usize,
    pub bound: f64,
    pub within_bound: bool,
    pub violations: usize,
    pub mean_s: f64,
}

/// Draws `samples` random (state, scenario) pairs (even indices pure,
/// odd indices Wishart-mixed) and records the largest `S`. With `inject`,
/// sample 0 is replaced by [`saturating_point`].
pub fn bound_scan(samples: usize, seed: u64, inject: bool) -> BoundScan {
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            if inject && i == 0 {
                let (st, sc) = saturating_point();
                return steering_value(&correlation_table(&st, &sc)).value();
            }
            let mut rng = seed::rng(seed, i as u64);
            let state = if i % 2 == 0 {
                random_pure_state(&mut rng)
            } else {
                random_mixed_state(&mut rng)
            };
            let scenario = random_scenario_with(&mut rng);
            steering_value(&correlation_table(&state, &scenario)).value()
        })
        .collect();

    let (argmax, max_s) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let limit = TSIRELSON + 1e-9;
    let violations = values.iter().filter(|v| **v > limit).count();
    BoundScan {
        samples,
        seed,
        max_s: if samples == 0 { 0.0 } else { max_s },
        argmax,
        bound: TSIRELSON,
        within_bound: violations == 0,
        violations,
        mean_s: if samples == 0 { 0.0 } else { values.iter().sum::<f64>() / samples as f64 },
    }
}
