//! Correlators, joint outcome probabilities and the two scalar functionals
//! computed from them: the CHSH-like steering value `S` and the CHSH value.
//!
//! Settings are indexed `0` and `1` (Alice's `A₁, A₂`, Bob's `B₁ = c, B₂ = d`);
//! outcomes are `+1` and `−1`.

use serde::Serialize;

use crate::measurements::{effects, MeasurementScenario};
use crate::qubit::{kron, TwoQubitState};

/// `E[x][y] = ⟨A_x B_y⟩` plus one-party marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub e: [[f64; 2]; 2],
    pub alice_marg: [f64; 2],
    pub bob_marg: [f64; 2],
}

impl CorrelationTable {
    /// Table with the given correlators and zero marginals.
    pub fn from_correlators(e: [[f64; 2]; 2]) -> Self {
        Self { e, alice_marg: [0.0; 2], bob_marg: [0.0; 2] }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            e: self.e.map(|row| row.map(|v| t * v)),
            ..*self
        }
    }

    /// Whether every entry lies in `[−1, 1]` up to `1e-9`.
    pub fn is_bounded(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .chain(&self.alice_marg)
            .chain(&self.bob_marg)
            .all(|v| v.abs() <= 1.0 + 1e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct SteeringValue(pub f64);

impl SteeringValue {
    pub fn value(self) -> f64 {
        self.0
    }

    /// `S > 2`: no LHV–LHS model reproduces the correlators.
    pub fn violates(self) -> bool {
        self.0 > 2.0
    }
}

/// `P(a, b | A_x, B_y) = Tr[(E_{a|x} ⊗ F_{b|y}) ρ]`.
pub fn joint_probability(
    state: &TwoQubitState,
    scenario: &MeasurementScenario,
    x: usize,
    y: usize,
    a: i8,
    b: i8,
) -> f64 {
    let ea = effects(&scenario.alice[x]);
    let fb = effects(&scenario.bob.observables()[y]);
    state.expectation(&kron(ea.for_outcome(a), fb.for_outcome(b)))
}

pub fn correlation_table(state: &TwoQubitState, scenario: &MeasurementScenario) -> CorrelationTable {
    let alice = scenario.alice.map(|o| o.operator());
    let bob = scenario.bob.observables().map(|o| o.operator());
    let id = crate::qubit::identity2();
    let mut e = [[0.0; 2]; 2];
    for (x, ax) in alice.iter().enumerate() {
        for (y, by) in bob.iter().enumerate() {
            e[x][y] = state.expectation(&kron(ax, by));
        }
    }
    CorrelationTable {
        e,
        alice_marg: alice.map(|ax| state.expectation(&kron(&ax, &id))),
        bob_marg: bob.map(|by| state.expectation(&kron(&id, &by))),
    }
}

/// `S = √(⟨(A₁+A₂)B₁⟩² + ⟨(A₁+A₂)B₂⟩²) + √(⟨(A₁−A₂)B₁⟩² + ⟨(A₁−A₂)B₂⟩²)`.
pub fn steering_value(t: &CorrelationTable) -> SteeringValue {
    SteeringValue(steering_from_correlators(&t.e))
}

pub(crate) fn steering_from_correlators(e: &[[f64; 2]; 2]) -> f64 {
    let plus = (e[0][0] + e[1][0]).hypot(e[0][1] + e[1][1]);
    let minus = (e[0][0] - e[1][0]).hypot(e[0][1] - e[1][1]);
    plus + minus
}

/// CHSH value maximised over the four choices of which correlator carries
/// the minus sign.
pub fn chsh_value(t: &CorrelationTable) -> f64 {
    let e = &t.e;
    let total = e[0][0] + e[0][1] + e[1][0] + e[1][1];
    e.iter()
        .flatten()
        .map(|v| (total - 2.0 * v).abs())
        .fold(0.0, f64::max)
}

/// `S` directly from a correlation matrix `T` and sharp directions; the
/// optimiser's inner loop.
pub(crate) fn steering_from_matrix(
    t: &[[f64; 3]; 3],
    alice: [[f64; 3]; 2],
    bob: [[f64; 3]; 2],
) -> f64 {
    let mut e = [[0.0; 2]; 2];
    for (x, m) in alice.iter().enumerate() {
        for (y, b) in bob.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..3 {
                acc += m[i] * (t[i][0] * b[0] + t[i][1] * b[1] + t[i][2] * b[2]);
            }
            e[x][y] = acc;
        }
    }
    steering_from_correlators(&e)
}
