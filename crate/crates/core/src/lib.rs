//! Numerical toolkit for the CHSH-like EPR-steering functional on two qubits.
//!
//! The crate is organised bottom-up:
//!
//! * [`qubit`]: complex 2×2 / 4×4 matrices, Pauli algebra, two-qubit states.
//! * [`measurements`]: dichotomic (possibly unsharp) observables and Bob's
//!   mutually unbiased pair.
//! * [`correlations`]: correlators, joint probabilities, the steering
//!   functional `S` and the CHSH value.
//! * [`joint`]: joint measurability of unsharp qubit pairs and the mother POVM.
//! * [`optimizer`]: multistart Nelder–Mead maximisation of `S` and parameter sweeps.
//! * [`lhs`]: assemblages and the LHV–LHS correlation polytope membership LP.
//! * [`sampling`]: random states and the quantum bound scan.

pub mod correlations;
pub mod error;
pub mod joint;
pub mod lhs;
pub mod measurements;
pub mod optimizer;
pub mod qubit;
pub mod sampling;
pub(crate) mod seed;
pub mod simplex;

pub use correlations::{chsh_value, correlation_table, joint_probability, steering_value, CorrelationTable, SteeringValue};
pub use error::{Error, Result};
pub use joint::{eta_max, global_eta_opt, mother_povm, JmReport, MotherPovm};
pub use lhs::{assemblage_from_state, cross_validate, lhs_membership, Assemblage, MembershipResult};
pub use measurements::{effects, random_scenario, smear, DichotomicObservable, EffectPair, MeasurementScenario, MubPair};
pub use optimizer::{optimize, sweep_pure, sweep_werner, OptConfig, OptResult, SweepRow};
pub use qubit::{BlochVector3, Matrix2, Matrix4, PureSchmidtParams, TwoQubitState, WernerParams};

/// The quantum maximum of the steering functional, `2√2`.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Largest unsharpness at which every pair of dichotomic qubit observables is
/// jointly measurable.
pub const ETA_OPT: f64 = std::f64::consts::FRAC_1_SQRT_2;
