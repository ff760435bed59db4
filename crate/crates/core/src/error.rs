use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("vector has norm {norm}, expected a unit vector")]
    NotUnit { norm: f64 },

    #[error("bob's directions are not orthogonal (c·d = {dot})")]
    NotOrthogonal { dot: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("unsharpness {eta} exceeds the joint-measurability threshold {eta_max}")]
    NotJointlyMeasurable { eta: f64, eta_max: f64 },

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}
