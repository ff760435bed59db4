//! `--state` specifications and the density-matrix file format.
//!
//! The file is JSON with a single key `"rho"`: a 4×4 array of `[re, im]`
//! pairs in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use steering_core::{Matrix4, PureSchmidtParams, TwoQubitState, WernerParams};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Pure(f64),
    Werner(f64),
    Singlet,
    PhiPlus,
    File(PathBuf),
}

fn parse_param(body: &str, key: &str) -> Result<f64, String> {
    let value = body.strip_prefix(key).and_then(|r| r.strip_prefix('=')).unwrap_or(body);
    value
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse {key} from {body:?}"))
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim().to_ascii_lowercase().as_str() {
            "pure" => Ok(StateSpec::Pure(parse_param(body, "a")?)),
            "werner" => Ok(StateSpec::Werner(parse_param(body, "w")?)),
            "singlet" => Ok(StateSpec::Singlet),
            "phiplus" | "phi+" => Ok(StateSpec::PhiPlus),
            "file" if !body.is_empty() => Ok(StateSpec::File(PathBuf::from(body))),
            _ => Err(format!(
                "unknown state {s:?}; expected pure:a=A, werner:w=W, singlet, phiplus or file:PATH"
            )),
        }
    }
}

impl StateSpec {
    pub fn build(&self) -> CliResult<TwoQubitState> {
        Ok(match self {
            StateSpec::Pure(a) => TwoQubitState::pure_schmidt(PureSchmidtParams::new(*a)?),
            StateSpec::Werner(w) => TwoQubitState::werner(WernerParams::new(*w)?),
            StateSpec::Singlet => TwoQubitState::singlet(),
            StateSpec::PhiPlus => TwoQubitState::phi_plus(),
            StateSpec::File(path) => load_state(path)?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            StateSpec::Pure(a) => format!("pure:a={a}"),
            StateSpec::Werner(w) => format!("werner:w={w}"),
            StateSpec::Singlet => "singlet".into(),
            StateSpec::PhiPlus => "phiplus".into(),
            StateSpec::File(p) => format!("file:{}", p.display()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub rho: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(state: &TwoQubitState) -> Self {
        let rho = state.rho();
        Self {
            rho: (0..4)
                .map(|i| (0..4).map(|j| [rho[(i, j)].re, rho[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn to_state(&self) -> CliResult<TwoQubitState> {
        if self.rho.len() != 4 || self.rho.iter().any(|row| row.len() != 4) {
            return Err(CliError::Input("\"rho\" must be a 4×4 array of [re, im] pairs".into()));
        }
        let m = Matrix4::from_fn(|i, j| Complex64::new(self.rho[i][j][0], self.rho[i][j][1]));
        Ok(TwoQubitState::from_matrix(m)?)
    }
}

pub fn load_state(path: &Path) -> CliResult<TwoQubitState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed state file {}: {e}", path.display())))?;
    file.to_state()
}
