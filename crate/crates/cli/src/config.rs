//! Command-line flags, the flat `key = value` config file and built-in defaults.
//!
//! Precedence is flags, then the config file, then defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::state::StateSpec;
use crate::{CliError, CliResult};

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 2000;
pub const DEFAULT_NGON: usize = 256;
pub const DEFAULT_GRID: usize = 101;
pub const DEFAULT_SCAN_SAMPLES: usize = 100_000;
pub const DEFAULT_JM_SAMPLES: usize = 10_000;

/// Overrides the directory sweep output goes to when `--out` is absent.
pub const OUT_DIR_ENV: &str = "STEERING_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "steering", version, about = "CHSH-like steering functional on two qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation table, S and CHSH value for explicit settings.
    Eval(Flags),
    /// Maximise S over all measurement settings.
    Optimize(Flags),
    /// Optimise over a parameter grid of a state family; writes CSV + plot script.
    Sweep(Flags),
    /// Random (state, scenario) samples checked against 2√2.
    BoundScan(Flags),
    /// Joint-measurability threshold and mother POVM for two directions.
    Jm(Flags),
    /// LHS-polytope membership of a correlator table.
    Lhs(Flags),
}

impl Command {
    pub fn flags(&self) -> &Flags {
        match self {
            Command::Eval(f)
            | Command::Optimize(f)
            | Command::Sweep(f)
            | Command::BoundScan(f)
            | Command::Jm(f)
            | Command::Lhs(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Pure,
    Werner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `x,y,z`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple(pub [f64; 3]);

/// `e11,e12,e21,e22`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table4(pub [[f64; 2]; 2]);

/// `lo:hi`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span(pub f64, pub f64);

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("malformed {what} {s:?}"))?;
    if v.len() != n {
        return Err(format!("{what} needs {n} comma-separated numbers, got {s:?}"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(format!("{what} must be finite: {s:?}"));
    }
    Ok(v)
}

impl FromStr for Triple {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = numbers(s, 3, "vector")?;
        Ok(Triple([v[0], v[1], v[2]]))
    }
}

impl FromStr for Table4 {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = numbers(s, 4, "table")?;
        Ok(Table4([[v[0], v[1]], [v[2], v[3]]]))
    }
}

impl FromStr for Span {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("range must be lo:hi, got {s:?}"))?;
        let lo: f64 = lo.trim().parse().map_err(|_| format!("malformed range {s:?}"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("malformed range {s:?}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(format!("range needs finite lo ≤ hi, got {s:?}"));
        }
        Ok(Span(lo, hi))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// pure:a=A | werner:w=W | singlet | phiplus | file:PATH
    #[arg(long)]
    pub state: Option<StateSpec>,
    /// Alice's first direction, `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<Triple>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<Triple>,
    /// Bob's first direction, `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub b1: Option<Triple>,
    #[arg(long, allow_hyphen_values = true)]
    pub b2: Option<Triple>,
    /// Sharpness of Alice's observables (eval), or the η to report at (jm).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Correlators `e11,e12,e21,e22` for lhs.
    #[arg(long, allow_hyphen_values = true)]
    pub table: Option<Table4>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Number of grid points.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Parameter range `lo:hi`.
    #[arg(long)]
    pub range: Option<Span>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub ngon: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat `key = value` file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// jm: sample random pairs for the global threshold.
    #[arg(long)]
    pub scan: bool,
    /// bound-scan: replace sample 0 with Φ⁺ at its optimal settings.
    #[arg(long)]
    pub inject: bool,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("config line {}: expected key = value", no + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        map.insert(key, v.trim().trim_matches('"').to_string());
    }
    Ok(map)
}

fn set<T: FromStr>(slot: &mut Option<T>, key: &str, value: &str) -> CliResult<()>
where
    T::Err: std::fmt::Display,
{
    if slot.is_none() {
        *slot = Some(
            value
                .parse()
                .map_err(|e| CliError::Input(format!("config key {key}: {e}")))?,
        );
    }
    Ok(())
}

fn set_enum<T: ValueEnum>(slot: &mut Option<T>, key: &str, value: &str) -> CliResult<()> {
    if slot.is_none() {
        *slot = Some(
            T::from_str(value, true).map_err(|e| CliError::Input(format!("config key {key}: {e}")))?,
        );
    }
    Ok(())
}

fn set_bool(slot: &mut bool, key: &str, value: &str) -> CliResult<()> {
    let v: bool = value
        .parse()
        .map_err(|_| CliError::Input(format!("config key {key}: expected true or false")))?;
    *slot |= v;
    Ok(())
}

impl Flags {
    /// Fills unset flags from `map`; unknown keys are input errors.
    pub fn fill_from(&mut self, map: &BTreeMap<String, String>) -> CliResult<()> {
        for (k, v) in map {
            let key = k.as_str();
            match key {
                "state" => set(&mut self.state, key, v)?,
                "a1" => set(&mut self.a1, key, v)?,
                "a2" => set(&mut self.a2, key, v)?,
                "b1" => set(&mut self.b1, key, v)?,
                "b2" => set(&mut self.b2, key, v)?,
                "eta" => set(&mut self.eta, key, v)?,
                "table" => set(&mut self.table, key, v)?,
                "family" => set_enum(&mut self.family, key, v)?,
                "grid" => set(&mut self.grid, key, v)?,
                "range" => set(&mut self.range, key, v)?,
                "restarts" => set(&mut self.restarts, key, v)?,
                "seed" => set(&mut self.seed, key, v)?,
                "tol" => set(&mut self.tol, key, v)?,
                "max-iters" => set(&mut self.max_iters, key, v)?,
                "ngon" => set(&mut self.ngon, key, v)?,
                "samples" => set(&mut self.samples, key, v)?,
                "out" => set(&mut self.out, key, v)?,
                "format" => set_enum(&mut self.format, key, v)?,
                "scan" => set_bool(&mut self.scan, key, v)?,
                "inject" => set_bool(&mut self.inject, key, v)?,
                _ => return Err(CliError::Input(format!("unknown config key {key:?}"))),
            }
        }
        Ok(())
    }

    /// Applies `--config` if present.
    pub fn resolve(mut self) -> CliResult<Self> {
        if let Some(path) = self.config.clone() {
            let text = read_config(&path)?;
            self.fill_from(&parse_config(&text)?)?;
        }
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn ngon(&self) -> usize {
        self.ngon.unwrap_or(DEFAULT_NGON)
    }

    pub fn grid(&self) -> usize {
        self.grid.unwrap_or(DEFAULT_GRID)
    }

    pub fn opt_config(&self) -> steering_core::OptConfig {
        steering_core::OptConfig {
            restarts: self.restarts.unwrap_or(DEFAULT_RESTARTS),
            seed: self.seed(),
            tol: self.tol.unwrap_or(DEFAULT_TOL),
            max_iters: self.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
        }
    }
}

fn read_config(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_value_types() {
        assert_eq!("1,-0.5, 2".parse::<Triple>().unwrap(), Triple([1.0, -0.5, 2.0]));
        assert!("1,2".parse::<Triple>().is_err());
        assert!("1,x,2".parse::<Triple>().is_err());
        assert!("1,nan,2".parse::<Triple>().is_err());
        assert_eq!("0.1,0.2,0.3,0.4".parse::<Table4>().unwrap(), Table4([[0.1, 0.2], [0.3, 0.4]]));
        assert_eq!("0:1".parse::<Span>().unwrap(), Span(0.0, 1.0));
        assert!("1:0".parse::<Span>().is_err());
    }

    #[test]
    fn flags_take_precedence_over_config() {
        let map = parse_config("# comment\nseed = 7\nrestarts=8\nformat = json\nmax_iters = 10\n").unwrap();
        let mut f = Flags { seed: Some(1), ..Flags::default() };
        f.fill_from(&map).unwrap();
        assert_eq!(f.seed, Some(1));
        assert_eq!(f.restarts, Some(8));
        assert_eq!(f.format, Some(Format::Json));
        assert_eq!(f.max_iters, Some(10));
        assert_eq!(f.ngon(), DEFAULT_NGON);
    }

    #[test]
    fn bad_config_is_input_error() {
        assert!(parse_config("seed 7").is_err());
        let map = parse_config("colour = red").unwrap();
        assert_eq!(Flags::default().fill_from(&map).unwrap_err().exit_code(), 2);
        let map = parse_config("seed = -1").unwrap();
        assert_eq!(Flags::default().fill_from(&map).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn defaults() {
        let cfg = Flags::default().opt_config();
        assert_eq!(cfg, steering_core::OptConfig::default());
        assert_eq!(Flags::default().grid(), 101);
    }
}
