//! Dichotomic qubit observables with outcomes ±1.
//!
//! An observable is a unit Bloch direction `m` together with a sharpness
//! `η ∈ (0, 1]`. Its effects are `(I ± η m·σ)/2`; `η = 1` is the projective
//! measurement of `m·σ`, smaller `η` mixes in white noise.

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qubit::{identity2, pauli_dot, BlochVector3, Matrix2};
use crate::seed;

/// Tolerance for unit norm and orthogonality of measurement directions.
pub const DIRECTION_TOL: f64 = 1e-9;

fn check_unit(v: &BlochVector3) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > DIRECTION_TOL {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfRange { name: "eta", value: eta, lo: 0.0, hi: 1.0 });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DichotomicObservable {
    direction: BlochVector3,
    eta: f64,
}

impl DichotomicObservable {
    pub fn new(direction: BlochVector3, eta: f64) -> Result<Self> {
        check_unit(&direction)?;
        check_eta(eta)?;
        Ok(Self { direction, eta })
    }

    pub fn sharp(direction: BlochVector3) -> Result<Self> {
        Self::new(direction, 1.0)
    }

    pub(crate) fn sharp_unchecked(direction: BlochVector3) -> Self {
        Self { direction, eta: 1.0 }
    }

    pub fn direction(&self) -> BlochVector3 {
        self.direction
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The ±1-valued observable `η m·σ = E₊ − E₋`.
    pub fn operator(&self) -> Matrix2 {
        pauli_dot(&self.direction) * num_complex::Complex64::new(self.eta, 0.0)
    }

    /// Same direction, opposite outcome labelling.
    pub fn flipped(&self) -> Self {
        Self { direction: self.direction.neg(), eta: self.eta }
    }
}

/// POVM effects for outcomes `+1` and `−1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectPair {
    pub plus: Matrix2,
    pub minus: Matrix2,
}

impl EffectPair {
    /// Effect for outcome `a ∈ {+1, −1}` (any positive value selects `plus`).
    pub fn for_outcome(&self, a: i8) -> &Matrix2 {
        if a > 0 {
            &self.plus
        } else {
            &self.minus
        }
    }
}

pub fn effects(obs: &DichotomicObservable) -> EffectPair {
    let half = num_complex::Complex64::new(0.5, 0.0);
    let op = obs.operator();
    EffectPair {
        plus: (identity2() + op) * half,
        minus: (identity2() - op) * half,
    }
}

/// Composes an additional smearing `eta` onto `obs`.
pub fn smear(obs: &DichotomicObservable, eta: f64) -> Result<DichotomicObservable> {
    check_eta(eta)?;
    Ok(DichotomicObservable { direction: obs.direction, eta: obs.eta * eta })
}

/// Bob's two sharp measurements along orthonormal directions `c` and `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MubPair {
    c: BlochVector3,
    d: BlochVector3,
}

impl MubPair {
    pub fn new(c: BlochVector3, d: BlochVector3) -> Result<Self> {
        check_unit(&c)?;
        check_unit(&d)?;
        let dot = c.dot(&d);
        if dot.abs() > DIRECTION_TOL {
            return Err(Error::NotOrthogonal { dot });
        }
        Ok(Self { c, d })
    }

    /// Gram–Schmidt: normalises `c`, then removes the `c` component of `d`
    /// and normalises it. Returns the pair and the original `ĉ·d̂`.
    pub fn orthonormalized(c: [f64; 3], d: [f64; 3]) -> Result<(Self, f64)> {
        let c = BlochVector3::normalized(c[0], c[1], c[2])?;
        let dn = BlochVector3::normalized(d[0], d[1], d[2])?;
        let overlap = c.dot(&dn);
        let r = [dn.x - overlap * c.x, dn.y - overlap * c.y, dn.z - overlap * c.z];
        let d = BlochVector3::normalized(r[0], r[1], r[2])
            .map_err(|_| Error::NotOrthogonal { dot: overlap })?;
        Ok((Self { c, d }, overlap))
    }

    /// Frame parametrisation: `c` at spherical angles `(theta, phi)`, `d` at
    /// angle `psi` inside the plane orthogonal to `c`.
    pub fn from_frame_angles(theta: f64, phi: f64, psi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let (ss, cs) = psi.sin_cos();
        let c = [st * cp, st * sp, ct];
        let e1 = [ct * cp, ct * sp, -st];
        let e2 = [-sp, cp, 0.0];
        let d = [0, 1, 2].map(|k| cs * e1[k] + ss * e2[k]);
        Self {
            c: BlochVector3::from_array_unchecked(c),
            d: BlochVector3::from_array_unchecked(d),
        }
    }

    pub fn c(&self) -> BlochVector3 {
        self.c
    }

    pub fn d(&self) -> BlochVector3 {
        self.d
    }

    /// `[c, d]`, indexed by Bob's setting.
    pub fn directions(&self) -> [BlochVector3; 2] {
        [self.c, self.d]
    }

    pub fn observables(&self) -> [DichotomicObservable; 2] {
        [
            DichotomicObservable::sharp_unchecked(self.c),
            DichotomicObservable::sharp_unchecked(self.d),
        ]
    }

    pub fn swapped(&self) -> Self {
        Self { c: self.d, d: self.c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementScenario {
    pub alice: [DichotomicObservable; 2],
    pub bob: MubPair,
}

impl MeasurementScenario {
    pub fn new(alice: [DichotomicObservable; 2], bob: MubPair) -> Self {
        Self { alice, bob }
    }

    /// All-sharp scenario from raw directions.
    pub fn sharp(m: BlochVector3, n: BlochVector3, bob: MubPair) -> Result<Self> {
        Ok(Self {
            alice: [DichotomicObservable::sharp(m)?, DichotomicObservable::sharp(n)?],
            bob,
        })
    }

    /// Applies the same extra smearing to both of Alice's observables.
    pub fn with_alice_smearing(&self, eta: f64) -> Result<Self> {
        Ok(Self {
            alice: [smear(&self.alice[0], eta)?, smear(&self.alice[1], eta)?],
            bob: self.bob,
        })
    }
}

fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> BlochVector3 {
    BlochVector3::from_array_unchecked(UnitSphere.sample(rng))
}

/// Haar-random orthonormal pair.
pub fn random_mub_pair<R: Rng + ?Sized>(rng: &mut R) -> MubPair {
    let c = unit_vector(rng);
    let theta = c.z.clamp(-1.0, 1.0).acos();
    let phi = c.y.atan2(c.x);
    let psi = rng.random_range(0.0..std::f64::consts::TAU);
    MubPair::from_frame_angles(theta, phi, psi)
}

pub fn random_scenario_with<R: Rng + ?Sized>(rng: &mut R) -> MeasurementScenario {
    let m = unit_vector(rng);
    let n = unit_vector(rng);
    MeasurementScenario {
        alice: [
            DichotomicObservable::sharp_unchecked(m),
            DichotomicObservable::sharp_unchecked(n),
        ],
        bob: random_mub_pair(rng),
    }
}

/// Sharp scenario with uniformly random Alice directions and a uniformly
/// random orthonormal frame for Bob. Deterministic in `seed`.
pub fn random_scenario(seed: u64) -> MeasurementScenario {
    random_scenario_with(&mut seed::rng(seed, 0))
}
