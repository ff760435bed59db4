//! Two-qubit linear algebra: Pauli operators, Kronecker products, partial
//! traces and density-matrix constructors.
//!
//! Basis ordering is `|00⟩, |01⟩, |10⟩, |11⟩` (Alice is the most significant
//! qubit) and matrices are indexed row-major.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix2 = nalgebra::Matrix2<Complex64>;
pub type Matrix4 = nalgebra::Matrix4<Complex64>;

/// Tolerance on Hermiticity and unit trace of density matrices.
pub const STATE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as "nonnegative" for a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Slack allowed on `|v| ≤ 1` for Bloch vectors.
pub const BLOCH_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity2() -> Matrix2 {
    Matrix2::identity()
}

pub fn sigma_x() -> Matrix2 {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Matrix2 {
    Matrix2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Matrix2 {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// `[σ_x, σ_y, σ_z]`.
pub fn paulis() -> [Matrix2; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// A real three-vector in the closed unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector3 {
    pub const X: Self = Self { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Self = Self { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Self = Self { x: 0.0, y: 0.0, z: 1.0 };
    pub const ZERO: Self = Self { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::Invalid(format!("non-finite Bloch vector ({x}, {y}, {z})")));
        }
        let v = Self { x, y, z };
        let norm = v.norm();
        if norm > 1.0 + BLOCH_TOL {
            return Err(Error::OutOfRange {
                name: "|v|",
                value: norm,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(v)
    }

    /// Rescales an arbitrary nonzero vector onto the unit sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(Self { x: x / n, y: y / n, z: z / n })
    }

    /// Unit vector with polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { x: st * cp, y: st * sp, z: ct }
    }

    pub fn from_array(a: [f64; 3]) -> Result<Self> {
        Self::new(a[0], a[1], a[2])
    }

    pub(crate) const fn from_array_unchecked(a: [f64; 3]) -> Self {
        Self { x: a[0], y: a[1], z: a[2] }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn neg(self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// `v_x σ_x + v_y σ_y + v_z σ_z`.
pub fn pauli_dot(v: &BlochVector3) -> Matrix2 {
    pauli_dot_components(v.to_array())
}

/// [`pauli_dot`] for an unconstrained real vector.
pub fn pauli_dot_components(v: [f64; 3]) -> Matrix2 {
    let [x, y, z] = v;
    Matrix2::new(
        Complex64::new(z, 0.0),
        Complex64::new(x, -y),
        Complex64::new(x, y),
        Complex64::new(-z, 0.0),
    )
}

pub fn kron(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    a.kronecker(b).fixed_view::<4, 4>(0, 0).into_owned()
}

/// Traces out Alice's (first) qubit.
pub fn partial_trace_alice(rho: &Matrix4) -> Matrix2 {
    Matrix2::from_fn(|j, l| rho[(j, l)] + rho[(2 + j, 2 + l)])
}

/// Traces out Bob's (second) qubit.
pub fn partial_trace_bob(rho: &Matrix4) -> Matrix2 {
    Matrix2::from_fn(|i, k| rho[(2 * i, 2 * k)] + rho[(2 * i + 1, 2 * k + 1)])
}

/// Largest entrywise deviation of `m` from its adjoint.
pub fn hermiticity_defect<const N: usize>(
    m: &nalgebra::SMatrix<Complex64, N, N>,
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a 4×4 Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &Matrix4) -> [f64; 4] {
    let eig = SymmetricEigen::new(*m);
    let mut out = [0.0; 4];
    for (o, e) in out.iter_mut().zip(eig.eigenvalues.iter()) {
        *o = *e;
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenvalues of a 2×2 Hermitian matrix, ascending, in closed form.
pub fn eigenvalues2(m: &Matrix2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - r, mean + r]
}

/// Bloch vector `(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)` of a qubit operator.
pub fn bloch_of(rho: &Matrix2) -> [f64; 3] {
    [
        2.0 * rho[(0, 1)].re,
        -2.0 * rho[(0, 1)].im,
        (rho[(0, 0)] - rho[(1, 1)]).re,
    ]
}

/// Pure Schmidt-form state `a|00⟩ + b|11⟩` with real `b = √(1 − a²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureSchmidtParams {
    a: f64,
}

impl PureSchmidtParams {
    pub fn new(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::OutOfRange { name: "a", value: a, lo: 0.0, hi: 1.0 });
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        (1.0 - self.a * self.a).max(0.0).sqrt()
    }
}

/// Werner mixing weight `w` in `w|ψ⁻⟩⟨ψ⁻| + (1 − w) I/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    w: f64,
}

impl WernerParams {
    pub fn new(w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfRange { name: "w", value: w, lo: 0.0, hi: 1.0 });
        }
        Ok(Self { w })
    }

    pub fn w(&self) -> f64 {
        self.w
    }
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(rho: Matrix4) -> Result<Self> {
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = hermiticity_defect(&rho);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&rho)[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { rho })
    }

    /// Projector onto a (not necessarily normalised) state vector.
    pub fn from_vector(psi: &nalgebra::Vector4<Complex64>) -> Result<Self> {
        let n = psi.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi = psi / Complex64::new(n, 0.0);
        Self::from_matrix(psi * psi.adjoint())
    }

    pub fn pure_schmidt(p: PureSchmidtParams) -> Self {
        let (a, b) = (p.a(), p.b());
        let mut rho = Matrix4::zeros();
        rho[(0, 0)] = Complex64::new(a * a, 0.0);
        rho[(0, 3)] = Complex64::new(a * b, 0.0);
        rho[(3, 0)] = Complex64::new(a * b, 0.0);
        rho[(3, 3)] = Complex64::new(b * b, 0.0);
        Self { rho }
    }

    pub fn werner(p: WernerParams) -> Self {
        let w = p.w();
        let rho = Self::singlet().rho * Complex64::new(w, 0.0)
            + Matrix4::identity() * Complex64::new((1.0 - w) / 4.0, 0.0);
        Self { rho }
    }

    /// `|ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let mut rho = Matrix4::zeros();
        rho[(1, 1)] = Complex64::new(0.5, 0.0);
        rho[(2, 2)] = Complex64::new(0.5, 0.0);
        rho[(1, 2)] = Complex64::new(-0.5, 0.0);
        rho[(2, 1)] = Complex64::new(-0.5, 0.0);
        Self { rho }
    }

    /// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        Self::pure_schmidt(PureSchmidtParams { a: std::f64::consts::FRAC_1_SQRT_2 })
    }

    /// `ρ_A ⊗ ρ_B`; both factors must be qubit density matrices.
    pub fn product(rho_a: &Matrix2, rho_b: &Matrix2) -> Result<Self> {
        Self::from_matrix(kron(rho_a, rho_b))
    }

    pub fn rho(&self) -> &Matrix4 {
        &self.rho
    }

    pub fn into_matrix(self) -> Matrix4 {
        self.rho
    }

    /// `Re Tr[O ρ]`.
    pub fn expectation(&self, op: &Matrix4) -> f64 {
        (op * self.rho).trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// Correlation matrix `T[i][j] = Tr[(σ_i ⊗ σ_j) ρ]`.
    pub fn correlation_matrix(&self) -> [[f64; 3]; 3] {
        let p = paulis();
        let mut t = [[0.0; 3]; 3];
        for (i, pi) in p.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                t[i][j] = self.expectation(&kron(pi, pj));
            }
        }
        t
    }

    /// Alice's and Bob's reduced Bloch vectors.
    pub fn local_bloch(&self) -> ([f64; 3], [f64; 3]) {
        (
            bloch_of(&partial_trace_bob(&self.rho)),
            bloch_of(&partial_trace_alice(&self.rho)),
        )
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn apply_local_unitaries(&self, u: &Matrix2, v: &Matrix2) -> Self {
        let w = kron(u, v);
        Self { rho: w * self.rho * w.adjoint() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_abs_diff<const N: usize>(
        a: &nalgebra::SMatrix<Complex64, N, N>,
        b: &nalgebra::SMatrix<Complex64, N, N>,
    ) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn random_qubit(bloch: [f64; 3]) -> Matrix2 {
        let n = (bloch[0].powi(2) + bloch[1].powi(2) + bloch[2].powi(2)).sqrt().max(1.0);
        let v = [bloch[0] / n, bloch[1] / n, bloch[2] / n];
        (identity2() + pauli_dot_components(v)) * c(0.5)
    }

    #[test]
    fn pauli_dot_examples() {
        assert_eq!(pauli_dot(&BlochVector3::Z), sigma_z());
        assert_eq!(pauli_dot(&BlochVector3::ZERO), Matrix2::zeros());
        let v = BlochVector3::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2).unwrap();
        let expected = Matrix2::new(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2));
        assert!(max_abs_diff(&pauli_dot(&v), &expected) < 1e-15);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&identity2(), &identity2()), Matrix4::identity());
        let zz = kron(&sigma_z(), &sigma_z());
        assert_eq!(zz, Matrix4::from_diagonal(&nalgebra::Vector4::new(c(1.0), c(-1.0), c(-1.0), c(1.0))));

        // (A⊗B)[2i+j][2k+l] = A[i][k] B[j][l]
        let a = sigma_x();
        let b = sigma_z();
        let xz = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(xz[(2 * i + j, 2 * k + l)], a[(i, k)] * b[(j, l)]);
                    }
                }
            }
        }
        assert_eq!(xz[(0, 0)], c(0.0));
        assert_eq!(xz[(0, 2)], c(1.0));
        assert_eq!(xz[(1, 3)], c(-1.0));
    }

    #[test]
    fn pure_schmidt_examples() {
        let s = TwoQubitState::pure_schmidt(PureSchmidtParams::new(1.0).unwrap());
        let mut e = Matrix4::zeros();
        e[(0, 0)] = c(1.0);
        assert_eq!(s.rho(), &e);

        let s = TwoQubitState::pure_schmidt(PureSchmidtParams::new(FRAC_1_SQRT_2).unwrap());
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((s.rho()[(i, j)].re - 0.5).abs() < 1e-15);
        }

        let s = TwoQubitState::pure_schmidt(PureSchmidtParams::new(0.6).unwrap());
        let r = s.rho();
        assert!((r[(0, 0)].re - 0.36).abs() < 1e-12);
        assert!((r[(3, 3)].re - 0.64).abs() < 1e-12);
        assert!((r[(0, 3)].re - 0.48).abs() < 1e-12);
        assert!((r[(3, 0)].re - 0.48).abs() < 1e-12);
        assert!((s.purity() - 1.0).abs() < 1e-12);
        let ev = hermitian_eigenvalues(r);
        assert!(ev[..3].iter().all(|e| e.abs() < 1e-12), "rank one: {ev:?}");

        assert!(PureSchmidtParams::new(1.2).is_err());
        assert!(PureSchmidtParams::new(-0.1).is_err());
        assert!(PureSchmidtParams::new(f64::NAN).is_err());
    }

    #[test]
    fn werner_examples() {
        let s = TwoQubitState::werner(WernerParams::new(0.0).unwrap());
        assert!(max_abs_diff(s.rho(), &(Matrix4::identity() * c(0.25))) < 1e-15);
        let s = TwoQubitState::werner(WernerParams::new(1.0).unwrap());
        assert!(max_abs_diff(s.rho(), TwoQubitState::singlet().rho()) < 1e-15);

        let s = TwoQubitState::werner(WernerParams::new(0.5).unwrap());
        // Tr[(σz⊗σz) ρ] by explicit diagonal sum: ρ diag = (1/8, 3/8, 3/8, 1/8)
        let d: Vec<f64> = (0..4).map(|i| s.rho()[(i, i)].re).collect();
        let by_hand = d[0] - d[1] - d[2] + d[3];
        assert!((by_hand + 0.5).abs() < 1e-15);
        assert!((s.expectation(&kron(&sigma_z(), &sigma_z())) + 0.5).abs() < 1e-12);

        assert!(WernerParams::new(1.01).is_err());
    }

    #[test]
    fn constructed_states_are_valid() {
        let mut states = vec![TwoQubitState::singlet(), TwoQubitState::phi_plus()];
        for k in 0..=20 {
            let x = k as f64 / 20.0;
            states.push(TwoQubitState::pure_schmidt(PureSchmidtParams::new(x).unwrap()));
            states.push(TwoQubitState::werner(WernerParams::new(x).unwrap()));
        }
        for s in states {
            TwoQubitState::from_matrix(*s.rho()).expect("constructor output must validate");
        }
    }

    #[test]
    fn from_matrix_rejects_invalid() {
        let mut m = Matrix4::identity() * c(0.25);
        m[(0, 1)] = c(0.1);
        assert!(matches!(TwoQubitState::from_matrix(m), Err(Error::InvalidState(_))));

        let m = Matrix4::identity() * c(0.3);
        assert!(TwoQubitState::from_matrix(m).is_err());

        let m = Matrix4::from_diagonal(&nalgebra::Vector4::new(c(1.2), c(-0.2), c(0.0), c(0.0)));
        assert!(TwoQubitState::from_matrix(m).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let ra = random_qubit([0.3, -0.2, 0.5]);
        let rb = random_qubit([-0.1, 0.7, 0.2]);
        let out = partial_trace_alice(&kron(&ra, &rb));
        assert!(max_abs_diff(&out, &rb) < 1e-12);

        let out = partial_trace_alice(TwoQubitState::phi_plus().rho());
        assert!(max_abs_diff(&out, &(identity2() * c(0.5))) < 1e-12);

        let effect = (identity2() + sigma_z()) * c(0.5);
        let m = kron(&effect, &identity2()) * TwoQubitState::singlet().rho();
        let out = partial_trace_alice(&m);
        // ⟨0|_A ψ⁻ = −|1⟩/√2 on Bob; 4×4 trace oracle gives the (1,1) entry 1/2
        let mut oracle = Matrix2::zeros();
        for j in 0..2 {
            for l in 0..2 {
                for i in 0..2 {
                    oracle[(j, l)] += m[(2 * i + j, 2 * i + l)];
                }
            }
        }
        assert!(max_abs_diff(&out, &oracle) < 1e-15);
        assert!(max_abs_diff(&out, &Matrix2::new(c(0.0), c(0.0), c(0.0), c(0.5))) < 1e-12);
    }

    #[test]
    fn correlation_matrix_of_known_states() {
        let t = TwoQubitState::phi_plus().correlation_matrix();
        let expected = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((t[i][j] - expected[i][j]).abs() < 1e-12);
            }
        }
        let t = TwoQubitState::singlet().correlation_matrix();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { -1.0 } else { 0.0 };
                assert!((t[i][j] - e).abs() < 1e-12);
            }
        }
    }

    fn vec3() -> impl Strategy<Value = [f64; 3]> {
        prop::array::uniform3(-1.0f64..1.0)
    }

    proptest! {
        #[test]
        fn pauli_dot_is_linear(u in vec3(), v in vec3(), alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
            let combo = [0, 1, 2].map(|k| alpha * u[k] + beta * v[k]);
            let lhs = pauli_dot_components(combo);
            let rhs = pauli_dot_components(u) * c(alpha) + pauli_dot_components(v) * c(beta);
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
            prop_assert!(hermiticity_defect(&lhs) < 1e-12);
            prop_assert!(lhs.trace().norm() < 1e-12);
        }

        #[test]
        fn unit_pauli_dot_squares_to_identity(theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..6.3) {
            let p = pauli_dot(&BlochVector3::from_angles(theta, phi));
            prop_assert!(max_abs_diff(&(p * p), &identity2()) < 1e-12);
        }

        #[test]
        fn kron_mixed_product(a in vec3(), b in vec3(), cc in vec3(), d in vec3()) {
            let (a, b, cc, d) = (
                pauli_dot_components(a) + identity2(),
                pauli_dot_components(b) * c(0.5),
                pauli_dot_components(cc),
                pauli_dot_components(d) - identity2(),
            );
            let lhs = kron(&a, &b) * kron(&cc, &d);
            let rhs = kron(&(a * cc), &(b * d));
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        }

        #[test]
        fn partial_trace_recovers_bob(a in vec3(), b in vec3()) {
            let ra = random_qubit(a);
            let rb = random_qubit(b);
            let prod = kron(&ra, &rb);
            prop_assert!(max_abs_diff(&partial_trace_alice(&prod), &rb) < 1e-12);
            prop_assert!(max_abs_diff(&partial_trace_bob(&prod), &ra) < 1e-12);
            prop_assert!((partial_trace_alice(&prod).trace() - prod.trace()).norm() < 1e-12);
        }
    }
}
