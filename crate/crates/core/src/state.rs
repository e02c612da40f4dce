//! Register states, dephasing evolution and read-out.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pauli::{PauliString, SignedPauli};
use crate::{Result, ZenoError, MAX_SPINS};

/// Tolerance for algebraic identities (Hermiticity, trace).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for positivity, which accumulates more round-off.
pub const POSITIVITY_TOL: f64 = 1e-10;

fn check_spins(k: usize) -> Result<()> {
    if k == 0 || k > MAX_SPINS {
        Err(ZenoError::SpinCountOutOfRange(k))
    } else {
        Ok(())
    }
}

fn spins_for_dim(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(ZenoError::DimensionMismatch {
            expected: dim.next_power_of_two(),
            actual: dim,
        });
    }
    let k = dim.trailing_zeros() as usize;
    check_spins(k)?;
    Ok(k)
}

/// Single-spin preparation labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SpinLabel {
    Zero,
    One,
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl SpinLabel {
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            SpinLabel::Zero => [r(1.0), r(0.0)],
            SpinLabel::One => [r(0.0), r(1.0)],
            SpinLabel::PlusX => [r(h), r(h)],
            SpinLabel::MinusX => [r(h), r(-h)],
            SpinLabel::PlusY => [r(h), Complex64::new(0.0, h)],
            SpinLabel::MinusY => [r(h), Complex64::new(0.0, -h)],
        }
    }
}

impl FromStr for SpinLabel {
    type Err = ZenoError;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().replace('\u{2212}', "-");
        match normalized.as_str() {
            "0" => Ok(SpinLabel::Zero),
            "1" => Ok(SpinLabel::One),
            "X" | "+X" => Ok(SpinLabel::PlusX),
            "-X" => Ok(SpinLabel::MinusX),
            "Y" | "+Y" => Ok(SpinLabel::PlusY),
            "-Y" => Ok(SpinLabel::MinusY),
            _ => Err(ZenoError::UnknownLabel(s.to_string())),
        }
    }
}

impl TryFrom<String> for SpinLabel {
    type Error = ZenoError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SpinLabel> for String {
    fn from(l: SpinLabel) -> String {
        l.to_string()
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpinLabel::Zero => "0",
            SpinLabel::One => "1",
            SpinLabel::PlusX => "X",
            SpinLabel::MinusX => "-X",
            SpinLabel::PlusY => "Y",
            SpinLabel::MinusY => "-Y",
        };
        f.write_str(s)
    }
}

/// Per-spin detunings in rad/ms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningVector(pub Vec<f64>);

impl DetuningVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_spins(values.len())?;
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(ZenoError::InvalidParameter(format!("non-finite detuning {bad}")));
        }
        Ok(Self(values))
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Diagonal of `exp(-iHt)` for `H = Σ (Δ_i/2) σz_i`: spin coherences pick
    /// up `exp(-i Δ_i t)`.
    pub(crate) fn propagator_diagonal(&self, t: f64) -> Vec<Complex64> {
        let k = self.0.len();
        (0..1usize << k)
            .map(|b| {
                let phi: f64 = self
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, d)| {
                        let s = if (b >> (k - 1 - i)) & 1 == 0 { 1.0 } else { -1.0 };
                        0.5 * d * t * s
                    })
                    .sum();
                Complex64::from_polar(1.0, -phi)
            })
            .collect()
    }
}

/// A normalized pure state of the register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        spins_for_dim(amps.len())?;
        let norm_sq = amps.norm_squared();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(ZenoError::Unnormalized(norm_sq));
        }
        Ok(Self { amps })
    }

    /// Normalizes `amps` first; fails only on the zero vector.
    pub fn normalized(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(ZenoError::Unnormalized(0.0));
        }
        Self::new(amps / Complex64::new(norm, 0.0))
    }

    /// Haar-random pure state from a normalized complex Gaussian vector.
    pub fn haar_random<R: rand::Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Self> {
        use rand_distr::StandardNormal;
        check_spins(k)?;
        let amps = DVector::from_fn(1 << k, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        Self::normalized(amps)
    }

    pub fn product(labels: &[SpinLabel]) -> Result<Self> {
        check_spins(labels.len())?;
        let mut amps = DVector::from_element(1, Complex64::new(1.0, 0.0));
        for l in labels {
            amps = amps.kronecker(&DVector::from_row_slice(&l.amplitudes()));
        }
        Ok(Self { amps })
    }

    pub fn num_spins(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// `P|ψ>` for a Pauli word `P`.
    pub fn apply_pauli(&self, word: &PauliString) -> Result<Self> {
        if word.dim() != self.dim() {
            return Err(ZenoError::DimensionMismatch {
                expected: self.dim(),
                actual: word.dim(),
            });
        }
        let mask = word.flip_mask();
        let mut out = DVector::zeros(self.dim());
        for b in 0..self.dim() {
            out[b ^ mask] = word.basis_coefficient(b) * self.amps[b];
        }
        Ok(Self { amps: out })
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            m: &self.amps * self.amps.adjoint(),
        }
    }
}

/// Density matrix of a `k`-spin register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wraps `m` after checking the density-matrix invariants.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(ZenoError::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        spins_for_dim(m.nrows())?;
        let rho = Self { m };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        Self { m }
    }

    pub fn maximally_mixed(k: usize) -> Result<Self> {
        check_spins(k)?;
        let d = 1 << k;
        Ok(Self {
            m: DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0),
        })
    }

    pub fn num_spins(&self) -> usize {
        self.m.nrows().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.m - self.m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > ALGEBRAIC_TOL {
            return Err(ZenoError::InvalidParameter(format!(
                "density matrix not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(ZenoError::InvalidParameter(format!("density matrix trace {tr}")));
        }
        let min = self.eigenvalues()[0];
        if min < -POSITIVITY_TOL {
            return Err(ZenoError::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            Err(ZenoError::DimensionMismatch {
                expected: self.dim(),
                actual: dim,
            })
        } else {
            Ok(())
        }
    }

    /// In-place `U ρ U†` for a diagonal `U`.
    pub(crate) fn conjugate_diagonal_in_place(&mut self, diag: &[Complex64]) {
        let d = self.dim();
        for c in 0..d {
            let right = diag[c].conj();
            for r in 0..d {
                self.m[(r, c)] *= diag[r] * right;
            }
        }
    }

    /// `P ρ P` for a Pauli word, computed as a signed permutation.
    pub(crate) fn pauli_conjugate(&self, coeffs: &[Complex64], mask: usize) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for c in 0..d {
            let right = coeffs[c].conj();
            for r in 0..d {
                out[(r ^ mask, c ^ mask)] = coeffs[r] * self.m[(r, c)] * right;
            }
        }
        out
    }

    /// `Re Tr(ρ P)` from the basis coefficients of `P`.
    pub(crate) fn pauli_expectation(&self, coeffs: &[Complex64], mask: usize) -> f64 {
        (0..self.dim())
            .map(|a| (self.m[(a, a ^ mask)] * coeffs[a]).re)
            .sum()
    }
}

/// Pure product state from one label per spin.
pub fn product_state(labels: &[SpinLabel]) -> Result<DensityMatrix> {
    Ok(StateVector::product(labels)?.to_density())
}

/// Free evolution for time `t` (ms) under static detunings.
pub fn evolve_dephasing(rho: &DensityMatrix, detunings: &DetuningVector, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(ZenoError::NegativeTime(t));
    }
    rho.check_dim(1 << detunings.len())?;
    let mut out = rho.clone();
    out.conjugate_diagonal_in_place(&detunings.propagator_diagonal(t));
    Ok(out)
}

/// `Tr(ρ O)`; the imaginary residue is discarded.
pub fn expectation(rho: &DensityMatrix, word: &PauliString) -> Result<f64> {
    rho.check_dim(word.dim())?;
    Ok(rho.pauli_expectation(&word.basis_coefficients(), word.flip_mask()))
}

pub fn signed_expectation(rho: &DensityMatrix, op: &SignedPauli) -> Result<f64> {
    Ok(op.sign() * expectation(rho, &op.word)?)
}

/// `<ψ|ρ|ψ>`.
pub fn state_fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    rho.check_dim(target.dim())?;
    let psi = target.amplitudes();
    Ok((psi.adjoint() * rho.matrix() * psi)[(0, 0)].re)
}
