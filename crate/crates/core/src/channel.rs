//! Non-selective projection of a joint observable.
//!
//! `M(O) ρ = P₊ ρ P₊ + P₋ ρ P₋ = (ρ + O ρ O) / 2` with `P± = (I ± O) / 2`.
//! [`project`] evaluates the right-hand form directly; [`ancilla_project`]
//! realizes the same channel by entangling an ancilla with the parity of `O`,
//! measuring it without recording the outcome, resetting it and tracing it out.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::PauliString;
use crate::state::DensityMatrix;
use crate::{Result, ZenoError};

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    pub plus: DMatrix<Complex64>,
    pub minus: DMatrix<Complex64>,
}

impl ProjectorPair {
    pub fn dim(&self) -> usize {
        self.plus.nrows()
    }
}

pub fn projectors(observable: &PauliString) -> Result<ProjectorPair> {
    if observable.is_identity() {
        return Err(ZenoError::IdentityObservable);
    }
    let d = observable.dim();
    let id = DMatrix::<Complex64>::identity(d, d);
    let o = observable.matrix();
    let half = Complex64::new(0.5, 0.0);
    Ok(ProjectorPair {
        plus: (&id + &o) * half,
        minus: (&id - &o) * half,
    })
}

pub fn project(observable: &PauliString, rho: &DensityMatrix) -> Result<DensityMatrix> {
    rho.check_dim(observable.dim())?;
    let coeffs = observable.basis_coefficients();
    Ok(project_with(rho, &coeffs, observable.flip_mask()))
}

/// Projection with precomputed basis coefficients, for hot loops.
pub(crate) fn project_with(rho: &DensityMatrix, coeffs: &[Complex64], mask: usize) -> DensityMatrix {
    let conj = rho.pauli_conjugate(coeffs, mask);
    let m = (rho.matrix() + conj) * Complex64::new(0.5, 0.0);
    DensityMatrix::from_matrix_unchecked(m)
}

/// Unitary on (register ⊗ ancilla) sending `P₊ψ ⊗ |0>` and `P₋ψ ⊗ |1>`:
/// Hadamard on the ancilla, `O` controlled on the ancilla, Hadamard again.
fn parity_entangler(observable: &PauliString) -> DMatrix<Complex64> {
    let d = observable.dim();
    let c = |x: f64| Complex64::new(x, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = DMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)]);
    let ket0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let ket1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
    let id = DMatrix::<Complex64>::identity(d, d);
    let h_anc = id.kronecker(&hadamard);
    let controlled = id.kronecker(&ket0) + observable.matrix().kronecker(&ket1);
    &h_anc * controlled * &h_anc
}

/// Register + ancilla state right after the entangling step.
fn entangled_state(rho: &DensityMatrix, observable: &PauliString) -> DMatrix<Complex64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let ancilla0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let joint = rho.matrix().kronecker(&ancilla0);
    let u = parity_entangler(observable);
    &u * joint * u.adjoint()
}

/// Probability that the ancilla ends in `|1>`, i.e. the weight of the
/// `<O> = -1` branch. Zero for states inside the `+1` subspace.
pub fn ancilla_excitation_probability(rho: &DensityMatrix, observable: &PauliString) -> Result<f64> {
    rho.check_dim(observable.dim())?;
    let joint = entangled_state(rho, observable);
    Ok((0..observable.dim()).map(|i| joint[(2 * i + 1, 2 * i + 1)].re).sum())
}

pub fn ancilla_project(rho: &DensityMatrix, observable: &PauliString) -> Result<DensityMatrix> {
    rho.check_dim(observable.dim())?;
    let d = observable.dim();
    let joint = entangled_state(rho, observable);

    // Non-selective Z measurement of the ancilla: keep the two diagonal
    // ancilla blocks. Resetting to |0> maps both blocks onto |0><0|, and the
    // partial trace then adds them.
    let mut reduced = DMatrix::<Complex64>::zeros(d, d);
    for outcome in 0..2 {
        for r in 0..d {
            for c in 0..d {
                reduced[(r, c)] += joint[(2 * r + outcome, 2 * c + outcome)];
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(reduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{expectation, product_state, SpinLabel, StateVector};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn word(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    fn labels(s: &[&str]) -> Vec<SpinLabel> {
        s.iter().map(|l| l.parse().unwrap()).collect()
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn rank(p: &DMatrix<Complex64>) -> usize {
        p.trace().re.round() as usize
    }

    #[test]
    fn projector_invariants() {
        for (w, r) in [("X", 1), ("XX", 2), ("XXX", 4)] {
            let pair = projectors(&word(w)).unwrap();
            let d = pair.dim();
            assert!(max_diff(&(&pair.plus * &pair.plus), &pair.plus) < 1e-12);
            assert!(max_diff(&(&pair.minus * &pair.minus), &pair.minus) < 1e-12);
            assert!(max_diff(&(&pair.plus * &pair.minus), &DMatrix::zeros(d, d)) < 1e-12);
            assert!(max_diff(&(&pair.plus + &pair.minus), &DMatrix::identity(d, d)) < 1e-12);
            assert_eq!(rank(&pair.plus), r);
            assert_eq!(rank(&pair.minus), r);
        }
    }

    #[test]
    fn plus_projector_fixes_xxx_eigenstate() {
        let pair = projectors(&word("XXX")).unwrap();
        let psi = StateVector::product(&labels(&["X", "X", "X"])).unwrap();
        let image = &pair.plus * psi.amplitudes();
        assert!((image - psi.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn identity_observable_rejected() {
        assert_eq!(projectors(&word("II")), Err(ZenoError::IdentityObservable));
    }

    #[test]
    fn eigenstate_is_unchanged() {
        let rho = product_state(&labels(&["X"])).unwrap();
        let out = project(&word("X"), &rho).unwrap();
        assert!(max_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn orthogonal_axis_is_fully_mixed() {
        let rho = product_state(&labels(&["Y"])).unwrap();
        let out = project(&word("X"), &rho).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(max_diff(out.matrix(), mixed.matrix()) < 1e-15);
    }

    #[test]
    fn xx_projection_of_xy_product() {
        let rho = product_state(&labels(&["X", "Y"])).unwrap();
        let out = project(&word("XX"), &rho).unwrap();
        assert_abs_diff_eq!(expectation(&out, &word("XX")).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.purity(), 0.5, epsilon = 1e-12);
        // XX|X,Y> = i|X,-Y>, so the mixture partner flips only the second spin.
        let expected = (product_state(&labels(&["X", "Y"])).unwrap().into_matrix()
            + product_state(&labels(&["X", "-Y"])).unwrap().into_matrix())
            * Complex64::new(0.5, 0.0);
        assert!(max_diff(out.matrix(), &expected) < 1e-12);
    }

    #[test]
    fn dense_projector_form_matches_fast_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for w in ["X", "XX", "XZ", "XXX", "YZX", "XXXX"] {
            let o = word(w);
            let pair = projectors(&o).unwrap();
            let rho = StateVector::haar_random(o.num_spins(), &mut rng).unwrap().to_density();
            let dense = &pair.plus * rho.matrix() * &pair.plus + &pair.minus * rho.matrix() * &pair.minus;
            assert!(max_diff(&dense, project(&o, &rho).unwrap().matrix()) < 1e-12, "{w}");
        }
    }

    #[test]
    fn ancilla_null_measurement_for_subspace_state() {
        let rho = product_state(&labels(&["X", "X"])).unwrap();
        let out = ancilla_project(&rho, &word("XX")).unwrap();
        assert!(max_diff(out.matrix(), rho.matrix()) < 1e-12);
        assert_abs_diff_eq!(ancilla_excitation_probability(&rho, &word("XX")).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ancilla_mixes_orthogonal_axis() {
        let rho = product_state(&labels(&["Y"])).unwrap();
        let out = ancilla_project(&rho, &word("X")).unwrap();
        assert!(max_diff(out.matrix(), project(&word("X"), &rho).unwrap().matrix()) < 1e-12);
        assert_abs_diff_eq!(ancilla_excitation_probability(&rho, &word("X")).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = product_state(&labels(&["X"])).unwrap();
        assert!(matches!(project(&word("XX"), &rho), Err(ZenoError::DimensionMismatch { .. })));
        assert!(matches!(ancilla_project(&rho, &word("XX")), Err(ZenoError::DimensionMismatch { .. })));
    }
}
