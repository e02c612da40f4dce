//! Logical qubits inside the `<σx^{⊗k}> = +1` subspace.
//!
//! Two spins host one logical qubit with `Z_L = XI`, `X_L = ZZ`, basis
//! `|0>_L = |X,X>`, `|1>_L = |-X,-X>`. Three spins host two logical qubits with
//! `Z_L1 = XIX`, `X_L1 = IZZ`, `Z_L2 = IXX`, `X_L2 = ZIZ` and basis
//!
//! ```text
//! |00>_L = |X,X,X>    |01>_L = |-X,X,-X>    |10>_L = |X,-X,-X>    |11>_L = |-X,-X,X>
//! ```
//!
//! Every logical operator commutes with the projected observable, so the
//! projection channel leaves all logical expectations untouched.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pauli::{PauliString, SignedPauli};
use crate::state::{
    signed_expectation, DensityMatrix, SpinLabel, StateVector,
};
use crate::{analytic, Result, ZenoError};

/// Classical-memory bound for the average fidelity of stored qubit states.
pub const CLASSICAL_MEMORY_THRESHOLD: f64 = 2.0 / 3.0;
/// Fidelity above which a two-spin Bell-type target certifies entanglement.
pub const ENTANGLEMENT_THRESHOLD: f64 = 0.5;

fn sp(s: &str) -> SignedPauli {
    SignedPauli::parse(s).expect("static Pauli word")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalSpec {
    pub num_spins: usize,
    pub observable: PauliString,
    /// `(Z_L, X_L)` per logical qubit.
    pub logical_ops: Vec<(SignedPauli, SignedPauli)>,
    /// Anticommutes with `observable`, commutes with every logical operator:
    /// maps the `+1` code space onto the `-1` subspace label by label.
    pub flip: PauliString,
}

impl LogicalSpec {
    pub fn two_spin() -> Self {
        Self {
            num_spins: 2,
            observable: PauliString::parse("XX").unwrap(),
            logical_ops: vec![(sp("XI"), sp("ZZ"))],
            flip: PauliString::parse("IZ").unwrap(),
        }
    }

    pub fn three_spin() -> Self {
        Self {
            num_spins: 3,
            observable: PauliString::parse("XXX").unwrap(),
            logical_ops: vec![(sp("XIX"), sp("IZZ")), (sp("IXX"), sp("ZIZ"))],
            flip: PauliString::parse("ZZZ").unwrap(),
        }
    }

    pub fn for_spins(k: usize) -> Result<Self> {
        match k {
            2 => Ok(Self::two_spin()),
            3 => Ok(Self::three_spin()),
            other => Err(ZenoError::SpinCountOutOfRange(other)),
        }
    }

    pub fn num_logical(&self) -> usize {
        self.logical_ops.len()
    }

    /// `Y_L = i X_L Z_L` for logical qubit `q`.
    pub fn logical_y(&self, q: usize) -> SignedPauli {
        let (z, x) = &self.logical_ops[q];
        let (power, word) = x.word.product(&z.word).expect("same register");
        // i · i^power · (±1)(±1)
        let negative = match (power + 1) % 4 {
            0 => false,
            2 => true,
            _ => unreachable!("logical X and Z anticommute"),
        };
        SignedPauli {
            negative: negative ^ x.negative ^ z.negative,
            word,
        }
    }

    /// Logical basis state `|b_1 … b_n>_L` as a register vector.
    pub fn basis_state(&self, bits: &[bool]) -> StateVector {
        let labels: Vec<SpinLabel> = match (self.num_spins, bits) {
            (2, [b]) => {
                let l = if *b { SpinLabel::MinusX } else { SpinLabel::PlusX };
                vec![l, l]
            }
            (3, [b1, b2]) => {
                let x = |neg: bool| if neg { SpinLabel::MinusX } else { SpinLabel::PlusX };
                // spin 1 carries b2, spin 2 carries b1, spin 3 their parity
                vec![x(*b2), x(*b1), x(b1 ^ b2)]
            }
            _ => panic!("basis_state: {} bits for {} spins", bits.len(), self.num_spins),
        };
        StateVector::product(&labels).expect("valid labels")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LogicalLabel {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
    ZeroZero,
    XZero,
    PhiPlus,
}

impl LogicalLabel {
    pub const CARDINAL_2SPIN: [LogicalLabel; 6] = [
        LogicalLabel::Zero,
        LogicalLabel::One,
        LogicalLabel::Plus,
        LogicalLabel::Minus,
        LogicalLabel::PlusI,
        LogicalLabel::MinusI,
    ];

    /// Superposition labels, i.e. entangled two-spin states.
    pub const ENTANGLED_2SPIN: [LogicalLabel; 4] = [
        LogicalLabel::Plus,
        LogicalLabel::Minus,
        LogicalLabel::PlusI,
        LogicalLabel::MinusI,
    ];

    pub const STATES_3SPIN: [LogicalLabel; 3] =
        [LogicalLabel::ZeroZero, LogicalLabel::XZero, LogicalLabel::PhiPlus];

    pub fn num_spins(self) -> usize {
        match self {
            LogicalLabel::ZeroZero | LogicalLabel::XZero | LogicalLabel::PhiPlus => 3,
            _ => 2,
        }
    }

    pub fn spec(self) -> LogicalSpec {
        LogicalSpec::for_spins(self.num_spins()).expect("2 or 3 spins")
    }

    /// Signed logical Paulis generating the target's stabilizer group.
    pub fn stabilizers(self) -> Vec<SignedPauli> {
        let spec = self.spec();
        match self {
            LogicalLabel::Zero => vec![spec.logical_ops[0].0.clone()],
            LogicalLabel::One => vec![spec.logical_ops[0].0.negated()],
            LogicalLabel::Plus => vec![spec.logical_ops[0].1.clone()],
            LogicalLabel::Minus => vec![spec.logical_ops[0].1.negated()],
            LogicalLabel::PlusI => vec![spec.logical_y(0)],
            LogicalLabel::MinusI => vec![spec.logical_y(0).negated()],
            LogicalLabel::ZeroZero => vec![spec.logical_ops[0].0.clone(), spec.logical_ops[1].0.clone()],
            LogicalLabel::XZero => vec![spec.logical_ops[0].1.clone(), spec.logical_ops[1].0.clone()],
            LogicalLabel::PhiPlus => {
                let (z1, x1) = &spec.logical_ops[0];
                let (z2, x2) = &spec.logical_ops[1];
                vec![
                    z1.product(z2).unwrap().expect("commuting"),
                    x1.product(x2).unwrap().expect("commuting"),
                ]
            }
        }
    }

    /// All `2^n` elements of the stabilizer group, identity first.
    pub fn stabilizer_group(self) -> Vec<SignedPauli> {
        let gens = self.stabilizers();
        let k = self.num_spins();
        let mut group = vec![SignedPauli::plus(PauliString::identity(k).unwrap())];
        for g in gens {
            let extended: Vec<SignedPauli> = group
                .iter()
                .map(|h| h.product(&g).unwrap().expect("stabilizers commute"))
                .collect();
            group.extend(extended);
        }
        group
    }

    pub fn target(self) -> StateVector {
        let spec = self.spec();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let combine = |terms: &[(Complex64, &StateVector)]| {
            let mut v = DVector::zeros(1 << spec.num_spins);
            for (c, s) in terms {
                v += s.amplitudes() * *c;
            }
            StateVector::normalized(v).expect("nonzero superposition")
        };
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            LogicalLabel::ZeroZero => spec.basis_state(&[false, false]),
            LogicalLabel::XZero => {
                let a = spec.basis_state(&[false, false]);
                let c = spec.basis_state(&[true, false]);
                combine(&[(r(h), &a), (r(h), &c)])
            }
            LogicalLabel::PhiPlus => {
                let a = spec.basis_state(&[false, false]);
                let d = spec.basis_state(&[true, true]);
                combine(&[(r(h), &a), (r(h), &d)])
            }
            two_spin => {
                let zero = spec.basis_state(&[false]);
                let one = spec.basis_state(&[true]);
                let coeff = match two_spin {
                    LogicalLabel::Zero => return zero,
                    LogicalLabel::One => return one,
                    LogicalLabel::Plus => r(h),
                    LogicalLabel::Minus => r(-h),
                    LogicalLabel::PlusI => Complex64::new(0.0, h),
                    LogicalLabel::MinusI => Complex64::new(0.0, -h),
                    _ => unreachable!(),
                };
                combine(&[(r(h), &zero), (coeff, &one)])
            }
        }
    }
}

impl FromStr for LogicalLabel {
    type Err = ZenoError;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().replace('\u{2212}', "-");
        match normalized.as_str() {
            "0L" => Ok(LogicalLabel::Zero),
            "1L" => Ok(LogicalLabel::One),
            "+L" => Ok(LogicalLabel::Plus),
            "-L" => Ok(LogicalLabel::Minus),
            "+iL" => Ok(LogicalLabel::PlusI),
            "-iL" => Ok(LogicalLabel::MinusI),
            "00L" => Ok(LogicalLabel::ZeroZero),
            "X0L" => Ok(LogicalLabel::XZero),
            "PhiPlusL" => Ok(LogicalLabel::PhiPlus),
            _ => Err(ZenoError::UnknownLabel(s.to_string())),
        }
    }
}

impl TryFrom<String> for LogicalLabel {
    type Error = ZenoError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LogicalLabel> for String {
    fn from(l: LogicalLabel) -> String {
        l.to_string()
    }
}

impl fmt::Display for LogicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogicalLabel::Zero => "0L",
            LogicalLabel::One => "1L",
            LogicalLabel::Plus => "+L",
            LogicalLabel::Minus => "-L",
            LogicalLabel::PlusI => "+iL",
            LogicalLabel::MinusI => "-iL",
            LogicalLabel::ZeroZero => "00L",
            LogicalLabel::XZero => "X0L",
            LogicalLabel::PhiPlus => "PhiPlusL",
        })
    }
}

pub fn logical_state_2spin(label: LogicalLabel) -> Result<DensityMatrix> {
    if label.num_spins() != 2 {
        return Err(ZenoError::UnknownLabel(format!("{label} is not a two-spin logical state")));
    }
    Ok(label.target().to_density())
}

pub fn logical_state_3spin(label: LogicalLabel) -> Result<DensityMatrix> {
    if label.num_spins() != 3 {
        return Err(ZenoError::UnknownLabel(format!("{label} is not a three-spin logical state")));
    }
    Ok(label.target().to_density())
}

/// Fidelity of the logical information in `rho` with the labeled target:
/// the mean of the target's logical stabilizer expectations. States outside
/// the code space still carry logical information through the logical
/// operators; for code-space states this equals the full-state fidelity.
pub fn logical_fidelity(rho: &DensityMatrix, label: LogicalLabel) -> Result<f64> {
    rho.check_dim(1 << label.num_spins())?;
    let group = label.stabilizer_group();
    let total = group
        .iter()
        .map(|g| signed_expectation(rho, g))
        .sum::<Result<f64>>()?;
    Ok(total / group.len() as f64)
}

/// Expectation of each stabilizer generator of `label`, e.g. `<Z_L>` for `0L`.
pub fn logical_components(rho: &DensityMatrix, label: LogicalLabel) -> Result<Vec<(SignedPauli, f64)>> {
    label
        .stabilizers()
        .into_iter()
        .map(|g| signed_expectation(rho, &g).map(|v| (g, v)))
        .collect()
}

/// Effective dephasing time of each stabilizer generator of `label` for
/// per-spin `t2`; `None` marks generators insensitive to dephasing.
pub fn component_t2(label: LogicalLabel, t2: &[f64]) -> Result<Vec<(SignedPauli, Option<f64>)>> {
    label
        .stabilizers()
        .into_iter()
        .map(|g| analytic::effective_t2_for(t2, &g.word).map(|t| (g, t)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdFlags {
    pub beats_classical_memory: bool,
    /// Meaningful only for two-spin Bell-type targets.
    pub witnesses_entanglement: bool,
}

pub fn thresholds(fidelity: f64) -> Result<ThresholdFlags> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(ZenoError::FidelityOutOfRange(fidelity));
    }
    Ok(ThresholdFlags {
        beats_classical_memory: fidelity > CLASSICAL_MEMORY_THRESHOLD,
        witnesses_entanglement: fidelity > ENTANGLEMENT_THRESHOLD,
    })
}
