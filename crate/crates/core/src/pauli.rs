//! Pauli words over a register of `k <= 4` spins.
//!
//! Spin 1 is the leftmost letter and the most significant bit of a
//! computational-basis index, so `"XI"` is `σx ⊗ I`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Result, ZenoError, MAX_SPINS};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(ZenoError::InvalidPauliLetter(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// The 2×2 matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// Flips the computational basis bit (X and Y do).
    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Coefficient `c` in `P|bit> = c |bit'>`.
    fn coefficient(self, bit: usize) -> Complex64 {
        match (self, bit) {
            (Pauli::I | Pauli::X, _) => ONE,
            (Pauli::Y, 0) => I,
            (Pauli::Y, _) => -I,
            (Pauli::Z, 0) => ONE,
            (Pauli::Z, _) => -ONE,
        }
    }

    /// `self · other = i^power · result`.
    fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// A tensor product of single-spin Pauli operators naming a joint observable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() || letters.len() > MAX_SPINS {
            return Err(ZenoError::SpinCountOutOfRange(letters.len()));
        }
        Ok(Self { letters })
    }

    pub fn parse(word: &str) -> Result<Self> {
        let letters = word
            .trim()
            .chars()
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    /// `σx ⊗ … ⊗ σx` on `k` spins.
    pub fn all_x(k: usize) -> Result<Self> {
        Self::new(vec![Pauli::X; k])
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; k])
    }

    pub fn num_spins(&self) -> usize {
        self.letters.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// True when every letter is `I` or `Z`. Such words are diagonal and
    /// therefore insensitive to dephasing.
    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|&p| matches!(p, Pauli::I | Pauli::Z))
    }

    /// Number of X or Y letters, i.e. spins whose coherence the word reads.
    pub fn weight_xy(&self) -> usize {
        self.letters.iter().filter(|p| p.flips()).count()
    }

    /// Indices (0-based) of the spins carrying an X or Y letter.
    pub fn dephasing_spins(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .map(|(i, _)| i)
            .collect()
    }

    /// Bit mask of basis bits flipped by the word.
    pub fn flip_mask(&self) -> usize {
        let k = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (i, _)| m | (1 << (k - 1 - i)))
    }

    /// Coefficient `c_b` with `O|b> = c_b |b ^ flip_mask>`.
    pub fn basis_coefficient(&self, basis: usize) -> Complex64 {
        let k = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .fold(ONE, |acc, (i, p)| acc * p.coefficient((basis >> (k - 1 - i)) & 1))
    }

    /// All basis coefficients `c_b` for `b in 0..dim`.
    pub fn basis_coefficients(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|b| self.basis_coefficient(b)).collect()
    }

    /// Dense `2^k × 2^k` matrix, built as a Kronecker product in word order.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let mut acc = DMatrix::from_element(1, 1, ONE);
        for p in &self.letters {
            let m = p.matrix();
            let single = DMatrix::from_fn(2, 2, |r, c| m[r][c]);
            acc = acc.kronecker(&single);
        }
        acc
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    /// `self · other = i^power · word`, with `power` in `0..4`.
    pub fn product(&self, other: &PauliString) -> Result<(u8, PauliString)> {
        if self.num_spins() != other.num_spins() {
            return Err(ZenoError::DimensionMismatch {
                expected: self.num_spins(),
                actual: other.num_spins(),
            });
        }
        let mut power = 0u8;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(a, b)| {
                let (p, r) = a.product(*b);
                power = (power + p) % 4;
                r
            })
            .collect();
        Ok((power, PauliString { letters }))
    }
}

impl FromStr for PauliString {
    type Err = ZenoError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl TryFrom<String> for PauliString {
    type Error = ZenoError;

    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// A Pauli word with a real sign, e.g. `-YZ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SignedPauli {
    pub negative: bool,
    pub word: PauliString,
}

impl SignedPauli {
    pub fn plus(word: PauliString) -> Self {
        Self { negative: false, word }
    }

    pub fn minus(word: PauliString) -> Self {
        Self { negative: true, word }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.strip_prefix('-') {
            Some(rest) => Ok(Self::minus(PauliString::parse(rest)?)),
            None => Ok(Self::plus(PauliString::parse(s.strip_prefix('+').unwrap_or(s))?)),
        }
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            negative: !self.negative,
            word: self.word.clone(),
        }
    }

    /// Product of two commuting signed words; `None` if they anticommute
    /// (the product would not be Hermitian).
    pub fn product(&self, other: &SignedPauli) -> Result<Option<SignedPauli>> {
        let (power, word) = self.word.product(&other.word)?;
        let negative = match power {
            0 => self.negative ^ other.negative,
            2 => !(self.negative ^ other.negative),
            _ => return Ok(None),
        };
        Ok(Some(SignedPauli { negative, word }))
    }
}

impl TryFrom<String> for SignedPauli {
    type Error = ZenoError;

    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<SignedPauli> for String {
    fn from(p: SignedPauli) -> String {
        p.to_string()
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        write!(f, "{}", self.word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn single_x_matrix() {
        let m = PauliString::parse("X").unwrap().matrix();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));
    }

    #[test]
    fn xi_has_expected_support() {
        let m = PauliString::parse("XI").unwrap().matrix();
        for r in 0..4 {
            for col in 0..4 {
                let expected = matches!((r, col), (0, 2) | (2, 0) | (1, 3) | (3, 1));
                assert_eq!(m[(r, col)], c(if expected { 1.0 } else { 0.0 }), "({r},{col})");
            }
        }
    }

    #[test]
    fn xxx_squares_to_identity_and_is_traceless() {
        let m = PauliString::parse("XXX").unwrap().matrix();
        let sq = &m * &m;
        assert!(max_abs_diff(&sq, &DMatrix::identity(8, 8)) < 1e-12);
        assert!(m.trace().norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_words() {
        assert_eq!(PauliString::parse("XQ"), Err(ZenoError::InvalidPauliLetter('Q')));
        assert_eq!(PauliString::parse(""), Err(ZenoError::SpinCountOutOfRange(0)));
        assert_eq!(PauliString::parse("XXXXX"), Err(ZenoError::SpinCountOutOfRange(5)));
    }

    #[test]
    fn commutation_and_products() {
        let xx = PauliString::parse("XX").unwrap();
        let zz = PauliString::parse("ZZ").unwrap();
        let xi = PauliString::parse("XI").unwrap();
        assert!(xx.commutes_with(&zz));
        assert!(!xi.commutes_with(&zz));
        // ZZ·XI = (ZX)⊗Z = iY⊗Z
        assert_eq!(zz.product(&xi).unwrap(), (1, PauliString::parse("YZ").unwrap()));
        let xc = SignedPauli::plus(xx.clone());
        let zc = SignedPauli::plus(zz.clone());
        // XX·ZZ = (XZ)(XZ) = (-iY)(-iY) = -YY
        assert_eq!(xc.product(&zc).unwrap(), Some(SignedPauli::parse("-YY").unwrap()));
    }

    #[test]
    fn signed_roundtrip_display() {
        let p = SignedPauli::parse("-YZ").unwrap();
        assert_eq!(p.to_string(), "-YZ");
        assert_eq!(SignedPauli::parse("+XI").unwrap().to_string(), "XI");
    }

    fn word_strategy() -> impl Strategy<Value = PauliString> {
        prop::collection::vec(prop::sample::select(vec![Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]), 1..=4)
            .prop_map(|v| PauliString::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn every_word_is_hermitian_unitary_involution(w in word_strategy()) {
            let m = w.matrix();
            let d = w.dim();
            prop_assert!(max_abs_diff(&(&m * &m), &DMatrix::identity(d, d)) < 1e-12);
            prop_assert!(max_abs_diff(&m, &m.adjoint()) < 1e-12);
        }

        #[test]
        fn basis_coefficients_match_dense_matrix(w in word_strategy()) {
            let m = w.matrix();
            let mask = w.flip_mask();
            for b in 0..w.dim() {
                let expected = m[(b ^ mask, b)];
                prop_assert!((w.basis_coefficient(b) - expected).norm() < 1e-15);
            }
        }

        #[test]
        fn products_match_matrix_products(a in word_strategy(), b in word_strategy()) {
            prop_assume!(a.num_spins() == b.num_spins());
            let (power, word) = a.product(&b).unwrap();
            let phase = I.powu(power as u32);
            let lhs = a.matrix() * b.matrix();
            let rhs = word.matrix() * phase;
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
            prop_assert_eq!(a.commutes_with(&b), power % 2 == 0);
        }
    }
}
