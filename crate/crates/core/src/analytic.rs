//! Closed-form decay under `N` equidistant projections.
//!
//! For a joint x-type correlator of `k` spins with quasi-static Gaussian
//! detunings, the ensemble-averaged expectation after `N` projections spread
//! over a total time `τ` is
//!
//! ```text
//! offset + A / 2^(N+1) · Σ_{l=0}^{N+1} C(N+1, l) · exp(-(t_Nl / T2eff)²),
//! t_Nl = τ - 2lτ / (N+1),
//! ```
//!
//! with `1/T2eff² = Σ_i 1/T2*_i²` over the spins the correlator reads.

use serde::{Deserialize, Serialize};

use crate::pauli::PauliString;
use crate::state::DetuningVector;
use crate::{Result, ZenoError};

/// Largest projection count whose binomial row fits exactly in `u128`.
pub const MAX_PROJECTIONS: u32 = 120;

/// Relative tolerance of the 1/√e root-find.
pub const SQRT_E_REL_TOL: f64 = 1e-9;

const SCAN_POINTS: usize = 400;

/// `e^{-1/2}`.
pub fn inv_sqrt_e() -> f64 {
    (-0.5f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub n: u32,
    pub tau: f64,
    pub t2eff: f64,
    pub amplitude: f64,
    pub offset: f64,
}

impl DecayParams {
    pub fn new(n: u32, tau: f64, t2eff: f64, amplitude: f64, offset: f64) -> Result<Self> {
        let p = Self {
            n,
            tau,
            t2eff,
            amplitude,
            offset,
        };
        p.validate()?;
        Ok(p)
    }

    /// `A = 1`, `offset = 0`.
    pub fn normalized(n: u32, tau: f64, t2eff: f64) -> Result<Self> {
        Self::new(n, tau, t2eff, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > MAX_PROJECTIONS {
            return Err(ZenoError::InvalidParameter(format!(
                "N = {} exceeds the supported maximum {MAX_PROJECTIONS}",
                self.n
            )));
        }
        if !(self.t2eff > 0.0) || !self.t2eff.is_finite() {
            return Err(ZenoError::InvalidParameter(format!("T2eff must be positive, got {}", self.t2eff)));
        }
        if !(0.0..=1.0).contains(&self.amplitude) {
            return Err(ZenoError::InvalidParameter(format!(
                "amplitude must lie in [0, 1], got {}",
                self.amplitude
            )));
        }
        if !self.tau.is_finite() || !self.offset.is_finite() {
            return Err(ZenoError::InvalidParameter("non-finite tau or offset".into()));
        }
        Ok(())
    }
}

/// Row `n` of Pascal's triangle, exact up to [`MAX_PROJECTIONS`] + 1.
pub fn binomial_row(n: u32) -> Vec<f64> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c: u128 = 1;
    row.push(1.0);
    for l in 0..n as u128 {
        c = c * (n as u128 - l) / (l + 1);
        row.push(c as f64);
    }
    row
}

/// `C(N+1, l) / 2^(N+1)` together with the time factor `1 - 2l/(N+1)`.
pub(crate) fn decay_terms(n: u32) -> Vec<(f64, f64)> {
    let m = n + 1;
    let norm = 0.5f64.powi(m as i32);
    binomial_row(m)
        .into_iter()
        .enumerate()
        .map(|(l, c)| (c * norm, 1.0 - 2.0 * l as f64 / m as f64))
        .collect()
}

/// `1/T2eff = sqrt(Σ 1/T2*_i²)`.
pub fn effective_t2(t2_list: &[f64]) -> Result<f64> {
    if t2_list.is_empty() {
        return Err(ZenoError::InvalidParameter("empty T2* list".into()));
    }
    if let Some(bad) = t2_list.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(ZenoError::InvalidParameter(format!("T2* must be positive, got {bad}")));
    }
    if let [single] = t2_list {
        return Ok(*single);
    }
    let rate_sq: f64 = t2_list.iter().map(|t| t.powi(-2)).sum();
    Ok(rate_sq.sqrt().recip())
}

/// Effective dephasing time seen by `word`: only spins carrying X or Y count.
/// Returns `None` for diagonal words, which do not dephase.
pub fn effective_t2_for(t2_list: &[f64], word: &PauliString) -> Result<Option<f64>> {
    if t2_list.len() != word.num_spins() {
        return Err(ZenoError::DimensionMismatch {
            expected: word.num_spins(),
            actual: t2_list.len(),
        });
    }
    let subset: Vec<f64> = word.dephasing_spins().into_iter().map(|i| t2_list[i]).collect();
    if subset.is_empty() {
        Ok(None)
    } else {
        effective_t2(&subset).map(Some)
    }
}

/// Normalized decay (`A = 1`, `offset = 0`).
pub fn normalized_decay(n: u32, tau: f64, t2eff: f64) -> f64 {
    decay_terms(n)
        .into_iter()
        .map(|(w, f)| w * (-(f * tau / t2eff).powi(2)).exp())
        .sum()
}

pub fn decay_value(p: &DecayParams) -> f64 {
    p.offset + p.amplitude * normalized_decay(p.n, p.tau, p.t2eff)
}

/// Expectation of `σx^{⊗k}` for fixed detunings, starting in `|X…X>` with
/// `N` projections of `σx^{⊗k}` separated by segments of duration `t`:
/// `2^{1-k} Σ_{α_2..α_k = ±1} cos^{N+1}[(Δ_1 + Σ α_i Δ_i) t]`.
pub fn single_shot_expectation(detunings: &DetuningVector, t: f64, n: u32) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(ZenoError::NegativeTime(t));
    }
    let d = detunings.as_slice();
    let k = d.len();
    let configs = 1usize << (k - 1);
    let sum: f64 = (0..configs)
        .map(|bits| {
            let phase = d[1..].iter().enumerate().fold(d[0], |acc, (j, di)| {
                if (bits >> j) & 1 == 0 {
                    acc + di
                } else {
                    acc - di
                }
            });
            (phase * t).cos().powi(n as i32 + 1)
        })
        .sum();
    Ok(sum / configs as f64)
}

/// `τ → ∞` limit of the normalized decay for odd `N`: `C(N+1, (N+1)/2) / 2^(N+1)`.
pub fn odd_n_asymptote(n: u32) -> Result<f64> {
    if n % 2 == 0 {
        return Err(ZenoError::EvenProjectionCount(n));
    }
    if n > MAX_PROJECTIONS {
        return Err(ZenoError::InvalidParameter(format!("N = {n} too large")));
    }
    let m = n + 1;
    Ok(binomial_row(m)[(m / 2) as usize] * 0.5f64.powi(m as i32))
}

/// Smallest `τ > 0` with `normalized_decay(N, τ, T2eff) = e^{-1/2}`.
pub fn sqrt_e_time(n: u32, t2eff: f64) -> Result<f64> {
    if n % 2 == 1 {
        return Err(ZenoError::OddProjectionCount(n));
    }
    DecayParams::normalized(n, 0.0, t2eff)?;
    let target = inv_sqrt_e();
    let f = |tau: f64| normalized_decay(n, tau, t2eff) - target;
    let upper = 20.0 * (n as f64 + 1.0) * t2eff;
    let step = upper / SCAN_POINTS as f64;

    let mut bracket = None;
    let mut prev = (0.0, f(0.0));
    for i in 1..=SCAN_POINTS {
        let x = step * i as f64;
        let fx = f(x);
        if prev.1 > 0.0 && fx <= 0.0 {
            bracket = Some((prev.0, x));
            break;
        }
        prev = (x, fx);
    }
    let (mut lo, mut hi) = bracket.ok_or(ZenoError::NoCrossing { upper })?;
    while hi - lo > SQRT_E_REL_TOL * lo {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
