//! Decay-curve analysis.
//!
//! The `N = 0` curve is fitted with `offset + A·exp(-(τ/T)²)`. Curves with
//! projections are fitted with the closed-form binomial decay, all three of
//! `A`, `T2eff` and `offset` free; the Gaussian fit of the same data family
//! only seeds the initial guess. Characteristic times relative to `N = 0`
//! are then fitted with `1 + μ N^ν`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analytic::{decay_terms, inv_sqrt_e, sqrt_e_time};
use crate::ensemble::DecayCurve;
use crate::lm::{minimize, LmConfig, Model};
use crate::{Result, ZenoError};

/// Read-out correction factors for one-, two- and three-spin expectation
/// values, keyed by the (1-based) spins involved.
pub const MEASURED_CORRECTIONS: &[(&[usize], f64)] = &[
    (&[1], 0.94),
    (&[2], 0.94),
    (&[1, 2], 0.93),
    (&[1, 2, 3], 0.90),
    (&[1, 3], 0.93),
    (&[2, 3], 0.95),
];

pub fn measured_correction(spins: &[usize]) -> Option<f64> {
    MEASURED_CORRECTIONS
        .iter()
        .find(|(s, _)| *s == spins)
        .map(|(_, f)| *f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitErrors {
    pub amplitude: f64,
    pub t2eff: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub n: u32,
    pub amplitude: f64,
    /// ms
    pub t2eff: f64,
    pub offset: f64,
    pub std_errors: FitErrors,
    /// Weighted residual sum of squares (χ² when weighted).
    pub rss: f64,
    pub weighted: bool,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    /// 1/√e time of the fitted curve and its standard error, for even `N`.
    pub fn sqrt_e_time(&self) -> Result<(f64, f64)> {
        let unit = sqrt_e_time(self.n, 1.0)?;
        Ok((unit * self.t2eff, unit * self.std_errors.t2eff))
    }

    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(ZenoError::NotConverged(self.iterations))
        }
    }
}

/// Starting point for [`fit_decay`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayGuess {
    pub amplitude: f64,
    pub t2eff: f64,
    pub offset: f64,
}

impl DecayGuess {
    /// `A = 1`, `offset = 0`.
    pub fn new(t2eff: f64) -> Self {
        Self {
            amplitude: 1.0,
            t2eff,
            offset: 0.0,
        }
    }

    /// Amplitude and offset from the `N = 0` fit of the same data family,
    /// `T2eff` from the nominal per-spin times (or the reference width).
    pub fn from_reference(reference: Option<&FitResult>, nominal_t2eff: Option<f64>, curve: &DecayCurve, n: u32) -> Self {
        let t2eff = nominal_t2eff
            .or(reference.map(|r| r.t2eff))
            .unwrap_or_else(|| estimate_t2eff(curve, n));
        match reference {
            Some(r) => Self {
                amplitude: r.amplitude,
                t2eff,
                offset: r.offset,
            },
            None => Self::new(t2eff),
        }
    }
}

/// Rough `T2eff` from where the curve falls through `1/√e` of its span.
fn estimate_t2eff(curve: &DecayCurve, n: u32) -> f64 {
    let first = curve.mean[0];
    let last = *curve.mean.last().unwrap();
    let level = last + (first - last) * inv_sqrt_e();
    let span = curve.tau.last().unwrap() - curve.tau[0];
    let fallback = 0.5 * span.max(f64::MIN_POSITIVE);
    let unit = sqrt_e_time(n - n % 2, 1.0).unwrap_or(1.0);
    curve
        .first_crossing_below(level)
        .filter(|t| *t > 0.0)
        .map_or(fallback, |t| t / unit)
}

struct GaussianModel;

impl Model for GaussianModel {
    fn num_params(&self) -> usize {
        3
    }

    fn value(&self, x: f64, p: &[f64]) -> f64 {
        p[2] + p[0] * (-(x / p[1]).powi(2)).exp()
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let e = (-(x / p[1]).powi(2)).exp();
        out[0] = e;
        out[1] = p[0] * e * 2.0 * x * x / p[1].powi(3);
        out[2] = 1.0;
    }
}

/// `offset + A · Σ_l w_l exp(-(f_l τ / T)²)`, parameters `[A, T, offset]`.
pub(crate) struct BinomialDecayModel {
    terms: Vec<(f64, f64)>,
}

impl BinomialDecayModel {
    pub(crate) fn new(n: u32) -> Self {
        Self { terms: decay_terms(n) }
    }
}

impl Model for BinomialDecayModel {
    fn num_params(&self) -> usize {
        3
    }

    fn value(&self, x: f64, p: &[f64]) -> f64 {
        let s: f64 = self
            .terms
            .iter()
            .map(|(w, f)| w * (-(f * x / p[1]).powi(2)).exp())
            .sum();
        p[2] + p[0] * s
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let (mut s, mut ds) = (0.0, 0.0);
        for (w, f) in &self.terms {
            let t = f * x;
            let e = w * (-(t / p[1]).powi(2)).exp();
            s += e;
            ds += e * 2.0 * t * t / p[1].powi(3);
        }
        out[0] = s;
        out[1] = p[0] * ds;
        out[2] = 1.0;
    }
}

struct PowerLawModel;

impl Model for PowerLawModel {
    fn num_params(&self) -> usize {
        2
    }

    fn value(&self, x: f64, p: &[f64]) -> f64 {
        1.0 + p[0] * x.powf(p[1])
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let xp = x.powf(p[1]);
        out[0] = xp;
        out[1] = p[0] * xp * x.ln();
    }
}

/// Errors below this fraction of the curve's largest error are round-off
/// (e.g. at `τ = 0`, where every shot agrees) and count as zero.
const NEGLIGIBLE_ERROR: f64 = 1e-9;

/// `1/stderr²` weights. Points with a zero (or negligible) error get the
/// smallest significant error on the curve, so they still anchor the fit
/// without an infinite weight. Unweighted when fewer than half the points
/// carry an error.
fn weights_with_floor(curve: &DecayCurve) -> Option<Vec<f64>> {
    if curve.stderr.len() != curve.len() || curve.stderr.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return None;
    }
    let largest = curve.stderr.iter().copied().fold(0.0, f64::max);
    let significant = |s: f64| s > NEGLIGIBLE_ERROR * largest;
    let floor = curve
        .stderr
        .iter()
        .copied()
        .filter(|s| significant(*s))
        .fold(f64::INFINITY, f64::min);
    if !floor.is_finite() || curve.stderr.iter().filter(|s| significant(**s)).count() * 2 < curve.len() {
        return None;
    }
    Some(
        curve
            .stderr
            .iter()
            .map(|&s| if significant(s) { s.powi(-2) } else { floor.powi(-2) })
            .collect(),
    )
}

fn check_curve(curve: &DecayCurve, min_points: usize) -> Result<()> {
    if curve.len() < min_points || curve.mean.len() != curve.len() {
        return Err(ZenoError::DegenerateData(format!(
            "need at least {min_points} points, got {}",
            curve.len()
        )));
    }
    if curve.mean.iter().chain(&curve.tau).any(|v| !v.is_finite()) {
        return Err(ZenoError::DegenerateData("non-finite values".into()));
    }
    let (lo, hi) = curve
        .mean
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(ZenoError::DegenerateData("constant curve".into()));
    }
    Ok(())
}

fn to_result(n: u32, out: crate::lm::LmOutcome, weighted: bool) -> FitResult {
    let p = &out.params;
    FitResult {
        n,
        amplitude: p[0],
        t2eff: p[1].abs(),
        offset: p[2],
        std_errors: FitErrors {
            amplitude: out.std_errors[0],
            t2eff: out.std_errors[1],
            offset: out.std_errors[2],
        },
        rss: out.cost,
        weighted,
        converged: out.converged && p[1] != 0.0 && p.iter().all(|v| v.is_finite()),
        iterations: out.iterations,
    }
}

/// Gaussian fit of an `N = 0` curve. A fit that hits the iteration cap is
/// returned with `converged = false`.
pub fn fit_gaussian(curve: &DecayCurve) -> Result<FitResult> {
    check_curve(curve, 4)?;
    let last = *curve.mean.last().unwrap();
    let first = curve.mean[0];
    let guess = [first - last, estimate_t2eff(curve, 0), last];
    let weights = weights_with_floor(curve);
    let out = minimize(
        &GaussianModel,
        &curve.tau,
        &curve.mean,
        weights.as_deref(),
        &guess,
        &LmConfig::default(),
    );
    Ok(to_result(0, out, weights.is_some()))
}

/// Fit of the closed-form decay with `N >= 1` projections.
pub fn fit_decay(curve: &DecayCurve, n: u32, guess: &DecayGuess) -> Result<FitResult> {
    if n == 0 {
        return Err(ZenoError::InvalidParameter("N = 0 curves are fitted with fit_gaussian".into()));
    }
    check_curve(curve, 5)?;
    if !(guess.t2eff > 0.0) {
        return Err(ZenoError::InvalidParameter(format!("initial T2eff {} must be positive", guess.t2eff)));
    }
    let weights = weights_with_floor(curve);
    let out = minimize(
        &BinomialDecayModel::new(n),
        &curve.tau,
        &curve.mean,
        weights.as_deref(),
        &[guess.amplitude, guess.t2eff, guess.offset],
        &LmConfig::default(),
    );
    Ok(to_result(n, out, weights.is_some()))
}

/// Gaussian fit for `N = 0`, closed-form decay fit otherwise.
pub fn fit_any(curve: &DecayCurve, n: u32, guess: Option<&DecayGuess>) -> Result<FitResult> {
    if n == 0 {
        fit_gaussian(curve)
    } else {
        let g = guess.copied().unwrap_or_else(|| DecayGuess::from_reference(None, None, curve, n));
        fit_decay(curve, n, &g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub mu: f64,
    pub nu: f64,
    pub mu_err: f64,
    pub nu_err: f64,
    /// Characteristic time relative to `N = 0`, per `N`.
    pub normalized: BTreeMap<u32, f64>,
    pub rss: f64,
    pub converged: bool,
}

impl ScalingFit {
    pub fn predict(&self, n: u32) -> f64 {
        1.0 + self.mu * (n as f64).powf(self.nu)
    }
}

/// Fit of `1 + μ N^ν` to characteristic times normalized by the `N = 0`
/// entry.
pub fn fit_scaling(times: &BTreeMap<u32, f64>) -> Result<ScalingFit> {
    let base = *times
        .get(&0)
        .ok_or_else(|| ZenoError::InvalidParameter("scaling fit needs an N = 0 entry".into()))?;
    if times.len() < 3 {
        return Err(ZenoError::InvalidParameter(format!(
            "scaling fit needs at least 3 distinct N, got {}",
            times.len()
        )));
    }
    if !(base > 0.0) || times.values().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(ZenoError::InvalidParameter("characteristic times must be positive".into()));
    }
    let normalized: BTreeMap<u32, f64> = times
        .iter()
        .map(|(&n, &t)| (n, if n == 0 { 1.0 } else { t / base }))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = normalized
        .iter()
        .filter(|(n, _)| **n > 0)
        .map(|(&n, &t)| (n as f64, t))
        .unzip();
    let out = minimize(&PowerLawModel, &xs, &ys, None, &[1.0, 0.5], &LmConfig::default());
    Ok(ScalingFit {
        mu: out.params[0],
        nu: out.params[1],
        mu_err: out.std_errors[0],
        nu_err: out.std_errors[1],
        normalized,
        rss: out.cost,
        converged: out.converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectedValue {
    pub value: f64,
    /// Set when `|value| > 1`; the value itself is left unclipped.
    pub out_of_range: bool,
}

pub fn apply_readout_correction(value: f64, factor: f64) -> Result<CorrectedValue> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(ZenoError::CorrectionFactorOutOfRange(factor));
    }
    let v = value / factor;
    Ok(CorrectedValue {
        value: v,
        out_of_range: v.abs() > 1.0,
    })
}
