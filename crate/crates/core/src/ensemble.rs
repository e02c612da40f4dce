//! Monte-Carlo ensemble of the projection sequence.
//!
//! One shot: prepare the initial state, then `N` times evolve for
//! `t = τ/(N+1)` and project the observable, evolve a final `t`, and read out.
//! The detunings are drawn once per shot and held for all segments
//! (quasi-static noise). Draws come from [`crate::rng::StreamKey`], so a curve
//! depends only on the plan, never on scheduling.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::MAX_PROJECTIONS;
use crate::channel::project_with;
use crate::logical::{logical_fidelity, LogicalLabel};
use crate::pauli::{PauliString, SignedPauli};
use crate::rng::StreamKey;
use crate::state::{evolve_dephasing, DensityMatrix, DetuningVector, SpinLabel, StateVector};
use crate::{Result, ZenoError, MAX_SPINS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Per-spin T2* in ms.
    pub t2_star: Vec<f64>,
}

impl NoiseModel {
    pub fn new(t2_star: Vec<f64>) -> Result<Self> {
        let m = Self { t2_star };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t2_star.is_empty() || self.t2_star.len() > MAX_SPINS {
            return Err(ZenoError::SpinCountOutOfRange(self.t2_star.len()));
        }
        if let Some(bad) = self.t2_star.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(ZenoError::InvalidParameter(format!("T2* must be positive, got {bad}")));
        }
        Ok(())
    }

    pub fn num_spins(&self) -> usize {
        self.t2_star.len()
    }

    /// Detuning standard deviation `√2 / T2*` of spin `i`, rad/ms.
    pub fn sigma(&self, i: usize) -> f64 {
        std::f64::consts::SQRT_2 / self.t2_star[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Product(Vec<SpinLabel>),
    Logical(LogicalLabel),
}

impl InitialState {
    pub fn num_spins(&self) -> usize {
        match self {
            InitialState::Product(l) => l.len(),
            InitialState::Logical(l) => l.num_spins(),
        }
    }

    pub fn state_vector(&self) -> Result<StateVector> {
        match self {
            InitialState::Product(l) => StateVector::product(l),
            InitialState::Logical(l) => Ok(l.target()),
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Product(ls) => {
                let parts: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            InitialState::Logical(l) => write!(f, "{l}"),
        }
    }
}

/// A quantity evaluated on the final density matrix of each shot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    Correlator(SignedPauli),
    StateFidelity(InitialState),
    LogicalFidelity(LogicalLabel),
}

impl Readout {
    pub fn correlator(word: &str) -> Result<Self> {
        Ok(Readout::Correlator(SignedPauli::parse(word)?))
    }

    pub fn num_spins(&self) -> usize {
        match self {
            Readout::Correlator(p) => p.word.num_spins(),
            Readout::StateFidelity(s) => s.num_spins(),
            Readout::LogicalFidelity(l) => l.num_spins(),
        }
    }

    /// File-name friendly identifier.
    pub fn name(&self) -> String {
        let raw = match self {
            Readout::Correlator(p) => format!("corr_{p}"),
            Readout::StateFidelity(s) => format!("fid_{s}"),
            Readout::LogicalFidelity(l) => format!("logical_{l}"),
        };
        raw.chars()
            .map(|c| match c {
                '+' => 'p',
                '-' => 'm',
                ',' => '_',
                c => c,
            })
            .collect()
    }
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub noise: NoiseModel,
    pub initial_state: InitialState,
    /// Observable projected between segments.
    pub observable: PauliString,
    pub readouts: Vec<Readout>,
    /// Number of projections.
    pub n: u32,
    /// Total evolution times, ms.
    pub tau_grid: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    /// Applied to every mean as `offset + amplitude · mean` after averaging.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub offset: f64,
}

impl ExperimentPlan {
    pub fn num_spins(&self) -> usize {
        self.noise.num_spins()
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        let k = self.num_spins();
        let mismatch = |actual: usize| ZenoError::DimensionMismatch { expected: k, actual };
        if self.initial_state.num_spins() != k {
            return Err(mismatch(self.initial_state.num_spins()));
        }
        if self.observable.num_spins() != k {
            return Err(mismatch(self.observable.num_spins()));
        }
        if self.observable.is_identity() {
            return Err(ZenoError::IdentityObservable);
        }
        if self.readouts.is_empty() {
            return Err(ZenoError::InvalidParameter("no readouts".into()));
        }
        if let Some(r) = self.readouts.iter().find(|r| r.num_spins() != k) {
            return Err(mismatch(r.num_spins()));
        }
        if self.n > MAX_PROJECTIONS {
            return Err(ZenoError::InvalidParameter(format!("N = {} too large", self.n)));
        }
        if self.shots == 0 {
            return Err(ZenoError::InvalidParameter("shots must be at least 1".into()));
        }
        if self.tau_grid.is_empty() {
            return Err(ZenoError::InvalidParameter("empty tau grid".into()));
        }
        if self.tau_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(ZenoError::InvalidParameter("tau grid must be finite and non-negative".into()));
        }
        if self.tau_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ZenoError::InvalidParameter("tau grid must be strictly increasing".into()));
        }
        if !(0.0..=1.0).contains(&self.amplitude) || !self.offset.is_finite() {
            return Err(ZenoError::InvalidParameter("amplitude must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Ensemble statistics of one readout along the tau grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub readout: String,
    pub n: u32,
    pub seed: u64,
    pub tau: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl DecayCurve {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Point-wise mean of curves sharing a tau grid; standard errors add in
    /// quadrature.
    pub fn average(curves: &[DecayCurve], readout: impl Into<String>) -> Result<DecayCurve> {
        let first = curves
            .first()
            .ok_or_else(|| ZenoError::InvalidParameter("no curves to average".into()))?;
        if curves.iter().any(|c| c.tau != first.tau) {
            return Err(ZenoError::InvalidParameter("curves have different tau grids".into()));
        }
        let m = curves.len() as f64;
        let mean = (0..first.len())
            .map(|i| curves.iter().map(|c| c.mean[i]).sum::<f64>() / m)
            .collect();
        let stderr = (0..first.len())
            .map(|i| curves.iter().map(|c| c.stderr[i].powi(2)).sum::<f64>().sqrt() / m)
            .collect();
        Ok(DecayCurve {
            readout: readout.into(),
            n: first.n,
            seed: first.seed,
            tau: first.tau.clone(),
            mean,
            stderr,
        })
    }

    /// First `τ` at which the mean drops to `threshold` or below, linearly
    /// interpolated between grid points.
    pub fn first_crossing_below(&self, threshold: f64) -> Option<f64> {
        if self.mean.first().is_some_and(|&m| m <= threshold) {
            return self.tau.first().copied();
        }
        self.tau
            .windows(2)
            .zip(self.mean.windows(2))
            .find(|(_, m)| m[0] > threshold && m[1] <= threshold)
            .map(|(t, m)| t[0] + (t[1] - t[0]) * (m[0] - threshold) / (m[0] - m[1]))
    }
}

/// Detunings of one shot at one tau point.
pub fn sample_detunings(seed: u64, shot_index: u64, point_index: u64, noise: &NoiseModel) -> DetuningVector {
    DetuningVector(
        (0..noise.num_spins())
            .map(|i| noise.sigma(i) * StreamKey::new(seed, shot_index, point_index, i as u64).standard_normal())
            .collect(),
    )
}

enum PreparedReadout {
    Pauli { sign: f64, coeffs: Vec<Complex64>, mask: usize },
    Fidelity(StateVector),
    Logical(LogicalLabel),
}

/// Plan with precomputed operators for the shot loop.
struct PreparedPlan {
    initial: DensityMatrix,
    n: u32,
    proj_coeffs: Vec<Complex64>,
    proj_mask: usize,
    readouts: Vec<PreparedReadout>,
}

impl PreparedPlan {
    fn new(plan: &ExperimentPlan) -> Result<Self> {
        plan.validate()?;
        let readouts = plan
            .readouts
            .iter()
            .map(|r| {
                Ok(match r {
                    Readout::Correlator(p) => PreparedReadout::Pauli {
                        sign: p.sign(),
                        coeffs: p.word.basis_coefficients(),
                        mask: p.word.flip_mask(),
                    },
                    Readout::StateFidelity(s) => PreparedReadout::Fidelity(s.state_vector()?),
                    Readout::LogicalFidelity(l) => PreparedReadout::Logical(*l),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            initial: plan.initial_state.state_vector()?.to_density(),
            n: plan.n,
            proj_coeffs: plan.observable.basis_coefficients(),
            proj_mask: plan.observable.flip_mask(),
            readouts,
        })
    }

    fn final_state(&self, detunings: &DetuningVector, tau: f64) -> Result<DensityMatrix> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(ZenoError::NegativeTime(tau));
        }
        self.initial.check_dim(1 << detunings.len())?;
        let t = tau / (self.n as f64 + 1.0);
        let u = detunings.propagator_diagonal(t);
        let mut rho = self.initial.clone();
        for _ in 0..self.n {
            rho.conjugate_diagonal_in_place(&u);
            rho = project_with(&rho, &self.proj_coeffs, self.proj_mask);
        }
        rho.conjugate_diagonal_in_place(&u);
        Ok(rho)
    }

    fn shot(&self, detunings: &DetuningVector, tau: f64) -> Result<Vec<f64>> {
        let rho = self.final_state(detunings, tau)?;
        self.readouts
            .iter()
            .map(|r| match r {
                PreparedReadout::Pauli { sign, coeffs, mask } => Ok(sign * rho.pauli_expectation(coeffs, *mask)),
                PreparedReadout::Fidelity(psi) => crate::state::state_fidelity(&rho, psi),
                PreparedReadout::Logical(l) => logical_fidelity(&rho, *l),
            })
            .collect()
    }
}

/// Final density matrix of one shot, built from the public kernel
/// ([`evolve_dephasing`], [`crate::channel::project`]).
pub fn final_state(plan: &ExperimentPlan, detunings: &DetuningVector, tau: f64) -> Result<DensityMatrix> {
    plan.validate()?;
    if detunings.len() != plan.num_spins() {
        return Err(ZenoError::DimensionMismatch {
            expected: plan.num_spins(),
            actual: detunings.len(),
        });
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(ZenoError::NegativeTime(tau));
    }
    let t = tau / (plan.n as f64 + 1.0);
    let mut rho = plan.initial_state.state_vector()?.to_density();
    for _ in 0..plan.n {
        rho = evolve_dephasing(&rho, detunings, t)?;
        rho = crate::channel::project(&plan.observable, &rho)?;
    }
    evolve_dephasing(&rho, detunings, t)
}

/// Raw readout values of one shot (amplitude and offset not applied).
pub fn run_shot(plan: &ExperimentPlan, detunings: &DetuningVector, tau: f64) -> Result<Vec<f64>> {
    if detunings.len() != plan.num_spins() {
        return Err(ZenoError::DimensionMismatch {
            expected: plan.num_spins(),
            actual: detunings.len(),
        });
    }
    PreparedPlan::new(plan)?.shot(detunings, tau)
}

/// One curve per readout, in plan order.
pub fn run_ensemble(plan: &ExperimentPlan) -> Result<Vec<DecayCurve>> {
    let prepared = PreparedPlan::new(plan)?;
    let r = plan.readouts.len();
    let shots = plan.shots;

    let per_point: Vec<Vec<(f64, f64)>> = plan
        .tau_grid
        .par_iter()
        .enumerate()
        .map(|(p, &tau)| {
            let values: Vec<Vec<f64>> = (0..shots)
                .into_par_iter()
                .map(|s| prepared.shot(&sample_detunings(plan.seed, s, p as u64, &plan.noise), tau))
                .collect::<Result<_>>()?;
            Ok((0..r).map(|j| mean_and_stderr(values.iter().map(|v| v[j]), shots)).collect())
        })
        .collect::<Result<_>>()?;

    Ok(plan
        .readouts
        .iter()
        .enumerate()
        .map(|(j, readout)| DecayCurve {
            readout: readout.name(),
            n: plan.n,
            seed: plan.seed,
            tau: plan.tau_grid.clone(),
            mean: per_point.iter().map(|pt| plan.offset + plan.amplitude * pt[j].0).collect(),
            stderr: per_point.iter().map(|pt| plan.amplitude * pt[j].1).collect(),
        })
        .collect())
}

/// Sequential two-pass statistics; the input order is fixed, so the result
/// is bit-reproducible.
fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone, n: u64) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
