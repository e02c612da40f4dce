//! JSON run configuration for `zeno simulate`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zeno_core::{ExperimentPlan, InitialState, NoiseModel, PauliString, Readout};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Simulate,
    Analytic,
    Fit,
    Scaling,
    Reproduce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProjectionCounts {
    One(u32),
    Many(Vec<u32>),
}

impl ProjectionCounts {
    pub fn to_vec(&self) -> Vec<u32> {
        match self {
            ProjectionCounts::One(n) => vec![*n],
            ProjectionCounts::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

/// Either an explicit list of times or an evenly spaced range, in ms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauGrid {
    List(Vec<f64>),
    Range(TauRange),
}

impl TauGrid {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        match self {
            TauGrid::List(v) => Ok(v.clone()),
            TauGrid::Range(r) => {
                if r.points < 2 || !(r.stop > r.start) {
                    return Err(CliError::Config("tau range needs points >= 2 and stop > start".into()));
                }
                Ok(linspace(r.start, r.stop, r.points))
            }
        }
    }
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect()
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    pub noise: NoiseModel,
    pub initial_state: InitialState,
    pub observable: PauliString,
    pub readouts: Vec<Readout>,
    pub n: ProjectionCounts,
    pub tau_grid: TauGrid,
    pub shots: u64,
    pub seed: u64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub offset: f64,
    /// Output directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Read-out correction factor per readout name (e.g. `corr_XX`).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub correction_factors: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::parse(origin, e))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// One validated plan per projection count.
    pub fn plans(&self) -> CliResult<Vec<ExperimentPlan>> {
        if let Some(kind) = self.kind.filter(|k| *k != Kind::Simulate) {
            return Err(CliError::Config(format!("config kind {kind:?} cannot be simulated")));
        }
        let counts = self.n.to_vec();
        if counts.is_empty() {
            return Err(CliError::Config("no projection counts given".into()));
        }
        let tau_grid = self.tau_grid.values()?;
        let names: Vec<String> = self.readouts.iter().map(Readout::name).collect();
        if let Some(unknown) = self.correction_factors.keys().find(|k| !names.contains(k)) {
            return Err(CliError::Config(format!("correction factor for unknown readout {unknown}")));
        }
        counts
            .into_iter()
            .map(|n| {
                let plan = ExperimentPlan {
                    noise: self.noise.clone(),
                    initial_state: self.initial_state.clone(),
                    observable: self.observable.clone(),
                    readouts: self.readouts.clone(),
                    n,
                    tau_grid: tau_grid.clone(),
                    shots: self.shots,
                    seed: self.seed,
                    amplitude: self.amplitude,
                    offset: self.offset,
                };
                plan.validate()?;
                Ok(plan)
            })
            .collect()
    }

    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
