//! Fit tables and scaling summaries shared by `zeno fit`, `zeno scaling`
//! and the figure pipelines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use zeno_core::fit::fit_any;
use zeno_core::{fit_scaling, sqrt_e_time, DecayCurve, DecayGuess, FitResult, ScalingFit};

use crate::error::{CliError, CliResult};

/// Largest projection count in the analytic reference curve.
pub const ANALYTIC_MAX_N: u32 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRow {
    pub source: String,
    pub readout: String,
    pub n: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    pub converged: bool,
    #[serde(default)]
    pub fit: Option<FitResult>,
    /// 1/√e time of the fitted curve, even `N` only.
    #[serde(default)]
    pub sqrt_e_time_ms: Option<f64>,
    #[serde(default)]
    pub sqrt_e_time_err: Option<f64>,
    #[serde(default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitTable {
    pub provenance: BTreeMap<String, String>,
    pub rows: Vec<FitRow>,
}

impl FitTable {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| !r.converged)
    }

    pub fn row(&self, readout: &str, n: u32) -> Option<&FitRow> {
        self.rows.iter().find(|r| r.readout == readout && r.n == n)
    }
}

pub struct FitInput {
    pub source: String,
    pub curve: DecayCurve,
}

fn failed_row(input: &FitInput, msg: String) -> FitRow {
    FitRow {
        source: input.source.clone(),
        readout: input.curve.readout.clone(),
        n: input.curve.n,
        seed: Some(input.curve.seed),
        converged: false,
        fit: None,
        sqrt_e_time_ms: None,
        sqrt_e_time_err: None,
        error: Some(msg),
    }
}

fn fit_row(input: &FitInput, guess: Option<&DecayGuess>) -> FitRow {
    let n = input.curve.n;
    let fit = match fit_any(&input.curve, n, guess) {
        Ok(f) => f,
        Err(e) => return failed_row(input, e.to_string()),
    };
    let finite = [fit.amplitude, fit.t2eff, fit.offset, fit.rss].iter().all(|v| v.is_finite());
    if !finite {
        return failed_row(input, "fit diverged".into());
    }
    let (t, err) = match fit.sqrt_e_time() {
        Ok((t, e)) => (Some(t), Some(e)),
        Err(_) => (None, None),
    };
    FitRow {
        source: input.source.clone(),
        readout: input.curve.readout.clone(),
        n,
        seed: Some(input.curve.seed),
        converged: fit.converged,
        error: (!fit.converged).then(|| format!("no convergence after {} iterations", fit.iterations)),
        fit: Some(fit),
        sqrt_e_time_ms: t,
        sqrt_e_time_err: err,
    }
}

/// Fits every input. Within each readout the `N = 0` curve, when present,
/// is fitted first and seeds amplitude and offset of the other fits;
/// `nominal_t2eff` seeds `T2eff`.
pub fn fit_batch(inputs: &[FitInput], nominal_t2eff: Option<f64>) -> Vec<FitRow> {
    let mut references: BTreeMap<&str, FitRow> = BTreeMap::new();
    for input in inputs.iter().filter(|i| i.curve.n == 0) {
        references
            .entry(input.curve.readout.as_str())
            .or_insert_with(|| fit_row(input, None));
    }
    inputs
        .iter()
        .map(|input| {
            let n = input.curve.n;
            if n == 0 {
                return fit_row(input, None);
            }
            let reference = references
                .get(input.curve.readout.as_str())
                .filter(|r| r.converged)
                .and_then(|r| r.fit.as_ref());
            let guess = DecayGuess::from_reference(reference, nominal_t2eff, &input.curve, n);
            fit_row(input, Some(&guess))
        })
        .collect()
}

/// A characteristic time relative to `N = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPoint {
    pub n: u32,
    pub value: f64,
    pub error: f64,
    /// Closed-form ratio for comparison.
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScaling {
    pub group: String,
    pub points: Vec<NormalizedPoint>,
    pub fit: Option<ScalingFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub provenance: BTreeMap<String, String>,
    /// Power law fitted to the closed-form 1/√e times for even `N` up to
    /// [`ANALYTIC_MAX_N`].
    pub analytic: ScalingFit,
    pub groups: Vec<GroupScaling>,
    /// Per-`N` mean over all groups.
    pub combined: Option<GroupScaling>,
    pub skipped: Vec<String>,
}

pub fn analytic_ratio(n: u32) -> f64 {
    sqrt_e_time(n, 1.0).unwrap() / sqrt_e_time(0, 1.0).unwrap()
}

pub fn analytic_scaling() -> ScalingFit {
    let times = (0..=ANALYTIC_MAX_N)
        .step_by(2)
        .map(|n| (n, sqrt_e_time(n, 1.0).unwrap()))
        .collect();
    fit_scaling(&times).expect("closed-form times are valid")
}

/// Mean of repeated measurements; errors add in quadrature.
fn merge(values: &[(f64, f64)]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().map(|v| v.0).sum::<f64>() / m;
    let err = values.iter().map(|v| v.1 * v.1).sum::<f64>().sqrt() / m;
    (mean, err)
}

fn scaling_of(group: String, points: Vec<NormalizedPoint>) -> GroupScaling {
    let times: BTreeMap<u32, f64> = std::iter::once((0, 1.0))
        .chain(points.iter().filter(|p| p.n > 0).map(|p| (p.n, p.value)))
        .collect();
    match fit_scaling(&times) {
        Ok(fit) => GroupScaling {
            group,
            points,
            fit: Some(fit),
            error: None,
        },
        Err(e) => GroupScaling {
            group,
            points,
            fit: None,
            error: Some(e.to_string()),
        },
    }
}

/// Normalized times per readout plus their per-`N` combination.
pub fn scaling_summary(table: &FitTable) -> ScalingSummary {
    let mut skipped = Vec::new();
    let mut by_group: BTreeMap<&str, BTreeMap<u32, Vec<(f64, f64)>>> = BTreeMap::new();
    for row in &table.rows {
        match (row.converged, row.sqrt_e_time_ms, row.sqrt_e_time_err) {
            (true, Some(t), Some(e)) => by_group
                .entry(row.readout.as_str())
                .or_default()
                .entry(row.n)
                .or_default()
                .push((t, e)),
            _ => skipped.push(format!("{} (N = {})", row.source, row.n)),
        }
    }

    let mut groups = Vec::new();
    for (name, entries) in by_group {
        let Some(base) = entries.get(&0).map(|v| merge(v)) else {
            skipped.push(format!("{name}: no N = 0 reference"));
            continue;
        };
        let points = entries
            .iter()
            .map(|(&n, v)| {
                let (t, e) = merge(v);
                let (value, error) = if n == 0 {
                    (1.0, 0.0)
                } else {
                    let r = t / base.0;
                    (r, r * ((e / t).powi(2) + (base.1 / base.0).powi(2)).sqrt())
                };
                NormalizedPoint {
                    n,
                    value,
                    error,
                    analytic: analytic_ratio(n),
                }
            })
            .collect();
        groups.push(scaling_of(name.to_string(), points));
    }

    let combined = (!groups.is_empty()).then(|| {
        let mut per_n: BTreeMap<u32, Vec<(f64, f64)>> = BTreeMap::new();
        for g in &groups {
            for p in &g.points {
                per_n.entry(p.n).or_default().push((p.value, p.error));
            }
        }
        let points = per_n
            .into_iter()
            .map(|(n, v)| {
                let (value, error) = merge(&v);
                NormalizedPoint {
                    n,
                    value,
                    error,
                    analytic: analytic_ratio(n),
                }
            })
            .collect();
        scaling_of("combined".into(), points)
    });

    ScalingSummary {
        provenance: table.provenance.clone(),
        analytic: analytic_scaling(),
        groups,
        combined,
        skipped,
    }
}

pub fn parse_fit_table(text: &str, origin: &str) -> CliResult<FitTable> {
    serde_json::from_str(text).map_err(|e| CliError::parse(origin, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s
}
