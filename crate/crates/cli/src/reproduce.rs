//! Figure pipelines with the sample parameters baked in.
//!
//! Each pipeline simulates its curves, fits them and writes
//! `<curve>.csv`, `fits.json` and `summary.json` into the output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zeno_core::logical::{CLASSICAL_MEMORY_THRESHOLD, ENTANGLEMENT_THRESHOLD};
use zeno_core::{
    effective_t2, run_ensemble, sqrt_e_time, DecayCurve, ExperimentPlan, InitialState, LogicalLabel,
    NoiseModel, PauliString, Readout, SignedPauli, SpinLabel,
};

use crate::analysis::{fit_batch, scaling_summary, to_json, FitInput, FitTable, ScalingSummary};
use crate::commands::create_dir;
use crate::config::linspace;
use crate::curve_io::{generator, render_curve, write_text, Provenance};
use crate::error::{CliError, CliResult};

pub const FIGURES: [&str; 5] = ["fig2c", "fig3b", "fig3c", "fig4b", "fig5"];

/// Per-spin T2* of spins 1, 2 and 3, ms.
pub const T2_STAR: [f64; 3] = [12.4, 8.2, 21.0];
/// Initial fidelity of the single-spin superposition.
pub const SINGLE_SPIN_AMPLITUDE: f64 = 0.95;
/// Initial fidelity of the two-spin logical states.
pub const LOGICAL_AMPLITUDE: f64 = 0.89;

pub const DEFAULT_SEED: u64 = 2016;
pub const DEFAULT_SHOTS: u64 = 4000;

pub const FIG2C_N: [u32; 5] = [0, 2, 4, 8, 16];
pub const FIG3B_N: [u32; 7] = [0, 1, 2, 3, 4, 6, 16];
pub const FIG3C_N: [u32; 4] = [0, 2, 4, 6];
pub const FIG4B_N: [u32; 3] = [0, 2, 4];
pub const FIG5_N: [u32; 6] = [0, 2, 4, 6, 8, 16];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    pub shots: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            shots: DEFAULT_SHOTS,
        }
    }
}

/// A simulated curve and the plans behind it (several when averaged).
#[derive(Debug, Clone)]
pub struct CurveRecord {
    pub curve: DecayCurve,
    pub plans: Vec<ExperimentPlan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub curve: String,
    pub n: u32,
    pub sqrt_e_time_ms: Option<f64>,
    pub sqrt_e_time_err: Option<f64>,
    /// First time the curve drops to the figure threshold.
    pub crossing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSummary {
    pub provenance: BTreeMap<String, String>,
    pub threshold: Option<f64>,
    pub rows: Vec<SummaryRow>,
    pub checks: BTreeMap<String, bool>,
}

impl FigureSummary {
    pub fn row(&self, curve: &str, n: u32) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.curve == curve && r.n == n)
    }
}

#[derive(Debug, Clone)]
pub struct Figure<S> {
    pub id: &'static str,
    pub curves: Vec<CurveRecord>,
    pub fits: FitTable,
    pub summary: S,
}

fn plan(
    k: usize,
    initial_state: InitialState,
    readout: Readout,
    n: u32,
    tau_grid: Vec<f64>,
    amplitude: f64,
    opts: Options,
    seed: u64,
) -> ExperimentPlan {
    ExperimentPlan {
        noise: NoiseModel::new(T2_STAR[..k].to_vec()).expect("built-in T2*"),
        initial_state,
        observable: PauliString::all_x(k).expect("built-in size"),
        readouts: vec![readout],
        n,
        tau_grid,
        shots: opts.shots,
        seed,
        amplitude,
        offset: 0.0,
    }
}

fn simulate_one(plan: ExperimentPlan) -> CliResult<CurveRecord> {
    let curve = run_ensemble(&plan)?.remove(0);
    Ok(CurveRecord {
        curve,
        plans: vec![plan],
    })
}

/// Averages one curve per plan. Every member gets its own seed so the
/// members are statistically independent.
fn simulate_average(name: &str, plans: Vec<ExperimentPlan>) -> CliResult<CurveRecord> {
    let curves = plans
        .iter()
        .map(|p| Ok(run_ensemble(p)?.remove(0)))
        .collect::<CliResult<Vec<_>>>()?;
    let mut curve = DecayCurve::average(&curves, name)?;
    curve.seed = plans[0].seed;
    Ok(CurveRecord { curve, plans })
}

fn member_seed(opts: Options, member: usize) -> u64 {
    opts.seed.wrapping_add(member as u64)
}

fn fits_of(curves: &[CurveRecord], nominal_t2eff: Option<f64>, id: &str, opts: Options) -> FitTable {
    let inputs: Vec<FitInput> = curves
        .iter()
        .map(|c| FitInput {
            source: curve_file_name(&c.curve),
            curve: c.curve.clone(),
        })
        .collect();
    FitTable {
        provenance: provenance_map(id, opts),
        rows: fit_batch(&inputs, nominal_t2eff),
    }
}

fn provenance_map(id: &str, opts: Options) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("generator".to_string(), generator()),
        ("command".to_string(), "reproduce".to_string()),
        ("figure".to_string(), id.to_string()),
        ("seed".to_string(), opts.seed.to_string()),
        ("shots".to_string(), opts.shots.to_string()),
    ])
}

fn summarize(id: &str, opts: Options, curves: &[CurveRecord], fits: &FitTable, threshold: Option<f64>) -> FigureSummary {
    let rows = curves
        .iter()
        .map(|c| {
            let fit = fits.row(&c.curve.readout, c.curve.n);
            SummaryRow {
                curve: c.curve.readout.clone(),
                n: c.curve.n,
                sqrt_e_time_ms: fit.filter(|f| f.converged).and_then(|f| f.sqrt_e_time_ms),
                sqrt_e_time_err: fit.filter(|f| f.converged).and_then(|f| f.sqrt_e_time_err),
                crossing_ms: threshold.and_then(|t| c.curve.first_crossing_below(t)),
            }
        })
        .collect();
    FigureSummary {
        provenance: provenance_map(id, opts),
        threshold,
        rows,
        checks: BTreeMap::new(),
    }
}

/// `true` when every listed count beats `N = 0` on `metric`. A missing value
/// at `N > 0` counts as beating `N = 0` only if `N = 0` has a value and the
/// curve never reached the threshold on the grid.
fn later_than_reference(summary: &FigureSummary, curve: &str, counts: &[u32], metric: fn(&SummaryRow) -> Option<f64>) -> bool {
    let Some(base) = summary.row(curve, 0).and_then(metric) else {
        return false;
    };
    counts.iter().all(|&n| match summary.row(curve, n) {
        Some(r) => metric(r).is_none_or(|v| v > base),
        None => false,
    })
}

fn crossing(r: &SummaryRow) -> Option<f64> {
    r.crossing_ms
}

fn decay_time(r: &SummaryRow) -> Option<f64> {
    r.sqrt_e_time_ms
}

/// Single spin in `|X>` under `σx` projections, state-fidelity readout.
pub fn fig2c(opts: Options) -> CliResult<Figure<FigureSummary>> {
    let grid = linspace(0.0, 150.0, 61);
    let x = InitialState::Product(vec![SpinLabel::PlusX]);
    let curves = FIG2C_N
        .iter()
        .map(|&n| {
            let readout = Readout::StateFidelity(x.clone());
            simulate_one(plan(1, x.clone(), readout, n, grid.clone(), SINGLE_SPIN_AMPLITUDE, opts, opts.seed))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let fits = fits_of(&curves, Some(T2_STAR[0]), "fig2c", opts);
    let mut summary = summarize("fig2c", opts, &curves, &fits, None);
    let times: Vec<Option<f64>> = FIG2C_N
        .iter()
        .map(|&n| summary.row("fid_X", n).and_then(decay_time))
        .collect();
    let increasing = times.iter().all(Option::is_some) && times.windows(2).all(|w| w[1] > w[0]);
    summary.checks.insert("decay_time_increases_with_n".into(), increasing);
    Ok(Figure {
        id: "fig2c",
        curves,
        fits,
        summary,
    })
}

pub const FIG3B_CURVE: &str = "logical_fidelity_cardinal_avg";
pub const FIG3B_REFERENCE: &str = "spin1_fid_X";

/// Six-state average logical fidelity of the two-spin logical qubit under
/// `σxσx` projections, with the bare spin 1 as reference.
pub fn fig3b(opts: Options) -> CliResult<Figure<FigureSummary>> {
    let grid = linspace(0.0, 200.0, 51);
    let mut curves = FIG3B_N
        .iter()
        .map(|&n| {
            let plans = LogicalLabel::CARDINAL_2SPIN
                .iter()
                .enumerate()
                .map(|(i, &label)| {
                    plan(
                        2,
                        InitialState::Logical(label),
                        Readout::LogicalFidelity(label),
                        n,
                        grid.clone(),
                        LOGICAL_AMPLITUDE,
                        opts,
                        member_seed(opts, i),
                    )
                })
                .collect();
            simulate_average(FIG3B_CURVE, plans)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let x = InitialState::Product(vec![SpinLabel::PlusX]);
    let mut reference = simulate_one(plan(
        1,
        x.clone(),
        Readout::StateFidelity(x),
        0,
        grid,
        SINGLE_SPIN_AMPLITUDE,
        opts,
        opts.seed,
    ))?;
    reference.curve.readout = FIG3B_REFERENCE.into();
    curves.push(reference);

    // The logical operator Z_L reads spin 1 only.
    let fits = fits_of(&curves, Some(T2_STAR[0]), "fig3b", opts);
    let mut summary = summarize("fig3b", opts, &curves, &fits, Some(CLASSICAL_MEMORY_THRESHOLD));
    let later = later_than_reference(&summary, FIG3B_CURVE, &[2, 4, 6, 16], crossing);
    summary.checks.insert("crosses_two_thirds_later_than_n0".into(), later);
    Ok(Figure {
        id: "fig3b",
        curves,
        fits,
        summary,
    })
}

pub const FIG3C_CURVE: &str = "state_fidelity_entangled_avg";

/// Two-spin state fidelity averaged over the four entangled logical states.
pub fn fig3c(opts: Options) -> CliResult<Figure<FigureSummary>> {
    let grid = linspace(0.0, 120.0, 61);
    let curves = FIG3C_N
        .iter()
        .map(|&n| {
            let plans = LogicalLabel::ENTANGLED_2SPIN
                .iter()
                .enumerate()
                .map(|(i, &label)| {
                    let s = InitialState::Logical(label);
                    plan(2, s.clone(), Readout::StateFidelity(s), n, grid.clone(), LOGICAL_AMPLITUDE, opts, member_seed(opts, i))
                })
                .collect();
            simulate_average(FIG3C_CURVE, plans)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let t2eff = effective_t2(&T2_STAR[..2])?;
    let fits = fits_of(&curves, Some(t2eff), "fig3c", opts);
    let mut summary = summarize("fig3c", opts, &curves, &fits, Some(ENTANGLEMENT_THRESHOLD));
    let longer = later_than_reference(&summary, FIG3C_CURVE, &[2, 4, 6], crossing);
    summary.checks.insert("entangled_longer_than_n0".into(), longer);
    Ok(Figure {
        id: "fig3c",
        curves,
        fits,
        summary,
    })
}

pub const FIG4B_STATES: [LogicalLabel; 3] = [LogicalLabel::ZeroZero, LogicalLabel::XZero, LogicalLabel::PhiPlus];

/// Logical fidelities of three two-qubit logical states of three spins under
/// `σxσxσx` projections. No initial fidelity is quoted for these states, so
/// the amplitude is 1.
pub fn fig4b(opts: Options) -> CliResult<Figure<FigureSummary>> {
    let grid = linspace(0.0, 100.0, 51);
    let mut curves = Vec::new();
    for (i, &label) in FIG4B_STATES.iter().enumerate() {
        for &n in &FIG4B_N {
            let p = plan(
                3,
                InitialState::Logical(label),
                Readout::LogicalFidelity(label),
                n,
                grid.clone(),
                1.0,
                opts,
                member_seed(opts, i),
            );
            curves.push(simulate_one(p)?);
        }
    }
    let t2eff = effective_t2(&T2_STAR)?;
    let fits = fits_of(&curves, Some(t2eff), "fig4b", opts);
    let mut summary = summarize("fig4b", opts, &curves, &fits, None);
    for label in FIG4B_STATES {
        let name = Readout::LogicalFidelity(label).name();
        let prolonged = later_than_reference(&summary, &name, &[2, 4], decay_time);
        summary.checks.insert(format!("{name}_prolonged"), prolonged);
    }
    Ok(Figure {
        id: "fig4b",
        curves,
        fits,
        summary,
    })
}

/// Decay-time scaling from all-x correlators of one, two and three spins.
/// Each curve's grid spans 2.5 closed-form 1/√e times.
pub fn fig5(opts: Options) -> CliResult<Figure<ScalingSummary>> {
    let mut curves = Vec::new();
    let mut rows = Vec::new();
    for k in 1..=3 {
        let t2eff = effective_t2(&T2_STAR[..k])?;
        let all_x = PauliString::all_x(k)?;
        let mut group = Vec::new();
        for &n in &FIG5_N {
            let grid = linspace(0.0, 2.5 * sqrt_e_time(n, t2eff)?, 26);
            let p = plan(
                k,
                InitialState::Product(vec![SpinLabel::PlusX; k]),
                Readout::Correlator(SignedPauli::plus(all_x.clone())),
                n,
                grid,
                1.0,
                opts,
                member_seed(opts, k),
            );
            group.push(simulate_one(p)?);
        }
        rows.extend(fits_of(&group, Some(t2eff), "fig5", opts).rows);
        curves.extend(group);
    }
    let fits = FitTable {
        provenance: provenance_map("fig5", opts),
        rows,
    };
    let summary = scaling_summary(&fits);
    Ok(Figure {
        id: "fig5",
        curves,
        fits,
        summary,
    })
}

pub fn curve_file_name(curve: &DecayCurve) -> String {
    crate::commands::curve_file_name(curve)
}

fn write_figure<S: Serialize>(fig: &Figure<S>, opts: Options, dir: &Path) -> CliResult<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();
    for rec in &fig.curves {
        let plans = serde_json::to_string(&rec.plans).expect("plans serialize");
        let prov: Provenance = vec![
            ("generator".into(), generator()),
            ("command".into(), "reproduce".into()),
            ("figure".into(), fig.id.into()),
            ("config".into(), plans),
            ("seed".into(), opts.seed.to_string()),
            ("readout".into(), rec.curve.readout.clone()),
            ("n".into(), rec.curve.n.to_string()),
            ("shots".into(), opts.shots.to_string()),
            ("members".into(), rec.plans.len().to_string()),
        ];
        let path = dir.join(curve_file_name(&rec.curve));
        write_text(&path, &render_curve(&prov, &rec.curve))?;
        written.push(path);
    }
    for (name, text) in [("fits.json", to_json(&fig.fits)), ("summary.json", to_json(&fig.summary))] {
        let path = dir.join(name);
        write_text(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

pub fn reproduce(id: &str, opts: Options, dir: &Path) -> CliResult<Vec<PathBuf>> {
    if opts.shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }
    match id {
        "fig2c" => write_figure(&fig2c(opts)?, opts, dir),
        "fig3b" => write_figure(&fig3b(opts)?, opts, dir),
        "fig3c" => write_figure(&fig3c(opts)?, opts, dir),
        "fig4b" => write_figure(&fig4b(opts)?, opts, dir),
        "fig5" => write_figure(&fig5(opts)?, opts, dir),
        other => Err(CliError::Config(format!(
            "unknown figure `{other}` (expected one of {})",
            FIGURES.join(", ")
        ))),
    }
}
