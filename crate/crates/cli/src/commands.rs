use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use zeno_core::{
    apply_readout_correction, decay_value, run_ensemble, sqrt_e_time, DecayCurve, DecayParams,
};

use crate::analysis::{fit_batch, parse_fit_table, scaling_summary, FitInput, FitTable, ScalingSummary};
use crate::config::RunConfig;
use crate::curve_io::{generator, read_curve, render_curve, write_text, Provenance};
use crate::error::{CliError, CliResult};

/// Environment variable overriding every configured seed.
pub const SEED_ENV: &str = "ZENO_SEED";

pub fn seed_from_env() -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={s} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{SEED_ENV}: {e}"))),
    }
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn curve_file_name(curve: &DecayCurve) -> String {
    format!("{}_N{}.csv", curve.readout, curve.n)
}

/// Divides a curve by its read-out correction factor. Returns the number of
/// points that end up outside `[-1, 1]`; they are kept, not clipped.
pub fn correct_curve(curve: &mut DecayCurve, factor: f64) -> CliResult<usize> {
    let mut flagged = 0;
    for i in 0..curve.len() {
        let c = apply_readout_correction(curve.mean[i], factor)?;
        flagged += c.out_of_range as usize;
        curve.mean[i] = c.value;
        curve.stderr[i] /= factor;
    }
    Ok(flagged)
}

/// Runs every projection count of the config and writes one CSV per readout
/// and count.
pub fn simulate(config_path: &Path, out: Option<&Path>, seed_override: Option<u64>) -> CliResult<Vec<PathBuf>> {
    let mut config = RunConfig::load(config_path)?;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    let plans = config.plans()?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.out.clone())
        .ok_or_else(|| CliError::Config("no output directory (use --out or \"out\")".into()))?;
    create_dir(&dir)?;

    let echo = config.echo();
    let mut written = Vec::new();
    for plan in &plans {
        for mut curve in run_ensemble(plan)? {
            let mut prov: Provenance = vec![
                ("generator".into(), generator()),
                ("command".into(), "simulate".into()),
                ("config".into(), echo.clone()),
                ("seed".into(), config.seed.to_string()),
                ("readout".into(), curve.readout.clone()),
                ("n".into(), curve.n.to_string()),
                ("shots".into(), plan.shots.to_string()),
            ];
            if let Some(&factor) = config.correction_factors.get(&curve.readout) {
                let flagged = correct_curve(&mut curve, factor)?;
                prov.push(("correction_factor".into(), factor.to_string()));
                prov.push(("out_of_range_points".into(), flagged.to_string()));
            }
            let path = dir.join(curve_file_name(&curve));
            write_text(&path, &render_curve(&prov, &curve))?;
            written.push(path);
        }
    }
    Ok(written)
}

pub struct AnalyticArgs {
    pub n: u32,
    pub t2eff: f64,
    pub tau: Vec<f64>,
    pub amplitude: f64,
    pub offset: f64,
}

/// Closed-form curve in the curve-file format (zero standard errors).
pub fn analytic(args: &AnalyticArgs) -> CliResult<String> {
    if args.tau.is_empty() {
        return Err(CliError::Config("empty tau list".into()));
    }
    let mean = args
        .tau
        .iter()
        .map(|&t| DecayParams::new(args.n, t, args.t2eff, args.amplitude, args.offset).map(|p| decay_value(&p)))
        .collect::<Result<Vec<f64>, _>>()?;
    let curve = DecayCurve {
        readout: "analytic".into(),
        n: args.n,
        seed: 0,
        stderr: vec![0.0; args.tau.len()],
        tau: args.tau.clone(),
        mean,
    };
    let mut prov: Provenance = vec![
        ("generator".into(), generator()),
        ("command".into(), "analytic".into()),
        ("n".into(), args.n.to_string()),
        ("t2eff_ms".into(), args.t2eff.to_string()),
        ("amplitude".into(), args.amplitude.to_string()),
        ("offset".into(), args.offset.to_string()),
        ("seed".into(), "none".into()),
    ];
    if let Ok(t) = sqrt_e_time(args.n, args.t2eff) {
        prov.push(("sqrt_e_time_ms".into(), t.to_string()));
    }
    Ok(render_curve(&prov, &curve))
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("`{p}` is not a number")))
        })
        .collect()
}

/// Fits every curve file matching `pattern`. `N` comes from `n_override`
/// or each file's `n` provenance line.
pub fn fit(pattern: &str, n_override: Option<u32>, nominal_t2eff: Option<f64>) -> CliResult<FitTable> {
    let paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| CliError::Config(format!("bad pattern {pattern}: {e}")))?
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::io(e.path(), std::io::Error::other(e.to_string())))?;
    if paths.is_empty() {
        return Err(CliError::io(
            Path::new(pattern),
            std::io::Error::new(std::io::ErrorKind::NotFound, "no files match"),
        ));
    }
    let inputs = paths
        .iter()
        .map(|p| {
            let file = read_curve(p)?;
            let origin = p.display().to_string();
            let n = match n_override {
                Some(n) => n,
                None => file
                    .get("n")
                    .ok_or_else(|| CliError::parse(&origin, "no `n` line; pass --n"))?
                    .parse()
                    .map_err(|e| CliError::parse(&origin, e))?,
            };
            let readout = file.get("readout").map_or_else(
                || p.file_stem().map_or("curve".into(), |s| s.to_string_lossy().into_owned()),
                str::to_string,
            );
            Ok(FitInput {
                source: origin,
                curve: file.to_curve(readout, n),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut provenance = BTreeMap::from([
        ("generator".to_string(), generator()),
        ("command".to_string(), "fit".to_string()),
        ("input".to_string(), pattern.to_string()),
    ]);
    if let Some(n) = n_override {
        provenance.insert("n".into(), n.to_string());
    }
    if let Some(t) = nominal_t2eff {
        provenance.insert("t2eff_guess_ms".into(), t.to_string());
    }
    Ok(FitTable {
        provenance,
        rows: fit_batch(&inputs, nominal_t2eff),
    })
}

pub fn scaling(input: &Path) -> CliResult<ScalingSummary> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let table = parse_fit_table(&text, &input.display().to_string())?;
    let mut summary = scaling_summary(&table);
    summary.provenance.insert("command".into(), "scaling".into());
    summary.provenance.insert("input".into(), input.display().to_string());
    summary.provenance.insert("generator".into(), generator());
    Ok(summary)
}
