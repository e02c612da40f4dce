use std::path::Path;
use std::process::{Command, Output};

use zeno_cli::analysis::{FitTable, ScalingSummary};

fn zeno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno"))
        .args(args)
        .env_remove("ZENO_SEED")
        .output()
        .unwrap()
}

fn zeno_seeded(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno"))
        .args(args)
        .env("ZENO_SEED", seed)
        .output()
        .unwrap()
}

fn path(p: &Path) -> String {
    p.display().to_string()
}

const SINGLE_SPIN: &str = r#"{
  "noise": {"t2_star": [12.4]},
  "initial_state": ["X"],
  "observable": "X",
  "readouts": [{"correlator": "X"}],
  "n": 0,
  "tau_grid": [0, 5, 10, 15, 20, 25, 30],
  "shots": 400,
  "seed": 3
}"#;

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    path(&p)
}

#[test]
fn simulate_writes_curve_with_provenance() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SINGLE_SPIN);
    let out = tmp.path().join("out");
    let o = zeno(&["simulate", "--config", &config, "--out", &path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("corr_X_N0.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let header = lines.iter().position(|l| *l == "tau_ms,mean,stderr").unwrap();
    assert!(lines[..header].iter().all(|l| l.starts_with('#')));
    assert!(lines.contains(&"# seed: 3"));
    assert!(lines.iter().any(|l| l.starts_with("# config: {")));
    assert_eq!(lines.len() - header - 1, 7);
    let first: Vec<f64> = lines[header + 1].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 1.0).abs() < 1e-12);
}

#[test]
fn seed_override_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SINGLE_SPIN);
    let out = tmp.path().join("out");
    assert!(zeno_seeded(&["simulate", "--config", &config, "--out", &path(&out)], "77").status.success());
    let text = std::fs::read_to_string(out.join("corr_X_N0.csv")).unwrap();
    assert!(text.lines().any(|l| l == "# seed: 77"));
    assert!(text.contains("\"seed\":77"));
    let bad = zeno_seeded(&["simulate", "--config", &config, "--out", &path(&out)], "abc");
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2_and_io_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = path(&tmp.path().join("out"));
    let unknown = write_config(tmp.path(), &SINGLE_SPIN.replace("\"seed\": 3", "\"seed\": 3, \"colour\": 1"));
    assert_eq!(zeno(&["simulate", "--config", &unknown, "--out", &out]).status.code(), Some(2));

    let invalid = write_config(tmp.path(), &SINGLE_SPIN.replace("\"shots\": 400", "\"shots\": 0"));
    assert_eq!(zeno(&["simulate", "--config", &invalid, "--out", &out]).status.code(), Some(2));

    let missing = path(&tmp.path().join("nope.json"));
    assert_eq!(zeno(&["simulate", "--config", &missing, "--out", &out]).status.code(), Some(3));

    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let good = write_config(tmp.path(), SINGLE_SPIN);
    let under_file = path(&blocker.join("sub"));
    assert_eq!(zeno(&["simulate", "--config", &good, "--out", &under_file]).status.code(), Some(3));

    assert_eq!(zeno(&["reproduce", "fig9", "--out", &out]).status.code(), Some(2));
    assert_eq!(zeno(&["simulate"]).status.code(), Some(2));
}

#[test]
fn malformed_csv_is_a_parse_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "# n: 0\ntau_ms,mean,stderr\n0,1\n").unwrap();
    let o = zeno(&["fit", "--in", &path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    let none = path(&tmp.path().join("*.nothing"));
    assert_eq!(zeno(&["fit", "--in", &none]).status.code(), Some(3));
}

#[test]
fn analytic_curve_fits_back() {
    let tmp = tempfile::tempdir().unwrap();
    let taus: Vec<String> = (0..25).map(|i| (i as f64 * 1.5).to_string()).collect();
    let file = tmp.path().join("gauss.csv");
    let o = zeno(&[
        "analytic", "--n", "0", "--t2eff", "6.5", "--tau", &taus.join(","), "--amplitude", "0.9", "--offset", "0.05",
        "--out", &path(&file),
    ]);
    assert!(o.status.success());
    let o = zeno(&["fit", "--in", &path(&file), "--n", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table: FitTable = serde_json::from_slice(&o.stdout).unwrap();
    let fit = table.rows[0].fit.unwrap();
    assert!((fit.amplitude - 0.9).abs() < 1e-6);
    assert!((fit.t2eff - 6.5).abs() < 1e-6);
    assert!((fit.offset - 0.05).abs() < 1e-6);
    assert!((table.rows[0].sqrt_e_time_ms.unwrap() - 6.5 / 2f64.sqrt()).abs() < 1e-5);
}

#[test]
fn analytic_rejects_bad_input() {
    assert_eq!(zeno(&["analytic", "--n", "2", "--t2eff", "-1", "--tau", "0,1"]).status.code(), Some(2));
    assert_eq!(zeno(&["analytic", "--n", "2", "--t2eff", "5", "--tau", "0,x"]).status.code(), Some(2));
    let o = zeno(&["analytic", "--n", "2", "--t2eff", "6.84", "--tau", "6.84"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let value: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 0.763_099_3).abs() < 1e-6);
}

const THREE_SPIN: &str = r#"{
  "noise": {"t2_star": [12.4, 8.2, 21]},
  "initial_state": ["X", "X", "X"],
  "observable": "XXX",
  "readouts": [{"correlator": "XXX"}],
  "n": [0, 2, 4, 6],
  "tau_grid": {"start": 0, "stop": 30, "points": 31},
  "shots": 1500,
  "seed": 21
}"#;

#[test]
fn simulate_fit_scaling_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), THREE_SPIN);
    let out = tmp.path().join("curves");
    assert!(zeno(&["simulate", "--config", &config, "--out", &path(&out)]).status.success());

    let fits = tmp.path().join("fits.json");
    let pattern = path(&out.join("*.csv"));
    let o = zeno(&["fit", "--in", &pattern, "--t2eff", "6.5", "--out", &path(&fits)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table: FitTable = serde_json::from_str(&std::fs::read_to_string(&fits).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 4);
    let t = |n| table.row("corr_XXX", n).unwrap().sqrt_e_time_ms.unwrap();
    assert!(t(4) > t(0));
    assert!(t(2) < t(4) && t(4) < t(6));
    assert!((t(0) - 4.6).abs() < 0.3);

    let o = zeno(&["scaling", "--in", &path(&fits)]);
    assert!(o.status.success());
    let summary: ScalingSummary = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary.groups.len(), 1);
    for p in &summary.groups[0].points {
        assert!((p.value - p.analytic).abs() <= 4.0 * p.error.max(1e-12), "{p:?}");
    }
}

#[test]
fn correction_factors_divide_the_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SINGLE_SPIN.replace("\"seed\": 3", "\"seed\": 3, \"correction_factors\": {\"corr_X\": 0.94}");
    let config = write_config(tmp.path(), &text);
    let out = tmp.path().join("out");
    assert!(zeno(&["simulate", "--config", &config, "--out", &path(&out)]).status.success());
    let text = std::fs::read_to_string(out.join("corr_X_N0.csv")).unwrap();
    assert!(text.contains("# correction_factor: 0.94"));
    assert!(text.contains("# out_of_range_points: 1"));
    let first_row = text.lines().find(|l| l.starts_with("0,")).unwrap();
    let v: f64 = first_row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 1.0 / 0.94).abs() < 1e-12);
}

#[test]
fn fig5_summary_reports_power_law() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("fig5");
    let o = zeno(&["reproduce", "fig5", "--out", &path(&out), "--shots", "500"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: ScalingSummary = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!((summary.analytic.mu - 0.77).abs() < 0.02);
    assert!((summary.analytic.nu - 0.63).abs() < 0.02);
    assert_eq!(summary.groups.len(), 3);
    assert_eq!(summary.provenance["seed"], "2016");
}

#[test]
fn fig2c_decay_times_increase() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("fig2c");
    assert!(zeno(&["reproduce", "fig2c", "--out", &path(&out), "--shots", "1000"]).status.success());
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["checks"]["decay_time_increases_with_n"], true);
    let curves = std::fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "csv");
    assert_eq!(curves.count(), 5);
}
