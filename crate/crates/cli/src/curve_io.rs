//! Curve files: `#`-prefixed `key: value` provenance lines, then
//! `tau_ms,mean,stderr` and one row per tau point.

use std::fmt::Write as _;
use std::path::Path;

use zeno_core::DecayCurve;

use crate::error::{CliError, CliResult};

pub const HEADER: &str = "tau_ms,mean,stderr";

/// Ordered provenance entries written as `# key: value`.
pub type Provenance = Vec<(String, String)>;

pub fn generator() -> String {
    format!("zeno {}", env!("CARGO_PKG_VERSION"))
}

pub fn render_curve(provenance: &[(String, String)], curve: &DecayCurve) -> String {
    let mut s = String::new();
    for (k, v) in provenance {
        writeln!(s, "# {k}: {v}").unwrap();
    }
    writeln!(s, "{HEADER}").unwrap();
    for i in 0..curve.len() {
        writeln!(s, "{},{},{}", curve.tau[i], curve.mean[i], curve.stderr[i]).unwrap();
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// A curve read back from disk together with its provenance lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub provenance: Provenance,
    pub tau: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl CurveFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.provenance.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_curve(&self, readout: String, n: u32) -> DecayCurve {
        DecayCurve {
            readout,
            n,
            seed: self.get("seed").and_then(|s| s.parse().ok()).unwrap_or(0),
            tau: self.tau.clone(),
            mean: self.mean.clone(),
            stderr: self.stderr.clone(),
        }
    }
}

pub fn parse_curve(text: &str, origin: &str) -> CliResult<CurveFile> {
    let mut provenance = Vec::new();
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.starts_with('#') => {
                let body = l[1..].trim();
                if let Some((k, v)) = body.split_once(':') {
                    provenance.push((k.trim().to_string(), v.trim().to_string()));
                }
            }
            Some((_, l)) if l.trim().is_empty() => {}
            Some((_, l)) => break l,
            None => return Err(CliError::parse(origin, "missing header line")),
        }
    };
    if header.trim() != HEADER {
        return Err(CliError::parse(origin, format!("expected header `{HEADER}`, found `{header}`")));
    }
    let (mut tau, mut mean, mut stderr) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Vec<f64> = fields
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::parse(origin, format!("line {}: {e}", i + 1)))?;
        if parsed.len() != 3 {
            return Err(CliError::parse(origin, format!("line {}: expected 3 fields", i + 1)));
        }
        tau.push(parsed[0]);
        mean.push(parsed[1]);
        stderr.push(parsed[2]);
    }
    if tau.is_empty() {
        return Err(CliError::parse(origin, "no data rows"));
    }
    Ok(CurveFile {
        provenance,
        tau,
        mean,
        stderr,
    })
}

pub fn read_curve(path: &Path) -> CliResult<CurveFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_curve(&text, &path.display().to_string())
}
