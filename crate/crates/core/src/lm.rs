//! Damped Gauss-Newton (Levenberg-Marquardt) for small parameter counts.
//!
//! Minimizes `Σ w_i (y_i - f(x_i; p))²`. The damping starts at `1e-3`, grows
//! by 10 on a rejected step and shrinks by 10 on an accepted one; iteration
//! stops once the relative parameter step falls below `xtol`.

use nalgebra::{DMatrix, DVector};

pub trait Model {
    fn num_params(&self) -> usize;

    fn value(&self, x: f64, params: &[f64]) -> f64;

    /// Partial derivatives of [`Model::value`] with respect to each parameter.
    fn gradient(&self, x: f64, params: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    pub initial_damping: f64,
    pub damping_up: f64,
    pub damping_down: f64,
    pub max_iterations: usize,
    pub xtol: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            initial_damping: 1e-3,
            damping_up: 10.0,
            damping_down: 10.0,
            max_iterations: 200,
            xtol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub covariance: DMatrix<f64>,
    /// Weighted residual sum of squares at `params`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Problem<'a, M> {
    model: &'a M,
    xs: &'a [f64],
    ys: &'a [f64],
    weights: Option<&'a [f64]>,
}

impl<M: Model> Problem<'_, M> {
    fn weight(&self, i: usize) -> f64 {
        self.weights.map_or(1.0, |w| w[i])
    }

    fn cost(&self, p: &[f64]) -> f64 {
        self.xs
            .iter()
            .zip(self.ys)
            .enumerate()
            .map(|(i, (&x, &y))| self.weight(i) * (y - self.model.value(x, p)).powi(2))
            .sum()
    }

    /// Normal matrix `JᵀWJ` and right-hand side `JᵀW r`.
    fn normal_equations(&self, p: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.model.num_params();
        let mut jtj = DMatrix::zeros(n, n);
        let mut jtr = DVector::zeros(n);
        let mut g = vec![0.0; n];
        for (i, (&x, &y)) in self.xs.iter().zip(self.ys).enumerate() {
            let w = self.weight(i);
            let r = y - self.model.value(x, p);
            self.model.gradient(x, p, &mut g);
            for a in 0..n {
                jtr[a] += w * g[a] * r;
                for b in 0..n {
                    jtj[(a, b)] += w * g[a] * g[b];
                }
            }
        }
        (jtj, jtr)
    }
}

/// Covariance `(JᵀWJ)⁻¹`, falling back to a pseudo-inverse when singular.
fn invert(jtj: &DMatrix<f64>) -> DMatrix<f64> {
    jtj.clone()
        .cholesky()
        .map(|c| c.inverse())
        .unwrap_or_else(|| jtj.clone().pseudo_inverse(1e-14).unwrap_or_else(|_| DMatrix::zeros(jtj.nrows(), jtj.ncols())))
}

/// Fits `model` to `(xs, ys)`. With `weights`, standard errors are absolute
/// (`1/σ²` weights); without, the covariance is scaled by the reduced χ².
pub fn minimize<M: Model>(
    model: &M,
    xs: &[f64],
    ys: &[f64],
    weights: Option<&[f64]>,
    initial: &[f64],
    config: &LmConfig,
) -> LmOutcome {
    assert_eq!(xs.len(), ys.len());
    assert_eq!(initial.len(), model.num_params());
    let problem = Problem { model, xs, ys, weights };
    let n = model.num_params();

    let mut p = initial.to_vec();
    let mut cost = problem.cost(&p);
    let mut lambda = config.initial_damping;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let (jtj, jtr) = problem.normal_equations(&p);
        let mut damped = jtj.clone();
        for a in 0..n {
            damped[(a, a)] += lambda * jtj[(a, a)].max(1e-300);
        }
        let Some(step) = damped.lu().solve(&jtr) else {
            lambda *= config.damping_up;
            continue;
        };
        let rel_step = step
            .iter()
            .zip(&p)
            .map(|(d, v)| d.abs() / (v.abs() + 1e-12))
            .fold(0.0, f64::max);
        let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(v, d)| v + d).collect();
        let trial_cost = problem.cost(&trial);
        if trial_cost.is_finite() && trial_cost <= cost {
            p = trial;
            cost = trial_cost;
            lambda /= config.damping_down;
            if rel_step < config.xtol {
                converged = true;
                break;
            }
        } else {
            lambda *= config.damping_up;
            if rel_step < config.xtol || cost == 0.0 {
                // No downhill move even at vanishing step length.
                converged = true;
                break;
            }
        }
    }

    let (jtj, _) = problem.normal_equations(&p);
    let mut covariance = invert(&jtj);
    if weights.is_none() {
        let dof = xs.len().saturating_sub(n).max(1);
        covariance *= cost / dof as f64;
    }
    let std_errors = (0..n).map(|a| covariance[(a, a)].max(0.0).sqrt()).collect();
    LmOutcome {
        params: p,
        std_errors,
        covariance,
        cost,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Line;

    impl Model for Line {
        fn num_params(&self) -> usize {
            2
        }
        fn value(&self, x: f64, p: &[f64]) -> f64 {
            p[0] + p[1] * x
        }
        fn gradient(&self, x: f64, _p: &[f64], out: &mut [f64]) {
            out[0] = 1.0;
            out[1] = x;
        }
    }

    struct Exponential;

    impl Model for Exponential {
        fn num_params(&self) -> usize {
            2
        }
        fn value(&self, x: f64, p: &[f64]) -> f64 {
            p[0] * (-p[1] * x).exp()
        }
        fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
            let e = (-p[1] * x).exp();
            out[0] = e;
            out[1] = -p[0] * x * e;
        }
    }

    #[test]
    fn linear_least_squares_matches_closed_form() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [1.1, 2.9, 5.2, 7.1, 8.8];
        let out = minimize(&Line, &xs, &ys, None, &[0.0, 0.0], &LmConfig::default());
        // Normal-equation solution computed by hand.
        let n = 5.0;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let icept = (sy - slope * sx) / n;
        assert!(out.converged);
        assert_relative_eq!(out.params[0], icept, max_relative = 1e-9);
        assert_relative_eq!(out.params[1], slope, max_relative = 1e-9);
        // Standard error of the slope for unweighted regression.
        let s2 = out.cost / (n - 2.0);
        let se_slope = (s2 / (sxx - sx * sx / n)).sqrt();
        assert_relative_eq!(out.std_errors[1], se_slope, max_relative = 1e-9);
    }

    #[test]
    fn nonlinear_exact_recovery() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * (-0.7 * x).exp()).collect();
        let out = minimize(&Exponential, &xs, &ys, None, &[1.0, 0.2], &LmConfig::default());
        assert!(out.converged);
        assert_relative_eq!(out.params[0], 2.5, max_relative = 1e-9);
        assert_relative_eq!(out.params[1], 0.7, max_relative = 1e-9);
    }

    #[test]
    fn iteration_cap_reported() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * (-0.7 * x).exp()).collect();
        let cfg = LmConfig {
            max_iterations: 2,
            ..LmConfig::default()
        };
        let out = minimize(&Exponential, &xs, &ys, None, &[1.0, 0.2], &cfg);
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
    }
}
