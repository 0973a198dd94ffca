//! Monotone accelerated proximal gradient with adaptive momentum restart and
//! a Lipschitz estimate that backtracks upward and relaxes downward. The
//! smooth part is `C·Σ loss`; the penalty enters through its proximal map,
//! and the intercept takes a plain gradient step.
//!
//! Iterates use the centered intercept `b' = b + μᵀw`, where `μ` holds the
//! column means, so that `Xw + b = (X − 1μᵀ)w + b'`. The objective is
//! unchanged because the intercept is not penalized, but the common mean
//! direction of raw count rows no longer dominates the curvature. When the
//! intercept is penalized this reparameterization is not exact, so it is
//! skipped and the intercept goes through the proximal map too.

use serde::{Deserialize, Serialize};

use super::objective::{Loss, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stopping {
    /// Relative objective decrease between accepted iterates.
    pub rel_tol: f64,
    /// Norm of the proximal gradient mapping.
    pub grad_tol: f64,
    pub max_iter: usize,
}

impl Default for Stopping {
    fn default() -> Self {
        Stopping {
            rel_tol: 1e-4,
            grad_tol: 1e-3,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each iteration; non-increasing.
    pub trace: Vec<f64>,
}

/// Minimizer of the loss over the intercept alone with `w = 0`.
pub fn intercept_only_optimum(loss: Loss, targets: &[f64]) -> f64 {
    let pos = targets.iter().filter(|&&t| t > 0.0).count() as f64;
    let neg = targets.len() as f64 - pos;
    match loss {
        Loss::Logistic => (pos / neg).ln(),
        Loss::SquaredHinge => (pos - neg) / (pos + neg),
    }
}

const SHRINK: f64 = 0.5;
const MIN_LIP: f64 = 1e-12;
const MAX_LIP: f64 = 1e300;

pub fn minimize(problem: &Problem, stopping: &Stopping) -> Solution {
    let n = problem.design.n_cols();
    let mut x = vec![0.0; n];
    let penalize_b = problem.penalty.penalize_intercept;
    let mean = if penalize_b {
        vec![0.0; n]
    } else {
        problem.design.column_means()
    };
    let shift = |w: &[f64]| -> f64 { w.iter().zip(&mean).map(|(a, m)| a * m).sum() };
    // centered smooth value and gradient via the chain rule
    let value = |w: &[f64], b: f64| problem.smooth_value(w, b - shift(w));
    let gradient = |w: &[f64], b: f64, g: &mut [f64]| {
        let (f, gb) = problem.smooth_gradient(w, b - shift(w), g);
        for (gi, m) in g.iter_mut().zip(&mean) {
            *gi -= m * gb;
        }
        (f, gb)
    };

    let mut xb = intercept_only_optimum(problem.loss, problem.targets);
    let mut fx = problem.objective(&x, xb);

    let mut y = x.clone();
    let mut yb = xb;
    let mut z = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut t = 1.0f64;
    let mut lip = 1.0f64;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < stopping.max_iter {
        iterations += 1;
        let (fy, gb) = gradient(&y, yb, &mut g);

        // let the estimate shrink, then grow it until the quadratic model
        // majorizes f at the trial point
        lip = (lip * SHRINK).max(MIN_LIP);
        let (zb, fz, step_norm) = loop {
            let step = 1.0 / lip;
            for i in 0..n {
                z[i] = y[i] - step * g[i];
            }
            problem.penalty.prox(&mut z, step);
            let mut zb = yb - step * gb;
            if penalize_b {
                let mut b = [zb];
                problem.penalty.prox(&mut b, step);
                zb = b[0];
            }
            let fz = value(&z, zb);
            let mut lin = gb * (zb - yb);
            let mut sq = (zb - yb) * (zb - yb);
            for i in 0..n {
                let d = z[i] - y[i];
                lin += g[i] * d;
                sq += d * d;
            }
            let bound = fy + lin + 0.5 * lip * sq;
            if fz <= bound + 1e-12 * fy.abs().max(1.0) || lip > MAX_LIP {
                break (zb, fz, sq.sqrt());
            }
            lip *= 2.0;
        };
        let fz_full = fz + problem.penalty.value(&z) + problem.intercept_penalty(zb);
        let grad_map = lip * step_norm;
        let prev = fx;

        if fz_full <= fx {
            // momentum restart when the step direction opposes the
            // extrapolation, otherwise the usual update
            let mut dot = (yb - zb) * (zb - xb);
            for i in 0..n {
                dot += (y[i] - z[i]) * (z[i] - x[i]);
            }
            let t_next = if dot > 0.0 {
                1.0
            } else {
                0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
            };
            let c = (t - 1.0) / t_next;
            let c = if dot > 0.0 { 0.0 } else { c };
            for i in 0..n {
                y[i] = z[i] + c * (z[i] - x[i]);
                x[i] = z[i];
            }
            yb = zb + c * (zb - xb);
            xb = zb;
            fx = fz_full;
            t = t_next;
        } else {
            // rejected step: restart from the best point
            y.copy_from_slice(&x);
            yb = xb;
            t = 1.0;
        }
        trace.push(fx);

        let rel = (prev - fx) / prev.abs().max(f64::MIN_POSITIVE);
        if rel <= stopping.rel_tol && grad_map <= stopping.grad_tol {
            converged = true;
            break;
        }
    }

    let intercept = xb - shift(&x);
    Solution {
        weights: x,
        intercept,
        objective: fx,
        iterations,
        converged,
        trace,
    }
}
