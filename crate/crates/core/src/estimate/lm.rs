//! Weighted Levenberg-Marquardt with Marquardt (diagonal) scaling.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

use super::models::FitModel;

pub(crate) const MAX_ITERATIONS: usize = 200;
const STEP_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1e16;

pub(crate) struct Solution {
    pub params: Vec<f64>,
    pub cost: f64,
    pub converged: bool,
    pub iterations: usize,
    pub hit_bound: bool,
    /// Undamped JᵀWJ at the returned parameters.
    pub normal: DMatrix<f64>,
}

/// Residuals r = y − f and the weighted normal system at `p`.
fn linearize<M: FitModel>(
    model: &M,
    p: &[f64],
    x: &[f64],
    y: &[f64],
    w: &[f64],
) -> Result<(f64, DMatrix<f64>, DVector<f64>)> {
    let k = p.len();
    let mut a = DMatrix::zeros(k, k);
    let mut b = DVector::zeros(k);
    let mut grad = vec![0.0; k];
    let mut cost = 0.0;
    for i in 0..x.len() {
        let f = model.gradient(p, x[i], &mut grad)?;
        let r = y[i] - f;
        cost += w[i] * r * r;
        for j in 0..k {
            b[j] += w[i] * grad[j] * r;
            for l in 0..=j {
                a[(j, l)] += w[i] * grad[j] * grad[l];
            }
        }
    }
    for j in 0..k {
        for l in 0..j {
            a[(l, j)] = a[(j, l)];
        }
    }
    Ok((cost, a, b))
}

pub(crate) fn cost<M: FitModel>(
    model: &M,
    p: &[f64],
    x: &[f64],
    y: &[f64],
    w: &[f64],
) -> Result<f64> {
    let mut c = 0.0;
    for i in 0..x.len() {
        let r = y[i] - model.value(p, x[i])?;
        c += w[i] * r * r;
    }
    Ok(c)
}

fn relative_step(step: &[f64], p: &[f64]) -> f64 {
    step.iter()
        .zip(p)
        .map(|(d, v)| d.abs() / (v.abs() + f64::EPSILON))
        .fold(0.0, f64::max)
}

pub(crate) fn minimize<M: FitModel>(
    model: &M,
    init: &[f64],
    x: &[f64],
    y: &[f64],
    w: &[f64],
) -> Result<Solution> {
    let mut p = init.to_vec();
    let mut hit_bound = model.project(&mut p);
    let (mut c, mut a, mut b) = linearize(model, &p, x, y, w)?;
    let mut lambda = 1e-3;
    let mut converged = c == 0.0;
    let mut iterations = 0;

    while !converged && iterations < MAX_ITERATIONS {
        iterations += 1;
        loop {
            let mut damped = a.clone();
            for j in 0..p.len() {
                let d = a[(j, j)].max(f64::MIN_POSITIVE);
                damped[(j, j)] += lambda * d;
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&b),
                None => {
                    lambda *= 10.0;
                    if lambda > LAMBDA_MAX {
                        converged = true;
                        break;
                    }
                    continue;
                }
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(v, d)| v + d).collect();
            let clipped = model.project(&mut trial);
            let actual: Vec<f64> = trial.iter().zip(&p).map(|(t, v)| t - v).collect();
            let c_trial = cost(model, &trial, x, y, w)?;
            if c_trial.is_finite() && c_trial <= c {
                let drop = (c - c_trial) / c.max(f64::MIN_POSITIVE);
                let small_step = relative_step(&actual, &p) < STEP_TOL;
                p = trial;
                hit_bound |= clipped;
                (c, a, b) = linearize(model, &p, x, y, w)?;
                lambda = (lambda / 10.0).max(1e-12);
                if small_step || drop < COST_TOL || c == 0.0 {
                    converged = true;
                }
                break;
            }
            if relative_step(&actual, &p) < STEP_TOL {
                // no representable improvement left
                converged = true;
                break;
            }
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                converged = true;
                break;
            }
        }
    }

    Ok(Solution {
        params: p,
        cost: c,
        converged,
        iterations,
        hit_bound,
        normal: a,
    })
}
