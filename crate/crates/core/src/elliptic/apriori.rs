//! λ-scaling of resolvent solutions against the a-priori decay exponents.

use serde::{Deserialize, Serialize};

use super::grid::localized_norm_of;
use super::{solve, EllipticProblem};
use crate::error::{Error, Result};
use crate::stats::linear_fit;

/// Slack added to the predicted exponents.
pub const SLOPE_SLACK: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriReport {
    pub lambdas: Vec<f64>,
    pub u_norms: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub p: f64,
    pub p_prime: f64,
    pub dims: usize,
    pub slope_u: f64,
    pub slope_grad: f64,
    pub predicted_u: f64,
    pub predicted_grad: f64,
    pub pass_u: bool,
    pub pass_grad: bool,
}

impl AprioriReport {
    pub fn pass(&self) -> bool {
        self.pass_u && self.pass_grad
    }
}

/// Predicted log-log slopes `(for ‖u‖, for ‖∇u‖)`.
pub fn predicted_slopes(dims: usize, p: f64, p_prime: f64) -> (f64, f64) {
    let shift = dims as f64 / p_prime - dims as f64 / p;
    (-(2.0 + shift) / 2.0, -(1.0 + shift) / 2.0)
}

/// Solves `template(λ)` for each λ and fits `log ‖u‖` and `log ‖∇u‖`
/// (both localized `L_{p'}` norms on the grid) against `log λ`.
pub fn verify_apriori<'a, F>(template: F, lambdas: &[f64], p: f64, p_prime: f64) -> Result<AprioriReport>
where
    F: Fn(f64) -> EllipticProblem<'a>,
{
    if lambdas.len() < 4 {
        return Err(Error::param("need at least 4 lambda values"));
    }
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 100.0 - 1e-9 {
        return Err(Error::param("lambda sweep must be positive and span at least two decades"));
    }
    if !(p >= 1.0 && p_prime >= 1.0) {
        return Err(Error::param("exponents must be at least 1"));
    }
    let mut u_norms = Vec::with_capacity(lambdas.len());
    let mut grad_norms = Vec::with_capacity(lambdas.len());
    let mut dims = 0;
    for &lambda in lambdas {
        let problem = template(lambda);
        if let Some(t) = problem.lambda_threshold {
            if lambda < t {
                return Err(Error::param(format!("lambda {lambda} is below the threshold {t}")));
            }
        }
        dims = problem.dims;
        let sol = solve(&problem)?;
        let u = &sol.u;
        u_norms.push(u.localized_norm(p_prime));
        let grad = |k: usize| u.gradient_at(k).iter().map(|g| g * g).sum::<f64>().sqrt();
        grad_norms.push(localized_norm_of(u, grad, p_prime));
    }
    if u_norms.iter().chain(&grad_norms).any(|v| !(*v > 0.0)) {
        return Err(Error::Inconsistent("zero solution: the sweep needs nonzero data".into()));
    }
    let lx: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let fit = |ys: &[f64]| -> Result<f64> {
        let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
        Ok(linear_fit(&lx, &ly).slope)
    };
    let slope_u = fit(&u_norms)?;
    let slope_grad = fit(&grad_norms)?;
    let (predicted_u, predicted_grad) = predicted_slopes(dims, p, p_prime);
    Ok(AprioriReport {
        lambdas: lambdas.to_vec(),
        u_norms,
        grad_norms,
        p,
        p_prime,
        dims,
        slope_u,
        slope_grad,
        predicted_u,
        predicted_grad,
        pass_u: slope_u <= predicted_u + SLOPE_SLACK,
        pass_grad: slope_grad <= predicted_grad + SLOPE_SLACK,
    })
}
