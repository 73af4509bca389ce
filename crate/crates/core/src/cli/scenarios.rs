//! Packaged scenarios: the degenerate-noise time average and the
//! bounded-coefficient case study.

use serde::{Deserialize, Serialize};

use super::config::{CaseStudyParams, Example25Params};
use crate::constants::{case_study_beta_threshold, case_study_kappa, CalibrationSet};
use crate::dispersion::{measure_dispersion, BallSpec, DispersionReport};
use crate::error::{Error, Result};
use crate::model::{DiffusionSpec, SdeModel, VectorFieldSpec};
use crate::seed::derive_seed;
use crate::simulate::{advance, steps_in, FlowEnsemble, NoisePath, Taming};
use crate::stats::{mean, pairwise_sum};

const SIMPSON_MAX_DEPTH: u32 = 48;

fn simpson_step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!("no convergence on [{a}, {b}]")));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    if ![fa, fb, fm].iter().all(|v| v.is_finite()) {
        return Err(Error::Quadrature("integrand not finite at the sample points".into()));
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

/// `V(y) = ∫_0^y clamp(-s, -1, 1) ds`.
pub fn clamp_potential(y: f64) -> f64 {
    let a = y.abs();
    if a <= 1.0 {
        -0.5 * a * a
    } else {
        0.5 - a
    }
}

/// `∫ |y|^{-q} dπ_ε` for the stationary density `∝ exp(2V(y)/ε²)`.
///
/// The singular factor on `[0, 1]` is removed by `y = u^{1/(1-q)}`; the
/// exponential tail is cut where it falls below `e^{-40}`.
pub fn example_2_5_oracle(eps: f64, q: f64) -> Result<f64> {
    if !(eps > 0.0) || !(0.0..1.0).contains(&q) {
        return Err(Error::param("need eps > 0 and 0 <= q < 1"));
    }
    let e2 = eps * eps;
    let dens = |y: f64| (2.0 * clamp_potential(y) / e2).exp();
    let tol = 1e-13;
    let s = 1.0 / (1.0 - q);
    let top = 1.0 + 20.0 * e2;
    let num = s * adaptive_simpson(|u| dens(u.powf(s)), 0.0, 1.0, tol)?
        + adaptive_simpson(|y| y.powf(-q) * dens(y), 1.0, top, tol)?;
    let den = adaptive_simpson(dens, 0.0, 1.0, tol)? + adaptive_simpson(dens, 1.0, top, tol)?;
    Ok(num / den)
}

/// The 2-D system with drift `(|y|^{-q}, clamp(-y, -1, 1))` and noise `ε I`.
pub fn example_2_5_model(eps: f64, q: f64) -> SdeModel {
    let mut m = SdeModel::brownian(
        2,
        VectorFieldSpec::Sum {
            terms: vec![
                VectorFieldSpec::PowerSingular {
                    q,
                    source: 1,
                    target: 0,
                    scale: 1.0,
                },
                VectorFieldSpec::ClampLinear { component: 1 },
            ],
        },
    );
    m.sigma = DiffusionSpec::Scalar { eps };
    m.k1 = eps * eps;
    m.k2 = eps * eps;
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example25Row {
    pub eps: f64,
    /// Mean over replicas of `(1/n) Σ_k B(Y_{t_k})`.
    pub empirical: f64,
    pub per_replica: Vec<f64>,
    pub oracle: f64,
    pub relative_deviation: f64,
    pub singular_hits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example25Report {
    pub q: f64,
    pub horizon: f64,
    pub dt: f64,
    pub rows: Vec<Example25Row>,
    /// Empirical averages strictly increase as ε decreases.
    pub increasing_as_eps_decreases: bool,
    pub oracle_increasing: bool,
}

/// Long-run average of `B(Y)` with `B(0) = 0`, started from the origin.
pub fn run_example_2_5(p: &Example25Params, base_seed: u64, taming: Taming) -> Result<Example25Report> {
    if p.epsilons.is_empty() {
        return Err(Error::Empty("epsilons"));
    }
    if !(0.0..1.0).contains(&p.q) || p.replicas == 0 {
        return Err(Error::param("need 0 <= q < 1 and replicas > 0"));
    }
    let n = steps_in(p.horizon, p.dt)?;
    if n <= 0 {
        return Err(Error::param("horizon must be positive"));
    }
    let b = |y: f64| if y == 0.0 { 0.0 } else { y.abs().powf(-p.q) };
    let mut rows = Vec::with_capacity(p.epsilons.len());
    for (ei, &eps) in p.epsilons.iter().enumerate() {
        let model = example_2_5_model(eps, p.q);
        model.validate()?;
        let oracle = example_2_5_oracle(eps, p.q)?;
        let mut per_replica = Vec::with_capacity(p.replicas);
        let mut hits = 0;
        for k in 0..p.replicas {
            let seed = derive_seed(base_seed, "example-2-5", (ei * p.replicas + k) as u64);
            let noise = NoisePath::new(seed, 2, p.dt)?;
            let mut ens = FlowEnsemble::new(&model, &[vec![0.0, 0.0]], 0, p.dt)?;
            // Left-endpoint samples: the start and all but the last step.
            let mut vals = Vec::with_capacity(n as usize);
            vals.push(b(0.0));
            hits += advance(&model, &mut ens, &noise, n as u64 - 1, taming, |e| vals.push(b(e.coordinate(0, 1))))?;
            if ens.any_diverged() {
                return Err(Error::NonFinite {
                    point: ens.position(0),
                    value: f64::NAN,
                });
            }
            per_replica.push(pairwise_sum(&vals) / vals.len() as f64);
        }
        let empirical = mean(&per_replica);
        rows.push(Example25Row {
            eps,
            empirical,
            per_replica,
            oracle,
            relative_deviation: (empirical - oracle).abs() / oracle,
            singular_hits: hits,
        });
    }
    let mut order: Vec<&Example25Row> = rows.iter().collect();
    order.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let increasing_as_eps_decreases = order.windows(2).all(|w| w[1].empirical > w[0].empirical);
    let oracle_increasing = order.windows(2).all(|w| w[1].oracle > w[0].oracle);
    Ok(Example25Report {
        q: p.q,
        horizon: p.horizon,
        dt: p.dt,
        rows,
        increasing_as_eps_decreases,
        oracle_increasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub eps: f64,
    pub b_sup: f64,
    pub b1_sup: f64,
    pub b2_sup: f64,
    pub grad_sigma_sup: f64,
    pub kappa_bound: f64,
    pub beta_threshold: f64,
    /// Largest per-replica `κ̂`.
    pub kappa_measured: f64,
    pub kappa_median: f64,
    /// Calibration factor that would make the bound cover `κ̂`.
    pub calibration_needed: f64,
    pub pass: bool,
    pub dispersion: DispersionReport,
}

/// Evaluates the bounded-coefficient formulas and measures `κ̂`.
pub fn run_bounded_case_study(
    model: &SdeModel,
    p: &CaseStudyParams,
    calibration: &CalibrationSet,
    base_seed: u64,
    taming: Taming,
) -> Result<CaseStudyReport> {
    model.validate()?;
    let b1_sup = model
        .b1
        .sup_bound()
        .ok_or_else(|| Error::Config("b1 has no finite sup bound".into()))?;
    let b2_sup = model
        .b2
        .sup_bound()
        .ok_or_else(|| Error::Config("b2 has no finite sup bound".into()))?;
    let grad_sigma_sup = match p.grad_sigma_sup {
        Some(v) => v,
        None if model.sigma.is_constant() => 0.0,
        None => return Err(Error::Config("declare grad_sigma_sup for non-constant diffusion".into())),
    };
    let b_sup = b1_sup + b2_sup;
    let d = model.dim;
    let kappa_bound = case_study_kappa(model.k1, model.k2, b_sup, grad_sigma_sup, d, p.eps, calibration.case_c1)?;
    let beta_threshold =
        case_study_beta_threshold(model.k1, model.k2, b1_sup, b2_sup, grad_sigma_sup, d, p.eps, calibration.case_c2)?;
    let ball = p.dispersion.ball.clone().unwrap_or(BallSpec {
        center: vec![0.0; d],
        radius: 1.0,
        resolution: 16,
    });
    let dp = &p.dispersion;
    let dispersion = measure_dispersion(model, &ball, dp.horizon, dp.dt, dp.record_every, dp.replicas, base_seed, taming)?;
    let kappas: Vec<f64> = dispersion.replicas.iter().map(|r| r.kappa_hat).collect();
    let kappa_measured = kappas.iter().copied().fold(0.0, f64::max);
    let kappa_median = crate::stats::median(&kappas);
    let unit = kappa_bound / calibration.case_c1;
    Ok(CaseStudyReport {
        eps: p.eps,
        b_sup,
        b1_sup,
        b2_sup,
        grad_sigma_sup,
        kappa_bound,
        beta_threshold,
        kappa_measured,
        kappa_median,
        calibration_needed: kappa_measured / unit,
        pass: kappa_measured <= kappa_bound,
        dispersion,
    })
}
