//! Numerical Zvonkin transform `Φ = id + U`.
//!
//! Each component of `U` solves `λ u - ½ a_ij ∂_ij u - b·∇u = b^(l)`, the
//! `½`-convention system; [`super::EllipticProblem::a_scale`] is `½` here.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::GridFunction;
use super::{solve, EllipticProblem};
use crate::constants::{gamma_tilde, TransformedNorms};
use crate::error::{Error, Result};
use crate::model::probe::operator_norm;
use crate::model::SdeModel;

pub const PSI_RESIDUAL: f64 = 1e-10;
pub const PSI_MAX_ITER: usize = 200;
pub const ROUND_TRIP_TOL: f64 = 1e-8;
pub const ELLIPTICITY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZvonkinTransform {
    pub lambda: f64,
    pub dims: usize,
    pub u: Vec<GridFunction>,
    /// `grad_u[l][a] = ∂_a U^l`.
    pub grad_u: Vec<Vec<GridFunction>>,
    pub u_sup: f64,
    /// Largest operator norm of the discrete Jacobian.
    pub grad_u_sup: f64,
    pub certified: bool,
    /// Range of `det(I + ∇U)` over the grid.
    pub det_min: f64,
    pub det_max: f64,
    pub det_in_range: bool,
    /// `Ψ(y)` per node, present only when certified.
    pub psi: Option<Vec<Vec<f64>>>,
    pub psi_iterations: usize,
    pub round_trip_error: f64,
    pub b_tilde: Vec<GridFunction>,
    /// Row-major entries of `σ̃`.
    pub sigma_tilde: Vec<GridFunction>,
    pub k1_tilde: f64,
    pub k2_tilde: f64,
    pub ellipticity_min: f64,
    pub ellipticity_max: f64,
    pub ellipticity_ok: bool,
    pub transformed: Option<TransformedNorms>,
    pub max_residual: f64,
    pub below_threshold: bool,
}

impl ZvonkinTransform {
    /// `Φ(x) = x + U(x)` with interpolated `U`.
    pub fn phi(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.u).map(|(xi, u)| xi + u.interpolate(x)).collect()
    }

    /// JSON summary without the gridded fields.
    pub fn certificate(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.lambda,
            "dims": self.dims,
            "nodes": self.u[0].len(),
            "u_sup": self.u_sup,
            "grad_u_sup": self.grad_u_sup,
            "certified": self.certified,
            "det_min": self.det_min,
            "det_max": self.det_max,
            "det_in_range": self.det_in_range,
            "psi_iterations": self.psi_iterations,
            "round_trip_error": self.round_trip_error,
            "k1_tilde": self.k1_tilde,
            "k2_tilde": self.k2_tilde,
            "ellipticity_min": self.ellipticity_min,
            "ellipticity_max": self.ellipticity_max,
            "ellipticity_ok": self.ellipticity_ok,
            "transformed": self.transformed,
            "max_residual": self.max_residual,
            "below_threshold": self.below_threshold,
        })
    }
}

fn jacobian_at(grad_u: &[Vec<GridFunction>], x: &[f64], node: Option<usize>) -> Vec<f64> {
    let d = grad_u.len();
    let mut j = vec![0.0; d * d];
    for l in 0..d {
        for a in 0..d {
            j[l * d + a] = match node {
                Some(k) => grad_u[l][a].values[k],
                None => grad_u[l][a].interpolate(x),
            };
        }
    }
    j
}

fn invert(u: &[GridFunction], y: &[f64]) -> Result<(Vec<f64>, usize)> {
    let mut x = y.to_vec();
    for it in 1..=PSI_MAX_ITER {
        for (l, ul) in u.iter().enumerate() {
            x[l] = y[l] - ul.interpolate(&x);
        }
        let res = u
            .iter()
            .enumerate()
            .map(|(l, ul)| (x[l] + ul.interpolate(&x) - y[l]).powi(2))
            .sum::<f64>()
            .sqrt();
        if res <= PSI_RESIDUAL {
            return Ok((x, it));
        }
    }
    Err(Error::InverseMap { point: y.to_vec() })
}

/// Computes `U`, certifies the smallness bounds and, when certified,
/// inverts `Φ` on the grid and grids the transformed coefficients.
pub fn zvonkin_transform(
    model: &SdeModel,
    lambda: f64,
    domain_radius: f64,
    h: f64,
    lambda_threshold: Option<f64>,
) -> Result<ZvonkinTransform> {
    model.validate()?;
    let d = model.dim;
    if d > 2 {
        return Err(Error::param("the Zvonkin transform supports 1 or 2 dimensions"));
    }
    let mut u = Vec::with_capacity(d);
    let mut max_residual = 0.0f64;
    let mut below_threshold = false;
    for l in 0..d {
        let problem = EllipticProblem {
            lambda,
            a_scale: 0.5,
            a: Box::new(|x, out| out.copy_from_slice(&model.diffusion_a(x))),
            b: Box::new(|x, out| {
                model.drift(x, out);
                out.iter_mut().for_each(|v| *v = -*v);
            }),
            f: Box::new(move |x| {
                let mut b = vec![0.0; d];
                model.drift(x, &mut b);
                b[l]
            }),
            domain_radius,
            h,
            dims: d,
            lambda_threshold,
        };
        let sol = solve(&problem)?;
        max_residual = max_residual.max(sol.residual);
        below_threshold |= sol.below_threshold;
        u.push(sol.u);
    }
    let grad_u: Vec<Vec<GridFunction>> = u.iter().map(|c| c.gradient()).collect();
    let nodes = u[0].len();
    let u_sup = (0..nodes)
        .map(|k| u.iter().map(|c| c.values[k].powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let (mut grad_u_sup, mut det_min, mut det_max) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..nodes {
        let mut j = jacobian_at(&grad_u, &[], Some(k));
        grad_u_sup = grad_u_sup.max(operator_norm(&j, d));
        for a in 0..d {
            j[a * d + a] += 1.0;
        }
        let det = if d == 1 { j[0] } else { j[0] * j[3] - j[1] * j[2] };
        det_min = det_min.min(det);
        det_max = det_max.max(det);
    }
    let det_in_range = det_min >= 0.5f64.powi(d as i32) && det_max <= 1.5f64.powi(d as i32);
    let certified = u_sup < 0.5 && grad_u_sup < 0.5;
    let k1_tilde = model.k1 / 4.0;
    let k2_tilde = 9.0 * model.k2 / 4.0;
    let template = GridFunction::zeros(d, u[0].n, h, u[0].origin);
    let mut out = ZvonkinTransform {
        lambda,
        dims: d,
        u,
        grad_u,
        u_sup,
        grad_u_sup,
        certified,
        det_min,
        det_max,
        det_in_range,
        psi: None,
        psi_iterations: 0,
        round_trip_error: f64::NAN,
        b_tilde: vec![template.clone(); d],
        sigma_tilde: vec![template.clone(); d * d],
        k1_tilde,
        k2_tilde,
        ellipticity_min: f64::NAN,
        ellipticity_max: f64::NAN,
        ellipticity_ok: false,
        transformed: None,
        max_residual,
        below_threshold,
    };
    if !certified {
        return Ok(out);
    }

    let inverted: Vec<(Vec<f64>, usize)> = (0..nodes)
        .into_par_iter()
        .map(|k| invert(&out.u, &template.coord(k)))
        .collect::<Result<_>>()?;
    let mut round_trip = 0.0f64;
    let mut psi = Vec::with_capacity(nodes);
    let (mut e_min, mut e_max) = (f64::INFINITY, 0.0f64);
    for (k, (x, it)) in inverted.into_iter().enumerate() {
        out.psi_iterations = out.psi_iterations.max(it);
        let y = template.coord(k);
        let back = out.phi(&x);
        round_trip = round_trip.max(back.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        for l in 0..d {
            out.b_tilde[l].values[k] = lambda * out.u[l].interpolate(&x);
        }
        let mut jac = jacobian_at(&out.grad_u, &x, None);
        for a in 0..d {
            jac[a * d + a] += 1.0;
        }
        let sigma = model.diffusion_matrix(&x);
        let st = DMatrix::from_row_slice(d, d, &jac) * DMatrix::from_row_slice(d, d, &sigma);
        for i in 0..d {
            for j in 0..d {
                out.sigma_tilde[i * d + j].values[k] = st[(i, j)];
            }
        }
        let eig = SymmetricEigen::new(&st * st.transpose()).eigenvalues;
        e_min = e_min.min(eig.min());
        e_max = e_max.max(eig.max());
        psi.push(x);
    }
    if round_trip > ROUND_TRIP_TOL {
        let worst = (0..nodes)
            .find(|&k| {
                let y = template.coord(k);
                out.phi(&psi[k]).iter().zip(&y).any(|(a, b)| (a - b).abs() > ROUND_TRIP_TOL)
            })
            .unwrap_or(0);
        return Err(Error::InverseMap { point: template.coord(worst) });
    }
    out.round_trip_error = round_trip;
    out.psi = Some(psi);
    out.ellipticity_min = e_min;
    out.ellipticity_max = e_max;
    out.ellipticity_ok = e_min >= k1_tilde - ELLIPTICITY_SLACK && e_max <= k2_tilde + ELLIPTICITY_SLACK;

    let sup = |fs: &[GridFunction]| {
        (0..nodes)
            .map(|k| {
                let m: Vec<f64> = fs.iter().map(|f| f.values[k]).collect();
                if fs.len() == d { m.iter().map(|v| v * v).sum::<f64>().sqrt() } else { operator_norm(&m, d) }
            })
            .fold(0.0, f64::max)
    };
    let grad_sup = |fs: &[GridFunction]| {
        let grads: Vec<Vec<GridFunction>> = fs.iter().map(|f| f.gradient()).collect();
        (0..nodes)
            .map(|k| grads.iter().flatten().map(|g| g.values[k].powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    };
    let b_sup = sup(&out.b_tilde);
    let grad_sigma = grad_sup(&out.sigma_tilde);
    out.transformed = Some(TransformedNorms {
        b_sup,
        sigma_sup: sup(&out.sigma_tilde),
        grad_b: grad_sup(&out.b_tilde),
        grad_sigma,
        k2_tilde,
        gamma_tilde: gamma_tilde(k1_tilde, k2_tilde, grad_sigma, b_sup, f64::INFINITY, f64::INFINITY, d, 1.0)?,
    });
    Ok(out)
}
