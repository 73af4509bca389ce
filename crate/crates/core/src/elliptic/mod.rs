//! Finite-difference resolvent solver, a-priori scaling checks and the
//! numerical Zvonkin transform.
//!
//! The generic problem is
//! `λ u - s a_ij ∂_ij u + b·∇u = f` on `[-R, R]^dims`, `u = 0` on the
//! boundary, where `s` is [`EllipticProblem::a_scale`]. The resolvent form
//! uses `s = 1`; the Zvonkin system uses `s = 1/2` and convection `-b`.

pub mod apriori;
pub mod grid;
pub mod sparse;
pub mod zvonkin;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DiffusionSpec, ScalarFieldSpec, VectorFieldSpec};
pub use apriori::{verify_apriori, AprioriReport};
pub use grid::GridFunction;
pub use zvonkin::{zvonkin_transform, ZvonkinTransform};

/// Iteration budget of the 2-D solver.
pub const ITERATION_BUDGET: usize = 10_000;
/// Required relative residual of the assembled system.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub type ScalarFn<'a> = Box<dyn Fn(&[f64]) -> f64 + Sync + 'a>;
/// Writes a vector (length `dims`) into the output slice.
pub type VectorFn<'a> = Box<dyn Fn(&[f64], &mut [f64]) + Sync + 'a>;
/// Writes a row-major `dims x dims` matrix into the output slice.
pub type MatrixFn<'a> = Box<dyn Fn(&[f64], &mut [f64]) + Sync + 'a>;

pub struct EllipticProblem<'a> {
    pub lambda: f64,
    pub a_scale: f64,
    pub a: MatrixFn<'a>,
    pub b: VectorFn<'a>,
    pub f: ScalarFn<'a>,
    pub domain_radius: f64,
    pub h: f64,
    pub dims: usize,
    /// Advisory threshold; solutions below it are tagged.
    pub lambda_threshold: Option<f64>,
}

/// `a = sigma sigma^T` as a matrix oracle.
pub fn a_from_sigma(sigma: &DiffusionSpec, dims: usize) -> MatrixFn<'_> {
    Box::new(move |x, out| {
        let mut s = vec![0.0; dims * dims];
        sigma.eval(x, &mut s);
        for i in 0..dims {
            for j in 0..dims {
                out[i * dims + j] = (0..dims).map(|k| s[i * dims + k] * s[j * dims + k]).sum();
            }
        }
    })
}

impl<'a> EllipticProblem<'a> {
    /// Resolvent form (`s = 1`) from declarative field specs.
    pub fn from_specs(
        lambda: f64,
        dims: usize,
        sigma: &'a DiffusionSpec,
        b: &'a VectorFieldSpec,
        f: &'a ScalarFieldSpec,
        domain_radius: f64,
        h: f64,
    ) -> Self {
        EllipticProblem {
            lambda,
            a_scale: 1.0,
            a: a_from_sigma(sigma, dims),
            b: Box::new(move |x, out| b.eval(x, out)),
            f: Box::new(move |x| f.eval(x)),
            domain_radius,
            h,
            dims,
            lambda_threshold: None,
        }
    }

    /// Intervals per axis.
    pub fn intervals(&self) -> Result<usize> {
        if !(self.lambda > 0.0) {
            return Err(Error::param("lambda must be positive"));
        }
        if self.dims == 0 || self.dims > 2 {
            return Err(Error::param("elliptic solver supports 1 or 2 dimensions"));
        }
        if !(self.h > 0.0 && self.domain_radius > 0.0) {
            return Err(Error::param("need h > 0 and domain_radius > 0"));
        }
        let q = 2.0 * self.domain_radius / self.h;
        let n = q.round();
        if (q - n).abs() > 1e-9 * q || n < 2.0 {
            return Err(Error::param(format!(
                "domain width {} is not a whole number of steps h = {}",
                2.0 * self.domain_radius,
                self.h
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub u: GridFunction,
    pub residual: f64,
    pub iterations: usize,
    /// Nodes where the convection term was upwinded.
    pub upwind_nodes: usize,
    pub below_threshold: bool,
}

struct Row {
    entries: Vec<(usize, f64)>,
    rhs: f64,
    upwind: bool,
}

/// Solves the discretised problem.
pub fn solve(problem: &EllipticProblem<'_>) -> Result<Solution> {
    let n = problem.intervals()?;
    let d = problem.dims;
    let h = problem.h;
    let origin = -problem.domain_radius;
    let mut u = GridFunction::zeros(d, n, h, origin);
    let m = n - 1; // interior nodes per axis
    let unknowns = m.pow(d as u32);
    let interior = |k: usize| -> Vec<usize> {
        match d {
            1 => vec![k + 1],
            _ => vec![k / m + 1, k % m + 1],
        }
    };
    let unknown_of = |idx: &[usize]| -> Option<usize> {
        if idx.iter().any(|&i| i == 0 || i >= n) {
            return None;
        }
        Some(match d {
            1 => idx[0] - 1,
            _ => (idx[0] - 1) * m + (idx[1] - 1),
        })
    };
    let rows: Vec<Result<Row>> = (0..unknowns)
        .into_par_iter()
        .map(|k| {
            let idx = interior(k);
            let x: Vec<f64> = idx.iter().map(|&i| origin + i as f64 * h).collect();
            let mut a = vec![0.0; d * d];
            (problem.a)(&x, &mut a);
            a.iter_mut().for_each(|v| *v *= problem.a_scale);
            let min_eig = match d {
                1 => a[0],
                _ => {
                    let tr = a[0] + a[3];
                    let det = a[0] * a[3] - a[1] * a[2];
                    0.5 * (tr - ((a[0] - a[3]).powi(2) + 4.0 * a[1] * a[2]).max(0.0).sqrt()).min(if det > 0.0 { f64::INFINITY } else { 0.0 })
                }
            };
            if !(min_eig > 0.0) || a.iter().any(|v| !v.is_finite()) {
                return Err(Error::Indefinite { point: x });
            }
            let mut b = vec![0.0; d];
            (problem.b)(&x, &mut b);
            let f = (problem.f)(&x);
            if let Some(bad) = b.iter().copied().chain(std::iter::once(f)).find(|v| !v.is_finite()) {
                return Err(Error::NonFinite { point: x, value: bad });
            }
            let mut entries: Vec<(Vec<usize>, f64)> = vec![(idx.clone(), problem.lambda)];
            let shifted = |da: &[isize], w: f64, entries: &mut Vec<(Vec<usize>, f64)>| {
                let j: Vec<usize> = idx.iter().zip(da).map(|(&i, &s)| (i as isize + s) as usize).collect();
                entries.push((j, w));
            };
            let h2 = h * h;
            let mut upwind = false;
            for ax in 0..d {
                let mut e = vec![0isize; d];
                let aii = a[ax * d + ax];
                shifted(&e, 2.0 * aii / h2, &mut entries);
                e[ax] = -1;
                shifted(&e, -aii / h2, &mut entries);
                e[ax] = 1;
                shifted(&e, -aii / h2, &mut entries);
                e[ax] = 0;
                let bi = b[ax];
                let peclet = bi.abs() * h / (2.0 * min_eig);
                if peclet > 1.0 {
                    upwind = true;
                    if bi > 0.0 {
                        shifted(&e, bi / h, &mut entries);
                        e[ax] = -1;
                        shifted(&e, -bi / h, &mut entries);
                    } else {
                        e[ax] = 1;
                        shifted(&e, bi / h, &mut entries);
                        e[ax] = 0;
                        shifted(&e, -bi / h, &mut entries);
                    }
                } else {
                    e[ax] = 1;
                    shifted(&e, bi / (2.0 * h), &mut entries);
                    e[ax] = -1;
                    shifted(&e, -bi / (2.0 * h), &mut entries);
                }
            }
            if d == 2 {
                let c = -(a[1] + a[2]) / (4.0 * h2);
                if c != 0.0 {
                    shifted(&[1, 1], c, &mut entries);
                    shifted(&[-1, -1], c, &mut entries);
                    shifted(&[1, -1], -c, &mut entries);
                    shifted(&[-1, 1], -c, &mut entries);
                }
            }
            let entries = entries
                .into_iter()
                .filter_map(|(j, w)| unknown_of(&j).map(|c| (c, w)))
                .collect();
            Ok(Row { entries, rhs: f, upwind })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let upwind_nodes = rows.iter().filter(|r| r.upwind).count();
    let rhs: Vec<f64> = rows.iter().map(|r| r.rhs).collect();
    let mat = sparse::Csr::from_rows(rows.into_iter().map(|r| r.entries).collect());
    let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (x, iterations) = if bnorm == 0.0 {
        (vec![0.0; unknowns], 0)
    } else if d == 1 {
        let mut lo = vec![0.0; unknowns];
        let mut di = vec![0.0; unknowns];
        let mut up = vec![0.0; unknowns];
        for i in 0..unknowns {
            for k in mat.row_ptr[i]..mat.row_ptr[i + 1] {
                let c = mat.cols[k];
                if c + 1 == i {
                    lo[i] = mat.vals[k];
                } else if c == i {
                    di[i] = mat.vals[k];
                } else {
                    up[i] = mat.vals[k];
                }
            }
        }
        (sparse::solve_tridiagonal(&lo, &di, &up, &rhs)?, 1)
    } else {
        let mut x = vec![0.0; unknowns];
        let info = sparse::bicgstab(&mat, &rhs, &mut x, RESIDUAL_TOL * 0.1, ITERATION_BUDGET)?;
        (x, info.iterations)
    };
    let residual = if bnorm == 0.0 {
        0.0
    } else {
        sparse::true_residual(&mat, &rhs, &x) / bnorm
    };
    if residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence {
            iterations,
            residual,
            history: vec![residual],
        });
    }
    for (k, v) in x.into_iter().enumerate() {
        let idx = interior(k);
        let flat = u.flat(&idx);
        u.values[flat] = v;
    }
    Ok(Solution {
        u,
        residual,
        iterations,
        upwind_nodes,
        below_threshold: problem.lambda_threshold.is_some_and(|t| problem.lambda < t),
    })
}
